import pytest

from bdm.algebra import (
    compose_refinements,
    FOUR,
    FiniteAlgebra,
    TWO,
    algebra_over,
    find_isomorphism_over,
    four_power,
    identity_refinement,
    twist_product,
)
from bdm.errors import CapExceeded, InconsistentTripleError, TrivialTripleError
from bdm.oracle import all_realizations_in, phi_environment, phi_formula
from bdm.solver import (
    CASE1_ENTRIES,
    Caps,
    Triple,
    case1_witness,
    count_sigma_consistent,
    decide,
    diagonal_refinement,
    element_in_power,
    holds_phi,
    in_acl,
    is_sigma_consistent,
    is_trivial,
    realizations,
    refine_triple,
    sigma_consistent_triples,
    triple_of_element,
    trivial_realizer,
    witness_abstract,
    witness_via_four_power,
)
from bdm.terms import eval_formula, parse_formula

from corpus import all_bases


def T(alg, i1, i2, i3):
    return Triple(alg, frozenset(i1), frozenset(i2), frozenset(i3))


# ---------------------------------------------------------------------------
# consistency

def test_consistency_examples():
    assert is_sigma_consistent(T(FOUR, {1, 2}, {1, 2}, ()))
    assert not is_sigma_consistent(T(FOUR, {1, 2}, {1, 2}, {1, 2}))
    assert not is_sigma_consistent(T(FOUR, (), {1}, ()))


def test_consistent_triple_enumeration():
    ts = sigma_consistent_triples(TWO)
    assert len(ts) == 7 == count_sigma_consistent(TWO)
    assert all(is_sigma_consistent(t) for t in ts)
    # excluded pattern is the all-ones triple
    assert T(TWO, {1}, {1}, {1}) not in ts
    # lexicographic bitmask order
    masks = [
        tuple(sum(1 << (i - 1) for i in s) for s in t.sets()) for t in ts
    ]
    assert masks == sorted(masks)
    assert len(sigma_consistent_triples(FOUR)) == 15
    assert len(sigma_consistent_triples(FiniteAlgebra(2, (1, 2)))) == 49


def test_consistent_triple_cap():
    with pytest.raises(CapExceeded):
        sigma_consistent_triples(FiniteAlgebra(2, (1, 2)), max_count=10)


# ---------------------------------------------------------------------------
# types of elements

def test_triple_of_element_examples():
    _, r = twist_product(TWO)
    assert triple_of_element(r, FOUR.atom(1)) == T(TWO, (), {1}, {1})

    rid = identity_refinement(FOUR)
    assert triple_of_element(rid, FOUR.zero) == T(FOUR, {1, 2}, {1, 2}, ())
    assert triple_of_element(rid, FOUR.atom(1)) == T(FOUR, {2}, {1, 2}, {1, 2})


def test_holds_phi_examples():
    rid = identity_refinement(FOUR)
    assert holds_phi(rid, T(FOUR, {1, 2}, {1, 2}, ()), FOUR.zero)
    diag = diagonal_refinement(2)
    one_zero = element_in_power(2, ("1", "0"))
    assert holds_phi(diag, T(FOUR, {1, 2}, (), ()), one_zero)
    assert not holds_phi(rid, T(FOUR, {1}, {1, 2}, {1, 2}), FOUR.atom(1))
    assert holds_phi(rid, T(FOUR, {1}, {1, 2}, {1, 2}), FOUR.atom(2))


def test_mutual_exclusivity():
    # an element's zero pattern matches exactly one triple
    _, r = twist_product(FOUR)
    for u in r.target.elements():
        t = triple_of_element(r, u)
        matches = [
            s for s in sigma_consistent_triples(FOUR) if holds_phi(r, s, u)
        ]
        assert matches == [t]


# ---------------------------------------------------------------------------
# witnesses

def test_witness_abstract_square_root_of_dmneg():
    t = T(TWO, (), {1}, {1})
    w = witness_abstract(t)
    assert w.extension == FOUR
    assert w.embedding.cell(1) == {1, 2}
    assert w.element == FOUR.atom(1)
    assert holds_phi(w.embedding, t, w.element)


def test_witness_abstract_zero_pattern():
    t = T(FOUR, {1, 2}, {1, 2}, ())
    w = witness_abstract(t)
    assert w.extension == FOUR  # one atom of kind x'.x~ per base atom
    assert w.element == w.extension.zero
    assert holds_phi(w.embedding, t, w.element)


def test_witness_abstract_rejects_inconsistent():
    with pytest.raises(InconsistentTripleError):
        witness_abstract(T(TWO, {1}, {1}, {1}))


def test_witness_via_four_power_examples():
    w = witness_via_four_power(T(FOUR, {1}, {1, 2}, {1, 2}))
    assert w.extension == FOUR and w.element == FOUR.atom(2)
    assert w.embedding.is_identity

    t = T(FOUR, (), (), {1, 2})
    w = witness_via_four_power(t)
    assert w.extension == four_power(3)
    assert w.element == element_in_power(3, ("a", "b", "1"))
    assert holds_phi(w.embedding, t, w.element)

    t = T(FOUR, (), (), ())
    w = witness_via_four_power(t)
    assert w.extension == four_power(4)
    assert w.element == element_in_power(4, ("a", "b", "0", "1"))
    assert holds_phi(w.embedding, t, w.element)


def test_witness_via_four_power_rejects_inconsistent():
    with pytest.raises(InconsistentTripleError):
        witness_via_four_power(T(FOUR, {1, 2}, {1, 2}, {1, 2}))


def test_case1_table_against_oracle():
    # every tabulated solution, including the mirrored block, is the stated
    # solution in the stated power
    for entry in CASE1_ENTRIES:
        w = case1_witness(entry)
        t = Triple(FOUR, entry.i1, entry.i2, entry.i3)
        assert holds_phi(w.embedding, t, w.element)
        assert w.element in all_realizations_in(w.embedding, t)
    assert sum(e.mirrored for e in CASE1_ENTRIES) == 4
    assert len(CASE1_ENTRIES) == 15


@pytest.mark.parametrize("alg", all_bases(2), ids=lambda a: f"n{a.n}-{a.sigma}")
def test_witness_soundness_small(alg):
    for t in sigma_consistent_triples(alg):
        for build in (witness_abstract, witness_via_four_power):
            w = build(t)
            assert holds_phi(w.embedding, t, w.element)


def test_constructor_agreement_over_two():
    for t in sigma_consistent_triples(TWO):
        w1 = witness_abstract(t)
        w2 = witness_via_four_power(t)
        _, _, r1 = algebra_over(w1.embedding, [w1.element])
        _, _, r2 = algebra_over(w2.embedding, [w2.element])
        assert find_isomorphism_over(r1, r2) is not None


# ---------------------------------------------------------------------------
# refinement of triples

def test_refine_triple_examples():
    _, r = twist_product(TWO)
    assert refine_triple(r, T(TWO, {1}, {1}, {1})) == T(FOUR, {1, 2}, {1, 2}, {1, 2})
    rid = identity_refinement(FOUR)
    t = T(FOUR, {1}, (), {1, 2})
    assert refine_triple(rid, t) == t

    t = T(TWO, (), {1}, {1})
    refined = refine_triple(r, t)
    assert refined == T(FOUR, (), {1, 2}, {1, 2})
    # any element realizing the refined triple (in an extension of the
    # middle algebra) realizes the original along the composite
    w = witness_abstract(refined)
    composite = compose_refinements(r, w.embedding)
    assert holds_phi(composite, t, w.element)
    for u in all_realizations_in(w.embedding, refined):
        assert holds_phi(composite, t, u)


def test_refine_preserves_consistency():
    _, r = twist_product(FiniteAlgebra(2, (1, 2)))
    for t in sigma_consistent_triples(FiniteAlgebra(2, (1, 2))):
        assert is_sigma_consistent(refine_triple(r, t))


# ---------------------------------------------------------------------------
# triviality

def test_is_trivial_examples():
    got = is_trivial(T(FOUR, {2}, {1, 2}, {1, 2}))
    assert got == {1}
    assert trivial_realizer(T(FOUR, {2}, {1, 2}, {1, 2})) == FOUR.atom(1)

    assert is_trivial(T(TWO, (), {1}, {1})) is None

    # the type of the top element
    assert is_trivial(T(TWO, {1}, (), {1})) == {1}
    assert trivial_realizer(T(TWO, {1}, (), {1})) == TWO.one


def test_trivial_matches_type_of_base_elements():
    for alg in all_bases(3):
        rid = identity_refinement(alg)
        for u in alg.elements():
            t = triple_of_element(rid, u)
            assert is_trivial(t) == u.atoms


def test_trivial_unique_realizer():
    t = T(FOUR, {2}, {1, 2}, {1, 2})
    _, r = twist_product(FOUR)
    refined = refine_triple(r, t)
    # in the extension, only the image of the base realizer works
    realizers = all_realizations_in(r, t)
    assert realizers == [r.map_element(FOUR.atom(1))]


# ---------------------------------------------------------------------------
# realizations

def test_realizations_two_square_roots():
    t = T(TWO, (), {1}, {1})
    ext, emb, elems = realizations(t, 2)
    assert len(elems) == len(set(elems)) == 2
    for e in elems:
        assert holds_phi(emb, t, e)


def test_realizations_rejects_trivial():
    with pytest.raises(TrivialTripleError):
        realizations(T(TWO, {1}, (), {1}), 1)


def test_realizations_rejects_inconsistent():
    with pytest.raises(InconsistentTripleError):
        realizations(T(TWO, {1}, {1}, {1}), 1)


def test_realizations_accepts_nontrivial_i3_empty():
    # the type demanding x.x~ = 0 with x.x* and x'.x~ both nonzero is not
    # the type of any base element
    t = T(TWO, {1}, (), ())
    assert is_trivial(t) is None
    ext, emb, elems = realizations(t, 3)
    assert len(set(elems)) == 3
    for e in elems:
        assert holds_phi(emb, t, e)


def test_realizations_three_over_four():
    t = T(FOUR, (), (), ())
    ext, emb, elems = realizations(t, 3)
    assert len(set(elems)) == 3
    for e in elems:
        assert holds_phi(emb, t, e)


# ---------------------------------------------------------------------------
# algebraic closure

def test_in_acl_examples():
    _, r = twist_product(TWO)
    assert not in_acl(r, FOUR.atom(1))
    assert in_acl(r, FOUR.one)
    _, r2 = twist_product(FOUR)
    assert in_acl(r2, r2.map_element(FOUR.atom(2)))


def test_in_acl_is_image_membership():
    _, r = twist_product(FOUR)
    image = {r.map_element(x) for x in FOUR.elements()}
    for u in r.target.elements():
        assert in_acl(r, u) == (u in image)


# ---------------------------------------------------------------------------
# decide

CAPS = Caps(max_atoms=64, max_depth=4, max_triples=10**6)


def test_decide_examples():
    assert decide(TWO, parse_formula("exists x. (~x = x & x != 0 & x != 1)"), caps=CAPS)
    assert decide(TWO, parse_formula("forall x. (x + x' = 1)"), caps=CAPS)
    assert not decide(TWO, parse_formula("forall x. (x + ~x = 1)"), caps=CAPS)


def test_decide_with_parameters():
    a = FOUR.atom(1)
    f = parse_formula("exists x. (x . y = 0 & x != 0)")
    assert decide(FOUR, f, {"y": a}, caps=CAPS)
    f = parse_formula("y != 0")
    assert decide(FOUR, f, {"y": a}, caps=CAPS)
    with pytest.raises(ValueError):
        decide(FOUR, parse_formula("y = 0"))


def test_decide_quantifier_free():
    assert decide(FOUR, parse_formula("1 != 0"), caps=CAPS)
    assert not decide(FOUR, parse_formula("1 = 0"), caps=CAPS)


def test_decide_matches_consistency_over_two():
    from bdm.terms import Exists

    for i1 in [frozenset(), frozenset({1})]:
        for i2 in [frozenset(), frozenset({1})]:
            for i3 in [frozenset(), frozenset({1})]:
                t = Triple(TWO, i1, i2, i3)
                sentence = Exists("x", phi_formula(t))
                env = {f"y{i}": TWO.atom(i) for i in TWO.atom_indices}
                assert decide(TWO, sentence, env, CAPS) == is_sigma_consistent(t)


def test_decide_depth_cap():
    f = parse_formula("exists x. (exists y. (exists z. (x . y . z = 0)))")
    with pytest.raises(CapExceeded):
        decide(TWO, f, caps=Caps(max_atoms=64, max_depth=2, max_triples=10**6))


def test_decide_atom_cap_distinct_from_false():
    f = parse_formula("exists x. (x != x)")
    # generous caps: plain false
    assert decide(TWO, f, caps=CAPS) is False
    # starved caps: error, not false
    with pytest.raises(CapExceeded):
        decide(TWO, f, caps=Caps(max_atoms=1, max_depth=4, max_triples=10**6))


def test_decide_model_completeness_spot():
    # moving the parameters along an embedding keeps every answer
    _, r = twist_product(TWO)
    for text in [
        "exists x. (~x = x & x != 0 & x != 1)",
        "forall x. (x + ~x = 1)",
        "exists x. (x . y != 0 & x . ~y = 0)",
    ]:
        f = parse_formula(text)
        env = {"y": TWO.one} if "y" in text else {}
        big_env = {k: r.map_element(v) for k, v in env.items()}
        assert decide(TWO, f, env, CAPS) == decide(FOUR, f, big_env, CAPS)


def test_phi_formula_matches_holds_phi():
    _, r = twist_product(TWO)
    for t in sigma_consistent_triples(TWO):
        f = phi_formula(t)
        for u in FOUR.elements():
            assert eval_formula(FOUR, f, phi_environment(r, u)) == holds_phi(r, t, u)


def test_translate_preserves_decisions():
    from bdm.terms import formula_in_dm_signature, translate_dm

    texts = [
        "exists x. (~x = x & x != 0 & x != 1)",
        "forall x. (x + x' = 1)",
        "forall x. (x + ~x = 1)",
        "exists x. (x . x* != 0 & x != 1)",
        "exists x. (x' . ~x = 0 & x != 0)",
        "forall x. (~(x') = (~x)')",
    ]
    for text in texts:
        f = parse_formula(text)
        g = translate_dm(f, to="dm")
        assert formula_in_dm_signature(g)
        assert decide(TWO, f, caps=CAPS) == decide(TWO, g, caps=CAPS), text
