"""One-variable types over finite Boole-De Morgan algebras and the decision
procedure for their existentially closed models.

The type of an element u over a base embedded by a refinement r is the
triple (I1, I2, I3) of base atoms killing, respectively, u.u~, u.u* and
u'.u~.  A triple is realizable in some extension exactly when it is
sigma-consistent:

    (i)  sigma(I2) = I2 and sigma(I3) = I3,
    (ii) (I1 & I2 & I3) does not meet its own sigma image.

Two independent constructions produce a realizer for every consistent
triple: witness_abstract builds the one-generated extension directly from
the presence pattern of the four products u.u~, u.u*, u'.u~, u'.u*, and
witness_via_four_power pushes the base into a power of the four-element
algebra and assembles a solution coordinatewise from a fixed lookup table.
Each route validates the other; tests compare them up to isomorphism over
the base.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Optional

from .algebra import (
    AtomRefinement,
    Element,
    FOUR,
    FiniteAlgebra,
    compose_refinements,
    embed_into_four_power,
    four_power,
    generated_subalgebra,
    identity_refinement,
    is_four_power_shaped,
)
from .errors import CapExceeded, InconsistentTripleError, TrivialTripleError
from .terms import (
    And,
    Exists,
    ForAll,
    Formula,
    Implies,
    Not,
    Or,
    eval_formula,
    free_vars,
)


@dataclass(frozen=True)
class Triple:
    """A candidate one-variable type over an algebra: three atom subsets."""

    algebra: FiniteAlgebra
    i1: frozenset[int]
    i2: frozenset[int]
    i3: frozenset[int]

    def __post_init__(self):
        full = self.algebra.full_set
        for name in ("i1", "i2", "i3"):
            value = getattr(self, name)
            if not isinstance(value, frozenset):
                object.__setattr__(self, name, frozenset(value))
            if not getattr(self, name) <= full:
                raise ValueError(f"{name} is not a subset of the atoms")

    def __repr__(self):
        def s(x):
            return "{" + ",".join(map(str, sorted(x))) + "}"

        return f"Triple(I1={s(self.i1)} I2={s(self.i2)} I3={s(self.i3)} over n={self.algebra.n})"

    def sets(self) -> tuple[frozenset[int], frozenset[int], frozenset[int]]:
        return (self.i1, self.i2, self.i3)


@dataclass(frozen=True)
class Witness:
    """An extension of the base with a distinguished element realizing a
    triple along the embedding."""

    base: FiniteAlgebra
    extension: FiniteAlgebra
    embedding: AtomRefinement
    element: Element


@dataclass(frozen=True)
class Caps:
    """Resource budgets: atoms per intermediate algebra, quantifier nesting,
    and enumerated triples per algebra."""

    max_atoms: int = 12
    max_depth: int = 4
    max_triples: int = 20000


DEFAULT_CAPS = Caps()


def is_sigma_consistent(t: Triple) -> bool:
    alg = t.algebra
    if alg.sigma_set(t.i2) != t.i2 or alg.sigma_set(t.i3) != t.i3:
        return False
    core = t.i1 & t.i2 & t.i3
    return not (core & alg.sigma_set(core))


def triple_of_element(r: AtomRefinement, u: Element) -> Triple:
    """The type of u over the source of r: which source atoms annihilate
    u.u~, u.u* and u'.u~."""
    if u.algebra != r.target:
        raise ValueError("element does not live in the refinement target")
    ubar = u.dmneg()
    uneg = u.bneg()
    p1 = u.meet(ubar).atoms
    p2 = u.meet(u.star()).atoms
    p3 = uneg.meet(ubar).atoms
    i1, i2, i3 = set(), set(), set()
    for i in r.source.atom_indices:
        cell = r.cell(i)
        if not cell & p1:
            i1.add(i)
        if not cell & p2:
            i2.add(i)
        if not cell & p3:
            i3.add(i)
    return Triple(r.source, frozenset(i1), frozenset(i2), frozenset(i3))


def holds_phi(r: AtomRefinement, t: Triple, u: Element) -> bool:
    """Whether u realizes exactly the zero pattern demanded by t."""
    if t.algebra != r.source:
        raise ValueError("triple is not over the refinement source")
    return triple_of_element(r, u) == t


def refine_triple(r: AtomRefinement, t: Triple) -> Triple:
    """Transport a triple along a refinement by replacing each atom with its
    cell.  Consistency is preserved, and any element realizing the refined
    triple realizes the original one."""
    if t.algebra != r.source:
        raise ValueError("triple is not over the refinement source")
    return Triple(
        r.target, r.map_atoms(t.i1), r.map_atoms(t.i2), r.map_atoms(t.i3)
    )


# ---------------------------------------------------------------------------
# Enumeration of consistent triples

def count_sigma_consistent(alg: FiniteAlgebra) -> int:
    """7 options per fixed atom and 15 per two-cycle of sigma."""
    fixed = sum(1 for o in alg.sigma_orbits() if len(o) == 1)
    cycles = len(alg.sigma_orbits()) - fixed
    return 7**fixed * 15**cycles


@lru_cache(maxsize=64)
def _consistent_masks(n: int, sigma: tuple[int, ...]) -> tuple[tuple[int, int, int], ...]:
    alg = FiniteAlgebra(n, sigma)
    per_orbit: list[list[tuple[int, int, int]]] = []
    for orbit in alg.sigma_orbits():
        options = []
        if len(orbit) == 1:
            bit = 1 << (orbit[0] - 1)
            for b1, b2, b3 in itertools.product((0, 1), repeat=3):
                if b1 and b2 and b3:
                    continue
                options.append((b1 * bit, b2 * bit, b3 * bit))
        else:
            bi, bj = (1 << (orbit[0] - 1)), (1 << (orbit[1] - 1))
            both = bi | bj
            for b1i, b1j, b2, b3 in itertools.product((0, 1), repeat=4):
                if b1i and b1j and b2 and b3:
                    continue
                options.append((b1i * bi | b1j * bj, b2 * both, b3 * both))
        per_orbit.append(options)
    triples = [
        (
            _or_all(c, 0),
            _or_all(c, 1),
            _or_all(c, 2),
        )
        for c in itertools.product(*per_orbit)
    ]
    triples.sort()
    return tuple(triples)


def _or_all(combo, k):
    out = 0
    for part in combo:
        out |= part[k]
    return out


def _mask_to_set(mask: int) -> frozenset[int]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def sigma_consistent_triples(
    alg: FiniteAlgebra, max_count: Optional[int] = None
) -> list[Triple]:
    """All sigma-consistent triples over alg, ordered lexicographically by
    the bitmasks of (I1, I2, I3) with atom i on bit i-1."""
    total = count_sigma_consistent(alg)
    if max_count is not None and total > max_count:
        raise CapExceeded(
            f"{total} consistent triples over {alg.n} atoms exceed the cap of {max_count}"
        )
    return [
        Triple(alg, _mask_to_set(m1), _mask_to_set(m2), _mask_to_set(m3))
        for m1, m2, m3 in _consistent_masks(alg.n, alg.sigma)
    ]


# ---------------------------------------------------------------------------
# Abstract witness construction

# The four products of a fresh element x that partition the top of the
# one-generated extension; star swaps the outer two and fixes the middle two.
_KIND_XXBAR, _KIND_XXSTAR, _KIND_NXBAR, _KIND_NXSTAR = range(4)
_KIND_STAR = (_KIND_NXSTAR, _KIND_XXSTAR, _KIND_NXBAR, _KIND_XXBAR)


@lru_cache(maxsize=None)
def witness_abstract(t: Triple) -> Witness:
    """Build the one-generated extension realizing a consistent triple.

    For each base atom i the extension splits atom i into the nonzero ones
    among i.x.x~, i.x.x*, i.x'.x~, i.x'.x*; the triple dictates which are
    nonzero (the last via: i.x'.x* = 0 iff sigma(i) in I1).  Consistency
    makes every cell nonempty, and sigma acts by (i, kind) |->
    (sigma(i), swapped kind).  The witness element collects the x.x~ and
    x.x* parts.
    """
    if not is_sigma_consistent(t):
        raise InconsistentTripleError(f"{t!r} violates the consistency conditions")
    alg = t.algebra

    def present(i: int, kind: int) -> bool:
        if kind == _KIND_XXBAR:
            return i not in t.i1
        if kind == _KIND_XXSTAR:
            return i not in t.i2
        if kind == _KIND_NXBAR:
            return i not in t.i3
        return alg.sigma_of(i) not in t.i1

    index: dict[tuple[int, int], int] = {}
    for i in alg.atom_indices:
        for kind in range(4):
            if present(i, kind):
                index[(i, kind)] = len(index) + 1
    sigma = [0] * len(index)
    for (i, kind), j in index.items():
        sigma[j - 1] = index[(alg.sigma_of(i), _KIND_STAR[kind])]
    ext = FiniteAlgebra(len(index), tuple(sigma))
    cells = tuple(
        frozenset(index[(i, kind)] for kind in range(4) if (i, kind) in index)
        for i in alg.atom_indices
    )
    element = Element(
        ext,
        frozenset(
            j for (i, kind), j in index.items() if kind in (_KIND_XXBAR, _KIND_XXSTAR)
        ),
    )
    return Witness(alg, ext, AtomRefinement(alg, ext, cells), element)


# ---------------------------------------------------------------------------
# Witness construction through powers of the four-element algebra

@dataclass(frozen=True)
class Case1Entry:
    """A solution of a consistent triple over the four-element algebra,
    embedded diagonally into the k-th power; coordinates use 0/a/b/1.

    The mirrored entries are obtained from the I1={1} block by applying the
    star automorphism (swapping a and b and the two atoms), and are checked
    against the exhaustive oracle in the test suite.
    """

    i1: frozenset[int]
    i2: frozenset[int]
    i3: frozenset[int]
    coords: tuple[str, ...]
    mirrored: bool = False


def _e(*atoms: int) -> frozenset[int]:
    return frozenset(atoms)


CASE1_ENTRIES: tuple[Case1Entry, ...] = (
    Case1Entry(_e(1, 2), _e(1, 2), _e(), ("0",)),
    Case1Entry(_e(1, 2), _e(), _e(), ("1", "0")),
    Case1Entry(_e(1, 2), _e(), _e(1, 2), ("1",)),
    Case1Entry(_e(1), _e(), _e(), ("b", "1", "0")),
    Case1Entry(_e(1), _e(1, 2), _e(1, 2), ("b",)),
    Case1Entry(_e(1), _e(1, 2), _e(), ("b", "0")),
    Case1Entry(_e(1), _e(), _e(1, 2), ("b", "1")),
    Case1Entry(_e(2), _e(), _e(), ("a", "1", "0"), mirrored=True),
    Case1Entry(_e(2), _e(1, 2), _e(1, 2), ("a",), mirrored=True),
    Case1Entry(_e(2), _e(1, 2), _e(), ("a", "0"), mirrored=True),
    Case1Entry(_e(2), _e(), _e(1, 2), ("a", "1"), mirrored=True),
    Case1Entry(_e(), _e(), _e(), ("a", "b", "0", "1")),
    Case1Entry(_e(), _e(), _e(1, 2), ("a", "b", "1")),
    Case1Entry(_e(), _e(1, 2), _e(), ("a", "b", "0")),
    Case1Entry(_e(), _e(1, 2), _e(1, 2), ("a", "b")),
)

_CASE1_TABLE = {(e.i1, e.i2, e.i3): e for e in CASE1_ENTRIES}


def case1_entry(
    i1: frozenset[int], i2: frozenset[int], i3: frozenset[int]
) -> Case1Entry:
    """The tabulated solution for a consistent triple over two atoms with
    star swapping them."""
    try:
        return _CASE1_TABLE[(frozenset(i1), frozenset(i2), frozenset(i3))]
    except KeyError:
        raise InconsistentTripleError(
            "only sigma-consistent triples have tabulated solutions"
        ) from None

_COORD_ATOMS = {"0": (), "a": ("a",), "b": ("b",), "1": ("a", "b")}


def element_in_power(k: int, coords: Iterable[str]) -> Element:
    """The element of four_power(k) with the given coordinates."""
    coords = tuple(coords)
    if len(coords) != k:
        raise ValueError("one coordinate per factor is required")
    atoms = set()
    for j, c in enumerate(coords, start=1):
        for side in _COORD_ATOMS[c]:
            atoms.add(j if side == "a" else k + j)
    return Element(four_power(k), frozenset(atoms))


def diagonal_refinement(k: int) -> AtomRefinement:
    """The diagonal embedding of the four-element algebra into its k-th
    power: a goes to (a,...,a) and b to (b,...,b)."""
    ext = four_power(k)
    cells = (frozenset(range(1, k + 1)), frozenset(range(k + 1, 2 * k + 1)))
    return AtomRefinement(FOUR, ext, cells)


def case1_witness(entry: Case1Entry) -> Witness:
    """The tabulated solution as a witness over the four-element algebra."""
    k = len(entry.coords)
    return Witness(
        FOUR,
        four_power(k),
        diagonal_refinement(k),
        element_in_power(k, entry.coords),
    )


@lru_cache(maxsize=None)
def witness_via_four_power(t: Triple) -> Witness:
    """Realize a consistent triple inside a power of the four-element
    algebra.

    The base goes into four_power(m) (identity when it already has that
    layout), the triple is refined along the embedding, split into one
    sub-triple per coordinate, and each sub-triple is solved by the lookup
    table inside a small diagonal power; the solutions combine blockwise.
    """
    if not is_sigma_consistent(t):
        raise InconsistentTripleError(f"{t!r} violates the consistency conditions")
    alg = t.algebra
    if is_four_power_shaped(alg):
        m = alg.n // 2
        r1: Optional[AtomRefinement] = None
        refined = t
        power = alg
    else:
        power, r1 = embed_into_four_power(alg)
        m = alg.n
        refined = refine_triple(r1, t)

    entries = []
    for i in range(1, m + 1):
        key = (
            frozenset(c for c, j in ((1, i), (2, m + i)) if j in refined.i1),
            frozenset(c for c, j in ((1, i), (2, m + i)) if j in refined.i2),
            frozenset(c for c, j in ((1, i), (2, m + i)) if j in refined.i3),
        )
        entries.append(_CASE1_TABLE[key])

    widths = [len(e.coords) for e in entries]
    total = sum(widths)
    ext = four_power(total)
    cells: list[frozenset[int]] = [frozenset()] * (2 * m)
    atoms: set[int] = set()
    offset = 0
    for i, entry in enumerate(entries, start=1):
        k = widths[i - 1]
        cells[i - 1] = frozenset(range(offset + 1, offset + k + 1))
        cells[m + i - 1] = frozenset(range(total + offset + 1, total + offset + k + 1))
        for j, c in enumerate(entry.coords, start=1):
            for side in _COORD_ATOMS[c]:
                atoms.add(offset + j if side == "a" else total + offset + j)
        offset += k
    block = AtomRefinement(power, ext, tuple(cells))
    embedding = block if r1 is None else compose_refinements(r1, block)
    return Witness(alg, ext, embedding, Element(ext, frozenset(atoms)))


# ---------------------------------------------------------------------------
# Triviality and closures

def is_trivial(t: Triple) -> Optional[frozenset[int]]:
    """When t is the type of a base element, return the atom set I of that
    element (the unique realizer is then the join of the atoms in I);
    otherwise None.

    The only possible I is (complement of I1) union (complement of I2); the
    three defining equalities are then verified outright.
    """
    alg = t.algebra
    full = alg.full_set
    cand = (full - t.i1) | (full - t.i2)
    sigma_cand = alg.sigma_set(cand)
    ok = (
        t.i1 == (full - cand) | sigma_cand
        and t.i2 == full - (cand & sigma_cand)
        and t.i3 == cand | sigma_cand
    )
    return frozenset(cand) if ok else None


def trivial_realizer(t: Triple) -> Optional[Element]:
    atoms = is_trivial(t)
    return None if atoms is None else Element(t.algebra, atoms)


def in_acl(r: AtomRefinement, w: Element) -> bool:
    """Whether w is algebraic over the source of r; this happens exactly
    when w already lies in the image of the source."""
    return is_trivial(triple_of_element(r, w)) is not None


def realizations(
    t: Triple, k: int
) -> tuple[FiniteAlgebra, AtomRefinement, list[Element]]:
    """k pairwise distinct realizers of a consistent non-trivial triple in a
    common extension.

    Each round adjoins a fresh witness for the current refinement of t; the
    refined triple stays non-trivial, so the new witness falls outside the
    previous algebra and in particular differs from the earlier realizers.
    """
    if k < 1:
        raise ValueError("at least one realizer must be requested")
    if not is_sigma_consistent(t):
        raise InconsistentTripleError(f"{t!r} violates the consistency conditions")
    if is_trivial(t) is not None:
        raise TrivialTripleError(
            f"{t!r} has a unique realizer inside the base algebra"
        )
    acc = identity_refinement(t.algebra)
    found: list[Element] = []
    for _ in range(k):
        w = witness_abstract(refine_triple(acc, t))
        found = [w.embedding.map_element(e) for e in found]
        found.append(w.element)
        acc = compose_refinements(acc, w.embedding)
    return acc.target, acc, found


# ---------------------------------------------------------------------------
# Decision procedure

def decide(
    params: FiniteAlgebra,
    f: Formula,
    env: Optional[Mapping[str, Element]] = None,
    caps: Caps = DEFAULT_CAPS,
) -> bool:
    """Truth value of f in every existentially closed extension of params.

    The answer does not depend on the chosen extension: the theory of these
    models is complete once the parameters are fixed.  Quantifiers are
    resolved by enumerating consistent triples over the subalgebra generated
    by the values of the variables still in play, building the abstract
    witness for each, and recursing with the parameters moved along the
    witness embedding; universal quantifiers reduce to negated existentials.
    Exhausted budgets raise CapExceeded rather than defaulting to false.
    """
    env = dict(env) if env else {}
    missing = free_vars(f) - set(env)
    if missing:
        raise ValueError(f"unbound free variables: {', '.join(sorted(missing))}")
    for name, value in env.items():
        if value.algebra != params:
            raise ValueError(f"variable {name!r} is bound outside the parameter algebra")
    return _decide(params, f, env, caps, depth=0)


def _decide(alg, f, env, caps, depth):
    if isinstance(f, And):
        return _decide(alg, f.left, env, caps, depth) and _decide(alg, f.right, env, caps, depth)
    if isinstance(f, Or):
        return _decide(alg, f.left, env, caps, depth) or _decide(alg, f.right, env, caps, depth)
    if isinstance(f, Not):
        return not _decide(alg, f.arg, env, caps, depth)
    if isinstance(f, Implies):
        return (not _decide(alg, f.left, env, caps, depth)) or _decide(
            alg, f.right, env, caps, depth
        )
    if isinstance(f, ForAll):
        return not _decide(alg, Exists(f.var, Not(f.body)), env, caps, depth)
    if isinstance(f, Exists):
        if depth >= caps.max_depth:
            raise CapExceeded(f"quantifier depth {caps.max_depth} exhausted")
        relevant = sorted(free_vars(f.body) - {f.var})
        sub, sub_r = generated_subalgebra(alg, [env[name] for name in relevant])
        env_sub = {}
        for name in relevant:
            pre = sub_r.preimage(env[name])
            assert pre is not None  # generators are unions of their own blocks
            env_sub[name] = pre
        for t in sigma_consistent_triples(sub, caps.max_triples):
            w = witness_abstract(t)
            if w.extension.n > caps.max_atoms:
                raise CapExceeded(
                    f"witness extension needs {w.extension.n} atoms, cap is {caps.max_atoms}"
                )
            new_env = {
                name: w.embedding.map_element(value) for name, value in env_sub.items()
            }
            new_env[f.var] = w.element
            if _decide(w.extension, f.body, new_env, caps, depth + 1):
                return True
        return False
    return eval_formula(alg, f, env)
