"""Finite stages of the countable existentially closed model.

A stage over an n-atom base is the power 4^(4n) along the canonical
embedding: the base goes into 4^n, and each coordinate is then spread
diagonally over a block of four.  Width four suffices because every
tabulated one-coordinate solution uses at most four factors, and a block
solution stays exact when padded by repeating one of its coordinates (the
repeat satisfies the same zero conditions and only adds witnesses to the
nonzero ones).  The stage therefore realizes every consistent triple over
the base, with a realizer written down directly rather than searched for.

Chains iterate the stage construction; only the finite stages are ever
materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .algebra import (
    AtomRefinement,
    Element,
    FiniteAlgebra,
    algebra_over,
    compose_refinements,
    embed_into_four_power,
    find_isomorphism_over,
    four_power,
    is_four_power_shaped,
)
from .errors import CapExceeded, NoRealizerError
from .oracle import find_realizer
from .solver import (
    Caps,
    DEFAULT_CAPS,
    Triple,
    case1_entry,
    refine_triple,
    sigma_consistent_triples,
    triple_of_element,
)


@dataclass(frozen=True)
class EcStage:
    """A finite extension realizing every consistent triple over its base,
    with one recorded realizer per triple."""

    base: FiniteAlgebra
    algebra: FiniteAlgebra
    embedding: AtomRefinement
    realizers: tuple[tuple[Triple, Element], ...]

    def realizer(self, t: Triple) -> Element:
        for triple, element in self.realizers:
            if triple == t:
                return element
        raise NoRealizerError(f"stage does not record a realizer for {t!r}")


_SIDES = {"0": (), "a": ("a",), "b": ("b",), "1": ("a", "b")}
_BLOCK = 4  # widest tabulated solution


def ec_stage(alg: FiniteAlgebra, caps: Caps = DEFAULT_CAPS) -> EcStage:
    """Extend alg far enough to realize every consistent triple over it,
    recording one realizer per triple in lexicographic triple order."""
    triples = sigma_consistent_triples(alg, caps.max_triples)
    if is_four_power_shaped(alg):
        m = alg.n // 2
        r1 = None
        power = alg
    else:
        power, r1 = embed_into_four_power(alg)
        m = alg.n
    total = _BLOCK * m
    ext = four_power(total)
    if ext.n > caps.max_atoms:
        raise CapExceeded(
            f"the stage needs {ext.n} atoms, cap is {caps.max_atoms}"
        )
    cells: list[frozenset[int]] = [frozenset()] * (2 * m)
    for i in range(1, m + 1):
        off = _BLOCK * (i - 1)
        cells[i - 1] = frozenset(range(off + 1, off + _BLOCK + 1))
        cells[m + i - 1] = frozenset(range(total + off + 1, total + off + _BLOCK + 1))
    block = AtomRefinement(power, ext, tuple(cells))
    emb = block if r1 is None else compose_refinements(r1, block)

    found: list[tuple[Triple, Element]] = []
    for t in triples:
        refined = t if r1 is None else refine_triple(r1, t)
        atoms: set[int] = set()
        for i in range(1, m + 1):
            key = tuple(
                frozenset(c for c, j in ((1, i), (2, m + i)) if j in part)
                for part in (refined.i1, refined.i2, refined.i3)
            )
            coords = case1_entry(*key).coords
            coords = coords + (coords[0],) * (_BLOCK - len(coords))
            off = _BLOCK * (i - 1)
            for j, c in enumerate(coords, start=1):
                for side in _SIDES[c]:
                    atoms.add(off + j if side == "a" else total + off + j)
        found.append((t, Element(ext, frozenset(atoms))))
    return EcStage(alg, ext, emb, tuple(found))


def build_chain(
    alg: FiniteAlgebra, depth: int, caps: Caps = DEFAULT_CAPS
) -> list[EcStage]:
    """Iterate ec_stage depth times; stage i embeds stage i-1's algebra.

    depth 0 returns the empty chain.  When a budget runs out, the raised
    error carries the 1-based index of the failing stage.
    """
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    stages: list[EcStage] = []
    current = alg
    for i in range(1, depth + 1):
        try:
            stage = ec_stage(current, caps)
        except CapExceeded as e:
            raise CapExceeded(str(e), stage=i) from e
        stages.append(stage)
        current = stage.algebra
    return stages


def find_matching_element(
    stage: Union[EcStage, AtomRefinement],
    rv: AtomRefinement,
    v: Element,
) -> tuple[Element, tuple[int, ...]]:
    """Mirror an element of one extension inside a stage over the same base.

    Given a stage (or a bare refinement) over A0 and an element v of another
    extension of A0, produce u in the stage with the same type over A0 and
    the isomorphism between the subalgebras A0<v> and A0<u> over A0, as an
    atom bijection.  A bare refinement whose target lacks a realizer raises
    NoRealizerError.
    """
    r0 = stage.embedding if isinstance(stage, EcStage) else stage
    if r0.source != rv.source:
        raise ValueError("the stage and the element share no base algebra")
    t = triple_of_element(rv, v)
    if isinstance(stage, EcStage):
        u = stage.realizer(t)
    else:
        u = find_realizer(r0, t)
        if u is None:
            raise NoRealizerError(f"no element of the given algebra realizes {t!r}")
    _, _, base_into_v = algebra_over(rv, [v])
    _, _, base_into_u = algebra_over(r0, [u])
    iso = find_isomorphism_over(base_into_v, base_into_u)
    assert iso is not None  # equal types force equal one-generated shapes
    return u, iso
