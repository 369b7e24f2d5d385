"""Finite Boole-De Morgan algebras and atom-level embeddings between them.

A finite Boole-De Morgan algebra is presented by the pair (n, sigma): its
Boolean skeleton is the powerset of the atom set {1..n}, and sigma is an
involution on the atoms giving the action of the star map x* = (x~)' = (x')~.
From sigma the whole signature is recovered on an atom set a:

    join = union            meet = intersection
    x'   = complement(a)    x*   = sigma(a)       x~ = complement(sigma(a))

Every embedding used here is an AtomRefinement: a sigma-equivariant partition
of the target's atoms into nonempty cells indexed by source atoms.  The
induced element map sends an atom set to the union of its cells and preserves
all five operations together with 0 and 1.

All values are immutable; every operation is a pure function.  Searches that
could return several answers (isomorphisms, generated structure) return the
lexicographically least one, where elements and atom maps are ordered by
their 1-based atom indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional


@dataclass(frozen=True)
class FiniteAlgebra:
    """A finite Boole-De Morgan algebra given by an atom count and the
    involution of the star map on atoms (1-indexed images)."""

    n: int
    sigma: tuple[int, ...]
    name: Optional[str] = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("an algebra needs at least one atom")
        if not isinstance(self.sigma, tuple):
            object.__setattr__(self, "sigma", tuple(self.sigma))
        if len(self.sigma) != self.n:
            raise ValueError(f"sigma must list an image for each of the {self.n} atoms")
        if sorted(self.sigma) != list(range(1, self.n + 1)):
            raise ValueError("sigma is not a permutation of the atoms")
        for i in range(1, self.n + 1):
            if self.sigma[self.sigma[i - 1] - 1] != i:
                raise ValueError("sigma is not an involution")

    def __repr__(self):
        return f"FiniteAlgebra(n={self.n}, sigma={self.sigma})"

    def sigma_of(self, i: int) -> int:
        return self.sigma[i - 1]

    def sigma_set(self, atoms: frozenset[int]) -> frozenset[int]:
        return frozenset(self.sigma[i - 1] for i in atoms)

    @property
    def atom_indices(self) -> range:
        return range(1, self.n + 1)

    @property
    def full_set(self) -> frozenset[int]:
        return frozenset(self.atom_indices)

    @property
    def zero(self) -> "Element":
        return Element(self, frozenset())

    @property
    def one(self) -> "Element":
        return Element(self, self.full_set)

    def atom(self, i: int) -> "Element":
        if not 1 <= i <= self.n:
            raise ValueError(f"atom index {i} out of range 1..{self.n}")
        return Element(self, frozenset({i}))

    def element(self, atoms: Iterable[int]) -> "Element":
        return Element(self, frozenset(atoms))

    def elements(self) -> Iterator["Element"]:
        """All 2^n elements in ascending bitmask order (bit i-1 = atom i)."""
        for mask in range(1 << self.n):
            yield Element(self, _mask_to_atoms(mask))

    def sigma_orbits(self) -> tuple[tuple[int, ...], ...]:
        """Orbits of sigma on atoms, each sorted, in order of least member."""
        seen = set()
        orbits = []
        for i in self.atom_indices:
            if i in seen:
                continue
            j = self.sigma_of(i)
            orbit = (i,) if j == i else (i, j)
            seen.update(orbit)
            orbits.append(orbit)
        return tuple(orbits)


def new_algebra(n: int, sigma: Iterable[int], name: Optional[str] = None) -> FiniteAlgebra:
    """Build and validate an algebra from an atom count and involution."""
    return FiniteAlgebra(n, tuple(sigma), name)


def four_power(m: int) -> FiniteAlgebra:
    """The m-th direct power of the four-element algebra.

    Atom i (1 <= i <= m) is the element with a in coordinate i, atom m+i the
    one with b in coordinate i, so sigma swaps i and m+i.  This layout is a
    convention of this package, not a canonical fact.
    """
    if m < 1:
        raise ValueError("four_power needs m >= 1")
    sigma = tuple(range(m + 1, 2 * m + 1)) + tuple(range(1, m + 1))
    return FiniteAlgebra(2 * m, sigma)


#: The two-element algebra {0, 1}.
TWO = FiniteAlgebra(1, (1,), name="two")

#: The four-element algebra {0, a, b, 1} with a~ = a, a' = b, a* = b.
FOUR = FiniteAlgebra(2, (2, 1), name="four")


def is_four_power_shaped(alg: FiniteAlgebra) -> bool:
    """True when alg literally uses the four_power(m) atom layout."""
    if alg.n % 2:
        return False
    m = alg.n // 2
    return all(alg.sigma_of(i) == m + i for i in range(1, m + 1))


def _mask_to_atoms(mask: int) -> frozenset[int]:
    atoms = []
    i = 1
    while mask:
        if mask & 1:
            atoms.append(i)
        mask >>= 1
        i += 1
    return frozenset(atoms)


def _atoms_to_mask(atoms: frozenset[int]) -> int:
    mask = 0
    for i in atoms:
        mask |= 1 << (i - 1)
    return mask


@dataclass(frozen=True)
class Element:
    """An element of a FiniteAlgebra: the set of atoms below it."""

    algebra: FiniteAlgebra
    atoms: frozenset[int]

    def __post_init__(self):
        if not isinstance(self.atoms, frozenset):
            object.__setattr__(self, "atoms", frozenset(self.atoms))
        if not self.atoms <= self.algebra.full_set:
            raise ValueError(f"atoms {sorted(self.atoms)} not within 1..{self.algebra.n}")

    def __repr__(self):
        body = "{" + ",".join(str(i) for i in sorted(self.atoms)) + "}"
        return f"Element({body} of n={self.algebra.n})"

    @property
    def mask(self) -> int:
        return _atoms_to_mask(self.atoms)

    @property
    def is_zero(self) -> bool:
        return not self.atoms

    @property
    def is_one(self) -> bool:
        return len(self.atoms) == self.algebra.n

    def _require_same(self, other: "Element"):
        if self.algebra != other.algebra:
            raise ValueError("elements belong to different algebras")

    def join(self, other: "Element") -> "Element":
        self._require_same(other)
        return Element(self.algebra, self.atoms | other.atoms)

    def meet(self, other: "Element") -> "Element":
        self._require_same(other)
        return Element(self.algebra, self.atoms & other.atoms)

    def bneg(self) -> "Element":
        return Element(self.algebra, self.algebra.full_set - self.atoms)

    def star(self) -> "Element":
        return Element(self.algebra, self.algebra.sigma_set(self.atoms))

    def dmneg(self) -> "Element":
        return Element(self.algebra, self.algebra.full_set - self.algebra.sigma_set(self.atoms))

    def le(self, other: "Element") -> bool:
        self._require_same(other)
        return self.atoms <= other.atoms


_UNARY_OPS = {"bneg", "dmneg", "star"}
_BINARY_OPS = {"join", "meet"}


def apply(alg: FiniteAlgebra, op: str, *args: Element) -> Element:
    """Apply a named operation (join, meet, bneg, dmneg, star) to elements
    of alg; mixed-algebra arguments are rejected."""
    for e in args:
        if e.algebra != alg:
            raise ValueError("argument does not belong to the given algebra")
    if op in _BINARY_OPS:
        if len(args) != 2:
            raise ValueError(f"{op} takes two arguments")
        return getattr(args[0], op)(args[1])
    if op in _UNARY_OPS:
        if len(args) != 1:
            raise ValueError(f"{op} takes one argument")
        return getattr(args[0], op)()
    raise ValueError(f"unknown operation {op!r}")


@dataclass(frozen=True)
class AtomRefinement:
    """An embedding source -> target, as the partition of target atoms into
    cells indexed by source atoms.

    Cells must be nonempty, pairwise disjoint, cover the target atoms, and be
    sigma-equivariant: cell(sigma_source(i)) = sigma_target(cell(i)).  These
    conditions make the induced element map an injective homomorphism for
    join, meet, both negations and star.
    """

    source: FiniteAlgebra
    target: FiniteAlgebra
    cells: tuple[frozenset[int], ...]

    def __post_init__(self):
        if not isinstance(self.cells, tuple):
            object.__setattr__(self, "cells", tuple(frozenset(c) for c in self.cells))
        if len(self.cells) != self.source.n:
            raise ValueError("one cell per source atom is required")
        covered: set[int] = set()
        for i, cell in enumerate(self.cells, start=1):
            if not cell:
                raise ValueError(f"cell {i} is empty")
            if not cell <= self.target.full_set:
                raise ValueError(f"cell {i} is not a subset of the target atoms")
            if covered & cell:
                raise ValueError("cells overlap")
            covered |= cell
        if covered != set(self.target.full_set):
            raise ValueError("cells do not cover the target atoms")
        for i in self.source.atom_indices:
            if self.cell(self.source.sigma_of(i)) != self.target.sigma_set(self.cell(i)):
                raise ValueError("cells are not sigma-equivariant")

    def __repr__(self):
        return f"AtomRefinement({self.source.n} atoms -> {self.target.n} atoms)"

    def cell(self, i: int) -> frozenset[int]:
        return self.cells[i - 1]

    @property
    def is_identity(self) -> bool:
        return self.source == self.target and all(
            self.cells[i - 1] == frozenset({i}) for i in self.source.atom_indices
        )

    def map_atoms(self, atoms: frozenset[int]) -> frozenset[int]:
        out: set[int] = set()
        for i in atoms:
            out |= self.cells[i - 1]
        return frozenset(out)

    def map_element(self, e: Element) -> Element:
        if e.algebra != self.source:
            raise ValueError("element does not belong to the source algebra")
        return Element(self.target, self.map_atoms(e.atoms))

    def source_atom_of(self, j: int) -> int:
        """The source atom whose cell contains target atom j."""
        for i in self.source.atom_indices:
            if j in self.cells[i - 1]:
                return i
        raise ValueError(f"target atom {j} out of range")

    def preimage(self, e: Element) -> Optional[Element]:
        """The unique source element mapping to e, or None when e is not a
        union of cells."""
        if e.algebra != self.target:
            raise ValueError("element does not belong to the target algebra")
        atoms = set()
        rest = set(e.atoms)
        for i in self.source.atom_indices:
            cell = self.cells[i - 1]
            if cell <= rest:
                atoms.add(i)
                rest -= cell
        if rest:
            return None
        return Element(self.source, frozenset(atoms))


def identity_refinement(alg: FiniteAlgebra) -> AtomRefinement:
    return AtomRefinement(alg, alg, tuple(frozenset({i}) for i in alg.atom_indices))


def compose_refinements(r1: AtomRefinement, r2: AtomRefinement) -> AtomRefinement:
    """The composite refinement of r1: A -> B and r2: B -> C."""
    if r1.target != r2.source:
        raise ValueError("refinements do not compose: target/source mismatch")
    cells = tuple(r2.map_atoms(r1.cell(i)) for i in r1.source.atom_indices)
    return AtomRefinement(r1.source, r2.target, cells)


def twist_product(alg: FiniteAlgebra) -> tuple[FiniteAlgebra, AtomRefinement]:
    """The twist of alg's underlying lattice with itself, together with the
    embedding x |-> (x, x~).

    The target doubles the atoms: atom i is the plus copy and atom n+i the
    minus copy of source atom i, and star swaps the copies.  The cell of
    source atom i is {i, n + sigma(i)}.
    """
    n = alg.n
    ext = four_power(n)
    cells = tuple(frozenset({i, n + alg.sigma_of(i)}) for i in alg.atom_indices)
    return ext, AtomRefinement(alg, ext, cells)


def embed_into_four_power(alg: FiniteAlgebra) -> tuple[FiniteAlgebra, AtomRefinement]:
    """Embed alg into the n-th power of the four-element algebra.

    With the atom ordering used by twist_product (plus copies first), the
    twist target already carries the four_power(n) layout, so no reindexing
    remains to be done.
    """
    return twist_product(alg)


def generated_subalgebra(
    alg: FiniteAlgebra, elems: Iterable[Element] = ()
) -> tuple[FiniteAlgebra, AtomRefinement]:
    """The subalgebra generated by the given elements (plus 0 and 1),
    returned abstractly with the refinement embedding it into alg.

    The subalgebra atoms are the blocks of the atom partition generated by
    splitting along every generator and its star image; the family of
    splitting sets is closed under sigma, so sigma permutes the blocks.
    Blocks are ordered by their least atom.
    """
    splitters: list[frozenset[int]] = []
    for e in elems:
        if e.algebra != alg:
            raise ValueError("generator does not belong to the algebra")
        splitters.append(e.atoms)
        splitters.append(alg.sigma_set(e.atoms))
    blocks: list[frozenset[int]] = [alg.full_set]
    for s in splitters:
        split: list[frozenset[int]] = []
        for b in blocks:
            inside, outside = b & s, b - s
            if inside:
                split.append(inside)
            if outside:
                split.append(outside)
        blocks = split
    blocks.sort(key=min)
    index = {b: k for k, b in enumerate(blocks, start=1)}
    sigma = tuple(index[frozenset(alg.sigma_set(b))] for b in blocks)
    sub = FiniteAlgebra(len(blocks), sigma)
    return sub, AtomRefinement(sub, alg, tuple(blocks))


def restrict_refinement(r: AtomRefinement, sub_r: AtomRefinement) -> AtomRefinement:
    """Given r: A -> B and a subalgebra embedding sub_r: S -> B whose image
    contains the image of r, the refinement A -> S.

    Each cell of the result collects the S-atoms whose blocks lie inside the
    corresponding cell of r.
    """
    if r.target != sub_r.target:
        raise ValueError("refinements do not share a target")
    cells = []
    for i in r.source.atom_indices:
        big = r.cell(i)
        cell = frozenset(
            j for j in sub_r.source.atom_indices if sub_r.cell(j) <= big
        )
        cells.append(cell)
    if frozenset().union(*[sub_r.map_atoms(c) for c in cells]) != r.target.full_set:
        raise ValueError("the subalgebra does not contain the image of the refinement")
    return AtomRefinement(r.source, sub_r.source, tuple(cells))


def amalgamate(
    r1: AtomRefinement, r2: AtomRefinement
) -> tuple[FiniteAlgebra, AtomRefinement, AtomRefinement]:
    """Amalgamate two extensions of a common algebra.

    For r1: A -> B1 and r2: A -> B2 the result is the fibered product C whose
    atoms are the pairs (q, r) of B1- and B2-atoms lying over the same A-atom,
    with star acting componentwise, plus refinements s1: B1 -> C and
    s2: B2 -> C satisfying s1 . r1 = s2 . r2 as element maps.
    """
    if r1.source != r2.source:
        raise ValueError("amalgamation needs a shared source algebra")
    base = r1.source
    pairs: list[tuple[int, int]] = []
    for i in base.atom_indices:
        for q in sorted(r1.cell(i)):
            for r in sorted(r2.cell(i)):
                pairs.append((q, r))
    pairs.sort()
    index = {p: k for k, p in enumerate(pairs, start=1)}
    sigma = tuple(
        index[(r1.target.sigma_of(q), r2.target.sigma_of(r))] for q, r in pairs
    )
    amalgam = FiniteAlgebra(len(pairs), sigma)
    cells1 = tuple(
        frozenset(index[(q, r)] for (q, r) in pairs if q == j)
        for j in r1.target.atom_indices
    )
    cells2 = tuple(
        frozenset(index[(q, r)] for (q, r) in pairs if r == j)
        for j in r2.target.atom_indices
    )
    s1 = AtomRefinement(r1.target, amalgam, cells1)
    s2 = AtomRefinement(r2.target, amalgam, cells2)
    return amalgam, s1, s2


def find_isomorphism_over(
    r1: AtomRefinement, r2: AtomRefinement
) -> Optional[tuple[int, ...]]:
    """Search for an atom bijection between the targets of r1 and r2 that
    commutes with sigma and maps each cell of r1 onto the matching cell of
    r2; returns the images of atoms 1..m, or None.

    Backtracking assigns images in atom order, trying candidates ascending,
    so a successful search returns the lexicographically least bijection.
    """
    if r1.source != r2.source:
        raise ValueError("isomorphism search needs a shared source algebra")
    if r1.target.n != r2.target.n:
        return None
    for i in r1.source.atom_indices:
        if len(r1.cell(i)) != len(r2.cell(i)):
            return None
    m = r1.target.n
    candidates = {
        q: sorted(r2.cell(r1.source_atom_of(q))) for q in r1.target.atom_indices
    }
    sigma1, sigma2 = r1.target.sigma_of, r2.target.sigma_of
    images: dict[int, int] = {}
    used: set[int] = set()

    def extend(q: int) -> bool:
        if q > m:
            return True
        partner = sigma1(q)
        forced = None
        if partner in images:
            forced = sigma2(images[partner])
        for p in candidates[q]:
            if p in used or (forced is not None and p != forced):
                continue
            images[q] = p
            used.add(p)
            if extend(q + 1):
                return True
            del images[q]
            used.discard(p)
        return False

    if not extend(1):
        return None
    return tuple(images[q] for q in range(1, m + 1))


def algebra_over(
    r: AtomRefinement, extra: Iterable[Element] = ()
) -> tuple[FiniteAlgebra, AtomRefinement, AtomRefinement]:
    """The subalgebra of r.target generated by the image of r together with
    extra elements.

    Returns (sub, sub_into_target, source_into_sub); the second refinement
    composed after the first recovers a refinement equal to r on elements.
    """
    gens = [r.map_element(r.source.atom(i)) for i in r.source.atom_indices]
    gens.extend(extra)
    sub, sub_r = generated_subalgebra(r.target, gens)
    base_r = restrict_refinement(r, sub_r)
    return sub, sub_r, base_r
