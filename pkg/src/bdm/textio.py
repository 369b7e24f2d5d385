"""Textual formats for algebras, elements, triples, refinements, witnesses
and stages.

Algebra files:

    atoms 2
    sigma 2 1
    name four          (optional)

Elements print as `0`, `1` or `{i1,i2,...}`; triples as
`I1={...} I2={...} I3={...}` with `{}` for the empty set.  Refinement files
name both algebras explicitly:

    source atoms 1
    source sigma 1
    target atoms 2
    target sigma 2 1
    cell 1: {1,2}

Blank lines and `#` comments are ignored on input; output is canonical and
byte-stable.
"""

from __future__ import annotations

import re

from .algebra import AtomRefinement, Element, FiniteAlgebra
from .errors import ParseError
from .model import EcStage
from .solver import Triple, Witness


def _lines(text: str) -> list[str]:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def _parse_int_list(parts: list[str], what: str) -> list[int]:
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise ParseError(f"{what} must be a list of integers") from None


def parse_algebra(text: str) -> FiniteAlgebra:
    lines = _lines(text)
    if len(lines) < 2:
        raise ParseError("an algebra needs an 'atoms' line and a 'sigma' line")
    fields: dict[str, str] = {}
    for line in lines:
        key, _, rest = line.partition(" ")
        if key in fields:
            raise ParseError(f"duplicate {key!r} line")
        fields[key] = rest.strip()
    if "atoms" not in fields or "sigma" not in fields:
        raise ParseError("an algebra needs an 'atoms' line and a 'sigma' line")
    unknown = set(fields) - {"atoms", "sigma", "name"}
    if unknown:
        raise ParseError(f"unknown line {sorted(unknown)[0]!r} in algebra")
    try:
        n = int(fields["atoms"])
    except ValueError:
        raise ParseError("atom count must be an integer") from None
    sigma = _parse_int_list(fields["sigma"].split(), "sigma")
    try:
        return FiniteAlgebra(n, tuple(sigma), fields.get("name"))
    except ValueError as e:
        raise ParseError(str(e)) from None


def format_algebra(alg: FiniteAlgebra) -> str:
    lines = [f"atoms {alg.n}", "sigma " + " ".join(map(str, alg.sigma))]
    if alg.name:
        lines.append(f"name {alg.name}")
    return "\n".join(lines) + "\n"


_SET_RE = re.compile(r"\{\s*((?:\d+\s*(?:,\s*\d+\s*)*)?)\}")


def _parse_atom_set(text: str, what: str = "set") -> frozenset[int]:
    m = _SET_RE.fullmatch(text.strip())
    if not m:
        raise ParseError(f"malformed {what}: {text!r}")
    inner = m.group(1).strip()
    if not inner:
        return frozenset()
    return frozenset(int(p) for p in inner.split(","))


def format_atom_set(atoms: frozenset[int]) -> str:
    return "{" + ",".join(str(i) for i in sorted(atoms)) + "}"


def parse_element(text: str, alg: FiniteAlgebra) -> Element:
    text = text.strip()
    if text == "0":
        return alg.zero
    if text == "1":
        return alg.one
    atoms = _parse_atom_set(text, "element")
    try:
        return Element(alg, atoms)
    except ValueError as e:
        raise ParseError(str(e)) from None


def format_element(e: Element) -> str:
    if e.is_zero:
        return "0"
    if e.is_one:
        return "1"
    return format_atom_set(e.atoms)


_TRIPLE_RE = re.compile(
    r"I1\s*=\s*(\{[^}]*\})\s+I2\s*=\s*(\{[^}]*\})\s+I3\s*=\s*(\{[^}]*\})"
)


def parse_triple(text: str, alg: FiniteAlgebra) -> Triple:
    m = _TRIPLE_RE.fullmatch(text.strip())
    if not m:
        raise ParseError("a triple looks like 'I1={...} I2={...} I3={...}'")
    sets = [_parse_atom_set(m.group(k), f"I{k}") for k in (1, 2, 3)]
    try:
        return Triple(alg, *sets)
    except ValueError as e:
        raise ParseError(str(e)) from None


def format_triple(t: Triple) -> str:
    return (
        f"I1={format_atom_set(t.i1)} "
        f"I2={format_atom_set(t.i2)} "
        f"I3={format_atom_set(t.i3)}"
    )


def parse_refinement(text: str) -> AtomRefinement:
    lines = _lines(text)
    fields: dict[str, str] = {}
    cells: dict[int, frozenset[int]] = {}
    for line in lines:
        m = re.fullmatch(r"cell\s+(\d+)\s*:\s*(\{[^}]*\})", line)
        if m:
            i = int(m.group(1))
            if i in cells:
                raise ParseError(f"duplicate cell {i}")
            cells[i] = _parse_atom_set(m.group(2), f"cell {i}")
            continue
        m = re.fullmatch(r"(source|target)\s+(atoms|sigma)\s+(.*)", line)
        if not m:
            raise ParseError(f"unrecognized refinement line: {line!r}")
        key = f"{m.group(1)} {m.group(2)}"
        if key in fields:
            raise ParseError(f"duplicate {key!r} line")
        fields[key] = m.group(3).strip()
    for key in ("source atoms", "source sigma", "target atoms", "target sigma"):
        if key not in fields:
            raise ParseError(f"refinement is missing the {key!r} line")
    try:
        source = FiniteAlgebra(
            int(fields["source atoms"]),
            tuple(_parse_int_list(fields["source sigma"].split(), "source sigma")),
        )
        target = FiniteAlgebra(
            int(fields["target atoms"]),
            tuple(_parse_int_list(fields["target sigma"].split(), "target sigma")),
        )
    except ValueError as e:
        raise ParseError(str(e)) from None
    if set(cells) != set(source.atom_indices):
        raise ParseError("refinement needs one cell line per source atom")
    try:
        return AtomRefinement(source, target, tuple(cells[i] for i in source.atom_indices))
    except ValueError as e:
        raise ParseError(str(e)) from None


def format_refinement(r: AtomRefinement) -> str:
    lines = [
        f"source atoms {r.source.n}",
        "source sigma " + " ".join(map(str, r.source.sigma)),
        f"target atoms {r.target.n}",
        "target sigma " + " ".join(map(str, r.target.sigma)),
    ]
    lines += [f"cell {i}: {format_atom_set(r.cell(i))}" for i in r.source.atom_indices]
    return "\n".join(lines) + "\n"


def format_witness(w: Witness) -> str:
    """Extension algebra, then the embedding cells, then the element."""
    lines = [
        f"atoms {w.extension.n}",
        "sigma " + " ".join(map(str, w.extension.sigma)),
    ]
    lines += [
        f"cell {i}: {format_atom_set(w.embedding.cell(i))}"
        for i in w.base.atom_indices
    ]
    lines.append(f"element {format_element(w.element)}")
    return "\n".join(lines) + "\n"


def format_stage(stage: EcStage) -> str:
    """Realized triples in order, then the stage algebra and embedding."""
    lines = [
        f"realized {format_triple(t)} -> {format_element(e)}"
        for t, e in stage.realizers
    ]
    lines.append(f"atoms {stage.algebra.n}")
    lines.append("sigma " + " ".join(map(str, stage.algebra.sigma)))
    lines += [
        f"cell {i}: {format_atom_set(stage.embedding.cell(i))}"
        for i in stage.base.atom_indices
    ]
    return "\n".join(lines) + "\n"


# -- JSON-friendly views ----------------------------------------------------

def algebra_json(alg: FiniteAlgebra) -> dict:
    out = {"atoms": alg.n, "sigma": list(alg.sigma)}
    if alg.name:
        out["name"] = alg.name
    return out


def element_json(e: Element) -> list[int]:
    return sorted(e.atoms)


def triple_json(t: Triple) -> dict:
    return {"I1": sorted(t.i1), "I2": sorted(t.i2), "I3": sorted(t.i3)}


def refinement_json(r: AtomRefinement) -> dict:
    return {
        "source": algebra_json(r.source),
        "target": algebra_json(r.target),
        "cells": [sorted(r.cell(i)) for i in r.source.atom_indices],
    }


def witness_json(w: Witness) -> dict:
    return {
        "extension": algebra_json(w.extension),
        "cells": [sorted(w.embedding.cell(i)) for i in w.base.atom_indices],
        "element": element_json(w.element),
    }


def stage_json(stage: EcStage) -> dict:
    return {
        "realized": [
            {"triple": triple_json(t), "element": element_json(e)}
            for t, e in stage.realizers
        ],
        "algebra": algebra_json(stage.algebra),
        "cells": [
            sorted(stage.embedding.cell(i)) for i in stage.base.atom_indices
        ],
    }
