"""Command-line front end.

Exit codes: 0 for true/satisfiable/success, 1 for false/unsatisfiable/absent,
2 for usage or parse errors, 3 for an exhausted resource budget.  Results go
to stdout, diagnostics to stderr; identical inputs produce byte-identical
output.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import oracle as oracle_mod
from . import textio
from .algebra import amalgamate, identity_refinement
from .errors import (
    BdmError,
    CapExceeded,
    InconsistentTripleError,
    NoRealizerError,
    ParseError,
    TrivialTripleError,
)
from .model import build_chain
from .solver import (
    Caps,
    decide,
    in_acl,
    is_sigma_consistent,
    is_trivial,
    realizations,
    triple_of_element,
    trivial_realizer,
    witness_abstract,
    witness_via_four_power,
)
from .terms import format_ast, parse_formula, parse_term, translate_dm, valid_identity


def _emit_json(obj) -> int:
    print(json.dumps(obj, sort_keys=True))
    return 0


def _load_algebra(path: str):
    return textio.parse_algebra(Path(path).read_text())


def _load_refinement(path: str):
    return textio.parse_refinement(Path(path).read_text())


def _caps(args) -> Caps:
    return Caps(
        max_atoms=args.max_atoms,
        max_depth=args.max_depth,
        max_triples=args.max_triples,
    )


def _add_algebra(p):
    p.add_argument("--algebra", required=True, metavar="FILE", help="algebra file")


def _add_caps(p):
    p.add_argument("--max-atoms", type=int, default=12, metavar="N")
    p.add_argument("--max-depth", type=int, default=4, metavar="N")
    p.add_argument("--max-triples", type=int, default=20000, metavar="N")


def _add_json(p):
    p.add_argument("--json", action="store_true", help="machine-readable output")


# ---------------------------------------------------------------------------
# handlers

def _cmd_check(args) -> int:
    alg = _load_algebra(args.algebra)
    if args.json:
        return _emit_json(textio.algebra_json(alg))
    sys.stdout.write(textio.format_algebra(alg))
    return 0


def _cmd_consistent(args) -> int:
    alg = _load_algebra(args.algebra)
    t = textio.parse_triple(args.triple, alg)
    ok = is_sigma_consistent(t)
    if args.json:
        _emit_json({"consistent": ok})
    else:
        print("true" if ok else "false")
    return 0 if ok else 1


def _cmd_witness(args) -> int:
    alg = _load_algebra(args.algebra)
    t = textio.parse_triple(args.triple, alg)
    build = witness_abstract if args.via == "abstract" else witness_via_four_power
    w = build(t)
    if args.json:
        return _emit_json(textio.witness_json(w))
    sys.stdout.write(textio.format_witness(w))
    return 0


def _cmd_decide(args) -> int:
    alg = _load_algebra(args.algebra)
    f = parse_formula(args.formula)
    env = {}
    for binding in args.let or []:
        name, eq, value = binding.partition("=")
        if not eq:
            raise ParseError(f"--let expects NAME=ELEMENT, got {binding!r}")
        env[name.strip()] = textio.parse_element(value, alg)
    result = decide(alg, f, env, _caps(args))
    if args.json:
        _emit_json({"true": result})
    else:
        print("true" if result else "false")
    return 0 if result else 1


def _cmd_type_of(args) -> int:
    alg = _load_algebra(args.algebra)
    r = _load_refinement(args.embedding) if args.embedding else identity_refinement(alg)
    if r.source != alg:
        raise ParseError("the embedding's source differs from --algebra")
    u = textio.parse_element(args.element, r.target)
    t = triple_of_element(r, u)
    if args.json:
        return _emit_json(textio.triple_json(t))
    print(textio.format_triple(t))
    return 0


def _cmd_trivial(args) -> int:
    alg = _load_algebra(args.algebra)
    t = textio.parse_triple(args.triple, alg)
    atoms = is_trivial(t)
    if args.json:
        _emit_json(
            {"trivial": atoms is not None}
            | ({"I": sorted(atoms), "realizer": sorted(atoms)} if atoms is not None else {})
        )
        return 0 if atoms is not None else 1
    if atoms is None:
        print("nontrivial")
        return 1
    realizer = trivial_realizer(t)
    print(f"I={textio.format_atom_set(atoms)} realizer {textio.format_element(realizer)}")
    return 0


def _cmd_realize(args) -> int:
    alg = _load_algebra(args.algebra)
    t = textio.parse_triple(args.triple, alg)
    ext, emb, elems = realizations(t, args.count)
    if args.json:
        return _emit_json(
            {
                "extension": textio.algebra_json(ext),
                "cells": [sorted(emb.cell(i)) for i in alg.atom_indices],
                "elements": [textio.element_json(e) for e in elems],
            }
        )
    lines = [f"atoms {ext.n}", "sigma " + " ".join(map(str, ext.sigma))]
    lines += [f"cell {i}: {textio.format_atom_set(emb.cell(i))}" for i in alg.atom_indices]
    lines += [f"element {textio.format_element(e)}" for e in elems]
    print("\n".join(lines))
    return 0


def _cmd_acl(args) -> int:
    alg = _load_algebra(args.algebra)
    r = _load_refinement(args.embedding)
    if r.source != alg:
        raise ParseError("the embedding's source differs from --algebra")
    w = textio.parse_element(args.element, r.target)
    ok = in_acl(r, w)
    if args.json:
        _emit_json({"in_acl": ok})
    else:
        print("true" if ok else "false")
    return 0 if ok else 1


def _cmd_equiv(args) -> int:
    t1 = parse_term(args.term1, args.signature)
    t2 = parse_term(args.term2, args.signature)
    check = valid_identity(t1, t2, args.signature)
    if args.json:
        obj = {"valid": check.valid}
        if not check.valid:
            obj["counterexample"] = {
                name: textio.element_json(e)
                for name, e in check.counterexample.items()
            }
        _emit_json(obj)
        return 0 if check.valid else 1
    if check.valid:
        print("valid")
        return 0
    parts = " ".join(
        f"{name}={textio.format_element(e)}"
        for name, e in sorted(check.counterexample.items())
    )
    print(f"invalid: {parts}" if parts else "invalid")
    return 1


def _cmd_translate(args) -> int:
    f = parse_formula(args.formula)
    out = translate_dm(f, to=args.to)
    if args.json:
        return _emit_json({"formula": format_ast(out)})
    print(format_ast(out))
    return 0


def _cmd_amalgamate(args) -> int:
    r1 = _load_refinement(args.left)
    r2 = _load_refinement(args.right)
    amalgam, s1, s2 = amalgamate(r1, r2)
    if args.json:
        return _emit_json(
            {
                "amalgam": textio.algebra_json(amalgam),
                "left": textio.refinement_json(s1),
                "right": textio.refinement_json(s2),
            }
        )
    sys.stdout.write(textio.format_algebra(amalgam))
    sys.stdout.write("left\n" + textio.format_refinement(s1))
    sys.stdout.write("right\n" + textio.format_refinement(s2))
    return 0


def _cmd_extend_stage(args) -> int:
    alg = _load_algebra(args.algebra)
    stages = build_chain(alg, args.depth, _caps(args))
    if args.json:
        return _emit_json({"stages": [textio.stage_json(s) for s in stages]})
    for i, stage in enumerate(stages, start=1):
        print(f"stage {i}")
        sys.stdout.write(textio.format_stage(stage))
    return 0


def _cmd_oracle_realizations(args) -> int:
    alg = _load_algebra(args.algebra)
    r = _load_refinement(args.embedding) if args.embedding else identity_refinement(alg)
    if r.source != alg:
        raise ParseError("the embedding's source differs from --algebra")
    t = textio.parse_triple(args.triple, alg)
    found = oracle_mod.all_realizations_in(r, t)
    if args.json:
        _emit_json({"elements": [textio.element_json(e) for e in found]})
        return 0 if found else 1
    if not found:
        print("none")
        return 1
    for e in found:
        print(textio.format_element(e))
    return 0


def _cmd_oracle_witness(args) -> int:
    alg = _load_algebra(args.algebra)
    t = textio.parse_triple(args.triple, alg)
    w = oracle_mod.oracle_witness_search(t, max_atoms=args.max_atoms)
    if w is None:
        if args.json:
            _emit_json({"witness": None})
        else:
            print("absent")
        return 1
    if args.json:
        return _emit_json({"witness": textio.witness_json(w)})
    sys.stdout.write(textio.format_witness(w))
    return 0


def _cmd_oracle_trivial(args) -> int:
    alg = _load_algebra(args.algebra)
    t = textio.parse_triple(args.triple, alg)
    atoms = oracle_mod.brute_force_trivial(t)
    if args.json:
        _emit_json(
            {"trivial": atoms is not None}
            | ({"I": sorted(atoms)} if atoms is not None else {})
        )
        return 0 if atoms is not None else 1
    if atoms is None:
        print("nontrivial")
        return 1
    print(f"I={textio.format_atom_set(atoms)}")
    return 0


def _cmd_oracle_count_free(args) -> int:
    count = oracle_mod.free_function_count(args.k)
    if args.json:
        return _emit_json({"count": count})
    print(count)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bdm",
        description="Finite Boole-De Morgan algebras: types, witnesses, decisions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate and normalize an algebra file")
    _add_algebra(p)
    _add_json(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("consistent", help="test a triple for sigma-consistency")
    _add_algebra(p)
    p.add_argument("triple")
    _add_json(p)
    p.set_defaults(func=_cmd_consistent)

    p = sub.add_parser("witness", help="construct a realizer for a triple")
    _add_algebra(p)
    p.add_argument("triple")
    p.add_argument("--via", choices=("abstract", "power4"), default="abstract")
    _add_json(p)
    p.set_defaults(func=_cmd_witness)

    p = sub.add_parser("decide", help="decide a formula over the parameter algebra")
    _add_algebra(p)
    p.add_argument("formula")
    p.add_argument("--let", action="append", metavar="NAME=ELEMENT")
    _add_caps(p)
    _add_json(p)
    p.set_defaults(func=_cmd_decide)

    p = sub.add_parser("type-of", help="the triple of an element over a base")
    _add_algebra(p)
    p.add_argument("element")
    p.add_argument("--embedding", metavar="FILE")
    _add_json(p)
    p.set_defaults(func=_cmd_type_of)

    p = sub.add_parser("trivial", help="test a triple for base-triviality")
    _add_algebra(p)
    p.add_argument("triple")
    _add_json(p)
    p.set_defaults(func=_cmd_trivial)

    p = sub.add_parser("realize", help="distinct realizers of a non-trivial triple")
    _add_algebra(p)
    p.add_argument("triple")
    p.add_argument("--count", type=int, default=3, metavar="K")
    _add_json(p)
    p.set_defaults(func=_cmd_realize)

    p = sub.add_parser("acl", help="is an element algebraic over the base?")
    _add_algebra(p)
    p.add_argument("element")
    p.add_argument("--embedding", required=True, metavar="FILE")
    _add_json(p)
    p.set_defaults(func=_cmd_acl)

    p = sub.add_parser("equiv", help="check an identity between two terms")
    p.add_argument("term1")
    p.add_argument("term2")
    p.add_argument("--signature", choices=("bdm", "dm"), default="bdm")
    _add_json(p)
    p.set_defaults(func=_cmd_equiv)

    p = sub.add_parser("translate", help="move a formula between signatures")
    p.add_argument("formula")
    p.add_argument("--to", choices=("dm", "bdm"), required=True)
    _add_json(p)
    p.set_defaults(func=_cmd_translate)

    p = sub.add_parser("amalgamate", help="amalgamate two extensions of a base")
    p.add_argument("--left", required=True, metavar="FILE")
    p.add_argument("--right", required=True, metavar="FILE")
    _add_json(p)
    p.set_defaults(func=_cmd_amalgamate)

    p = sub.add_parser("extend-stage", help="build existentially closed stages")
    _add_algebra(p)
    p.add_argument("--depth", type=int, default=1, metavar="N")
    _add_caps(p)
    _add_json(p)
    p.set_defaults(func=_cmd_extend_stage)

    p = sub.add_parser("oracle", help="brute-force counterparts")
    osub = p.add_subparsers(dest="oracle_command", required=True)

    q = osub.add_parser("realizations", help="all realizers inside a target")
    _add_algebra(q)
    q.add_argument("triple")
    q.add_argument("--embedding", metavar="FILE")
    _add_json(q)
    q.set_defaults(func=_cmd_oracle_realizations)

    q = osub.add_parser("witness", help="search four-power extensions")
    _add_algebra(q)
    q.add_argument("triple")
    q.add_argument("--max-atoms", type=int, default=16, metavar="N")
    _add_json(q)
    q.set_defaults(func=_cmd_oracle_witness)

    q = osub.add_parser("trivial", help="triviality by subset scan")
    _add_algebra(q)
    q.add_argument("triple")
    _add_json(q)
    q.set_defaults(func=_cmd_oracle_trivial)

    q = osub.add_parser("count-free", help="closure size of k projections")
    q.add_argument("k", type=int)
    _add_json(q)
    q.set_defaults(func=_cmd_oracle_count_free)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CapExceeded as e:
        print(f"resource cap exceeded: {e}", file=sys.stderr)
        return 3
    except (InconsistentTripleError, TrivialTripleError, NoRealizerError) as e:
        print(f"no result: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValueError, BdmError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
