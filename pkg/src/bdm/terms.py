"""Terms and first-order formulas over Boole-De Morgan algebras.

Concrete syntax:

    terms     +  join        .  meet        ~t  De Morgan negation
              t' Boolean negation (postfix)  t* star (postfix)
    formulas  =  !=  &  |  !  ->   exists v. (...)   forall v. (...)

Precedence, tightest first: postfix (' *), prefix ~, ., +; and for formulas
!, &, |, -> (right associative).  Quantifiers are only admitted at the top of
a formula, after another quantifier, or inside parentheses.

The "dm" signature drops ' and *; parsing rejects them there.  Structural
equality of ASTs is dataclass equality; t* and (~t)' denote the same element
everywhere but remain distinct trees.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Mapping, Optional, Union

from .algebra import FOUR, Element, FiniteAlgebra
from .errors import ParseError


# ---------------------------------------------------------------------------
# Abstract syntax


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Const(Term):
    value: int  # 0 or 1


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Join(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Meet(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class BNeg(Term):
    arg: Term


@dataclass(frozen=True)
class DMNeg(Term):
    arg: Term


@dataclass(frozen=True)
class Star(Term):
    arg: Term


ZERO = Const(0)
ONE = Const(1)


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Equal(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class NotEqual(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ForAll(Formula):
    var: str
    body: Formula


Ast = Union[Term, Formula]


def term_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset({t.name})
    if isinstance(t, (Join, Meet)):
        return term_vars(t.left) | term_vars(t.right)
    if isinstance(t, (BNeg, DMNeg, Star)):
        return term_vars(t.arg)
    return frozenset()


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, (Equal, NotEqual)):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, (And, Or, Implies)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, (Exists, ForAll)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def all_vars(f: Ast) -> frozenset[str]:
    """Every variable name occurring in the tree, free or bound."""
    if isinstance(f, Term):
        return term_vars(f)
    if isinstance(f, (Equal, NotEqual)):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, (And, Or, Implies)):
        return all_vars(f.left) | all_vars(f.right)
    if isinstance(f, Not):
        return all_vars(f.arg)
    if isinstance(f, (Exists, ForAll)):
        return all_vars(f.body) | {f.var}
    raise TypeError(f"not a term or formula: {f!r}")


def in_dm_signature(t: Term) -> bool:
    """True when the term avoids Boolean negation and star."""
    if isinstance(t, (BNeg, Star)):
        return False
    if isinstance(t, (Join, Meet)):
        return in_dm_signature(t.left) and in_dm_signature(t.right)
    if isinstance(t, DMNeg):
        return in_dm_signature(t.arg)
    return True


def formula_in_dm_signature(f: Formula) -> bool:
    if isinstance(f, (Equal, NotEqual)):
        return in_dm_signature(f.left) and in_dm_signature(f.right)
    if isinstance(f, (And, Or, Implies)):
        return formula_in_dm_signature(f.left) and formula_in_dm_signature(f.right)
    if isinstance(f, Not):
        return formula_in_dm_signature(f.arg)
    return formula_in_dm_signature(f.body)


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z_0-9]*)|(?P<num>[01])"
    r"|(?P<sym>->|!=|[+.'*~()=&|!]))"
)

_KEYWORDS = {"exists", "forall"}


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise ParseError(f"unexpected character {stripped[0]!r}", at)
        if m.group("ident"):
            tokens.append(("ident", m.group("ident"), m.start("ident")))
        elif m.group("num"):
            tokens.append(("num", m.group("num"), m.start("num")))
        else:
            tokens.append(("sym", m.group("sym"), m.start("sym")))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, signature: str):
        if signature not in ("dm", "bdm"):
            raise ValueError("signature must be 'dm' or 'bdm'")
        self.signature = signature
        self.tokens = _tokenize(text)
        self.k = 0

    def peek(self):
        return self.tokens[self.k]

    def next(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expect_sym(self, sym: str):
        kind, val, pos = self.next()
        if kind != "sym" or val != sym:
            raise ParseError(f"expected {sym!r}", pos)

    def at_sym(self, sym: str) -> bool:
        kind, val, _ = self.peek()
        return kind == "sym" and val == sym

    def eat_sym(self, sym: str) -> bool:
        if self.at_sym(sym):
            self.k += 1
            return True
        return False

    # -- terms

    def term(self) -> Term:
        t = self.prod()
        while self.eat_sym("+"):
            t = Join(t, self.prod())
        return t

    def prod(self) -> Term:
        t = self.unary()
        while self.eat_sym("."):
            t = Meet(t, self.unary())
        return t

    def unary(self) -> Term:
        if self.eat_sym("~"):
            return DMNeg(self.unary())
        return self.postfix()

    def postfix(self) -> Term:
        t = self.term_atom()
        while True:
            kind, val, pos = self.peek()
            if kind == "sym" and val in ("'", "*"):
                if self.signature == "dm":
                    raise ParseError(
                        f"{val!r} is not part of the dm signature", pos
                    )
                self.k += 1
                t = BNeg(t) if val == "'" else Star(t)
            else:
                return t

    def term_atom(self) -> Term:
        kind, val, pos = self.next()
        if kind == "num":
            return ZERO if val == "0" else ONE
        if kind == "ident":
            if val in _KEYWORDS:
                raise ParseError(f"{val} is a reserved word", pos)
            return Var(val)
        if kind == "sym" and val == "(":
            t = self.term()
            self.expect_sym(")")
            return t
        raise ParseError("expected a term", pos)

    # -- formulas

    def formula(self) -> Formula:
        kind, val, pos = self.peek()
        if kind == "ident" and val in _KEYWORDS:
            self.k += 1
            vkind, vname, vpos = self.next()
            if vkind != "ident" or vname in _KEYWORDS:
                raise ParseError("expected a variable name", vpos)
            self.expect_sym(".")
            body = self.formula()
            return Exists(vname, body) if val == "exists" else ForAll(vname, body)
        return self.implication()

    def implication(self) -> Formula:
        f = self.disjunction()
        if self.eat_sym("->"):
            return Implies(f, self.implication())
        return f

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.eat_sym("|"):
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.negation()
        while self.eat_sym("&"):
            f = And(f, self.negation())
        return f

    def negation(self) -> Formula:
        if self.eat_sym("!"):
            return Not(self.negation())
        return self.atomic()

    def atomic(self) -> Formula:
        # A '(' may open either a parenthesized formula or a parenthesized
        # term on the left of a relation; try the relation reading first and
        # fall back on failure.
        mark = self.k
        try:
            left = self.term()
            kind, val, pos = self.next()
            if kind == "sym" and val in ("=", "!="):
                right = self.term()
                return Equal(left, right) if val == "=" else NotEqual(left, right)
            raise ParseError("expected '=' or '!='", pos)
        except ParseError:
            if not (self.tokens[mark][0] == "sym" and self.tokens[mark][1] == "("):
                raise
            self.k = mark
        self.expect_sym("(")
        f = self.formula()
        self.expect_sym(")")
        return f

    def finish(self, ast):
        kind, _, pos = self.peek()
        if kind != "eof":
            raise ParseError("trailing input", pos)
        return ast


def parse(text: str, signature: str = "bdm", kind: str = "formula") -> Ast:
    """Parse a term or formula; positions in errors are 0-based offsets."""
    p = _Parser(text, signature)
    if kind == "term":
        return p.finish(p.term())
    if kind == "formula":
        return p.finish(p.formula())
    raise ValueError("kind must be 'term' or 'formula'")


def parse_term(text: str, signature: str = "bdm") -> Term:
    return parse(text, signature, "term")


def parse_formula(text: str, signature: str = "bdm") -> Formula:
    return parse(text, signature, "formula")


# ---------------------------------------------------------------------------
# Printing

_SUM, _PROD, _PREFIX, _POSTFIX, _ATOM = range(5)


def _fmt_term(t: Term, level: int) -> str:
    if isinstance(t, Const):
        return str(t.value)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Join):
        s = f"{_fmt_term(t.left, _SUM)} + {_fmt_term(t.right, _PROD)}"
        own = _SUM
    elif isinstance(t, Meet):
        s = f"{_fmt_term(t.left, _PROD)} . {_fmt_term(t.right, _PREFIX)}"
        own = _PROD
    elif isinstance(t, DMNeg):
        s = f"~{_fmt_term(t.arg, _PREFIX)}"
        own = _PREFIX
    elif isinstance(t, BNeg):
        s = f"{_fmt_term(t.arg, _POSTFIX)}'"
        own = _POSTFIX
    elif isinstance(t, Star):
        s = f"{_fmt_term(t.arg, _POSTFIX)}*"
        own = _POSTFIX
    else:
        raise TypeError(f"not a term: {t!r}")
    if own < level:
        return f"({s})"
    return s


_TOP = -1  # a "formula" position: top level or directly inside parentheses
_IMP, _OR, _AND, _NOT, _ATOMF = range(5)


def _fmt_formula(f: Formula, level: int) -> str:
    if isinstance(f, Equal):
        return f"{_fmt_term(f.left, _SUM)} = {_fmt_term(f.right, _SUM)}"
    if isinstance(f, NotEqual):
        return f"{_fmt_term(f.left, _SUM)} != {_fmt_term(f.right, _SUM)}"
    if isinstance(f, (Exists, ForAll)):
        word = "exists" if isinstance(f, Exists) else "forall"
        s = f"{word} {f.var}. ({_fmt_formula(f.body, _TOP)})"
        # quantifiers are grammatical only at formula positions
        return f"({s})" if level > _TOP else s
    if isinstance(f, Implies):
        s = f"{_fmt_formula(f.left, _OR)} -> {_fmt_formula(f.right, _IMP)}"
        own = _IMP
    elif isinstance(f, Or):
        s = f"{_fmt_formula(f.left, _OR)} | {_fmt_formula(f.right, _AND)}"
        own = _OR
    elif isinstance(f, And):
        s = f"{_fmt_formula(f.left, _AND)} & {_fmt_formula(f.right, _NOT)}"
        own = _AND
    elif isinstance(f, Not):
        s = f"!{_fmt_formula(f.arg, _NOT)}"
        own = _NOT
    else:
        raise TypeError(f"not a formula: {f!r}")
    if own < level:
        return f"({s})"
    return s


def format_ast(ast: Ast) -> str:
    """Render a term or formula; parse(format_ast(a)) == a structurally."""
    if isinstance(ast, Term):
        return _fmt_term(ast, _SUM)
    return _fmt_formula(ast, _TOP)


# ---------------------------------------------------------------------------
# Evaluation

def eval_term(alg: FiniteAlgebra, t: Term, env: Mapping[str, Element]) -> Element:
    if isinstance(t, Const):
        return alg.one if t.value else alg.zero
    if isinstance(t, Var):
        try:
            e = env[t.name]
        except KeyError:
            raise ValueError(f"unbound variable {t.name!r}") from None
        if e.algebra != alg:
            raise ValueError(f"variable {t.name!r} is bound outside the algebra")
        return e
    if isinstance(t, Join):
        return eval_term(alg, t.left, env).join(eval_term(alg, t.right, env))
    if isinstance(t, Meet):
        return eval_term(alg, t.left, env).meet(eval_term(alg, t.right, env))
    if isinstance(t, BNeg):
        return eval_term(alg, t.arg, env).bneg()
    if isinstance(t, DMNeg):
        return eval_term(alg, t.arg, env).dmneg()
    if isinstance(t, Star):
        return eval_term(alg, t.arg, env).star()
    raise TypeError(f"not a term: {t!r}")


def eval_formula(alg: FiniteAlgebra, f: Formula, env: Mapping[str, Element]) -> bool:
    """Evaluate a quantifier-free formula pointwise."""
    if isinstance(f, Equal):
        return eval_term(alg, f.left, env) == eval_term(alg, f.right, env)
    if isinstance(f, NotEqual):
        return eval_term(alg, f.left, env) != eval_term(alg, f.right, env)
    if isinstance(f, And):
        return eval_formula(alg, f.left, env) and eval_formula(alg, f.right, env)
    if isinstance(f, Or):
        return eval_formula(alg, f.left, env) or eval_formula(alg, f.right, env)
    if isinstance(f, Not):
        return not eval_formula(alg, f.arg, env)
    if isinstance(f, Implies):
        return (not eval_formula(alg, f.left, env)) or eval_formula(alg, f.right, env)
    if isinstance(f, (Exists, ForAll)):
        raise ValueError("quantified formulas need the decision procedure")
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Identity checking

@dataclass(frozen=True)
class IdentityCheck:
    """Outcome of an identity check; truthy iff the identity is valid."""

    valid: bool
    counterexample: Optional[dict[str, Element]]

    def __bool__(self) -> bool:
        return self.valid


def valid_identity(t1: Term, t2: Term, signature: str = "bdm") -> IdentityCheck:
    """Decide whether t1 = t2 holds under every assignment into the
    four-element algebra; a failing assignment is reported.

    Truth in the four-element algebra settles truth in every algebra here:
    both signatures' varieties are generated by it.  Assignments run in
    ascending bitmask order per variable, variables sorted by name, so the
    reported counterexample is deterministic.
    """
    if signature == "dm" and not (in_dm_signature(t1) and in_dm_signature(t2)):
        raise ValueError("terms use operations outside the dm signature")
    names = sorted(term_vars(t1) | term_vars(t2))
    values = list(FOUR.elements())
    for combo in itertools.product(values, repeat=len(names)):
        env = dict(zip(names, combo))
        if eval_term(FOUR, t1, env) != eval_term(FOUR, t2, env):
            return IdentityCheck(False, env)
    return IdentityCheck(True, None)


# ---------------------------------------------------------------------------
# Signature translation

def _fresh_names(avoid: frozenset[str]):
    if "z" not in avoid:
        yield "z"
    for i in itertools.count(1):
        name = f"z{i}"
        if name not in avoid:
            yield name


def _subst_term(t: Term, target: Term, replacement: Term) -> Term:
    if t == target:
        return replacement
    if isinstance(t, Join):
        return Join(_subst_term(t.left, target, replacement), _subst_term(t.right, target, replacement))
    if isinstance(t, Meet):
        return Meet(_subst_term(t.left, target, replacement), _subst_term(t.right, target, replacement))
    if isinstance(t, BNeg):
        return BNeg(_subst_term(t.arg, target, replacement))
    if isinstance(t, DMNeg):
        return DMNeg(_subst_term(t.arg, target, replacement))
    if isinstance(t, Star):
        return Star(_subst_term(t.arg, target, replacement))
    return t


def _drop_star(t: Term) -> Term:
    """Rewrite every star node as Boolean negation of De Morgan negation."""
    if isinstance(t, Star):
        return BNeg(DMNeg(_drop_star(t.arg)))
    if isinstance(t, Join):
        return Join(_drop_star(t.left), _drop_star(t.right))
    if isinstance(t, Meet):
        return Meet(_drop_star(t.left), _drop_star(t.right))
    if isinstance(t, BNeg):
        return BNeg(_drop_star(t.arg))
    if isinstance(t, DMNeg):
        return DMNeg(_drop_star(t.arg))
    return t


def _innermost_bneg(t: Term) -> Optional[Term]:
    """Leftmost BNeg node whose argument is itself BNeg-free."""
    if isinstance(t, (Join, Meet)):
        return _innermost_bneg(t.left) or _innermost_bneg(t.right)
    if isinstance(t, DMNeg):
        return _innermost_bneg(t.arg)
    if isinstance(t, BNeg):
        inner = _innermost_bneg(t.arg)
        return inner if inner is not None else t
    return None


def _eliminate_bneg(atom: Formula, fresh) -> Formula:
    """Replace each complemented subterm in a relational atom by an
    existentially quantified complement witness."""
    left = _drop_star(atom.left)
    right = _drop_star(atom.right)
    target = _innermost_bneg(left)
    if target is None:
        target = _innermost_bneg(right)
    if target is None:
        cls = Equal if isinstance(atom, Equal) else NotEqual
        return cls(left, right)
    base = target.arg  # BNeg-free by choice of target
    z = Var(next(fresh))
    cls = Equal if isinstance(atom, Equal) else NotEqual
    body = _eliminate_bneg(
        cls(_subst_term(left, target, z), _subst_term(right, target, z)), fresh
    )
    constraints = And(
        Equal(Join(base, z), ONE),
        Equal(Meet(base, z), ZERO),
    )
    return Exists(z.name, And(constraints, body))


def _to_dm(f: Formula, fresh) -> Formula:
    if isinstance(f, (Equal, NotEqual)):
        return _eliminate_bneg(f, fresh)
    if isinstance(f, And):
        return And(_to_dm(f.left, fresh), _to_dm(f.right, fresh))
    if isinstance(f, Or):
        return Or(_to_dm(f.left, fresh), _to_dm(f.right, fresh))
    if isinstance(f, Implies):
        return Implies(_to_dm(f.left, fresh), _to_dm(f.right, fresh))
    if isinstance(f, Not):
        return Not(_to_dm(f.arg, fresh))
    if isinstance(f, Exists):
        return Exists(f.var, _to_dm(f.body, fresh))
    if isinstance(f, ForAll):
        return ForAll(f.var, _to_dm(f.body, fresh))
    raise TypeError(f"not a formula: {f!r}")


def translate_dm(f: Formula, to: str = "bdm") -> Formula:
    """Move a formula between the dm and bdm signatures.

    dm -> bdm is the identity embedding.  bdm -> dm removes star and Boolean
    negation: each complemented subterm t' becomes a fresh variable z bound
    by exists and pinned down by t + z = 1 and t . z = 0.  The complement is
    unique, so the rewriting preserves truth values in complemented algebras
    under either polarity.
    """
    if to == "bdm":
        return f
    if to != "dm":
        raise ValueError("translation target must be 'dm' or 'bdm'")
    fresh = _fresh_names(all_vars(f))
    return _to_dm(f, fresh)
