"""First-order formula AST with counting quantifiers.

Terms are bare names (a variable or a constant, resolved at evaluation time)
and unary function applications.  Connectives are binary, as in the text
syntax; ``conj``/``disj`` fold lists into left-nested chains.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence, Union


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class App:
    fn: str
    arg: "Term"


Term = Union[Name, App]


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of & | -> <->
    left: "Formula"
    right: "Formula"

    def __post_init__(self):
        if self.op not in BINOPS:
            raise ValueError(f"unknown connective {self.op!r}")


@dataclass(frozen=True)
class Quant:
    """``kind`` is 'A', 'E', '<=' (at most ``count``) or '>' (more than ``count``)."""

    kind: str
    var: str
    body: "Formula"
    count: int = 0

    def __post_init__(self):
        if self.kind not in ("A", "E", "<=", ">"):
            raise ValueError(f"unknown quantifier {self.kind!r}")
        if self.kind in ("A", "E") and self.count:
            raise ValueError("plain quantifiers take no count")
        if self.count < 0:
            raise ValueError("count must be non-negative")


Formula = Union[Rel, Eq, Not, BinOp, Quant]
BINOPS = ("&", "|", "->", "<->")


# -- constructors ------------------------------------------------------------

def var(n: str) -> Name:
    return Name(n)


def rel(name: str, *args: str | Term) -> Rel:
    return Rel(name, tuple(Name(a) if isinstance(a, str) else a for a in args))


def eq(a: str | Term, b: str | Term) -> Eq:
    return Eq(Name(a) if isinstance(a, str) else a, Name(b) if isinstance(b, str) else b)


def app(fn: str, arg: str | Term) -> App:
    return App(fn, Name(arg) if isinstance(arg, str) else arg)


def neg(f: Formula) -> Not:
    return Not(f)


def conj(fs: Iterable[Formula], empty: Formula | None = None) -> Formula:
    fs = list(fs)
    if not fs:
        if empty is None:
            raise ValueError("empty conjunction needs an explicit 'empty' value")
        return empty
    out = fs[0]
    for f in fs[1:]:
        out = BinOp("&", out, f)
    return out


def disj(fs: Iterable[Formula], empty: Formula | None = None) -> Formula:
    fs = list(fs)
    if not fs:
        if empty is None:
            raise ValueError("empty disjunction needs an explicit 'empty' value")
        return empty
    out = fs[0]
    for f in fs[1:]:
        out = BinOp("|", out, f)
    return out


def implies(a: Formula, b: Formula) -> BinOp:
    return BinOp("->", a, b)


def iff(a: Formula, b: Formula) -> BinOp:
    return BinOp("<->", a, b)


def forall(v: str, body: Formula) -> Quant:
    return Quant("A", v, body)


def exists(v: str, body: Formula) -> Quant:
    return Quant("E", v, body)


def forall_many(vs: Sequence[str], body: Formula) -> Formula:
    for v in reversed(vs):
        body = Quant("A", v, body)
    return body


def at_most(k: int, v: str, body: Formula) -> Quant:
    return Quant("<=", v, body, k)


def more_than(k: int, v: str, body: Formula) -> Quant:
    return Quant(">", v, body, k)


def truth(v: str = "x") -> Eq:
    return Eq(Name(v), Name(v))


def falsity(v: str = "x") -> Not:
    return Not(truth(v))


# -- syntactic utilities -----------------------------------------------------

def term_names(t: Term) -> set[str]:
    while isinstance(t, App):
        t = t.arg
    return {t.name}


def names(phi: Formula) -> set[str]:
    """Free names (variables and constants alike, since both are bare names)."""
    if isinstance(phi, Rel):
        return set().union(*(term_names(t) for t in phi.args)) if phi.args else set()
    if isinstance(phi, Eq):
        return term_names(phi.left) | term_names(phi.right)
    if isinstance(phi, Not):
        return names(phi.body)
    if isinstance(phi, BinOp):
        return names(phi.left) | names(phi.right)
    if isinstance(phi, Quant):
        return names(phi.body) - {phi.var}
    raise TypeError(phi)


def free_variables(phi: Formula, vocabulary_names: Iterable[str] = ()) -> set[str]:
    return names(phi) - set(vocabulary_names)


def bound_variables(phi: Formula) -> set[str]:
    if isinstance(phi, (Rel, Eq)):
        return set()
    if isinstance(phi, Not):
        return bound_variables(phi.body)
    if isinstance(phi, BinOp):
        return bound_variables(phi.left) | bound_variables(phi.right)
    return {phi.var} | bound_variables(phi.body)


def symbols(phi: Formula) -> tuple[set[str], set[str]]:
    """(relation/predicate names, function names) used by ``phi``."""
    rels: set[str] = set()
    fns: set[str] = set()

    def term(t):
        while isinstance(t, App):
            fns.add(t.fn)
            t = t.arg

    def walk(f):
        if isinstance(f, Rel):
            rels.add(f.name)
            for t in f.args:
                term(t)
        elif isinstance(f, Eq):
            term(f.left)
            term(f.right)
        elif isinstance(f, Not):
            walk(f.body)
        elif isinstance(f, BinOp):
            walk(f.left)
            walk(f.right)
        else:
            walk(f.body)

    walk(phi)
    return rels, fns


def _subst_term(t: Term, m: Mapping[str, Term]) -> Term:
    if isinstance(t, App):
        return App(t.fn, _subst_term(t.arg, m))
    return m.get(t.name, t)


def fresh_name(base: str, avoid: set[str]) -> str:
    for i in itertools.count():
        cand = f"{base}{i}"
        if cand not in avoid:
            return cand
    raise AssertionError


def substitute(phi: Formula, mapping: Mapping[str, Term | str]) -> Formula:
    """Capture-avoiding substitution of terms for free names."""
    m = {k: (Name(v) if isinstance(v, str) else v) for k, v in mapping.items()}
    return _subst(phi, m)


def _subst(phi: Formula, m: Mapping[str, Term]) -> Formula:
    if not m:
        return phi
    if isinstance(phi, Rel):
        return Rel(phi.name, tuple(_subst_term(t, m) for t in phi.args))
    if isinstance(phi, Eq):
        return Eq(_subst_term(phi.left, m), _subst_term(phi.right, m))
    if isinstance(phi, Not):
        return Not(_subst(phi.body, m))
    if isinstance(phi, BinOp):
        return BinOp(phi.op, _subst(phi.left, m), _subst(phi.right, m))
    inner = {k: v for k, v in m.items() if k != phi.var}
    incoming = set().union(*(term_names(t) for t in inner.values())) if inner else set()
    v = phi.var
    body = phi.body
    if v in incoming:
        nv = fresh_name(v, incoming | names(body) | bound_variables(body) | set(inner))
        body = _subst(body, {v: Name(nv)})
        v = nv
    return Quant(phi.kind, v, _subst(body, inner), phi.count)


def rename_bound(phi: Formula, prefix: str = "v") -> Formula:
    """Alpha-rename every bound variable to ``prefix<i>`` (fresh, in traversal order)."""
    avoid = names(phi) | bound_variables(phi)
    counter = itertools.count()

    def fresh():
        while True:
            cand = f"{prefix}{next(counter)}"
            if cand not in avoid:
                avoid.add(cand)
                return cand

    def walk(f):
        if isinstance(f, (Rel, Eq)):
            return f
        if isinstance(f, Not):
            return Not(walk(f.body))
        if isinstance(f, BinOp):
            return BinOp(f.op, walk(f.left), walk(f.right))
        nv = fresh()
        return Quant(f.kind, nv, walk(_subst(f.body, {f.var: Name(nv)})), f.count)

    return walk(phi)


def size(phi: Formula) -> int:
    if isinstance(phi, (Rel, Eq)):
        return 1
    if isinstance(phi, Not):
        return 1 + size(phi.body)
    if isinstance(phi, BinOp):
        return 1 + size(phi.left) + size(phi.right)
    return 1 + size(phi.body)
