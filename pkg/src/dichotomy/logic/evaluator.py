"""Tarskian evaluation over finite simple models.

A formula is compiled once against a model into nested closures over a mutable
environment; evaluation then enumerates quantified variables directly.  Any
atom (equality included) containing an undefined function application is
false.
"""
from __future__ import annotations

from itertools import product
from typing import Callable, Mapping, Sequence

from ..structures import RelationTable, SimpleModel
from .ast import App, BinOp, Eq, Formula, Name, Not, Quant, Rel, Term


class EvaluationError(ValueError):
    pass


Env = dict
_UNDEF = None


def _compile_term(t: Term, m: SimpleModel, scope: frozenset) -> Callable[[Env], int | None]:
    if isinstance(t, App):
        if t.fn not in m.function_values:
            raise EvaluationError(f"unknown function symbol {t.fn!r}")
        table = m.function_values[t.fn].as_dict()
        inner = _compile_term(t.arg, m, scope)

        def f(env):
            v = inner(env)
            return None if v is None else table.get(v)
        return f
    name = t.name
    if name.isdigit():
        c = int(name)
        if c >= m.size:
            raise EvaluationError(f"element literal {c} outside universe of size {m.size}")
        return lambda env: c
    if name in scope:
        return lambda env: env[name]
    if name in m.constant_values:
        c = m.constant_values[name]
        return lambda env: c
    raise EvaluationError(f"unassigned free variable or unknown constant {name!r}")


def _compile(phi: Formula, m: SimpleModel, scope: frozenset) -> Callable[[Env], bool]:
    if isinstance(phi, Rel):
        args = [_compile_term(t, m, scope) for t in phi.args]
        if phi.name in m.relation_values:
            table = m.relation_values[phi.name]
            if table.arity != len(args):
                raise EvaluationError(f"arity mismatch for {phi.name}: {len(args)} vs {table.arity}")
            tuples = table.tuples
        elif phi.name in m.predicate_values:
            if len(args) != 1:
                raise EvaluationError(f"arity mismatch for predicate {phi.name}")
            pred = m.predicate_values[phi.name]
            a0 = args[0]

            def unary(env):
                v = a0(env)
                return v is not None and v in pred
            return unary
        else:
            raise EvaluationError(f"unknown relation symbol {phi.name!r}")
        if len(args) == 2:
            a0, a1 = args

            def binary(env):
                u, v = a0(env), a1(env)
                return u is not None and v is not None and (u, v) in tuples
            return binary

        def nary(env):
            vals = tuple(a(env) for a in args)
            return None not in vals and vals in tuples
        return nary
    if isinstance(phi, Eq):
        lft = _compile_term(phi.left, m, scope)
        rgt = _compile_term(phi.right, m, scope)

        def equal(env):
            u = lft(env)
            return u is not None and u == rgt(env)
        return equal
    if isinstance(phi, Not):
        body = _compile(phi.body, m, scope)
        return lambda env: not body(env)
    if isinstance(phi, BinOp) and phi.op in ("&", "|"):
        # flatten same-operator chains so long synthesized conjunctions stay shallow
        ops, stack = [], [phi]
        while stack:
            f = stack.pop()
            if isinstance(f, BinOp) and f.op == phi.op:
                stack.append(f.right)
                stack.append(f.left)
            else:
                ops.append(_compile(f, m, scope))
        if phi.op == "&":
            return lambda env: all(f(env) for f in ops)
        return lambda env: any(f(env) for f in ops)
    if isinstance(phi, BinOp):
        a = _compile(phi.left, m, scope)
        b = _compile(phi.right, m, scope)
        if phi.op == "->":
            return lambda env: (not a(env)) or b(env)
        return lambda env: a(env) == b(env)
    if isinstance(phi, Quant):
        v = phi.var
        body = _compile(phi.body, m, scope | {v})
        dom = range(m.size)
        kind, k = phi.kind, phi.count

        def quant(env):
            saved = env.get(v, _UNDEF)
            try:
                if kind == "A":
                    for e in dom:
                        env[v] = e
                        if not body(env):
                            return False
                    return True
                if kind == "E":
                    for e in dom:
                        env[v] = e
                        if body(env):
                            return True
                    return False
                count = 0
                for e in dom:
                    env[v] = e
                    if body(env):
                        count += 1
                        if count > k:
                            return kind == ">"
                return kind == "<="
            finally:
                if saved is _UNDEF:
                    env.pop(v, None)
                else:
                    env[v] = saved
        return quant
    raise TypeError(f"not a formula: {phi!r}")


def compile_formula(m: SimpleModel, phi: Formula, free: Sequence[str]) -> Callable[[Env], bool]:
    """Compile ``phi`` with the names in ``free`` treated as variables."""
    return _compile(phi, m, frozenset(free))


def evaluate(m: SimpleModel, phi: Formula, a: Mapping[str, int] | None = None) -> bool:
    a = dict(a or {})
    for k, v in a.items():
        if not (isinstance(v, int) and 0 <= v < m.size):
            raise EvaluationError(f"assignment {k}={v!r} outside the universe")
    return compile_formula(m, phi, list(a))(a)


def definable_relation(m: SimpleModel, phi: Formula, vars: Sequence[str]) -> RelationTable:
    """All tuples over ``vars`` satisfying ``phi``."""
    vars = list(vars)
    if len(set(vars)) != len(vars):
        raise EvaluationError("repeated variable in tuple")
    f = compile_formula(m, phi, vars)
    out = []
    env: Env = {}
    for tup in product(range(m.size), repeat=len(vars)):
        env.update(zip(vars, tup))
        if f(env):
            out.append(tup)
    return RelationTable.of(len(vars), out)
