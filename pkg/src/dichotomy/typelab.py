"""Delta-types over parameter sets and the equivalence they induce.

A Delta set is a list of ``SplitFormula`` members.  The type of a tuple over
a parameter set A records which (member, parameter tuple) pairs it satisfies,
parameter tuples ranging over A^arity with repetition allowed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Sequence

from .logic import Formula, SplitFormula, compile_formula, conj, forall_many, iff, implies
from .logic.ast import Name, Rel
from .structures import SimpleModel

DeltaSet = tuple  # tuple[SplitFormula, ...]
DEFAULT_K_BUDGET = 2_000_000


class BudgetExceeded(RuntimeError):
    def __init__(self, msg, lower_bound=None, witness=None):
        super().__init__(msg)
        self.lower_bound = lower_bound
        self.witness = witness


def delta(*lines: str | SplitFormula) -> DeltaSet:
    return tuple(SplitFormula.parse(x) if isinstance(x, str) else x for x in lines)


def parse_delta(text: str) -> DeltaSet:
    """One ``formula :: objvars ; paramvars`` member per non-blank, non-# line."""
    return tuple(SplitFormula.parse(line) for line in text.splitlines()
                 if line.strip() and not line.lstrip().startswith("#"))


def delta_text(d: DeltaSet) -> str:
    return "\n".join(m.text() for m in d) + "\n"


def max_param_arity(d: DeltaSet) -> int:
    return max((m.param_arity for m in d), default=0)


@dataclass(frozen=True)
class TypeFingerprint:
    satisfied: frozenset  # of (member index, parameter tuple)

    def sorted(self):
        return sorted(self.satisfied)


class _Compiled:
    """Per-(model, Delta) cache of compiled member formulas."""

    def __init__(self, m: SimpleModel, d: DeltaSet):
        self.m = m
        self.d = d
        self.fns = [compile_formula(m, s.formula, s.object_vars + s.param_vars) for s in d]

    def holds(self, i: int, objs: Sequence[int], params: Sequence[int]) -> bool:
        s = self.d[i]
        env = dict(zip(s.object_vars, objs))
        env.update(zip(s.param_vars, params))
        return self.fns[i](env)

    def type_key(self, objs: Sequence[int], a: Sequence[int]) -> tuple:
        """Satisfied (index, params) list in canonical order; usable as a dict key."""
        out = []
        for i, s in enumerate(self.d):
            if s.object_arity != len(objs):
                continue
            env = dict(zip(s.object_vars, objs))
            f = self.fns[i]
            for b in product(a, repeat=s.param_arity):
                env.update(zip(s.param_vars, b))
                if f(env):
                    out.append((i, b))
        return tuple(out)


def compute_type(m: SimpleModel, d: DeltaSet, tup: Sequence[int], a: Iterable[int]) -> TypeFingerprint:
    return TypeFingerprint(frozenset(_Compiled(m, d).type_key(tuple(tup), sorted(set(a)))))


@dataclass(frozen=True)
class TypePartition:
    parameter_set: frozenset
    classes: tuple  # of frozensets, ordered by least element

    def class_of(self, x: int) -> frozenset:
        for c in self.classes:
            if x in c:
                return c
        raise KeyError(x)

    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]

    def pairs(self) -> frozenset:
        return frozenset((x, y) for c in self.classes for x in c for y in c)

    def labels(self) -> dict[int, int]:
        return {x: i for i, c in enumerate(self.classes) for x in c}

    def refines(self, other: "TypePartition") -> bool:
        """Every class of self lies inside a class of other."""
        lab = other.labels()
        return all(len({lab[x] for x in c}) == 1 for c in self.classes)

    def as_lists(self) -> list[list[int]]:
        return [sorted(c) for c in self.classes]


def partition_from_labels(parameter_set, keys: Sequence) -> TypePartition:
    groups: dict = {}
    for x, k in enumerate(keys):
        groups.setdefault(k, []).append(x)
    classes = sorted((frozenset(g) for g in groups.values()), key=min)
    return TypePartition(frozenset(parameter_set), tuple(classes))


def _check_unary(d: DeltaSet):
    for i, s in enumerate(d):
        if s.object_arity != 1:
            raise ValueError(f"member {i} ({s.text()}) has object arity {s.object_arity}, expected 1")


def type_partition(m: SimpleModel, d: DeltaSet, a: Iterable[int], _compiled: _Compiled | None = None) -> TypePartition:
    _check_unary(d)
    a = sorted(set(a))
    c = _compiled or _Compiled(m, d)
    part = partition_from_labels(a, [c.type_key((x,), a) for x in range(m.size)])
    assert sum(part.sizes()) == m.size
    return part


def bigness(part: TypePartition) -> int:
    """Largest k such that the partition has at least k classes of size at least k."""
    sizes = sorted(part.sizes(), reverse=True)
    best = 0
    for j, s in enumerate(sizes, start=1):
        best = max(best, min(j, s))
    return best


def is_k_big(part: TypePartition, k: int) -> bool:
    return sum(1 for s in part.sizes() if s >= k) >= k


@dataclass(frozen=True)
class KDeltaResult:
    k: int
    witness: frozenset
    evaluated: int  # parameter sets examined

    def as_dict(self):
        return {"k": self.k, "witness": sorted(self.witness), "parameter_sets_examined": self.evaluated}


def k_delta(m: SimpleModel, d: DeltaSet, lambda0: int, budget: int = DEFAULT_K_BUDGET) -> KDeltaResult:
    """Maximal bigness of E_A over |A| <= lambda0, with the first witness in (size, lex) order."""
    _check_unary(d)
    n = m.size
    lambda0 = min(lambda0, n)
    ceiling = math.isqrt(n)  # k classes of size k need k*k <= n
    c = _Compiled(m, d)
    best_k, best_a, seen = 0, frozenset(), 0
    for size in range(lambda0 + 1):
        for a in combinations(range(n), size):
            seen += 1
            if seen > budget:
                raise BudgetExceeded(f"k_delta budget of {budget} parameter sets exceeded",
                                     lower_bound=best_k, witness=best_a)
            k = bigness(type_partition(m, d, a, c))
            if k > best_k:
                best_k, best_a = k, frozenset(a)
                if best_k >= ceiling:
                    return KDeltaResult(best_k, best_a, seen)
    return KDeltaResult(best_k, best_a, seen)


def interpret_equivalence_formula(d: DeltaSet, marker: str = "s", xvars=("x1", "x2")) -> Formula:
    """psi(x1, x2): for all marked parameter tuples, every member agrees on x1 and x2.

    Each member gets its own block of universally quantified parameter
    variables b0, b1, ...; a member without parameters contributes a bare
    biconditional.
    """
    _check_unary(d)
    x1, x2 = xvars
    parts = []
    for s in d:
        p = s.param_arity
        reserved = {x1, x2, marker}
        bs = []
        i = 0
        while len(bs) < p:
            cand = f"b{i}"
            i += 1
            if cand not in reserved:
                bs.append(cand)
        body = iff(s.instantiate([x1], bs), s.instantiate([x2], bs))
        if p:
            guard = conj([Rel(marker, (Name(b),)) for b in bs])
            body = forall_many(bs, implies(guard, body))
        parts.append(body)
    return conj(parts)


def dump_partition(part: TypePartition) -> dict:
    return {"parameter_set": sorted(part.parameter_set), "classes": part.as_lists()}
