"""Splitting sets, minority sets, the S relation and the bound certificates.

Everything here is parameterized by an explicit threshold ``k`` and an
explicit parameter set ``a``; ``greedy_splitting_set`` is the effective way to
produce an ``a`` for a given ``k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb
from typing import Iterable, Sequence

from .structures import SimpleModel
from .typelab import (DeltaSet, TypePartition, _check_unary, _Compiled, bigness, max_param_arity,
                      type_partition)


# -- minority sets and S ------------------------------------------------------

def _sides(values: Sequence[bool], part: TypePartition) -> dict[int, int]:
    """For each element, the size of its side when its class is cut by ``values``."""
    out = {}
    for c in part.classes:
        yes = [x for x in c if values[x]]
        no = len(c) - len(yes)
        for x in c:
            out[x] = len(yes) if values[x] else no
    return out


def _truth_row(comp: _Compiled, i: int, params: Sequence[int]) -> list[bool]:
    return [comp.holds(i, (x,), params) for x in range(comp.m.size)]


def minority_set(m: SimpleModel, d: DeltaSet, a: Iterable[int], k: int, member: int,
                 params: Sequence[int], part: TypePartition | None = None) -> frozenset:
    """Elements agreeing with at most ``k`` classmates (themselves included) on member(-, params)."""
    s = d[member]
    if s.object_arity != 1:
        raise ValueError(f"member {member} has object arity {s.object_arity}, expected 1")
    if len(params) != s.param_arity:
        raise ValueError(f"member {member} takes {s.param_arity} parameters, got {len(params)}")
    comp = _Compiled(m, d)
    part = part or type_partition(m, d, a, comp)
    sides = _sides(_truth_row(comp, member, tuple(params)), part)
    return frozenset(x for x, n in sides.items() if n <= k)


@dataclass(frozen=True)
class SRelation:
    n: int
    pairs: frozenset  # of (element, n-tuple)
    threshold_k: int
    parameter_set: frozenset

    def out_degree(self, x: int) -> int:
        return sum(1 for a, _ in self.pairs if a == x)

    def in_degrees(self) -> dict[tuple, int]:
        out: dict[tuple, int] = {}
        for _, b in self.pairs:
            out[b] = out.get(b, 0) + 1
        return out

    def out_degrees(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for a, _ in self.pairs:
            out[a] = out.get(a, 0) + 1
        return out

    def binary_pairs(self) -> frozenset:
        """(x, y) pairs; only for n = 1."""
        if self.n != 1:
            raise ValueError("binary_pairs needs n = 1")
        return frozenset((x, b[0]) for x, b in self.pairs)

    def as_dict(self) -> dict:
        return {"n": self.n, "threshold_k": self.threshold_k,
                "parameter_set": sorted(self.parameter_set),
                "pairs": [[x, list(b)] for x, b in sorted(self.pairs)]}


def s_relation(m: SimpleModel, d: DeltaSet, a: Iterable[int], k: int, n: int,
               part: TypePartition | None = None) -> SRelation:
    if n < 1:
        raise ValueError("n must be at least 1")
    _check_unary(d)
    members = [i for i, s in enumerate(d) if s.param_arity == n]
    if not members:
        raise ValueError(f"no formula of parameter arity {n}")
    a = frozenset(a)
    comp = _Compiled(m, d)
    part = part or type_partition(m, d, a, comp)
    pairs = set()
    for b in product(range(m.size), repeat=n):
        for i in members:
            for x, side in _sides(_truth_row(comp, i, b), part).items():
                if side <= k:
                    pairs.add((x, b))
    return SRelation(n, frozenset(pairs), k, a)


# -- greedy splitting set ----------------------------------------------------

def m_sequence(delta_size: int, k: int, n: int) -> list[int]:
    """[m_0, ..., m_{k+1}] with m_{k+1} = 0 and m_l = |Delta|(n(l+1))^n + m_{l+1}."""
    ms = [0] * (k + 2)
    for l in range(k, -1, -1):
        ms[l] = delta_size * (n * (l + 1)) ** n + ms[l + 1]
    return ms


def majority_bound(delta_size: int, k: int, n: int) -> int:
    """m* = |Delta| (k+1)^(n+1) n^n."""
    return delta_size * (k + 1) ** (n + 1) * n ** n


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass(frozen=True)
class SplitCertificate:
    a: frozenset
    l0: int
    m_sequence: tuple
    majority_bound: int
    k: int
    n: int
    history: tuple = ()  # A_0, A_1, ... as sorted tuples
    big_classes: tuple = ()  # E_A classes with >= (k+1)2^{m_{l0}} elements
    checks: tuple = ()
    notes: tuple = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def as_dict(self) -> dict:
        return {"a": sorted(self.a), "l0": self.l0, "k": self.k, "n": self.n,
                "m_sequence": list(self.m_sequence), "majority_bound": self.majority_bound,
                "history": [list(h) for h in self.history],
                "big_classes": [sorted(c) for c in self.big_classes],
                "checks": [c.as_dict() for c in self.checks], "notes": list(self.notes)}


READING_NOTE = ("the heavy-types condition is checked in the upper-bound reading: at most k types are "
                "realized by k*2^m* or more elements; the existence reading contradicts the "
                "argument that establishes it")


def _count_at_least(part: TypePartition, t: int) -> int:
    return sum(1 for s in part.sizes() if s >= t)


def split_side_violations(m: SimpleModel, d: DeltaSet, part: TypePartition, bound: int,
                          comp: _Compiled | None = None, limit: int = 5) -> list[tuple]:
    """(member, params, class) where both sides of the cut exceed ``bound``."""
    comp = comp or _Compiled(m, d)
    bad = []
    for i, s in enumerate(d):
        for b in product(range(m.size), repeat=s.param_arity):
            row = _truth_row(comp, i, b)
            for c in part.classes:
                yes = sum(1 for x in c if row[x])
                if min(yes, len(c) - yes) > bound:
                    bad.append((i, b, sorted(c)))
                    if len(bad) >= limit:
                        return bad
    return bad


def greedy_splitting_set(m: SimpleModel, d: DeltaSet, k: int, n: int | None = None) -> SplitCertificate:
    """Build A_0 ⊆ A_1 ⊆ ... until no extension qualifies.

    A_{l+1} qualifies when E over it has at least l+1 classes of size at least
    (k+1)*2^{m_{l+1}}.  A_l itself is tried first, then A_l ∪ params for each
    member (by index) and parameter tuple (lexicographic).
    """
    _check_unary(d)
    if k < 1:
        raise ValueError("k must be at least 1")
    n = max(1, max_param_arity(d)) if n is None else n
    if n < max_param_arity(d) or n < 1:
        raise ValueError(f"n={n} is below the parameter arity of Delta")
    ms = m_sequence(len(d), k, n)
    mstar = majority_bound(len(d), k, n)
    comp = _Compiled(m, d)
    a: frozenset = frozenset()
    history = [()]
    l = 0
    while l < k + 1:
        thr = (k + 1) * 2 ** ms[l + 1]
        found = None
        if _count_at_least(type_partition(m, d, a, comp), thr) >= l + 1:
            found = a
        else:
            for s in d:
                for b in product(range(m.size), repeat=s.param_arity):
                    cand = a | frozenset(b)
                    if cand == a:
                        continue
                    if _count_at_least(type_partition(m, d, cand, comp), thr) >= l + 1:
                        found = cand
                        break
                if found is not None:
                    break
        if found is None:
            break
        a = found
        l += 1
        history.append(tuple(sorted(a)))
    l0 = l
    part = type_partition(m, d, a, comp)
    big = tuple(c for c in part.classes if len(c) >= (k + 1) * 2 ** ms[min(l0, k + 1)])

    checks = [Check("size", len(a) <= n * (k + 1), f"|A|={len(a)} <= n(k+1)={n * (k + 1)}")]
    side = (k + 1) * 2 ** mstar
    bad = split_side_violations(m, d, part, side, comp)
    checks.append(Check("split", not bad, f"side bound (k+1)*2^m* with m*={mstar}"
                        + (f"; violations {bad}" if bad else "")))
    heavy = _count_at_least(part, k * 2 ** mstar)
    checks.append(Check("few_heavy_types", heavy <= k,
                        f"{heavy} types realized by >= k*2^m* elements, allowed {k}"))
    checks.append(Check("k_not_exceeded", l0 <= k,
                        "A_{k+1} was built, so k is below k_Delta" if l0 > k else f"l0={l0} <= k"))
    return SplitCertificate(a, l0, tuple(ms), mstar, k, n, tuple(history), big, tuple(checks),
                            (READING_NOTE,))


# -- bound lemma --------------------------------------------------------------

def admissible_k_star(m: SimpleModel, d: DeltaSet, a: Iterable[int]) -> int:
    """Least k* for which (a, k*) meet the splitting assumption on this instance.

    That is: |A| <= k*, E_A is not k*-big, and every member cut of every class
    has a side of at most k* elements.
    """
    comp = _Compiled(m, d)
    a = frozenset(a)
    part = type_partition(m, d, a, comp)
    worst = 0
    for i, s in enumerate(d):
        for b in product(range(m.size), repeat=s.param_arity):
            row = _truth_row(comp, i, b)
            for c in part.classes:
                yes = sum(1 for x in c if row[x])
                worst = max(worst, min(yes, len(c) - yes))
    return max(1, len(a), bigness(part) + 1, worst)


def max_marker_bigness(m: SimpleModel, d: DeltaSet) -> int:
    """Largest bigness of the relation interpreted by psi over every marker set."""
    comp = _Compiled(m, d)
    best = 0
    for size in range(m.size + 1):
        for s in combinations(range(m.size), size):
            best = max(best, bigness(type_partition(m, d, s, comp)))
    return best


def l_star(delta_size: int, k: int) -> int:
    return k * 2 ** (delta_size * k + 1)


def general_small_bound(delta_size: int, k: int, n_rel: int) -> int:
    return k * 2 ** (delta_size * comb(k, n_rel) + 1)


def per_target_bound(delta_size: int, k: int, ls: int) -> int:
    return delta_size * k * k + ls


def heavy_threshold(delta_size: int, k: int, k2: int, ls: int) -> int:
    return 2 ** (delta_size * (k + k2)) * k2 + ls


def heavy_source_bound(delta_size: int, k: int, k2: int, ls: int) -> int:
    return delta_size * (k2 * k) ** 2 * 2 ** (delta_size * (k + k2)) + ls


@dataclass(frozen=True)
class BoundReport:
    k_star: int
    k2: int
    n: int
    l_star: int
    per_target_bound: int
    heavy_source_bound: int | None
    heavy_threshold: int | None
    observed: dict = field(default_factory=dict)
    admissible: bool = True
    notes: tuple = ()

    @property
    def bounds(self) -> dict:
        out = {"small_class_mass": self.l_star, "max_in_degree": self.per_target_bound}
        if self.heavy_source_bound is not None:
            out["heavy_sources"] = self.heavy_source_bound
        return out

    @property
    def slack(self) -> dict:
        return {key: b - self.observed[key] for key, b in self.bounds.items()}

    @property
    def passed(self) -> bool:
        return all(s >= 0 for s in self.slack.values())

    def as_dict(self) -> dict:
        return {"k_star": self.k_star, "k2": self.k2, "n": self.n, "l_star": self.l_star,
                "per_target_bound": self.per_target_bound,
                "heavy_source_bound": self.heavy_source_bound,
                "heavy_threshold": self.heavy_threshold, "observed": dict(self.observed),
                "bounds": self.bounds, "slack": self.slack, "admissible": self.admissible,
                "pass": self.passed, "notes": list(self.notes)}


def verify_split_bounds(m: SimpleModel, d: DeltaSet, a: Iterable[int], k: int | None = None,
                        k2: int | None = None, n: int = 1, n_rel: int | None = None) -> BoundReport:
    """Measure small-class mass, S in-degree and heavy S sources against their bounds.

    ``k`` plays k*: it defaults to the least admissible value for ``a``.
    ``k2`` defaults to one more than the largest bigness psi reaches over all
    marker sets.  For n > 1 the binomial small-class bound is used with
    relation arity ``n_rel`` (default n+1) and the heavy-source item is skipped.
    """
    a = frozenset(a)
    comp = _Compiled(m, d)
    part = type_partition(m, d, a, comp)
    adm = admissible_k_star(m, d, a)
    k = adm if k is None else k
    k2 = max_marker_bigness(m, d) + 1 if k2 is None else k2
    sz = len(d)
    small = sum(len(c) for c in part.classes if len(c) <= 2 * k)
    if any(s.param_arity == n for s in d):
        srel = s_relation(m, d, a, k, n, part)
    else:  # no participating member: S is empty
        srel = SRelation(n, frozenset(), k, a)
    indeg = max(srel.in_degrees().values(), default=0)
    notes = []
    if k < adm:
        notes.append(f"k*={k} is below the admissible value {adm}; bounds are not guaranteed")
    if n == 1:
        ls = l_star(sz, k)
        thr = heavy_threshold(sz, k, k2, ls)
        outdeg = srel.out_degrees()
        heavy = sum(1 for v in outdeg.values() if v > thr)
        return BoundReport(k, k2, n, ls, per_target_bound(sz, k, ls), heavy_source_bound(sz, k, k2, ls),
                           thr, {"small_class_mass": small, "max_in_degree": indeg, "heavy_sources": heavy},
                           k >= adm, tuple(notes))
    n_rel = n + 1 if n_rel is None else n_rel
    ls = general_small_bound(sz, k, n_rel)
    return BoundReport(k, k2, n, ls, per_target_bound(sz, k, ls), None, None,
                       {"small_class_mass": small, "max_in_degree": indeg}, k >= adm, tuple(notes))
