"""Searches for big definable equivalence relations and for order/matching configurations."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from ..logic import Formula, compile_formula, definable_relation, free_variables, to_text
from ..structures import SimpleModel
from ..typelab import TypePartition, is_k_big, partition_from_labels

DEFAULT_NODE_BUDGET = 10_000_000


class BudgetExhausted(RuntimeError):
    pass


def formula_variables(m: SimpleModel, phi: Formula) -> list[str]:
    """Free variables of phi in sorted order (vocabulary names excluded)."""
    return sorted(free_variables(phi, m.vocabulary.names()))


# -- big equivalence ----------------------------------------------------------

def relation_partition(size: int, pairs: frozenset) -> TypePartition | None:
    """The partition when ``pairs`` is an equivalence relation on 0..size-1, else None."""
    if any((x, x) not in pairs for x in range(size)):
        return None
    if any((y, x) not in pairs for x, y in pairs):
        return None
    rows = [frozenset(y for y in range(size) if (x, y) in pairs) for x in range(size)]
    for x, y in pairs:
        if rows[x] != rows[y]:  # transitivity, given reflexive and symmetric
            return None
    part = partition_from_labels((), rows)
    assert part.pairs() == pairs
    return part


def find_big_equivalence(m: SimpleModel, candidates: Sequence[Formula], k: int,
                         variables: Sequence[str] | None = None):
    """First candidate defining a k-big equivalence relation, with its partition."""
    for phi in candidates:
        vs = list(variables) if variables else formula_variables(m, phi)
        if len(vs) != 2:
            raise ValueError(f"candidate {to_text(phi)} must have exactly two free variables, has {vs}")
        pairs = definable_relation(m, phi, vs).tuples
        part = relation_partition(m.size, pairs)
        if part is not None and is_k_big(part, k):
            return phi, part
    return None


# -- configurations -----------------------------------------------------------

@dataclass(frozen=True)
class ConfigResult:
    length: int
    witness: dict
    exact: bool  # False when the node budget ran out (length is then a lower bound)
    nodes: int

    def as_dict(self):
        return {"length": self.length, "witness": self.witness, "exact": self.exact, "nodes": self.nodes}


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _truth_matrix(m: SimpleModel, phi: Formula, xs: Sequence[str], ys: Sequence[str], fixed=None):
    f = compile_formula(m, phi, list(xs) + list(ys) + list(fixed or {}))
    xt = list(product(range(m.size), repeat=len(xs)))
    yt = list(product(range(m.size), repeat=len(ys)))
    rows = []
    env = dict(fixed or {})
    for a in xt:
        env.update(zip(xs, a))
        mask = 0
        for j, b in enumerate(yt):
            env.update(zip(ys, b))
            if f(env):
                mask |= 1 << j
        rows.append(mask)
    cols = [sum(1 << i for i, r in enumerate(rows) if r >> j & 1) for j in range(len(yt))]
    return xt, yt, rows, cols


def find_order_configuration(m: SimpleModel, phi: Formula, xlen: int, ylen: int, max_len: int,
                             variables: Sequence[str] | None = None,
                             budget: int = DEFAULT_NODE_BUDGET) -> ConfigResult:
    """Longest a_0.., b_0.. with phi(a_i, b_j) iff i <= j (branch and bound)."""
    vs = list(variables) if variables else formula_variables(m, phi)
    if len(vs) != xlen + ylen:
        raise ValueError(f"formula has free variables {vs}, expected {xlen}+{ylen}")
    xt, yt, rows, cols = _truth_matrix(m, phi, vs[:xlen], vs[xlen:])
    best: list = [0, [], []]
    nodes = 0
    exhausted = False
    all_a, all_b = (1 << len(xt)) - 1, (1 << len(yt)) - 1

    def go(depth, acand, bcand, aseq, bseq):
        nonlocal nodes, exhausted
        if depth > best[0]:
            best[:] = [depth, list(aseq), list(bseq)]
        if best[0] >= max_len or exhausted:
            return
        for a in _bits(acand):
            for b in _bits(bcand & rows[a]):
                nodes += 1
                if nodes > budget:
                    exhausted = True
                    return
                na = acand & ~cols[b]  # later a's must fail at b
                nb = bcand & rows[a] & ~(1 << b)  # later b's must hold at a
                if depth + 1 + min(bin(na).count("1"), bin(nb).count("1")) <= best[0]:
                    if depth + 1 > best[0]:
                        best[:] = [depth + 1, aseq + [a], bseq + [b]]
                    continue
                go(depth + 1, na, nb, aseq + [a], bseq + [b])
                if best[0] >= max_len or exhausted:
                    return

    go(0, all_a, all_b, [], [])
    n, aseq, bseq = best
    witness = {"a": [list(xt[i]) for i in aseq], "b": [list(yt[j]) for j in bseq]}
    res = ConfigResult(n, witness, not exhausted, nodes)
    assert check_order(rows, aseq, bseq)
    return res


def check_order(rows, aseq, bseq) -> bool:
    return all(bool(rows[a] >> b & 1) == (i <= j) for i, a in enumerate(aseq) for j, b in enumerate(bseq))


def _max_induced_matching(rows, cols, nx, ny, max_len, budget_left):
    """Largest pairs (a_i, b_i) with edge(a_i, b_j) iff i = j."""
    best = [0, []]
    nodes = 0
    exhausted = False

    def go(depth, acand, bcand, pairs):
        nonlocal nodes, exhausted
        if depth > best[0]:
            best[:] = [depth, list(pairs)]
        if best[0] >= max_len or exhausted:
            return
        for a in _bits(acand):
            acand &= ~(1 << a)  # pairs are chosen in increasing a order
            for b in _bits(bcand & rows[a]):
                nodes += 1
                if nodes > budget_left:
                    exhausted = True
                    return
                na = acand & ~cols[b]
                nb = bcand & ~rows[a] & ~(1 << b)
                if depth + 1 + min(bin(na).count("1"), bin(nb).count("1")) <= best[0]:
                    if depth + 1 > best[0]:
                        best[:] = [depth + 1, pairs + [(a, b)]]
                    continue
                go(depth + 1, na, nb, pairs + [(a, b)])
                if best[0] >= max_len or exhausted:
                    return

    go(0, (1 << nx) - 1, (1 << ny) - 1, [])
    return best[0], best[1], nodes, exhausted


def find_matching_configuration(m: SimpleModel, phi: Formula, max_len: int,
                                variables: Sequence[str] | None = None, levels: int = 1,
                                budget: int = DEFAULT_NODE_BUDGET) -> ConfigResult:
    """Longest diagonal pattern phi(a_i, b_j, c) iff i = j for one parameter tuple c.

    With ``levels`` > 1, ``levels`` such configurations (each of the same
    length, each with its own c) are required, and phi(a, b, c^l) must be
    constant on every lower level's a's and b's.
    """
    vs = list(variables) if variables else formula_variables(m, phi)
    if len(vs) < 2:
        raise ValueError("formula needs at least the two variables x, y")
    zs = vs[2:]
    mats = []
    for c in product(range(m.size), repeat=len(zs)):
        _, _, rows, cols = _truth_matrix(m, phi, vs[:1], vs[1:2], dict(zip(zs, c)))
        mats.append((c, rows, cols))
    nodes = 0
    if levels == 1:
        best = (0, [], ())
        exhausted = False
        for c, rows, cols in mats:
            n, pairs, used, ex = _max_induced_matching(rows, cols, m.size, m.size, max_len, budget - nodes)
            nodes += used
            if n > best[0]:
                best = (n, pairs, c)
            if ex:
                exhausted = True
                break
            if best[0] >= max_len:
                break
        n, pairs, c = best
        witness = {"c": list(c), "a": [a for a, _ in pairs], "b": [b for _, b in pairs]}
        return ConfigResult(n, witness, not exhausted, nodes)
    return _multi_level(m, mats, max_len, levels, budget)


def _all_matchings(rows, cols, n_el, size):
    """Every induced matching of exactly ``size`` pairs (as sorted pair tuples)."""
    out = []

    def go(acand, bcand, pairs):
        if len(pairs) == size:
            out.append(tuple(pairs))
            return
        for a in _bits(acand):
            acand &= ~(1 << a)
            for b in _bits(bcand & rows[a]):
                go(acand & ~cols[b], bcand & ~rows[a] & ~(1 << b), pairs + [(a, b)])

    go((1 << n_el) - 1, (1 << n_el) - 1, [])
    return out


def _multi_level(m, mats, max_len, levels, budget):
    nodes = 0
    for length in range(min(max_len, m.size), 0, -1):
        options = []
        for c, rows, cols in mats:
            for pairs in _all_matchings(rows, cols, m.size, length):
                options.append((c, rows, pairs))
        chosen: list = []

        def ok_with(c_rows, lower):
            for _, _, pairs in lower:
                vals = {bool(c_rows[a] >> b & 1) for a, _ in pairs for _, b in pairs}
                if len(vals) > 1:
                    return False
            return True

        def go():
            nonlocal nodes
            if len(chosen) == levels:
                return True
            for opt in options:
                nodes += 1
                if nodes > budget:
                    raise BudgetExhausted
                if ok_with(opt[1], chosen):
                    chosen.append(opt)
                    if go():
                        return True
                    chosen.pop()
            return False

        try:
            if go():
                witness = {"levels": [{"c": list(c), "a": [a for a, _ in p], "b": [b for _, b in p]}
                                      for c, _, p in chosen]}
                return ConfigResult(length, witness, True, nodes)
        except BudgetExhausted:
            return ConfigResult(0, {}, False, nodes)
    return ConfigResult(0, {"levels": []}, True, nodes)
