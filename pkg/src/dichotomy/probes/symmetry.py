"""Exhaustive instance check of the symmetry implication for S relations.

Given Delta with members of parameter arity n, the model is expanded by a
marker predicate for A, chi(x, y, zs) defines aS^n b cs through the
equivalence formula psi, and

    Delta1 = Delta + {chi'(x; zs)},  chi' = (E^{>m2} y) chi(x, y, zs)
    Delta2 = Delta + {chi(x; y, zs)}

The implication a S^n b cs  ==>  a S^{n-1}_{Delta1} cs  or  b S^n_{Delta2} a cs
is tested for every a, b, cs.  A counterexample points at thresholds below
the ones the argument needs, not at an error in the argument.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ..logic import SplitFormula, definable_relation, to_text
from ..logic.ast import Quant, conj, disj, iff
from ..splitting import s_relation
from ..structures import RelationTable, SimpleModel
from ..typelab import DeltaSet, _check_unary, interpret_equivalence_formula


def _fresh(base: str, taken: set) -> str:
    name, i = base, 0
    while name in taken:
        i += 1
        name = f"{base}{i}"
    return name


def chi_formula(d: DeltaSet, n: int, k: int, marker: str, zs: tuple) -> tuple:
    """chi(x, y, zs) over the marker-expanded vocabulary; returns (formula, free variables)."""
    psi = interpret_equivalence_formula(d, marker, ("x", "xq"))
    blocks = []
    for s in d:
        if s.param_arity != n:
            continue
        here = s.instantiate(["x"], ["y", *zs])
        there = s.instantiate(["xq"], ["y", *zs])
        blocks.append(Quant("<=", "xq", conj([psi, iff(here, there)]), k))
    if not blocks:
        raise ValueError(f"no member of parameter arity {n}")
    return disj(blocks), ("x", "y") + zs


@dataclass(frozen=True)
class SymmetryReport:
    n: int
    thresholds: dict
    parameter_sets: dict
    s_size: int
    s1_size: int
    s2_size: int
    chi_agrees: bool  # chi defines exactly S^n
    counterexamples: tuple  # (a, b, cs)
    formulas: dict

    @property
    def holds(self) -> bool:
        return not self.counterexamples

    def as_dict(self):
        return {"n": self.n, "thresholds": self.thresholds, "parameter_sets": self.parameter_sets,
                "sizes": {"S": self.s_size, "S1": self.s1_size, "S2": self.s2_size},
                "chi_agrees": self.chi_agrees, "holds": self.holds,
                "counterexamples": [[a, b, list(c)] for a, b, c in self.counterexamples],
                "formulas": self.formulas}


def symmetry_instance_check(m: SimpleModel, d: DeltaSet, n: int, k: int, k1: int, k2: int | None = None,
                            a: Iterable[int] = (), a1: Iterable[int] | None = None,
                            a2: Iterable[int] | None = None, m2: int | None = None,
                            limit: int = 20) -> SymmetryReport:
    """k is the threshold of S^n (and of the counting quantifier in chi); k1, k2 are the
    thresholds of the derived relations over A1, A2 (default A); m2 defaults to k2."""
    if n < 2:
        raise ValueError("n must be at least 2")
    _check_unary(d)
    k2 = k1 if k2 is None else k2
    m2 = k2 if m2 is None else m2
    a = frozenset(a)
    a1 = a if a1 is None else frozenset(a1)
    a2 = a if a2 is None else frozenset(a2)
    marker = _fresh("s", set(m.vocabulary.names()))
    mx = m.with_(predicates={marker: a})
    zs = tuple(f"z{i}" for i in range(1, n))
    chi, chi_vars = chi_formula(d, n, k, marker, zs)
    chi_p = Quant(">", "y", chi, m2)
    d1 = tuple(d) + (SplitFormula(chi_p, ("x",), zs),)
    d2 = tuple(d) + (SplitFormula(chi, ("x",), ("y",) + zs),)

    s = s_relation(m, d, a, k, n).pairs
    chi_rel = definable_relation(mx, chi, chi_vars).tuples
    agrees = chi_rel == {(x,) + tuple(b) for x, b in s}
    s1 = s_relation(mx, d1, a1, k1, n - 1).pairs
    s2 = s_relation(mx, d2, a2, k2, n).pairs
    bad = []
    for x, bc in sorted(s):
        b, cs = bc[0], tuple(bc[1:])
        if (x, cs) in s1 or (b, (x,) + cs) in s2:
            continue
        bad.append((x, b, cs))
        if len(bad) >= limit:
            break
    return SymmetryReport(n, {"k": k, "k1": k1, "k2": k2, "m2": m2},
                          {"A": sorted(a), "A1": sorted(a1), "A2": sorted(a2)},
                          len(s), len(s1), len(s2), agrees, tuple(bad),
                          {"chi": to_text(chi), "chi_prime": to_text(chi_p), "marker": marker})


def cyclic_triple_model(size: int = 6) -> SimpleModel:
    """r = {(i, i+1, i+2) mod size}: the stock ternary instance."""
    r = RelationTable.of(3, [(i, (i + 1) % size, (i + 2) % size) for i in range(size)])
    return SimpleModel.from_relation(size, r)

