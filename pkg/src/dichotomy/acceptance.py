"""The acceptance suite, shared by ``selftest`` and the pytest acceptance tests.

Every criterion is deterministic given the seed.  Reports contain only
integers, booleans and strings; wall-clock times are collected separately
and only shown on request, so two runs give byte-identical reports.
"""
from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import factorial

from .decompose2 import DELTA, decompose_and_verify
from .logic import definable_relation
from .probes.arith import grid_base, mutate_witness, search_arithmetic_interpretation, \
    verify_arithmetic_interpretation
from .probes.census import count_census
from .probes.configs import find_matching_configuration, find_order_configuration
from .probes.dichotomy import dichotomy_probe
from .probes.families import GENERATORS, FamilyDescriptor, ceil_sqrt, generate
from .logic import parse_formula
from .splitting import greedy_splitting_set, verify_split_bounds
from .structures import RelationTable, SimpleModel, Universe
from .sunflower import code_delta_system, delta_bound, extract_delta_system, verify_coding
from .typelab import delta, interpret_equivalence_formula, max_param_arity, type_partition

SCHEMA = 1


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0  # wall clock; kept out of the report

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number}: {self.name}"

    def as_dict(self, timing: bool = False) -> dict:
        out = {"number": self.number, "name": self.name, "passed": self.passed, "detail": self.detail}
        if timing:
            out["elapsed_ms"] = int(self.seconds * 1000)
        return out


def _timed(fn, *args):
    t = time.perf_counter()
    res = fn(*args)
    res.seconds = time.perf_counter() - t
    return res


def _within(res: CriterionResult, limit_s: int) -> CriterionResult:
    # the limit is checked, but only the boolean enters the report
    ok = res.seconds < limit_s
    res.detail["time_limit_s"] = limit_s
    res.detail["within_time_limit"] = ok
    res.passed = res.passed and ok
    return res


def _histogram(values) -> dict:
    out: dict = {}
    for v in values:
        out[str(v)] = out.get(str(v), 0) + 1
    return dict(sorted(out.items(), key=lambda kv: int(kv[0])))


# -- 1, 2: decomposition -------------------------------------------------------

def criterion_1(seed: int = 0) -> CriterionResult:
    u = Universe(3)
    cells = list(product(range(3), repeat=2))
    failures, ks = [], []
    for mask in range(1 << 9):
        r = RelationTable.of(2, [c for i, c in enumerate(cells) if mask >> i & 1])
        dec, _, ver = decompose_and_verify(u, r)
        ks.append(dec.params.k)
        if not ver.ok:
            failures.append(mask)
    return CriterionResult(1, "decomposition exact on all 512 relations of size 3", not failures,
                           {"relations": 512, "failures": failures[:10], "k_histogram": _histogram(ks)})


DENSITIES = (Fraction(1, 10), Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(9, 10))


def random_relation(rng: random.Random, n: int, p: Fraction) -> RelationTable:
    return RelationTable.of(2, [(i, j) for i in range(n) for j in range(n)
                                if rng.randrange(p.denominator) < p.numerator])


def decomposition_sample(seed: int, count: int = 200):
    rng = random.Random(seed * 7919 + 2)
    out = []
    structured = [g for g in GENERATORS if g != "random-graph(p)"]
    for i in range(count):
        n = rng.randint(4, 12)
        if i % 4 == 3:
            name = structured[(i // 4) % len(structured)]
            out.append((f"{name}:{n}", n, generate(name, n)))
        else:
            p = DENSITIES[i % len(DENSITIES)]
            out.append((f"random({p}):{n}", n, random_relation(rng, n, p)))
    return out


def criterion_2(seed: int = 0) -> CriterionResult:
    failures, ks, bad_checks = [], [], 0
    sample = decomposition_sample(seed)
    for label, n, r in sample:
        dec, _, ver = decompose_and_verify(Universe(n), r)
        ks.append(dec.params.k)
        bad_checks += sum(1 for _, ok, _ in dec.checks if not ok)
        if not ver.ok:
            failures.append(label)
    return CriterionResult(2, "decomposition exact on 200 sampled relations of size 4..12", not failures,
                           {"relations": len(sample), "failures": failures[:10], "k_histogram": _histogram(ks),
                            "failed_size_checks": bad_checks})


# -- 3, 4, 5: types, greedy certificate, bound lemma ---------------------------

DELTA_POOL = ("r(x,y) :: x ; y", "r(y,x) :: x ; y", "r(x,x) :: x ;", "E w. (r(x,w) & r(w,y)) :: x ; y",
              "(r(x,y) | r(y,x)) :: x ; y", "x = y :: x ; y", "p(x) :: x ;", "E[>1] w. r(x,w) :: x ;",
              "(r(x,y) & r(y,z)) :: x ; y,z")


@dataclass(frozen=True)
class SuiteItem:
    label: str
    model: SimpleModel
    delta: tuple
    a: tuple
    k: int


def type_suite(seed: int, count: int = 100) -> list[SuiteItem]:
    rng = random.Random(seed * 7919 + 3)
    out = []
    for i in range(count):
        n = rng.randint(2, 10)
        p = DENSITIES[rng.randrange(len(DENSITIES))]
        r = random_relation(rng, n, p)
        preds = [x for x in range(n) if rng.randrange(2)]
        m = SimpleModel.from_relation(n, r).with_(predicates={"p": preds})
        d = delta(*rng.sample(DELTA_POOL, rng.randint(1, 3)))
        a = tuple(sorted(rng.sample(range(n), rng.randint(0, min(3, n)))))
        out.append(SuiteItem(f"#{i} n={n} p={p}", m, d, a, rng.randint(1, 3)))
    return out


def criterion_3(seed: int = 0) -> CriterionResult:
    bad = []
    for it in type_suite(seed):
        psi = interpret_equivalence_formula(it.delta)
        got = definable_relation(it.model.with_(predicates={"s": it.a}), psi, ["x1", "x2"]).tuples
        if got != type_partition(it.model, it.delta, it.a).pairs():
            bad.append(it.label)
    return CriterionResult(3, "equivalence formula defines exactly the type partition", not bad,
                           {"triples": 100, "mismatches": bad[:10]})


CERT_CHECKS = ("size", "split", "few_heavy_types")


def criterion_4(seed: int = 0) -> CriterionResult:
    bad, below_k = [], 0
    for it in type_suite(seed):
        cert = greedy_splitting_set(it.model, it.delta, it.k)
        for name in CERT_CHECKS:
            if not cert.check(name).passed:
                bad.append(f"{it.label}: {name}")
        below_k += not cert.check("k_not_exceeded").passed
    return CriterionResult(4, "greedy certificate: size, split and few heavy types", not bad,
                           {"instances": 100, "violations": bad[:10],
                            "k_below_k_delta": below_k,
                            "note": "k_not_exceeded is informational: k is drawn from 1..3 at random"})


def criterion_5(seed: int = 0) -> CriterionResult:
    bad, tested, skipped = [], 0, 0
    min_slack: dict = {}
    for it in type_suite(seed):
        if max(1, max_param_arity(it.delta)) != 1:
            skipped += 1  # the three bounds are stated for the binary case
            continue
        cert = greedy_splitting_set(it.model, it.delta, it.k)
        rep = verify_split_bounds(it.model, it.delta, cert.a)
        tested += 1
        for key, s in rep.slack.items():
            min_slack[key] = s if key not in min_slack else min(min_slack[key], s)
        if not rep.passed:
            bad.append(it.label)
    return CriterionResult(5, "bound lemma holds for greedy parameter sets", not bad and tested > 0,
                           {"tested": tested, "skipped_parameter_arity_2": skipped, "failures": bad[:10],
                            "min_slack": dict(sorted(min_slack.items()))})


# -- 6: delta systems ----------------------------------------------------------

ALPHABETS = (2, 3, 4, 8)


def criterion_6(seed: int = 0, runs: int = 10_000, code_every: int = 100) -> CriterionResult:
    exhaustive_fail = sum(1 for s in product(range(4), repeat=5)
                          if not extract_delta_system([(v,) for v in s], 3, 1))
    per = {}
    failures, coding_fail, coded = [], 0, 0
    for n in (1, 2, 3):
        for m in (2, 3, 4):
            length = delta_bound(n, m)
            rng = random.Random(seed * 7919 + 100 * n + m)
            ok = 0
            for i in range(runs):
                a = ALPHABETS[i % len(ALPHABETS)]
                table = bytes(v % a for v in range(256))
                seq = list(zip(*[rng.randbytes(length).translate(table) for _ in range(n)]))
                e = extract_delta_system(seq, m, n)
                if e is None or len(e.indices) != m:
                    failures.append([n, m, i])
                    continue
                ok += 1
                if i % code_every == 0:
                    sub = [seq[j] for j in e.indices]
                    b = code_delta_system(Universe(max(8, 1 << n)), sub, e.pattern)
                    coded += 1
                    coding_fail += not verify_coding(b, sub).ok
            per[f"n={n},m={m}"] = {"length": length, "succeeded": ok}
    passed = exhaustive_fail == 0 and not failures and coding_fail == 0
    return CriterionResult(6, "delta systems: exhaustive, randomized and coding", passed,
                           {"exhaustive_sequences": 4 ** 5, "exhaustive_failures": exhaustive_fail,
                            "randomized": per, "failures": failures[:10],
                            "coding_bundles": coded, "coding_failures": coding_fail})


# -- 7: arithmetic -------------------------------------------------------------

def criterion_7(seed: int = 0) -> CriterionResult:
    detail, passed = {}, True
    for n, limit in ((2, 10), (3, 600)):
        t = time.perf_counter()
        res = search_arithmetic_interpretation(grid_base(n), n)
        fast = time.perf_counter() - t < limit
        w = res.witness
        ok = w is not None and verify_arithmetic_interpretation(w).ok
        false_accepts = [lab for lab, mw in mutate_witness(w) if verify_arithmetic_interpretation(mw).ok] \
            if w is not None else ["no witness"]
        detail[f"n={n}"] = {"found": w is not None, "verified": ok, "candidates": res.candidates,
                            "depth": w.depth if w else None, "parameters": list(w.parameters) if w else None,
                            "time_limit_s": limit, "within_time_limit": fast,
                            "mutations": 20, "false_accepts": false_accepts}
        passed = passed and ok and fast and not false_accepts
    return CriterionResult(7, "arithmetic interpretation found, verified, mutations rejected", passed, detail)


# -- 8: dichotomy probe --------------------------------------------------------

def oracle_k_delta_edge(m: SimpleModel, lambda0: int) -> int:
    """Brute force for Delta = {r(x;y)}: label x by (r(x,b) for b in A), over all |A| <= lambda0."""
    r = m.relation_values["r"].tuples
    best = 0
    for size in range(min(lambda0, m.size) + 1):
        for a in combinations(range(m.size), size):
            labels: dict = {}
            for x in range(m.size):
                key = tuple((x, b) in r for b in a)
                labels[key] = labels.get(key, 0) + 1
            sizes = list(labels.values())
            big = max((k for k in range(1, m.size + 1) if sum(1 for s in sizes if s >= k) >= k), default=0)
            best = max(best, big)
    return best


def criterion_8(seed: int = 0) -> CriterionResult:
    succ = dichotomy_probe(FamilyDescriptor.generated("successor", range(4, 17), 2, 2, seed), DELTA)
    bal = dichotomy_probe(FamilyDescriptor.generated("balanced-equivalence", [4, 9, 16], "sqrt", "sqrt", seed),
                          DELTA)
    oracle_s = [oracle_k_delta_edge(SimpleModel.from_relation(n, generate("successor", n)), 2)
                for n in range(4, 17)]
    oracle_b = [oracle_k_delta_edge(SimpleModel.from_relation(n, generate("balanced-equivalence", n)),
                                    ceil_sqrt(n)) for n in (4, 9, 16)]
    passed = (succ.k_vector == oracle_s == [1] * 13 and succ.verdict == "bounded"
              and bal.k_vector == oracle_b == [2, 3, 4] and bal.verdict == "growing")
    return CriterionResult(8, "probe contrast: successor bounded, balanced equivalence growing", passed,
                           {"successor": {"k_delta": succ.k_vector, "oracle": oracle_s, "verdict": succ.verdict},
                            "balanced_equivalence": {"k_delta": bal.k_vector, "oracle": oracle_b,
                                                     "verdict": bal.verdict}})


# -- 9: census -----------------------------------------------------------------

def _pow2_loop(e: int) -> int:
    v = 1
    for _ in range(e):
        v *= 2
    return v


def _least(pred, cap: int = 64):
    return next((N for N in range(1, cap + 1) if pred(N)), None)


def census_oracle(n: int, m: int) -> dict:
    """Thresholds by plain multiplication loops, independent of the census code."""
    def fact(N):
        v = 1
        for i in range(2, N + 1):
            v *= i
        return v
    return {"arity_threshold": _least(lambda N: _pow2_loop(N ** (n + 1)) > m * m * _pow2_loop(N ** n)),
            "root_threshold": _least(lambda N: _pow2_loop(N ** n) > m * m),
            "injection_least": _least(lambda N: m * fact(N) < _pow2_loop(N ** n)),
            "equivalence_least": _least(lambda N: m * N ** N < _pow2_loop(N ** n))}


def criterion_9(seed: int = 0) -> CriterionResult:
    bad, table = [], {}
    for n in range(1, 5):
        for m in range(1, 5):
            rep = count_census(n, m)
            want = census_oracle(n, m)
            got = {k: getattr(rep, k) for k in want}
            vals_ok = not rep.values or (rep.values["two_pow_N_pow_n"] == _pow2_loop(rep.values["N"] ** n)
                                         and rep.values["N_factorial"] == factorial(rep.values["N"]))
            table[f"n={n},m={m}"] = got
            if got != want or not vals_ok or not rep.root_sufficient:
                bad.append([n, m])
    examples = count_census(1, 2).arity_threshold == 3 and count_census(1, 1).arity_threshold == 2
    return CriterionResult(9, "census thresholds match an independent big-integer loop",
                           not bad and examples, {"mismatches": bad, "thresholds": table,
                                                  "examples_ok": examples})


# -- 10: configurations --------------------------------------------------------

def criterion_10(seed: int = 0) -> CriterionResult:
    orders, matchings = {}, {}
    phi_le = parse_formula("(r(x,y) | x = y)")
    phi_r = parse_formula("r(x,y)")
    for n in range(1, 9):
        m = SimpleModel.from_relation(n, generate("linear-order", n))
        orders[str(n)] = find_order_configuration(m, phi_le, 1, 1, n, ["x", "y"]).length
    for half in range(1, 7):
        m = SimpleModel.from_relation(2 * half, generate("matching", 2 * half))
        matchings[str(2 * half)] = find_matching_configuration(m, phi_r, 2 * half, ["x", "y"]).length
    passed = all(orders[str(n)] == n for n in range(1, 9)) and \
        all(matchings[str(2 * h)] == h for h in range(1, 7))
    return CriterionResult(10, "order configuration N on orders, matching M on 2M matchings", passed,
                           {"order_lengths": orders, "matching_lengths": matchings})


# -- running -------------------------------------------------------------------

CRITERIA = (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10)
TIME_LIMITS = {1: 60, 2: 300}


def run_criteria(seed: int = 0, echo=None) -> list[CriterionResult]:
    out = []
    for fn in CRITERIA:
        res = _timed(fn, seed)
        if res.number in TIME_LIMITS:
            _within(res, TIME_LIMITS[res.number])
        if echo:
            echo(res.line())
        out.append(res)
    return out


def report_json(results: list[CriterionResult], seed: int, timing: bool = False) -> str:
    body = {"schema": SCHEMA, "seed": seed, "criteria": [r.as_dict(timing) for r in results]}
    return json.dumps(body, indent=2, sort_keys=True)


def run_acceptance(seed: int = 0, echo=None, determinism: bool = True) -> list[CriterionResult]:
    """Criteria 1..10, then criterion 11 by a second full run compared byte for byte."""
    first = run_criteria(seed, echo)
    if not determinism:
        return first
    t = time.perf_counter()
    second = run_criteria(seed)
    same = report_json(first, seed) == report_json(second, seed)
    res = CriterionResult(11, "two runs give byte-identical reports", same,
                          {"report_bytes": len(report_json(first, seed).encode())},
                          time.perf_counter() - t)
    if echo:
        echo(res.line())
    return first + [res]
