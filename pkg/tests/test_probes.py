import json
from itertools import product
from math import isqrt

import pytest
from hypothesis import given, settings, strategies as st

from dichotomy.logic import parse_formula
from dichotomy.probes import (EquivalencePartition, FamilyDescriptor, count_census, cyclic_triple_model,
                              dichotomy_probe, eval_lambda, find_big_equivalence, find_matching_configuration,
                              find_order_configuration, generate, grid_base, mutate_witness,
                              search_arithmetic_interpretation, symmetry_instance_check, verdict,
                              verify_arithmetic_interpretation)
from dichotomy.probes.arith import ArithWitness, arithmetic_tables
from dichotomy.structures import RelationTable, SimpleModel, StructureError
from dichotomy.typelab import parse_delta

R = parse_formula("r(x,y)")


def model(n, pairs):
    return SimpleModel.from_relation(n, RelationTable.of(2, pairs))


def order(n):
    return model(n, [(i, j) for i in range(n) for j in range(n) if i < j])


def full(n):
    return model(n, list(product(range(n), repeat=2)))


def matching(n):
    return model(n, [(i, i + n // 2) for i in range(n // 2)])


# -- families -----------------------------------------------------------------

def test_lambda_grammar():
    assert [eval_lambda(e, 10) for e in (3, "N", "sqrt", "log", "7")] == [3, 10, 4, 4, 7]
    assert eval_lambda("sqrt", 16) == 4 and eval_lambda("log", 1) == 0
    for bad in ("N^2", -1, None):
        with pytest.raises(ValueError):
            eval_lambda(bad, 4)


def test_generators():
    assert generate("successor", 4).tuples == {(0, 1), (1, 2), (2, 3), (3, 0)}
    assert len(generate("balanced-equivalence", 9).tuples) == 27
    assert len(generate("linear-order", 5).tuples) == 10
    assert generate("matching", 6).tuples == {(0, 3), (1, 4), (2, 5)}
    assert generate("random-graph(0)", 5).tuples == set()
    assert len(generate("random-graph(1)", 4).tuples) == 16
    assert generate("random-graph(1/2)", 7, 3) == generate("random-graph(1/2)", 7, 3)
    with pytest.raises(ValueError):
        generate("nope", 3)
    with pytest.raises(ValueError):
        generate("random-graph(3/2)", 3)


def test_family_descriptor_errors(tmp_path):
    with pytest.raises(ValueError):
        FamilyDescriptor.generated("successor", [5, 4])
    with pytest.raises(StructureError):
        FamilyDescriptor.from_dict({"generator": "successor", "sizes": [3], "colour": 1})
    with pytest.raises(StructureError):
        FamilyDescriptor.from_dict({"lambda0": 2})
    p = tmp_path / "bad.json"
    p.write_text("{oops")
    with pytest.raises(StructureError, match="line 1"):
        FamilyDescriptor.load(p)


def test_family_instances():
    fam = FamilyDescriptor.from_dict({"generator": "successor", "sizes": [4, 9], "lambda0": 2, "lambda1": "sqrt"})
    insts = fam.instances()
    assert [(i.size, i.lambda0, i.lambda1) for i in insts] == [(4, 2, 2), (9, 2, 3)]


# -- verdict and probe --------------------------------------------------------

def test_verdict_rules():
    assert verdict([4, 5, 6], [1, 1, 1])[0] == "bounded"
    assert verdict([4, 9, 16], [2, 3, 4])[0] == "growing"
    assert verdict([4, 5, 6], [1, 1, 2])[0] == "inconclusive"
    assert verdict([4, 5, 6, 7], [3, 3, 1, 2])[0] == "bounded"
    assert verdict([4, 5], [None, None])[0] == "inconclusive"
    assert verdict([16, 9, 4], [4, 3, 2])[0] == "growing"  # sorted by size


@given(st.lists(st.integers(0, 6), min_size=1, max_size=7))
def test_verdict_invariants(ks):
    sizes = list(range(1, len(ks) + 1))
    v, _ = verdict(sizes, ks)
    if v == "bounded":
        assert ks.count(max(ks)) >= 2
    if v == "growing":
        assert len(ks) >= 3 and ks[-3] < ks[-2] < ks[-1]


def test_probe_examples():
    d = parse_delta("r(x,y) :: x ; y")
    succ = dichotomy_probe(FamilyDescriptor.generated("successor", range(4, 17), 2), d)
    assert succ.k_vector == [1] * 13 and succ.verdict == "bounded"
    bal = dichotomy_probe(FamilyDescriptor.generated("balanced-equivalence", [4, 9, 16], "sqrt"), d)
    assert bal.k_vector == [2, 3, 4] and bal.verdict == "growing"
    empty = dichotomy_probe(FamilyDescriptor.generated("random-graph(0)", [3, 4, 5], 1), d)
    assert empty.k_vector == [1, 1, 1] and empty.verdict == "bounded"
    assert all(r.decomposition["verified"] for r in empty.records)
    assert all(r.failure is None for r in succ.records)
    json.dumps(bal.as_dict())


# -- census -------------------------------------------------------------------

def slow_pow2(e):
    x = 1
    for _ in range(e):
        x *= 2
    return x


def slow_fact(n):
    x = 1
    for i in range(2, n + 1):
        x *= i
    return x


def test_census_examples():
    assert count_census(1, 2).arity_threshold == 3
    assert count_census(1, 1).arity_threshold == 2
    with pytest.raises(ValueError):
        count_census(0, 1)


@given(st.integers(1, 4), st.integers(1, 4))
def test_census_against_loops(n, m):
    rep = count_census(n, m)
    at = rep.arity_threshold
    assert slow_pow2(at ** (n + 1)) > m * m * slow_pow2(at ** n)
    assert at == 1 or not slow_pow2((at - 1) ** (n + 1)) > m * m * slow_pow2((at - 1) ** n)
    assert rep.values["N_factorial"] == slow_fact(at)
    assert rep.values["two_pow_N_pow_n"] == slow_pow2(at ** n)
    rt = rep.root_threshold
    assert slow_pow2(rt ** n) > m * m and (rt == 1 or slow_pow2((rt - 1) ** n) <= m * m)
    assert rep.root_sufficient
    if rep.injection_least is not None:
        assert m * slow_fact(rep.injection_least) < slow_pow2(rep.injection_least ** n)


# -- configurations -----------------------------------------------------------

def test_big_equivalence_examples():
    eq = model(9, [(x, y) for x in range(9) for y in range(9) if x // 3 == y // 3])
    hit = find_big_equivalence(eq, [R], 3)
    assert hit is not None and sorted(map(len, hit[1].classes)) == [3, 3, 3]
    succ = model(5, [(i, (i + 1) % 5) for i in range(5)])
    assert find_big_equivalence(succ, [R], 1) is None
    assert find_big_equivalence(succ, [parse_formula("x = y")], 2) is None


def test_order_configuration_examples():
    phi = parse_formula("(r(x,y) | x = y)")
    res = find_order_configuration(order(6), phi, 1, 1, 8)
    assert res.length == 6 and res.exact
    assert find_order_configuration(full(4), R, 1, 1, 8).length == 1
    assert find_order_configuration(model(4, []), R, 1, 1, 8).length == 0


def test_matching_configuration_examples():
    assert find_matching_configuration(matching(8), R, 8).length == 4
    assert find_matching_configuration(full(4), R, 8).length == 1
    assert find_matching_configuration(model(4, []), R, 8).length == 0


@settings(max_examples=10)
@given(st.integers(1, 7))
def test_order_length_equals_size(n):
    assert find_order_configuration(order(n), parse_formula("(r(x,y) | x = y)"), 1, 1, n + 2).length == n


# -- arithmetic interpretation -------------------------------------------------

@pytest.fixture(scope="module")
def arith2():
    return search_arithmetic_interpretation(grid_base(2), 2)


def test_arith_search_n2(arith2):
    assert arith2.witness is not None
    assert verify_arithmetic_interpretation(arith2.witness)


def test_arith_search_n3():
    res = search_arithmetic_interpretation(grid_base(3), 3)
    assert res.witness is not None and verify_arithmetic_interpretation(res.witness)


def test_arith_mutations_rejected(arith2):
    muts = mutate_witness(arith2.witness)
    assert len(muts) == 20
    for label, w in muts:
        assert not verify_arithmetic_interpretation(w), label
    swapped = dict(muts)["swap plus and times"]
    assert verify_arithmetic_interpretation(swapped).reasons


def test_arith_round_trip(arith2):
    w = arith2.witness
    again = ArithWitness.from_dict(json.loads(json.dumps(w.as_dict())))
    assert verify_arithmetic_interpretation(again)


def test_arith_base_precondition():
    with pytest.raises(ValueError):
        search_arithmetic_interpretation(EquivalencePartition.from_labels([0, 0, 0, 1]), 2)


def test_arithmetic_tables_partial():
    t = arithmetic_tables(3)
    assert (1, 1, 2) in t["plus"] and not any(a + b >= 3 for a, b, _ in t["plus"])
    assert (2, 1, 2) in t["times"] and (2, 2, 4) not in t["times"]


# -- symmetry -----------------------------------------------------------------

D3 = parse_delta("r(x,y,z) :: x ; y,z")


def test_symmetry_vacuous_and_generous():
    m = cyclic_triple_model(6)
    assert symmetry_instance_check(m, D3, 2, 0, 0).holds
    rep = symmetry_instance_check(m, D3, 2, 6, 6)
    assert rep.holds and rep.chi_agrees


def test_symmetry_tiny_thresholds_report_counterexamples():
    rep = symmetry_instance_check(cyclic_triple_model(6), D3, 2, 6, 0)
    assert not rep.holds and rep.counterexamples
    a, b, cs = rep.counterexamples[0]
    assert isinstance(a, int) and isinstance(cs, tuple)


def test_symmetry_needs_n_at_least_2():
    with pytest.raises(ValueError):
        symmetry_instance_check(cyclic_triple_model(6), D3, 1, 1, 1)
