from itertools import product

from hypothesis import given, strategies as st

from dichotomy.logic import evaluate
from dichotomy.splitting import (SRelation, greedy_splitting_set, l_star, m_sequence, majority_bound,
                                 minority_set, per_target_bound, s_relation, verify_split_bounds)
from dichotomy.structures import RelationTable, SimpleModel
from dichotomy.typelab import delta, type_partition

import pytest

from strategies import binary_models

EDGE = delta("r(x,y) :: x ; y")


def rel_model(n, pairs):
    return SimpleModel.from_relation(n, RelationTable.of(2, pairs))


def eq_2x4():
    return rel_model(8, [(x, y) for x in range(8) for y in range(8) if x // 4 == y // 4])


def succ(n):
    return rel_model(n, [(i, (i + 1) % n) for i in range(n)])


def oracle_minority(m, d, a, k, member, params):
    s = d[member]
    part = type_partition(m, d, a)
    truth = {x: evaluate(m, s.formula, dict(zip(s.object_vars, (x,)), **dict(zip(s.param_vars, params))))
             for x in range(m.size)}
    out = set()
    for c in part.classes:
        for x in c:
            if sum(1 for y in c if truth[y] == truth[x]) <= k:
                out.add(x)
    return out


def test_minority_examples():
    # one class {0..4} (A empty, no parameters in play), r(., 7) true only at 0
    m = rel_model(8, [(0, 7)])
    d = delta("r(x,y) :: x ; y")
    ms = minority_set(m, d, set(), 1, 0, (7,))
    assert 0 in ms and not ms & {1, 2, 3, 4}
    assert minority_set(m, d, set(), 8, 0, (7,)) == set(range(8))


def test_minority_arity_errors():
    with pytest.raises(ValueError):
        minority_set(succ(4), EDGE, set(), 1, 0, (1, 2))


def test_s_relation_examples():
    assert s_relation(eq_2x4(), EDGE, set(), 1, 1).pairs == frozenset()
    s = s_relation(succ(8), EDGE, set(), 1, 1)
    assert s.binary_pairs() == {((y - 1) % 8, y) for y in range(8)}
    assert s_relation(rel_model(5, []), EDGE, set(), 1, 1).pairs == frozenset()
    with pytest.raises(ValueError, match="no formula of parameter arity 2"):
        s_relation(succ(4), EDGE, set(), 1, 2)


def test_m_sequence_arithmetic():
    assert m_sequence(1, 1, 1) == [3, 2, 0]
    assert majority_bound(1, 1, 1) == 4


def test_greedy_examples():
    cert = greedy_splitting_set(eq_2x4(), EDGE, 2, 1)
    assert cert.a == frozenset() and cert.l0 == 0
    cert = greedy_splitting_set(rel_model(6, []), EDGE, 3, 1)
    assert cert.a == frozenset() and cert.passed


def test_bound_arithmetic():
    assert l_star(1, 2) == 16
    assert per_target_bound(1, 2, 16) == 20


def test_empty_s_passes():
    rep = verify_split_bounds(rel_model(6, []), EDGE, set())
    assert rep.observed["max_in_degree"] == 0 and rep.observed["heavy_sources"] == 0 and rep.passed


POOL = ["r(x,y) :: x ; y", "r(y,x) :: x ; y", "r(x,x) :: x ;", "E w. (r(x,w) & r(w,y)) :: x ; y"]
deltas = st.lists(st.sampled_from(POOL), min_size=1, max_size=2, unique=True).map(lambda ls: delta(*ls))


@given(binary_models(1, 7), deltas, st.integers(0, 4), st.data())
def test_minority_matches_oracle(m, d, k, data):
    a = data.draw(st.sets(st.integers(0, m.size - 1), max_size=2))
    i = data.draw(st.integers(0, len(d) - 1))
    params = tuple(data.draw(st.integers(0, m.size - 1)) for _ in range(d[i].param_arity))
    assert minority_set(m, d, a, k, i, params) == oracle_minority(m, d, a, k, i, params)


@given(binary_models(1, 7), st.integers(0, 3), st.integers(0, 3))
def test_s_relation_monotone_in_k(m, k1, k2):
    lo, hi = sorted((k1, k2))
    assert s_relation(m, EDGE, set(), lo, 1).pairs <= s_relation(m, EDGE, set(), hi, 1).pairs


@given(binary_models(1, 10), deltas, st.integers(1, 3))
def test_greedy_certificate(m, d, k):
    cert = greedy_splitting_set(m, d, k)
    assert len(cert.a) <= cert.n * (k + 1)
    for name in ("size", "split", "few_heavy_types"):
        assert cert.check(name).passed, cert.as_dict()
    # split property, exhaustively and independently of the certificate
    part = type_partition(m, d, cert.a)
    side = (k + 1) * 2 ** cert.majority_bound
    for s in d:
        for b in product(range(m.size), repeat=s.param_arity):
            for c in part.classes:
                yes = sum(1 for x in c if evaluate(m, s.formula,
                                                   dict(zip(s.object_vars, (x,)), **dict(zip(s.param_vars, b)))))
                assert min(yes, len(c) - yes) <= side


@given(binary_models(1, 9), deltas, st.integers(1, 3))
def test_bounds_hold_for_greedy_sets(m, d, k):
    cert = greedy_splitting_set(m, d, k)
    rep = verify_split_bounds(m, d, cert.a)
    assert rep.passed, rep.as_dict()
    assert all(v >= 0 for v in rep.slack.values())


def test_srelation_serializes():
    s = SRelation(1, frozenset({(0, (1,))}), 1, frozenset())
    assert s.as_dict()["pairs"] == [[0, [1]]]
