from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from dichotomy.structures import Universe
from dichotomy.sunflower import (DeltaPattern, code_delta_system, delta_bound, extract_delta_system, g,
                                 minimal_delta_length, verify_coding)


def brute_has_delta(seq, m):
    """Independent oracle: try every m-subset of indices."""
    from itertools import combinations
    for idx in combinations(range(len(seq)), m):
        if DeltaPattern.of([seq[i] for i in idx], len(seq[0])) is not None:
            return True
    return False


def test_bound_values():
    assert g(3) == 5
    assert delta_bound(1, 3) == 5
    assert delta_bound(2, 3) == 17
    assert all(delta_bound(n, 1) == 1 for n in range(1, 5))
    with pytest.raises(ValueError):
        delta_bound(0, 3)


def test_extraction_examples():
    ex = extract_delta_system([(1, 2), (1, 3), (1, 4), (1, 2), (5, 6)], 3)
    assert ex.indices == (0, 1, 2)
    assert ex.pattern.constants == {0: 1} and ex.pattern.injective_positions == (1,)
    ex = extract_delta_system([(0, 1, 2)] * 4, 4)
    assert ex.indices == (0, 1, 2, 3) and ex.pattern.constants == {0: 0, 1: 1, 2: 2}
    assert ex.multiplicity == 4
    ex = extract_delta_system([(i,) for i in range(5)], 3)
    assert ex.indices == (0, 1, 2) and ex.pattern.injective_positions == (0,)


def test_extraction_below_length_and_mixed_arity():
    assert extract_delta_system([(0,), (1,)], 3) is None
    assert extract_delta_system([], 1) is None
    with pytest.raises(ValueError):
        extract_delta_system([(0,), (0, 1)], 1)


def test_exhaustive_n1_m3():
    assert all(extract_delta_system(s, 3) for s in product([(v,) for v in range(4)], repeat=5))


def test_minimal_length_small():
    assert minimal_delta_length(3, 4) == 5
    assert minimal_delta_length(3, 2) == 5  # 0,0,1,1 has neither three equal nor three distinct
    assert minimal_delta_length(2, 3) == 2


def test_pattern_partition_required():
    with pytest.raises(ValueError):
        DeltaPattern(2, ((0, 1),), ())
    assert DeltaPattern.of([(1, 2), (1, 2)], 2) is not None  # both constant
    assert DeltaPattern.of([(1, 2), (1, 3), (2, 3)], 2) is None


def test_coding_examples():
    seq = [(1, 2), (1, 3), (1, 4)]
    b = code_delta_system(Universe(8), seq)
    assert b.codes == (2, 3, 4)
    assert b.model.constant_values["c_0"] == 1
    assert b.model.predicate_values["s1"] == frozenset({2, 3, 4})
    assert verify_coding(b, seq)
    single = code_delta_system(Universe(4), [(3,)])
    assert verify_coding(single, [(3,)])
    ones = [(0,), (2,), (5,)]
    b = code_delta_system(Universe(6), ones)
    assert b.codes == (0, 2, 5) and verify_coding(b, ones)


def test_coding_all_constant_and_empty():
    seq = [(1, 2)] * 3
    b = code_delta_system(Universe(4), seq[:1])
    assert verify_coding(b, seq[:1])
    e = code_delta_system(Universe(4), [], DeltaPattern(2, (), (0, 1)))
    assert verify_coding(e, [])


def test_coding_broken_bundle_rejected():
    seq = [(1, 2), (1, 3), (1, 4)]
    b = code_delta_system(Universe(8), seq)
    broken = type(b)(b.model.with_(predicates={"s1": frozenset({2, 3})}), b.theta, b.codes, b.pattern)
    chk = verify_coding(broken, seq)
    assert not chk and chk.witness is not None


def test_coding_universe_too_small():
    with pytest.raises(ValueError):
        code_delta_system(Universe(3), [(0, 1), (0, 2)])


small_seqs = st.integers(1, 2).flatmap(
    lambda n: st.lists(st.tuples(*[st.integers(0, 3)] * n), min_size=1, max_size=9))


@given(small_seqs, st.integers(1, 4))
def test_extraction_sound_and_matches_oracle(seq, m):
    ex = extract_delta_system(seq, m)
    if ex is not None:
        assert len(ex.indices) >= m
        assert list(ex.indices) == sorted(ex.indices)
        assert ex.pattern.holds([seq[i] for i in ex.indices])
    elif len(seq) >= delta_bound(len(seq[0]), m):
        pytest.fail("no system at the bound")


@given(st.integers(1, 3), st.integers(2, 3), st.data())
def test_success_at_bound(n, m, data):
    length = delta_bound(n, m)
    seq = data.draw(st.lists(st.tuples(*[st.integers(0, 5)] * n), min_size=length, max_size=length))
    ex = extract_delta_system(seq, m)
    assert ex is not None and len(ex.indices) >= m


@settings(max_examples=25)
@given(st.integers(1, 2).flatmap(lambda n: st.lists(st.tuples(*[st.integers(0, 5)] * n),
                                                    min_size=2, max_size=8)))
def test_coding_round_trip(seq):
    ex = extract_delta_system(seq, 2)
    if ex is None:
        return
    sub = [seq[i] for i in ex.indices]
    if len(set(sub)) != len(sub) and ex.pattern.injective_positions:
        return
    sub = list(dict.fromkeys(sub))
    b = code_delta_system(Universe(6), sub, ex.pattern)
    assert verify_coding(b, sub)


@settings(max_examples=20)
@given(st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)), min_size=1, max_size=7), st.integers(2, 3))
def test_extraction_agrees_with_brute_force_existence(seq, m):
    # extraction may miss systems below the bound, but it never claims one that is absent
    ex = extract_delta_system(seq, m)
    if ex is not None:
        assert brute_has_delta(seq, m)
