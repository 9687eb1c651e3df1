from itertools import product

import pytest
from hypothesis import given, strategies as st

from dichotomy.decompose2 import (DELTA, DecompositionParams, MajorityTie, build_a_star,
                                  build_simple_decomposition, color_pairs, decompose_and_verify,
                                  majority_table, relation_model, uniform_defining_formula,
                                  verify_decomposition)
from dichotomy.logic import parse_formula
from dichotomy.splitting import s_relation
from dichotomy.structures import AnalysisParams, RelationTable, Universe, apply_permutation, \
    validate_simple_model
from dichotomy.typelab import type_partition

from strategies import relations


def rel(pairs):
    return RelationTable.of(2, pairs)


def succ(n):
    return rel([(i, (i + 1) % n) for i in range(n)])


def equiv(n, q):
    return rel([(x, y) for x in range(n) for y in range(n) if x // q == y // q])


def test_a_star_examples():
    m = relation_model(10, rel([]))
    assert build_a_star(m, set(), DecompositionParams(k=1)) == frozenset()
    m = relation_model(4, rel([]))
    assert build_a_star(m, set(), DecompositionParams(k=2)) == frozenset(range(4))
    m = relation_model(9, equiv(9, 3))
    assert build_a_star(m, {0, 3}, DecompositionParams(k=1)) == {0, 3}
    m = relation_model(3, rel([(0, 1)]))
    assert build_a_star(m, set(), DecompositionParams(k=2)) == frozenset(range(3))


def test_coloring_examples():
    pieces = color_pairs([(0, 2), (0, 3), (1, 2)])
    assert [sorted(p.pairs) for p in pieces] == [[(0, 2)], [(0, 3), (1, 2)]]
    assert len(color_pairs([(i, i + 4) for i in range(4)])) == 1
    assert color_pairs([]) == []


@given(st.sets(st.tuples(st.integers(0, 7), st.integers(0, 7))))
def test_coloring_sound(pairs):
    pieces = color_pairs(pairs)
    union = [e for p in pieces for e in p.pairs]
    assert sorted(union) == sorted(pairs)  # disjoint and covering
    assert all(p.is_injective for p in pieces)
    outd = max((sum(1 for e in pairs if e[0] == x) for x, _ in pairs), default=0)
    ind = max((sum(1 for e in pairs if e[1] == y) for _, y in pairs), default=0)
    assert len(pieces) <= max(0, outd + ind - 1)


def test_majority_examples():
    m = relation_model(6, rel([(0, 5), (1, 5)]))
    t = majority_table(m, [{0, 1, 2}])
    assert t.t_values[(5, 0)] is True and t.t_values[(4, 0)] is False
    m = relation_model(4, rel([(x, y) for x in range(3) for y in range(4)]))
    t = majority_table(m, [{0, 1, 2}])
    assert all(t.t_values[(y, 0)] for y in range(4)) and len(t.parts[0]) == 1
    # two classes voting in opposite directions on y in {0..5}
    pairs = [(x, y) for x in (0, 1, 2) for y in (0, 1, 2)] + [(x, y) for x in (3, 4, 5) for y in (3, 4, 5)]
    t = majority_table(relation_model(6, rel(pairs)), [{0, 1, 2}, {3, 4, 5}])
    assert t.vector(0) == (True, False) and t.vector(3) == (False, True)
    with pytest.raises(MajorityTie):
        majority_table(relation_model(4, rel([(0, 0), (1, 0)])), [{0, 1, 2, 3}])


def test_pipeline_examples():
    for r, n in ((rel([]), 8), (succ(8), 8), (equiv(8, 4), 8)):
        dec, phi, ver = decompose_and_verify(Universe(n), r)
        assert ver.ok
    dec = build_simple_decomposition(Universe(8), succ(8), DecompositionParams(1, 2))
    assert dec.model.function_values  # the successor pieces
    dec = build_simple_decomposition(Universe(8), equiv(8, 4), DecompositionParams(1, 1), auto=True)
    assert not dec.model.function_values or all(len(f) == 0 for f in dec.model.function_values.values())


def test_trivial_relations():
    for r in (rel([]), rel(list(product(range(5), repeat=2)))):
        assert decompose_and_verify(Universe(5), r)[2].ok


def test_verify_reports_counterexample():
    dec, _, _ = decompose_and_verify(Universe(3), rel([(0, 1)]))
    res = verify_decomposition(dec, parse_formula("~x=x"), rel([(0, 1)]))
    assert not res.ok and res.counterexamples == ((0, 1),)


def test_single_element_universe():
    for r in (rel([]), rel([(0, 0)])):
        assert decompose_and_verify(Universe(1), r)[2].ok


def test_uniform_formula_when_basis_small():
    dec, _, _ = decompose_and_verify(Universe(2), rel([(0, 1)]), DecompositionParams(1, 1, ()))
    if len(dec.atom_basis) <= 3:
        phi, model = uniform_defining_formula(dec, rel([(0, 1)]))
        assert verify_decomposition(model, phi, rel([(0, 1)])).ok
    else:
        with pytest.raises(ValueError):
            uniform_defining_formula(dec, rel([(0, 1)]))


@given(relations(1, 9))
def test_exactness_and_size_checks(nr):
    n, r = nr
    dec, phi, ver = decompose_and_verify(Universe(n), r)
    assert ver.ok
    assert all(ok for _, ok, _ in dec.checks), dec.checks
    sizes = AnalysisParams(max([len(v) for v in dec.model.predicate_values.values()] + [0]),
                           max([len(v) for v in dec.model.function_values.values()] + [0]), 1, 1)
    assert validate_simple_model(dec.model, sizes) == []


@given(relations(2, 8), st.data())
def test_isomorphism_invariance(nr, data):
    n, r = nr
    perm = tuple(data.draw(st.permutations(range(n))))
    d1, _, v1 = decompose_and_verify(Universe(n), r)
    d2, _, v2 = decompose_and_verify(Universe(n), apply_permutation(r, perm))
    assert v1.ok and v2.ok


@given(relations(3, 9))
def test_majority_identity_on_pipeline_classes(nr):
    n, r = nr
    dec = build_simple_decomposition(Universe(n), r, auto=True)
    m = relation_model(n, r)
    k = dec.params.k
    part = type_partition(m, DELTA, dec.a)
    s = s_relation(m, DELTA, dec.a, k, 1, part).binary_pairs()
    for i, b in enumerate(dec.majority.big_classes if dec.majority else ()):
        for x in b:
            for y in range(n):
                assert (((x, y) in r.tuples) == dec.majority.t_values[(y, i)]) != ((x, y) in s)
