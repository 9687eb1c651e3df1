import json

import pytest
from hypothesis import given, strategies as st

from dichotomy.structures import (AnalysisParams, PartialInjection, RelationTable, SearchLimitExceeded,
                                  SimpleModel, SimpleVocabulary, StructureError, Universe, apply_permutation,
                                  compose, is_isomorphic_copy, load_structure, structure_from_dict,
                                  structure_to_dict, validate_simple_model)

from strategies import relations


def test_universe_rejects_empty():
    with pytest.raises(ValueError):
        Universe(0)


def test_relation_table_arity_checked():
    with pytest.raises(ValueError):
        RelationTable.of(2, [(0, 1, 2)])


def _model_with(preds=None, funcs=None, size=6):
    preds, funcs = preds or {}, funcs or {}
    voc = SimpleVocabulary((), tuple(preds), tuple(funcs))
    return SimpleModel(Universe(size), voc, {}, preds, funcs, {})


def test_validate_predicate_within_bound():
    m = _model_with({"s": {0, 1}})
    assert validate_simple_model(m, AnalysisParams(3, 3, 1, 1)) == []


def test_validate_function_domain_too_large():
    m = _model_with(funcs={"f": PartialInjection.of({0: 1, 1: 2, 2: 3, 3: 4})})
    v = validate_simple_model(m, AnalysisParams(3, 2, 1, 1))
    assert len(v) == 1 and v[0].symbol == "f" and "domain" in v[0].kind


def test_validate_not_injective():
    m = _model_with(funcs={"f": PartialInjection.of({0: 1, 2: 1})})
    v = validate_simple_model(m, AnalysisParams(5, 5, 1, 1))
    assert [x.kind for x in v] == ["not injective"]


def test_permutation_examples():
    assert apply_permutation(RelationTable.of(2, [(0, 1)]), (1, 0)).tuples == {(1, 0)}
    assert apply_permutation(RelationTable.of(2, [(0, 1), (1, 2)]), (1, 2, 0)).tuples == {(1, 2), (2, 0)}


def test_permutation_must_be_bijective():
    with pytest.raises(StructureError):
        apply_permutation(RelationTable.of(2, [(0, 1)]), (0, 0))


@given(st.data())
def test_permutation_group_action(data):
    n, r = data.draw(relations(1, 6))
    p = tuple(data.draw(st.permutations(range(n))))
    q = tuple(data.draw(st.permutations(range(n))))
    assert apply_permutation(r, tuple(range(n))) == r
    assert apply_permutation(apply_permutation(r, q), p) == apply_permutation(r, compose(p, q))
    assert len(apply_permutation(r, p)) == len(r)


def test_isomorphic_copy_examples():
    w = is_isomorphic_copy(RelationTable.of(2, [(0, 1)]), RelationTable.of(2, [(2, 3)]), Universe(4))
    assert w[:2] == (2, 3) and w == (2, 3, 0, 1)
    r = RelationTable.of(2, [(0, 1), (1, 2)])
    assert is_isomorphic_copy(r, r, Universe(3)) == (0, 1, 2)
    assert is_isomorphic_copy(RelationTable.of(2, [(0, 1)]), RelationTable.of(2, [(0, 1), (1, 0)]),
                              Universe(2)) is None


def test_isomorphic_copy_least_witness_by_brute_force():
    from itertools import permutations
    r1 = RelationTable.of(2, [(0, 1)])
    r2 = RelationTable.of(2, [(2, 3)])
    least = min(p for p in permutations(range(4)) if apply_permutation(r1, p) == r2)
    assert is_isomorphic_copy(r1, r2, Universe(4)) == least


def test_isomorphic_copy_limit():
    with pytest.raises(SearchLimitExceeded):
        is_isomorphic_copy(RelationTable.of(2, []), RelationTable.of(2, []), Universe(11))


@given(st.data())
def test_isomorphic_copy_symmetric_and_witnessed(data):
    n, r1 = data.draw(relations(1, 5))
    p = tuple(data.draw(st.permutations(range(n))))
    r2 = apply_permutation(r1, p) if data.draw(st.booleans()) else data.draw(relations(n, n))[1]
    w12 = is_isomorphic_copy(r1, r2, Universe(n))
    w21 = is_isomorphic_copy(r2, r1, Universe(n))
    assert (w12 is None) == (w21 is None)
    if w12 is not None:
        assert apply_permutation(r1, w12) == r2


def test_structure_roundtrip(tmp_path):
    data = {"universe": 4, "relations": [{"name": "r", "arity": 2, "tuples": [[2, 3], [0, 1]]}],
            "predicates": [{"name": "s", "elements": [1]}], "functions": [{"name": "f", "pairs": [[0, 1]]}],
            "constants": {"c": 2}, "lambda0": 2}
    sf = structure_from_dict(data)
    out = structure_to_dict(sf.model, sf.lambda0)
    assert out["relations"][0]["tuples"] == [[0, 1], [2, 3]]
    assert structure_from_dict(out).model == sf.model
    p = tmp_path / "m.json"
    p.write_text(json.dumps(data))
    assert load_structure(p).lambda0 == 2


def test_structure_rejects_unknown_keys_and_bad_json(tmp_path):
    with pytest.raises(StructureError):
        structure_from_dict({"universe": 2, "colour": 1})
    with pytest.raises(StructureError):
        structure_from_dict({"universe": 2, "relations": [{"name": "r", "arity": 2, "tuples": [[0, 5]]}]})
    p = tmp_path / "bad.json"
    p.write_text('{"universe": 3,\n')
    with pytest.raises(StructureError, match="line 2"):
        load_structure(p)


def test_default_lambdas_are_ceil_sqrt():
    assert AnalysisParams.default_for(10).lambda0 == 4
    assert AnalysisParams.default_for(9).lambda1 == 3
