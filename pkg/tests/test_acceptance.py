"""Acceptance suite: one test per criterion, with one printed PASS/FAIL line each."""
import json

import pytest

from dichotomy.acceptance import report_json, run_acceptance

LINES: list[str] = []


@pytest.fixture(scope="module")
def results():
    res = {r.number: r for r in run_acceptance(seed=0, echo=LINES.append)}
    return res


@pytest.mark.parametrize("number", range(1, 12))
def test_criterion(results, number):
    r = results[number]
    print(r.line())
    assert r.passed, json.dumps(r.detail, sort_keys=True)[:2000]


def test_report_is_json_without_timing(results):
    text = report_json([results[i] for i in range(1, 11)], 0)
    assert "elapsed_ms" not in text and json.loads(text)["seed"] == 0
