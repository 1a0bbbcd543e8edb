"""Acceptance gate: every criterion at its stated tolerance, one line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines, or `greedylab verify` for the same suite from the command line.
"""

from greedylab.acceptance import CRITERIA, Profile

PROFILE = Profile(quick=False, seed=42)

_cache = {}


def _run(number: int):
    if number not in _cache:
        result = CRITERIA[number - 1](PROFILE)
        print(result.line())
        _cache[number] = result
    return _cache[number]


def test_criterion_1_truncation_norm_identity():
    res = _run(1)
    assert res.passed, res.details
    assert res.details["worst_error"] <= 1e-10
    assert res.runtime < 5.0


def test_criterion_2_divergence_at_desk_scale():
    res = _run(2)
    assert res.passed, res.details
    assert res.details["worst_spike_sum_error"] <= 1e-9
    assert res.details["norm_at_top"] > 4.0
    assert res.details["enumeration_violations"] == 0
    assert res.runtime < 60.0


def test_criterion_3_unconditional_sanity():
    res = _run(3)
    assert res.passed, res.details
    for row in res.details["table"]:
        assert row["ok"], row


def test_criterion_4_summing_not_quasi_greedy():
    res = _run(4)
    assert res.passed, res.details
    assert res.details["certified_lower_bounds"] == [float(d) for d in range(2, 17)]


def test_criterion_5_transfer_bound():
    res = _run(5)
    assert res.passed, res.details
    assert res.details["violations"] == 0
    assert res.details["applicable_pairs"] > 0


def test_criterion_6_bounded_gap_inequality():
    res = _run(6)
    assert res.passed, res.details
    assert res.details["violations"] == 0
    assert res.details["trials"] >= 9_000


def test_criterion_7_suppression_one_bound():
    res = _run(7)
    assert res.passed, res.details
    assert res.details["total_trials"] >= 10_000
    assert res.details["violations"] == 0


def test_criterion_8_quasi_banach_suites():
    res = _run(8)
    assert res.passed, res.details
    assert res.details["failures"] == 0
    assert res.details["alphas"]["lp:1/2"] == 2.0


def test_criterion_9_determinism():
    res = _run(9)
    assert res.passed, res.details
    assert res.details["mismatches"] == []
    assert res.details["files_compared"] > 0
