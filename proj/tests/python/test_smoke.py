import math

import pytest

import schedpred


def test_closed_forms():
    assert schedpred.opt_objective([1, 2, 3]) == pytest.approx(10.0)
    assert schedpred.round_robin_objective([1, 2]) == pytest.approx(5.0)
    assert schedpred.rtc_expected_objective([1, 2]) == pytest.approx(4.5)


def test_simulate_round_robin():
    out = schedpred.simulate([1.0, 2.0], alg="rr")
    assert out["completion"] == pytest.approx([2.0, 3.0])
    assert out["objective"] == pytest.approx(5.0)
    assert out["ratio"] == pytest.approx(1.25)


def test_simulate_crrr_with_known_job():
    out = schedpred.simulate([1.0, 2.0], alg="crrr", known=[0])
    assert out["objective"] == pytest.approx(5.0)


def test_sampling_is_deterministic():
    a = schedpred.sample("pareto:1,1.1", 20, seed=7)
    b = schedpred.sample("pareto:1,1.1", 20, seed=7)
    assert a == b
    assert all(s >= 1.0 for s in a)
    assert sorted(schedpred.known_subset(4, 4, seed=3)) == [0, 1, 2, 3]


def test_bounds_values():
    b = schedpred.bounds(2, 1)
    assert b["switch-perfect"] == pytest.approx(7.0 / 6.0)
    assert b["mixture-perfect"] == pytest.approx(1.125)
    assert schedpred.bounds(10, 0)["lb-exponential-finite"] == pytest.approx(2 - 4 / 13)


def test_alpha_phi():
    assert schedpred.alpha_phi("exp") == pytest.approx(2 * (1 - 1 / math.e), abs=1e-6)


def test_exact_enumeration():
    value, outcomes = schedpred.exact_expected_objective("rtc", [1.0, 2.0], 0)
    assert value == pytest.approx(4.5)
    assert outcomes == 2
    value, _ = schedpred.exact_expected_objective("switch", [1.0, 2.0], 1)
    assert value == pytest.approx(4.5)


def test_estimate_ratio_deterministic_point():
    row = schedpred.estimate_ratio("rr", sizes=[1.0, 2.0], trials=32)
    assert row["ratio"] == pytest.approx(1.25)
    assert row["std_err"] == 0.0
    again = schedpred.estimate_ratio("rr", sizes=[1.0, 2.0], trials=32)
    assert row == again


def test_prediction_error():
    assert schedpred.prediction_error([1, 2, 3], [0, 2], [0.5, 4.0]) == pytest.approx(1.5)
