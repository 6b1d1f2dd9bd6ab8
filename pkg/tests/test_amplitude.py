import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdisttest.amplitude import (
    DEFAULT_C,
    EstProbPlan,
    ae_outcome_pmf,
    calibrate_constant,
    coverage_probability,
    est_prob,
    load_calibration,
    queries_for,
    save_calibration,
    unitary_reference_pmf,
)
from qdisttest.distributions import (
    Distribution,
    OracleTable,
    QueryLedger,
    make_oracle,
    uniform,
)


def tv(p, q):
    return 0.5 * float(np.abs(p - q).sum())


# ---------------------------------------------------------------------------
# outcome law


@given(
    a=st.floats(0.0, 1.0, allow_nan=False),
    m=st.integers(1, 200),
)
@settings(max_examples=120, deadline=None)
def test_pmf_normalized_and_symmetric(a, m):
    pmf = ae_outcome_pmf(a, m)
    assert pmf.shape == (m,)
    assert pmf.min() >= 0.0
    assert abs(pmf.sum() - 1.0) < 1e-12
    # symmetric under y <-> m - y for y != 0
    assert np.allclose(pmf[1:], pmf[1:][::-1], atol=1e-12)


def test_pmf_zero_amplitude_is_point_mass():
    for m in (1, 2, 7, 32):
        pmf = ae_outcome_pmf(0.0, m)
        assert pmf[0] == 1.0
        # off-zero entries are pure float noise in sin(pi * integer)
        assert pmf[1:].max(initial=0.0) < 1e-25


def test_pmf_aligned_amplitude():
    m, k = 12, 3
    pmf = ae_outcome_pmf(math.sin(math.pi * k / m) ** 2, m)
    assert pmf[k] + pmf[m - k] > 1 - 1e-12
    # full amplitude with even m aligns at m/2
    pmf = ae_outcome_pmf(1.0, 4)
    assert pmf[2] == pytest.approx(1.0, abs=1e-12)


def test_pmf_rejects_bad_inputs():
    with pytest.raises(ValueError):
        ae_outcome_pmf(-0.1, 4)
    with pytest.raises(ValueError):
        ae_outcome_pmf(1.1, 4)
    with pytest.raises(ValueError):
        ae_outcome_pmf(0.5, 0)


# ---------------------------------------------------------------------------
# dense reference simulator agreement (the module's central oracle)


def test_reference_simulator_trivial_cases():
    o = OracleTable([0, 1, 2, 3], 4)
    # empty target: all mass at outcome 0
    pmf = unitary_reference_pmf(o, [], 8)
    assert pmf[0] == pytest.approx(1.0, abs=1e-12)
    # half mass with m=4: eigenphase 1/8... use aligned case a=1/2, theta=pi/4
    pmf = unitary_reference_pmf(o, [0, 1], 4)
    assert pmf[1] + pmf[3] == pytest.approx(1.0, abs=1e-12)


def test_reference_simulator_matches_closed_form():
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(60):
        s = int(rng.integers(2, 65))
        n = int(rng.integers(2, 16))
        o = OracleTable(rng.integers(0, n, size=s), n)
        k = int(rng.integers(0, n + 1))
        target = rng.choice(n, size=k, replace=False)
        m = int(rng.integers(1, 33))
        a = (
            int(o.distribution().counts[np.sort(target)].sum()) / s
            if k
            else 0.0
        )
        worst = max(worst, tv(ae_outcome_pmf(a, m), unitary_reference_pmf(o, target, m)))
    assert worst < 1e-9


def test_reference_simulator_caps():
    o = OracleTable([0] * 300, 2)
    with pytest.raises(ValueError, match="cap"):
        unitary_reference_pmf(o, [0], 4)
    o = OracleTable([0, 1], 2)
    with pytest.raises(ValueError, match="cap"):
        unitary_reference_pmf(o, [0], 100)


# ---------------------------------------------------------------------------
# est_prob


def test_est_prob_zero_mass_certainty():
    o = make_oracle(uniform(4), 4, seed=0)
    rng = np.random.default_rng(3)
    for _ in range(10**4):
        pe = est_prob(o, (), 5, rng)
        assert pe.estimate == 0.0 and pe.raw_outcome == 0


def test_est_prob_full_mass_certainty():
    o = make_oracle(uniform(4), 4, seed=0)
    rng = np.random.default_rng(4)
    for _ in range(100):
        pe = est_prob(o, (0, 1, 2, 3), 4, rng)
        assert pe.estimate == 1.0


def test_est_prob_ledger_and_support():
    o = make_oracle(uniform(8), 8, seed=0)
    rng = np.random.default_rng(5)
    ledger = QueryLedger()
    m = 17
    for _ in range(25):
        pe = est_prob(o, (0, 3), m, rng, ledger)
        assert pe.m == m
        assert pe.estimate == math.sin(math.pi * pe.raw_outcome / m) ** 2
        assert 0 <= pe.raw_outcome < m
        assert pe.target_set_mass == 0.25
    assert ledger.quantum_applications == 25 * m
    assert ledger.classical_samples == 0


def test_est_prob_duplicate_target_elements_count_once():
    o = make_oracle(uniform(4), 4, seed=0)
    rng = np.random.default_rng(6)
    pe = est_prob(o, (1, 1, 1), 8, rng)
    assert pe.target_set_mass == 0.25


def test_est_prob_coverage_contract():
    # mass 1/4 with the contract-derived budget: empirical coverage >= 1 - omega
    pa, delta, omega = 0.25, 0.05, 0.1
    m = queries_for(delta, omega, pa)
    counts = np.zeros(2, dtype=np.int64)
    counts[0], counts[1] = 1, 3
    o = make_oracle(Distribution(counts, 4), 4, seed=1)
    rng = np.random.default_rng(7)
    hits = sum(
        abs(est_prob(o, (0,), m, rng).estimate - pa) <= delta for _ in range(10**4)
    )
    assert hits / 10**4 >= 1 - omega


# ---------------------------------------------------------------------------
# query planning and calibration


def test_queries_for_monotone_in_delta():
    ms = [queries_for(d, 0.1, 0.3) for d in (0.01, 0.02, 0.05, 0.1, 0.2)]
    assert all(a >= b for a, b in zip(ms, ms[1:]))


def test_queries_for_zero_mass_bound():
    c, omega, delta = 2.0, 0.25, 0.04
    assert queries_for(delta, omega, 0.0, c) == math.ceil(c / (omega * math.sqrt(delta)))


def test_queries_for_validation():
    with pytest.raises(ValueError):
        queries_for(0.0, 0.1, 0.5)
    with pytest.raises(ValueError):
        queries_for(0.1, 0.6, 0.5)
    with pytest.raises(ValueError):
        queries_for(0.1, 0.1, 1.5)


def test_plan_satisfies_inequalities():
    plan = EstProbPlan.for_contract(0.05, 0.1, 0.3)
    assert plan.m >= plan.c * math.sqrt(plan.pa_upper) / (plan.omega * plan.delta)
    assert plan.m >= plan.c / (plan.omega * math.sqrt(plan.delta))


def test_calibrate_degenerate_grid_returns_smallest():
    rng = np.random.default_rng(8)
    c = calibrate_constant(grid=[(0.0, 0.1, 0.1)], trials_per_cell=200, rng=rng)
    assert c == 1.0


def test_calibrate_sweep_exhaustion():
    rng = np.random.default_rng(9)
    with pytest.raises(RuntimeError, match="exhausted"):
        calibrate_constant(
            grid=[(0.5, 0.05, 0.05)], trials_per_cell=400, rng=rng, sweep=[1e-3]
        )


def test_coverage_trend_in_constant():
    # Coverage trends upward as the constant (hence m) grows.  It is not
    # strictly monotone: alignment of the estimate grid with the true mass
    # shifts as m changes, producing dips of a couple of percent.
    pa, delta, omega = 0.1, 0.02, 0.1
    cov = [
        coverage_probability(pa, delta, queries_for(delta, omega, pa, c))
        for c in (0.5, 1.0, 2.0, 4.0, 8.0)
    ]
    assert cov[-1] >= cov[0]
    assert all(b >= a - 0.03 for a, b in zip(cov, cov[1:]))


def test_default_constant_meets_exact_coverage():
    from qdisttest.amplitude import default_calibration_grid

    for pa, delta, omega in default_calibration_grid():
        m = queries_for(delta, omega, pa, DEFAULT_C)
        assert coverage_probability(pa, delta, m) >= 1 - omega


def test_calibration_file_round_trip(tmp_path):
    path = tmp_path / "calibration.txt"
    save_calibration(path, DEFAULT_C, "default-3x3x3", 123)
    loaded = load_calibration(path)
    assert loaded["c"] == DEFAULT_C
    assert loaded["grid"] == "default-3x3x3"
    assert loaded["seed"] == 123
