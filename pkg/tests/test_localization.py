"""Estimator noise models, outage process, and fusion arithmetic."""

import math

import numpy as np
import pytest

from medmission import (
    DEFAULT_LOCALIZATION_PARAMS,
    DegradationProfile,
    PoseEstimate,
    TotalLocalizationLossError,
    auto_estimate,
    dt_fused_estimate,
    gps_estimate,
    outage_schedule,
)

LOC = DEFAULT_LOCALIZATION_PARAMS
HEALTHY = DegradationProfile(delta=0.0, outages=())


def _pose(vx, vy=None, valid=True, pos=(0.0, 0.0), source="gps"):
    vy = vx if vy is None else vy
    cov = np.diag([vx, vy]).astype(float)
    return PoseEstimate(position=pos, covariance=cov, source=source, valid=valid)


# ---------------------------------------------------------------------------
# Outage process.

def test_no_degradation_means_no_outages():
    profile = outage_schedule(0.0, 500.0, np.random.default_rng(1))
    assert profile.outages == ()


def test_outage_occurrence_probability_matches_the_arrival_process():
    # Oracle: P(any outage) = 1 - exp(-rate * horizon) for the configured
    # Poisson onsets; estimated over 1000 streams.
    horizon = 100.0
    expected = 1.0 - math.exp(-LOC.outage_rate_coeff * 1.0 * horizon)
    rng = np.random.default_rng(11)
    hits = sum(
        outage_schedule(1.0, horizon, np.random.default_rng(int(rng.integers(1 << 32)))
                        ).total_outage() > 0.0
        for _ in range(1000))
    assert abs(hits / 1000 - expected) < 0.05


def test_outage_fraction_monotone_in_degradation():
    horizon = 600.0
    means = []
    for delta in (0.0, 0.25, 0.5, 0.75, 1.0):
        rng = np.random.default_rng(7)
        total = 0.0
        for _ in range(1000):
            seed = int(rng.integers(1 << 32))
            total += outage_schedule(delta, horizon,
                                     np.random.default_rng(seed)).total_outage()
        means.append(total / 1000 / horizon)
    for lo, hi in zip(means, means[1:]):
        assert hi >= lo - 0.005
    assert means[0] == 0.0
    assert means[-1] > means[1]


def test_outage_intervals_are_disjoint_ordered_and_clipped():
    for seed in range(200):
        profile = outage_schedule(1.0, 300.0, np.random.default_rng(seed))
        last_end = 0.0
        for start, end in profile.outages:
            assert start >= last_end
            assert end > start
            assert end <= 300.0
            last_end = end


# ---------------------------------------------------------------------------
# GPS estimator.

def test_gps_invalid_inside_an_outage():
    profile = DegradationProfile(delta=0.3, outages=((10.0, 20.0),))
    est = gps_estimate((0.0, 0.0), profile, 15.0, np.random.default_rng(0))
    assert not est.valid
    est2 = gps_estimate((0.0, 0.0), profile, 25.0, np.random.default_rng(0))
    assert est2.valid


def test_gps_error_variance_matches_nominal_at_zero_degradation():
    rng = np.random.default_rng(5)
    errors = []
    for _ in range(10_000):
        est = gps_estimate((100.0, 200.0), HEALTHY, 1.0, rng)
        errors.extend([est.position[0] - 100.0, est.position[1] - 200.0])
    sample_var = float(np.var(errors))
    assert abs(sample_var - LOC.sigma_gps ** 2) / LOC.sigma_gps ** 2 < 0.05


def test_gps_reported_covariance_grows_with_degradation():
    degraded = DegradationProfile(delta=1.0, outages=())
    a = gps_estimate((0.0, 0.0), HEALTHY, 0.0, np.random.default_rng(0))
    b = gps_estimate((0.0, 0.0), degraded, 0.0, np.random.default_rng(0))
    assert b.variance_trace > a.variance_trace


def test_gps_variance_formula_monotone_in_delta():
    grid = [LOC.gps_variance(d) for d in (0.0, 0.25, 0.5, 0.75, 1.0)]
    assert all(hi > lo for lo, hi in zip(grid, grid[1:]))


# ---------------------------------------------------------------------------
# Onboard estimator.

def test_auto_estimate_is_always_valid():
    for t in (0.0, 50.0, 599.0):
        assert auto_estimate((0.0, 0.0), t, np.random.default_rng(1)).valid


def test_auto_error_variance_matches_nominal():
    rng = np.random.default_rng(6)
    errors = []
    for _ in range(10_000):
        est = auto_estimate((-50.0, 30.0), 10.0, rng)
        errors.extend([est.position[0] + 50.0, est.position[1] - 30.0])
    sample_var = float(np.var(errors))
    assert abs(sample_var - LOC.sigma_auto ** 2) / LOC.sigma_auto ** 2 < 0.05


def test_auto_reported_variance_has_no_degradation_term():
    # The estimator does not even take delta; reported covariance is fixed.
    a = auto_estimate((0.0, 0.0), 0.0, np.random.default_rng(0))
    b = auto_estimate((0.0, 0.0), 400.0, np.random.default_rng(1))
    assert a.variance_trace == b.variance_trace == 2 * LOC.sigma_auto ** 2


# ---------------------------------------------------------------------------
# Fusion.

def test_fusion_falls_back_to_the_valid_input():
    invalid = PoseEstimate((math.nan, math.nan), np.full((2, 2), np.nan), "gps", False)
    auto = _pose(4.0, pos=(12.0, -3.0), source="auto")
    fused = dt_fused_estimate(invalid, auto)
    assert fused.valid
    assert fused.source == "dt_fused"
    assert fused.position == auto.position
    assert np.array_equal(fused.covariance, auto.covariance)


def test_fusion_symmetric_case():
    fused = dt_fused_estimate(_pose(2.0), _pose(2.0, source="auto"))
    assert fused.covariance[0, 0] == pytest.approx(1.0)
    assert fused.covariance[1, 1] == pytest.approx(1.0)


def test_fusion_inverse_variance_value():
    # (1/1 + 1/3)^-1 = 0.75
    fused = dt_fused_estimate(_pose(1.0), _pose(3.0, source="auto"))
    assert fused.covariance[0, 0] == pytest.approx(0.75)


def test_fusion_with_both_invalid_raises():
    invalid = PoseEstimate((math.nan, math.nan), np.full((2, 2), np.nan), "gps", False)
    invalid_auto = PoseEstimate((math.nan, math.nan), np.full((2, 2), np.nan), "auto", False)
    with pytest.raises(TotalLocalizationLossError):
        dt_fused_estimate(invalid, invalid_auto)


def test_fusion_never_exceeds_either_input_variance():
    rng = np.random.default_rng(9)
    for _ in range(1000):
        vg = float(rng.uniform(0.1, 500.0))
        va = float(rng.uniform(0.1, 500.0))
        fused = dt_fused_estimate(_pose(vg), _pose(va, source="auto"))
        fv = fused.covariance[0, 0]
        assert fv < min(vg, va)


def test_fused_position_is_the_inverse_variance_weighted_mean():
    gps = _pose(1.0, pos=(10.0, 0.0))
    auto = _pose(3.0, pos=(20.0, 4.0), source="auto")
    fused = dt_fused_estimate(gps, auto)
    # weights 1/1 and 1/3 -> (10*3 + 20*1)/4 = 12.5 on x, (0*3 + 4*1)/4 = 1 on y
    assert fused.position[0] == pytest.approx(12.5)
    assert fused.position[1] == pytest.approx(1.0)


def test_expected_variance_ordering_fused_auto_gps():
    # For every degradation level the mean reported variance orders
    # fused <= auto <= fully degraded GPS; estimated with 1000 samples/point.
    horizon = 600.0
    gps_floor = LOC.gps_variance(1.0)
    for delta in (0.0, 0.25, 0.5, 0.75, 1.0):
        rng = np.random.default_rng(13)
        fused_vals, auto_vals = [], []
        for _ in range(1000):
            seed = int(rng.integers(1 << 32))
            stream = np.random.default_rng(seed)
            profile = outage_schedule(delta, horizon, stream)
            t = float(stream.uniform(0.0, horizon))
            gps = gps_estimate((0.0, 0.0), profile, t, stream)
            auto = auto_estimate((0.0, 0.0), t, stream)
            fused_vals.append(dt_fused_estimate(gps, auto).variance_trace)
            auto_vals.append(auto.variance_trace)
        assert np.mean(fused_vals) <= np.mean(auto_vals) <= 2 * gps_floor
