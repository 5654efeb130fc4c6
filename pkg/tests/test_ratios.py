"""Closed-form contribution ratios: identities, frozen values, domains."""

import numpy as np
import pytest

from wavecorr.ratios import (
    RatioInputs,
    alpha_threshold,
    contribution_ratio_asymptotic,
    contribution_ratio_exact,
    contribution_ratio_reduced,
    homogeneous_contribution,
    inhomogeneous_contribution,
    log_contribution_ratio_asymptotic,
    log_contribution_ratio_exact,
    reduced_log_ratio,
)

# === identities ===


def _random_inputs(rng):
    m = int(rng.integers(2, 60))
    a = float(rng.uniform(0.02, 0.5))
    b2 = float(rng.uniform(0.1, 0.99)) / a  # keep a*b2 in (0, 1)
    return RatioInputs(m, a, b2)


def test_exact_equals_exp_of_log(rng):
    for _ in range(300):
        r = _random_inputs(rng)
        np.testing.assert_allclose(
            contribution_ratio_exact(r),
            np.exp(log_contribution_ratio_exact(r)),
            rtol=1e-12,
        )


def test_log_ratio_is_log_difference(rng):
    # log(inhom/hom contribution) decomposes into the two named pieces
    for _ in range(300):
        r = _random_inputs(rng)
        np.testing.assert_allclose(
            log_contribution_ratio_exact(r),
            homogeneous_contribution(r) - inhomogeneous_contribution(r),
            rtol=1e-12,
            atol=1e-12,
        )


def test_reduced_matches_exp(rng):
    for _ in range(100):
        r = _random_inputs(rng)
        np.testing.assert_allclose(
            contribution_ratio_reduced(r),
            np.exp(reduced_log_ratio(r.sites, r.occupied)),
            rtol=1e-12,
        )


def test_asymptotic_converges_to_exact():
    # fixed occupancy 1/2, growing M: relative gap collapses
    gaps = []
    for m in (10, 100, 10_000):
        r = RatioInputs(m, 0.5 / m, float(m))
        le = log_contribution_ratio_exact(r)
        la = log_contribution_ratio_asymptotic(r)
        gaps.append(abs(la - le) / abs(le))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-6
    r = RatioInputs(10_000, 0.5 / 10_000, 1e4)
    np.testing.assert_allclose(
        contribution_ratio_asymptotic(r),
        np.exp(log_contribution_ratio_asymptotic(r)),
        rtol=1e-12,
    )


# === frozen reference values ===


def test_exact_reference_values():
    # [B2 (1-aB2)^(M-1) (aM)^M / (a(M-1))^(M-1)]^2 evaluated by hand
    np.testing.assert_allclose(
        contribution_ratio_exact(RatioInputs(3, 0.25, 2.0)), 0.7119140625, rtol=1e-12
    )
    # (16/27)^2
    np.testing.assert_allclose(
        contribution_ratio_exact(RatioInputs(4, 0.25, 2.0)),
        0.35116598079561045,
        rtol=1e-12,
    )


def test_homogeneous_reference_value():
    # 2 M log(a M); zero whenever a M = 1
    np.testing.assert_allclose(
        homogeneous_contribution(RatioInputs(3, 0.25, 2.0)),
        6 * np.log(0.75),
        rtol=1e-12,
    )
    assert homogeneous_contribution(RatioInputs(4, 0.25, 2.0)) == 0.0
    assert homogeneous_contribution(RatioInputs(2, 0.5, 1.5)) == 0.0


def test_reduced_reference_value():
    # 2 (log M + (M-1) log(1-occ)) at M=3, occ=1/2
    np.testing.assert_allclose(
        reduced_log_ratio(3, 0.5), 2 * np.log(3) - 4 * np.log(2), rtol=1e-12
    )


def test_reduced_vectorized_and_negative():
    sites = np.arange(3, 2000)
    vals = reduced_log_ratio(sites, 0.5)
    assert vals.shape == sites.shape
    assert np.all(vals < 0)


# === threshold report ===


def test_alpha_threshold_reference():
    report = alpha_threshold(RatioInputs(3, 0.25, 2.0, alpha=0.2))
    assert report.threshold == 0.25  # (1 - a b2)^2
    assert report.schrodinger_dominates
    assert report.global_bound == 1.0 / 256.0  # 1/K^2 at K=16


def test_alpha_threshold_flips():
    report = alpha_threshold(RatioInputs(3, 0.25, 2.0, alpha=0.3))
    assert not report.schrodinger_dominates


# === domain validation ===


def test_inputs_rejected():
    for args in (
        (1, 0.25, 2.0),  # too few sites
        (3, 0.0, 2.0),  # zero spacing
        (3, 0.25, 0.0),  # zero peak
        (3, 0.25, 4.0),  # a*b2 = 1 saturates
        (3, 0.25, 5.0),  # a*b2 > 1
    ):
        with pytest.raises(ValueError):
            RatioInputs(*args)
    with pytest.raises(ValueError):
        RatioInputs(3, 0.25, 2.0, alpha=0.0)
    with pytest.raises(ValueError):
        RatioInputs(3, 0.25, 2.0, prob_quanta=1)


def test_occupied_property():
    assert RatioInputs(3, 0.25, 2.0).occupied == 0.5
