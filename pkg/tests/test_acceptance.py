"""Acceptance suite: nine desk-scale criteria, one test per criterion.

Each test prints a single [C#] PASS line with the measured margins when it
succeeds; pytest -v adds the per-criterion PASSED/FAILED verdict.
"""

import time

import numpy as np
import pytest

from wavecorr.correlator import (
    AmplitudeGrid,
    correlator_bruteforce,
    correlator_metropolis,
)
from wavecorr.experiments import ExperimentConfig, run_experiment
from wavecorr.lattice import BoundaryPair, LatticeSpec, random_wave
from wavecorr.operators import HamiltonianSpec, expectations, hamiltonian_matrix
from wavecorr.propagator import PropagatorSpec, propagate
from wavecorr.ratios import (
    RatioInputs,
    contribution_ratio_exact,
    homogeneous_contribution,
    inhomogeneous_contribution,
    log_contribution_ratio_asymptotic,
    log_contribution_ratio_exact,
)


def _run(kind, seed=11, overrides=None):
    record, _ = run_experiment(ExperimentConfig.build(kind, overrides, seed=seed))
    return record


def _all_passed(record):
    for name, check in record.checks.items():
        assert check.passed, f"{record.kind}:{name} failed: {check.detail}"


# === C1: analytic identity suite ===


def test_c1_ratio_identities():
    start = time.monotonic()
    rng = np.random.default_rng(314159)

    def rearranged(r):
        # closed form written out independently of the library's factoring
        m, a, b2 = r.sites, r.spacing, r.peak_density
        return (
            b2
            * (1 - a * b2) ** (m - 1)
            * (a * m) ** m
            / (a * (m - 1)) ** (m - 1)
        ) ** 2

    for _ in range(1000):
        m = int(rng.integers(2, 40))
        a = float(rng.uniform(0.05, 0.5))
        b2 = float(rng.uniform(0.05, 0.95)) / a
        r = RatioInputs(m, a, b2)
        exact = contribution_ratio_exact(r)
        np.testing.assert_allclose(exact, np.exp(log_contribution_ratio_exact(r)), rtol=1e-12)
        np.testing.assert_allclose(
            np.exp(homogeneous_contribution(r) - inhomogeneous_contribution(r)),
            exact,
            rtol=1e-12,
        )
        np.testing.assert_allclose(exact, rearranged(r), rtol=1e-12)

    big = RatioInputs(10_000, 0.25, 2.0)
    ratio = np.exp(
        log_contribution_ratio_asymptotic(big) - log_contribution_ratio_exact(big)
    )
    assert abs(ratio - 1.0) <= 1e-3
    elapsed = time.monotonic() - start
    assert elapsed < 5.0
    print(f"[C1] PASS identities 1e-12 x1000, asymptotic ratio {ratio:.6f}, {elapsed:.2f}s")


# === C2: measure dominance ===


def test_c2_measure_dominance():
    start = time.monotonic()
    record = _run("measure_dominance")
    _all_passed(record)
    assert record.metrics["max_reduced_log_ratio"] < 0.0  # reduced form < 1 up to 1e6
    assert record.metrics["scan_max"] == 1_000_000
    assert record.metrics["max_cross_error"] <= 1e-10
    elapsed = time.monotonic() - start
    assert elapsed < 10.0
    print(
        f"[C2] PASS reduced<1 to M=1e6 (max log {record.metrics['max_reduced_log_ratio']:.3f}), "
        f"cross error {record.metrics['max_cross_error']:.2e}, {elapsed:.2f}s"
    )


# === C3: wave-equation oracle ===


def _kind_setups():
    lat = LatticeSpec(sites=6, spacing=0.5, time_slices=3, dt=0.05)
    return [
        (HamiltonianSpec.free(), lat),
        (HamiltonianSpec.harmonic(omega=1.0), lat),
        (HamiltonianSpec.double_well(depth=2.0), lat),
        (HamiltonianSpec.pinning(site=2, depth=3.0), lat),
        (
            HamiltonianSpec.composite_detector(
                particle_sites=2, pointer_sites=3, coupling=1.5
            ),
            lat,
        ),
    ]


def test_c3_propagation_oracle():
    start = time.monotonic()
    rng = np.random.default_rng(271828)
    worst_norm = worst_energy = worst_revert = 0.0
    for h, lat in _kind_setups():
        psi0 = random_wave(lat, rng)
        e0, _ = expectations(psi0, h)
        hmat = hamiltonian_matrix(h, lat)
        hist = propagate(psi0, PropagatorSpec(h, lat.dt), 1000)
        norms = lat.spacing * np.sum(np.abs(hist.slices) ** 2, axis=1)
        worst_norm = max(worst_norm, float(np.max(np.abs(norms - 1.0))))
        for t in (250, 500, 1000):
            amps = hist.slices[t]
            energy = (lat.spacing * np.vdot(amps, hmat @ amps)).real
            worst_energy = max(worst_energy, abs(energy - e0))
        end = type(psi0)(lat, hist.slices[-1])
        back = propagate(end, PropagatorSpec(h, -lat.dt), 1000)
        revert = float(
            np.sqrt(lat.spacing * np.sum(np.abs(back.slices[-1] - psi0.amplitudes) ** 2))
        )
        worst_revert = max(worst_revert, revert)
    assert worst_norm < 1e-10
    assert worst_energy < 1e-8
    assert worst_revert < 1e-8
    elapsed = time.monotonic() - start
    assert elapsed < 30.0
    print(
        f"[C3] PASS norm {worst_norm:.2e}, energy {worst_energy:.2e}, "
        f"reversal {worst_revert:.2e} over 1000 steps x5 kinds, {elapsed:.2f}s"
    )


# === C4: alpha scaling ===


def test_c4_alpha_scaling():
    start = time.monotonic()
    record = _run("alpha_scaling")
    _all_passed(record)
    slope_sol = record.metrics["slope_solution"]
    slope_ns = record.metrics["slope_nonsolution"]
    assert abs(slope_sol - 3.0) / 3.0 <= 0.02
    assert abs(slope_ns - 2.0) / 2.0 <= 0.02
    elapsed = time.monotonic() - start
    assert elapsed < 120.0
    print(
        f"[C4] PASS solution slope {slope_sol:.4f} (target 3), "
        f"non-solution {slope_ns:.4f} (target 2), {elapsed:.2f}s"
    )


# === C5: estimator agreement ===


def test_c5_metropolis_agrees_with_bruteforce():
    start = time.monotonic()
    rng = np.random.default_rng(161803)
    lat = LatticeSpec(
        sites=2, spacing=0.5, time_slices=3, dt=0.1, alpha=0.01, prob_quanta=8
    )
    pair = BoundaryPair(random_wave(lat, rng), random_wave(lat, rng), 0, 2)
    h = HamiltonianSpec.harmonic()
    grid = AmplitudeGrid(prob_quanta=8, phase_points=8)
    exact = correlator_bruteforce(pair, h, grid)
    est = correlator_metropolis(pair, h, chains=8, steps=20000, seed=99, grid=grid)
    diff = abs(est.value - exact.value)
    assert diff <= 3.0 * est.abs_error
    again = correlator_metropolis(pair, h, chains=8, steps=20000, seed=99, grid=grid)
    assert est.value == again.value and est.abs_error == again.abs_error
    elapsed = time.monotonic() - start
    assert elapsed < 180.0
    print(
        f"[C5] PASS |diff| {diff:.3g} <= 3 SE ({3 * est.abs_error:.3g}), "
        f"bit-identical reseed, {elapsed:.2f}s"
    )


# === C6: time symmetry ===


def test_c6_time_symmetry():
    start = time.monotonic()
    record = _run("time_symmetry")
    _all_passed(record)
    worst = record.metrics["max_relative_magnitude_diff"]
    assert worst <= 1e-10
    elapsed = time.monotonic() - start
    assert elapsed < 120.0
    print(f"[C6] PASS max relative |C| asymmetry {worst:.2e} over 10 pairs, {elapsed:.2f}s")


# === C7: branch probability rule ===


def test_c7_born_rule_ratio():
    start = time.monotonic()
    record = _run("born_rule")
    _all_passed(record)
    ratio = record.metrics["branch_ratio"]
    assert record.metrics["predicted_ratio"] == 4.0
    assert abs(ratio - 4.0) / 4.0 <= 0.15
    elapsed = time.monotonic() - start
    assert elapsed < 300.0
    print(f"[C7] PASS branch magnitude ratio {ratio:.4f} vs 4.0 +- 15%, {elapsed:.2f}s")


# === C8: correlator nonlinearity ===


def test_c8_nonlinearity_suppression():
    start = time.monotonic()
    record = _run("nonlinearity")
    _all_passed(record)
    ratio = record.metrics["suppression_ratio"]
    assert ratio <= 0.5  # |C(sum)| at most half of the weaker branch
    elapsed = time.monotonic() - start
    assert elapsed < 180.0
    print(f"[C8] PASS |C(sum)|/min branch = {ratio:.3g} <= 0.5, {elapsed:.2f}s")


# === C9: collapse timing ===


def test_c9_collapse_timing():
    start = time.monotonic()
    record = _run("collapse_timing")
    _all_passed(record)
    short_sep = record.metrics["short_separation"]
    long_sep = record.metrics["long_separation"]
    assert short_sep >= np.log(2.0)
    assert long_sep >= np.log(2.0)
    elapsed = time.monotonic() - start
    assert elapsed < 120.0
    print(
        f"[C9] PASS short horizon wave-like (sep {short_sep:.2f}), "
        f"long horizon collapse (sep {long_sep:.2f}), both >= ln 2, {elapsed:.2f}s"
    )
