"""Propagation: unitarity, energy conservation, reversal, residuals, locality."""

import numpy as np
import pytest

from wavecorr.lattice import LatticeSpec, make_gaussian, random_wave
from wavecorr.operators import HamiltonianSpec, expectations, hamiltonian_matrix
from wavecorr.propagator import (
    PropagatorSpec,
    admits_local_solutions,
    propagate,
    schrodinger_residual,
    step_matrix,
)

# === the one-step map ===


def test_step_matrix_unitary(any_hamiltonian):
    h, lat = any_hamiltonian
    u = step_matrix(PropagatorSpec(h, 0.05), lat)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(lat.sites), atol=1e-12)


def test_step_matrix_commutes_with_hamiltonian(any_hamiltonian):
    h, lat = any_hamiltonian
    u = step_matrix(PropagatorSpec(h, 0.05), lat)
    hmat = hamiltonian_matrix(h, lat)
    np.testing.assert_allclose(u @ hmat, hmat @ u, atol=1e-12)


def test_spec_validation():
    h = HamiltonianSpec.free()
    with pytest.raises(ValueError):
        PropagatorSpec(h, 0.0)
    with pytest.raises(ValueError):
        PropagatorSpec(h, 0.1, scheme="euler")


# === evolution invariants ===


def test_norm_and_energy_conserved(any_hamiltonian, rng):
    h, lat = any_hamiltonian
    psi0 = random_wave(lat, rng)
    e0, _ = expectations(psi0, h)
    hist = propagate(psi0, PropagatorSpec(h, lat.dt), 200)
    for t in (50, 100, 200):
        amps = hist.slices[t]
        norm = lat.spacing * np.sum(np.abs(amps) ** 2)
        np.testing.assert_allclose(norm, 1.0, rtol=1e-12)
        energy = (lat.spacing * np.vdot(amps, hamiltonian_matrix(h, lat) @ amps)).real
        np.testing.assert_allclose(energy, e0, rtol=1e-10, atol=1e-12)


def test_negated_dt_reverses(any_hamiltonian, rng):
    h, lat = any_hamiltonian
    psi0 = random_wave(lat, rng)
    fwd = propagate(psi0, PropagatorSpec(h, 0.05), 60)
    end = type(psi0)(lat, fwd.slices[-1])
    back = propagate(end, PropagatorSpec(h, -0.05), 60)
    np.testing.assert_allclose(back.slices[-1], psi0.amplitudes, atol=1e-10)


def test_propagate_shape_and_start(lat4, rng):
    psi0 = random_wave(lat4, rng)
    hist = propagate(psi0, PropagatorSpec(HamiltonianSpec.free(), 0.1), 5)
    assert hist.slices.shape == (6, lat4.sites)
    np.testing.assert_array_equal(hist.slices[0], psi0.amplitudes)
    with pytest.raises(ValueError):
        propagate(psi0, PropagatorSpec(HamiltonianSpec.free(), 0.1), 0)


# === residual diagnostics ===


def test_stepped_history_has_zero_residual(any_hamiltonian, rng):
    h, lat = any_hamiltonian
    hist = propagate(random_wave(lat, rng), PropagatorSpec(h, lat.dt), 8)
    res = schrodinger_residual(hist, PropagatorSpec(h, lat.dt))
    assert res.total < 1e-12
    assert len(res.per_step) == 8
    assert max(res.per_step) < 1e-12


def test_broken_history_has_positive_residual(lat4, rng):
    h = HamiltonianSpec.harmonic()
    prop = PropagatorSpec(h, lat4.dt)
    from wavecorr.lattice import WaveHistory

    hist = propagate(random_wave(lat4, rng), prop, 4)
    slices = hist.slices.copy()
    slices[2] = random_wave(lat4, rng).amplitudes  # break one slice
    res = schrodinger_residual(WaveHistory(lat4, slices), prop)
    assert res.total > 1e-3
    # only the edges touching the broken slice move
    assert res.per_step[0] < 1e-12
    assert res.per_step[1] > 1e-3 and res.per_step[2] > 1e-3
    assert res.per_step[3] < 1e-12


# === locality of persistent solutions ===


def test_pinning_admits_local_solutions():
    lat = LatticeSpec(sites=8, spacing=0.5, time_slices=3)
    evidence = admits_local_solutions(HamiltonianSpec.pinning(site=2, depth=12.0), lat, horizon=20)
    assert evidence.admits
    assert evidence.witness is not None
    assert max(evidence.scores) >= evidence.threshold


def test_free_lattice_admits_none():
    # every free eigenstate is a plane wave and gaussians disperse
    lat = LatticeSpec(sites=8, spacing=0.5, time_slices=3)
    evidence = admits_local_solutions(HamiltonianSpec.free(), lat, horizon=20)
    assert not evidence.admits
    assert evidence.witness is None
