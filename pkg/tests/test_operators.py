"""Operators: Hermiticity, spectra, expectation values, boundary validation."""

import numpy as np
import pytest

from wavecorr.lattice import BoundaryPair, LatticeSpec, make_homogeneous, random_wave
from wavecorr.operators import (
    HamiltonianSpec,
    eigenstates,
    expectations,
    hamiltonian_matrix,
    momentum_matrix,
    validate_boundary_pair,
)

# === matrix structure ===


def test_hamiltonian_hermitian(any_hamiltonian):
    h, lat = any_hamiltonian
    mat = hamiltonian_matrix(h, lat)
    np.testing.assert_allclose(mat, mat.conj().T, atol=1e-14)


def test_momentum_hermitian(any_hamiltonian):
    h, lat = any_hamiltonian
    mat = momentum_matrix(h, lat)
    np.testing.assert_allclose(mat, mat.conj().T, atol=1e-14)


def test_unknown_kind_rejected():
    with pytest.raises(ValueError):
        HamiltonianSpec(kind="anharmonic")


def test_spec_dict_roundtrip(any_hamiltonian):
    h, _ = any_hamiltonian
    assert HamiltonianSpec.from_dict(h.to_dict()) == h


def test_composite_requires_matching_sites():
    h = HamiltonianSpec.composite_detector(particle_sites=2, pointer_sites=3, coupling=1.0)
    lat = LatticeSpec(sites=5, spacing=0.5, time_slices=3)  # 5 != 2*3
    with pytest.raises(ValueError):
        hamiltonian_matrix(h, lat)


# === expectation values ===


def test_expectations_real_and_phase_invariant(any_hamiltonian, rng):
    h, lat = any_hamiltonian
    psi = random_wave(lat, rng)
    e, p = expectations(psi, h)
    rotated = type(psi)(lat, psi.amplitudes * np.exp(0.7j))
    e2, p2 = expectations(rotated, h)
    np.testing.assert_allclose(e2, e, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(p2, p, rtol=1e-12, atol=1e-14)


def test_expectations_match_matrix_form(any_hamiltonian, rng):
    h, lat = any_hamiltonian
    psi = random_wave(lat, rng)
    e, _ = expectations(psi, h)
    hmat = hamiltonian_matrix(h, lat)
    direct = lat.spacing * np.vdot(psi.amplitudes, hmat @ psi.amplitudes)
    np.testing.assert_allclose(e, direct.real, rtol=1e-12)
    assert abs(direct.imag) < 1e-12


def test_homogeneous_free_energy_zero():
    # the flat state is the zero mode of the periodic Laplacian
    lat = LatticeSpec(sites=8, spacing=0.25, time_slices=3)
    e, p = expectations(make_homogeneous(lat), HamiltonianSpec.free())
    assert abs(e) < 1e-12
    assert abs(p) < 1e-12


# === eigenstates ===


def test_eigenstates_sorted_normalized_and_solve(any_hamiltonian):
    h, lat = any_hamiltonian
    energies, states = eigenstates(h, lat)
    assert len(states) == lat.sites
    assert np.all(np.diff(energies) >= -1e-12)
    hmat = hamiltonian_matrix(h, lat)
    for energy, psi in zip(energies, states):
        norm = lat.spacing * np.sum(np.abs(psi.amplitudes) ** 2)
        np.testing.assert_allclose(norm, 1.0, rtol=1e-12)
        resid = np.linalg.norm(hmat @ psi.amplitudes - energy * psi.amplitudes)
        assert resid < 1e-10


def test_pinning_ground_state_sits_on_site():
    lat = LatticeSpec(sites=6, spacing=0.5, time_slices=3)
    _, states = eigenstates(HamiltonianSpec.pinning(site=3, depth=10.0), lat)
    assert np.argmax(states[0].site_probabilities) == 3


# === boundary validation ===


def test_eigenstate_pair_validates():
    lat = LatticeSpec(sites=6, spacing=0.5, time_slices=3)
    h = HamiltonianSpec.harmonic()
    _, states = eigenstates(h, lat)
    pair = BoundaryPair(states[0], states[0], 0, 2)
    report = validate_boundary_pair(pair, h)
    assert report.passed
    assert report.energy_residual < 1e-10


def test_mismatched_energies_fail_validation():
    lat = LatticeSpec(sites=6, spacing=0.5, time_slices=3)
    h = HamiltonianSpec.pinning(site=0, depth=8.0)
    _, states = eigenstates(h, lat)
    pair = BoundaryPair(states[0], states[-1], 0, 2)
    report = validate_boundary_pair(pair, h)
    assert not report.passed
    assert report.energy_residual > report.tol
