"""Lattice states: normalization, locality, serialization, validation."""

import numpy as np
import pytest

from wavecorr.lattice import (
    BoundaryPair,
    DiscreteWaveFunction,
    LatticeSpec,
    LatticeWarning,
    constant_history,
    history_from_dict,
    history_to_dict,
    inner,
    locality_score,
    make_gaussian,
    make_homogeneous,
    make_inhomogeneous,
    random_wave,
    wave_from_dict,
    wave_to_dict,
)

# === normalization ===


def _norm(psi):
    return psi.lattice.spacing * float(np.sum(np.abs(psi.amplitudes) ** 2))


def test_constructors_normalized(lat4, rng):
    """Every constructor returns a state with a * sum|psi|^2 == 1."""
    states = [
        make_homogeneous(lat4),
        make_inhomogeneous(lat4, 1.5),
        make_gaussian(lat4, 1.5, 0.8),
        make_gaussian(lat4, 1.0, 0.5, wavenumber=2.0),
        random_wave(lat4, rng),
        DiscreteWaveFunction.from_unnormalized(lat4, np.array([1, 2j, -3, 0.5 + 1j])),
    ]
    for psi in states:
        np.testing.assert_allclose(_norm(psi), 1.0, rtol=1e-12)


def test_random_waves_normalized_many(lat8, rng):
    for _ in range(50):
        np.testing.assert_allclose(_norm(random_wave(lat8, rng)), 1.0, rtol=1e-12)


def test_inner_self_is_norm(lat4, rng):
    psi = random_wave(lat4, rng)
    val = inner(psi, psi)
    np.testing.assert_allclose(val.real, 1.0, rtol=1e-12)
    assert abs(val.imag) < 1e-14


def test_inner_conjugate_symmetry(lat4, rng):
    u, v = random_wave(lat4, rng), random_wave(lat4, rng)
    np.testing.assert_allclose(inner(u, v), np.conj(inner(v, u)), rtol=1e-12)


# === locality score ===


def test_locality_uniform_is_reciprocal_sites(lat4):
    np.testing.assert_allclose(locality_score(make_homogeneous(lat4)), 0.25, rtol=1e-12)


def test_locality_spike_approaches_one():
    lat = LatticeSpec(sites=16, spacing=0.5, time_slices=3)
    spike = make_gaussian(lat, 8.0, 0.05)
    assert locality_score(spike) > 0.999


def test_locality_bounds(lat8, rng):
    """1/M <= score <= 1 for any normalized state."""
    for _ in range(50):
        s = locality_score(random_wave(lat8, rng))
        assert 1.0 / lat8.sites - 1e-12 <= s <= 1.0 + 1e-12


def test_locality_inhomogeneous_reference():
    # peak probability a*b2 = 1/2, rest 1/6 each -> sum of squares = 1/3
    lat = LatticeSpec(sites=4, spacing=0.25, time_slices=3)
    psi = make_inhomogeneous(lat, 2.0)
    np.testing.assert_allclose(psi.site_probabilities[0], 0.5, rtol=1e-12)
    np.testing.assert_allclose(locality_score(psi), 1.0 / 3.0, rtol=1e-12)


def test_inhomogeneous_peak_site(lat4):
    # peak density b2 gives probability a*b2 at the peak, the rest split evenly
    psi = make_inhomogeneous(lat4, 1.8, peak_site=2)
    probs = psi.site_probabilities
    assert np.argmax(probs) == 2
    np.testing.assert_allclose(probs[2], 1.8 * lat4.spacing, rtol=1e-12)
    np.testing.assert_allclose(probs[0], (1 - 0.9) / 3, rtol=1e-12)


def test_inhomogeneous_rejects_saturated_peak(lat4):
    # a*b2 must stay below 1
    with pytest.raises(ValueError):
        make_inhomogeneous(lat4, 2.0)


# === serialization round-trips ===


def test_wave_dict_roundtrip(lat4, rng):
    psi = random_wave(lat4, rng)
    back = wave_from_dict(wave_to_dict(psi))
    np.testing.assert_array_equal(back.amplitudes, psi.amplitudes)
    assert back.lattice == psi.lattice


def test_history_dict_roundtrip(lat4, rng):
    hist = constant_history(random_wave(lat4, rng), 4, fixed_first=True, fixed_last=False)
    back = history_from_dict(history_to_dict(hist))
    np.testing.assert_array_equal(back.slices, hist.slices)
    assert back.fixed_first and not back.fixed_last
    assert back.lattice == hist.lattice


def test_constant_history_shape(lat4):
    psi = make_homogeneous(lat4)
    hist = constant_history(psi, 5)
    assert hist.slices.shape == (5, lat4.sites)
    for t in range(5):
        np.testing.assert_array_equal(hist.slices[t], psi.amplitudes)


# === validation ===


def test_lattice_spec_rejects_bad_fields():
    good = dict(sites=4, spacing=0.5, time_slices=3, dt=0.1)
    for bad in (
        {"sites": 1},
        {"spacing": 0.0},
        {"spacing": -1.0},
        {"time_slices": 1},
        {"dt": 0.0},
        {"hbar": 0.0},
        {"alpha": 0.0},
        {"prob_quanta": 1},
        {"boundary": "absorbing"},
    ):
        with pytest.raises(ValueError):
            LatticeSpec(**{**good, **bad})


def test_lattice_warns_above_grid_bound():
    # alpha >= 1/K^2 is legal but flagged
    with pytest.warns(LatticeWarning):
        LatticeSpec(sites=4, spacing=0.5, prob_quanta=4, alpha=0.1)


def test_lattice_silent_below_grid_bound(recwarn):
    LatticeSpec(sites=4, spacing=0.5, prob_quanta=4, alpha=0.06)
    assert not [w for w in recwarn if issubclass(w.category, LatticeWarning)]


def test_boundary_pair_rejects_bad_times(lat4):
    psi = make_homogeneous(lat4)
    with pytest.raises(ValueError):
        BoundaryPair(psi, psi, 2, 2)
    with pytest.raises(ValueError):
        BoundaryPair(psi, psi, 3, 1)


def test_boundary_pair_rejects_mismatched_lattices(lat4, lat8):
    with pytest.raises(ValueError):
        BoundaryPair(make_homogeneous(lat4), make_homogeneous(lat8), 0, 2)


def test_boundary_pair_interior_count(lat4):
    psi = make_homogeneous(lat4)
    assert BoundaryPair(psi, psi, 0, 2).interior_count == 1
    assert BoundaryPair(psi, psi, 0, 5).interior_count == 4
