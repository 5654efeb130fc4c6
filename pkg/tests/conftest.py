"""Shared fixtures: small lattices and a seeded generator."""

import numpy as np
import pytest

from wavecorr import HamiltonianSpec, LatticeSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)


@pytest.fixture
def lat4():
    return LatticeSpec(sites=4, spacing=0.5, time_slices=3, dt=0.05)


@pytest.fixture
def lat8():
    return LatticeSpec(sites=8, spacing=0.25, time_slices=4, dt=0.05)


@pytest.fixture(params=["free", "harmonic", "double_well", "pinning", "composite_detector"])
def any_hamiltonian(request):
    """Each Hamiltonian kind paired with a lattice it fits on."""
    kind = request.param
    lat = LatticeSpec(sites=6, spacing=0.5, time_slices=3, dt=0.05)
    if kind == "composite_detector":
        h = HamiltonianSpec.composite_detector(
            particle_sites=2, pointer_sites=3, coupling=1.5
        )
    elif kind == "pinning":
        h = HamiltonianSpec.pinning(site=2, depth=3.0)
    elif kind == "double_well":
        h = HamiltonianSpec.double_well(depth=2.0)
    elif kind == "harmonic":
        h = HamiltonianSpec.harmonic(omega=1.0)
    else:
        h = HamiltonianSpec.free()
    return h, lat
