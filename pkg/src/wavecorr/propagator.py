"""Reference unitary dynamics: Crank-Nicolson stepping and history residuals."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .lattice import (
    DiscreteWaveFunction,
    LatticeSpec,
    WaveHistory,
    locality_score,
    make_gaussian,
)
from .operators import HamiltonianSpec, eigenstates, hamiltonian_matrix


@dataclass(frozen=True)
class PropagatorSpec:
    """One-step unitary map; Crank-Nicolson is the only implemented scheme."""

    hamiltonian: HamiltonianSpec
    dt: float
    scheme: str = "crank_nicolson"

    def __post_init__(self):
        if self.scheme != "crank_nicolson":
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.dt == 0:
            raise ValueError("dt must be nonzero")


@lru_cache(maxsize=128)
def _step_cached(prop: PropagatorSpec, lattice: LatticeSpec) -> np.ndarray:
    h = hamiltonian_matrix(prop.hamiltonian, lattice)
    half = prop.dt / (2.0 * lattice.hbar) * h
    eye = np.eye(lattice.sites)
    # Factor order matters: this orientation makes every stepped history an
    # exact stationary point of the discrete action phase (the first
    # variation at interior slices vanishes identically); the transposed
    # order solves the conjugate equation and breaks that identity.
    mat = np.linalg.solve(eye - 1j * half, eye + 1j * half)
    mat.flags.writeable = False
    return mat


def step_matrix(prop: PropagatorSpec, lattice: LatticeSpec) -> np.ndarray:
    """The dense one-step map; unitary for every Hermitian Hamiltonian."""
    return _step_cached(prop, lattice)


def propagate(
    psi0: DiscreteWaveFunction, prop: PropagatorSpec, steps: int
) -> WaveHistory:
    """Evolve ``steps`` times; returns a free (no fixed boundaries) history."""
    if steps < 1:
        raise ValueError("need at least one step")
    u = step_matrix(prop, psi0.lattice)
    slices = np.empty((steps + 1, psi0.lattice.sites), dtype=complex)
    slices[0] = psi0.amplitudes
    for t in range(steps):
        slices[t + 1] = u @ slices[t]
    return WaveHistory(psi0.lattice, slices, fixed_first=False, fixed_last=False)


@dataclass(frozen=True)
class HistoryResidual:
    """Per-step deviation from the one-step map, and the root-sum-square total."""

    per_step: np.ndarray
    total: float


def schrodinger_residual(history: WaveHistory, prop: PropagatorSpec) -> HistoryResidual:
    """Weighted norms of slice(t+1) - step(slice(t)); zero iff a propagate output."""
    u = step_matrix(prop, history.lattice)
    stepped = history.slices[:-1] @ u.T
    diff = history.slices[1:] - stepped
    per_step = np.sqrt(history.lattice.spacing * np.sum(np.abs(diff) ** 2, axis=1))
    return HistoryResidual(per_step=per_step, total=float(np.sqrt(np.sum(per_step**2))))


# === locality witnesses ===


@dataclass(frozen=True)
class LocalityEvidence:
    """Search outcome: the witnessing trajectory's score series, if any."""

    admits: bool
    witness: Optional[str]
    threshold: float
    scores: np.ndarray  # witness series if found, else the best failing series


def admits_local_solutions(
    h: HamiltonianSpec,
    lattice: LatticeSpec,
    horizon: int,
    threshold: float = 0.5,
) -> LocalityEvidence:
    """True iff some initial state keeps locality_score >= threshold for the horizon.

    The search space is deliberately small: low-lying eigenstates plus a
    coarse grid of Gaussian packets.  One witness suffices; absence on this
    grid is evidence, not proof.
    """
    prop = PropagatorSpec(h, lattice.dt)
    candidates: list[tuple[str, DiscreteWaveFunction]] = []
    _, states = eigenstates(h, lattice)
    ranked = sorted(states, key=locality_score, reverse=True)[:3]
    candidates += [(f"eigenstate(ipr={locality_score(s):.3f})", s) for s in ranked]
    for center in (lattice.sites / 4.0, lattice.sites / 2.0, 3 * lattice.sites / 4.0):
        for width in (0.7, 1.2, 2.0):
            candidates.append(
                (f"gaussian(center={center:g},width={width:g})",
                 make_gaussian(lattice, center, width))
            )
    best: Optional[np.ndarray] = None
    for name, psi in candidates:
        if locality_score(psi) < threshold:
            continue
        history = propagate(psi, prop, horizon)
        series = np.array(
            [locality_score(history.wave(t)) for t in range(history.length)]
        )
        if series.min() >= threshold:
            return LocalityEvidence(True, name, threshold, series)
        if best is None or series.min() > best.min():
            best = series
    if best is None:
        best = np.zeros(horizon + 1)
    return LocalityEvidence(False, None, threshold, best)
