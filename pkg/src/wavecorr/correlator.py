"""Correlator evaluation between two boundary wave functions.

Two independent engines compute the same constrained path sum over interior
slices: exhaustive enumeration of every grid configuration (exact, budgeted)
and seeded Metropolis sampling that uses the measure as target density and
averages the oscillatory weight.  The module also builds the standard
history families (stepped, collapse, frozen) and ranks their contributions
with per-slice quadratic-fluctuation factors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .lattice import (
    BoundaryPair,
    DiscreteWaveFunction,
    LatticeSpec,
    WaveHistory,
    constant_history,
)
from .measure import edge_action, phase_gradient, slice_measure_log
from .operators import HamiltonianSpec, hamiltonian_matrix
from .propagator import PropagatorSpec, propagate, step_matrix


class GridBudgetError(RuntimeError):
    """Enumerating the grid would exceed the configuration budget."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"brute force needs {required} grid configurations but the budget "
            f"is {budget}; lower prob_quanta/phase_points or the slice count"
        )


# === amplitude grid ===


def compositions(total: int, parts: int) -> np.ndarray:
    """All ways to write total as an ordered sum of `parts` integers >= 1."""
    if parts < 1 or total < parts:
        raise ValueError("need total >= parts >= 1")
    if parts == 1:
        return np.array([[total]], dtype=np.int64)
    rows = []
    for bars in itertools.combinations(range(1, total), parts - 1):
        cuts = (0,) + bars + (total,)
        rows.append([cuts[i + 1] - cuts[i] for i in range(parts)])
    return np.array(rows, dtype=np.int64)


@dataclass(frozen=True)
class AmplitudeGrid:
    """Discrete state space: K probability quanta per slice, P phases per site."""

    prob_quanta: int = 16
    phase_points: int = 8

    def __post_init__(self):
        if self.prob_quanta < 2:
            raise ValueError("prob_quanta must be at least 2")
        if self.phase_points < 1:
            raise ValueError("phase_points must be at least 1")

    def slice_state_count(self, sites: int) -> int:
        return math.comb(self.prob_quanta - 1, sites - 1) * self.phase_points**sites

    def site_compositions(self, sites: int) -> np.ndarray:
        return compositions(self.prob_quanta, sites)

    def composition_log_measure(self, comps: np.ndarray, lattice: LatticeSpec):
        """Log of prod 1/|psi|^4 for each composition row; phase independent."""
        prob = comps / (self.prob_quanta * lattice.spacing)
        return -2.0 * np.sum(np.log(prob), axis=-1)

    def iter_slice_states(self, lattice: LatticeSpec, chunk_rows: int = 262_144):
        """Yield (amplitudes, log_measure) chunks in a fixed deterministic order."""
        k, p = self.prob_quanta, self.phase_points
        comps = self.site_compositions(lattice.sites)
        moduli = np.sqrt(comps / (k * lattice.spacing))
        logm = self.composition_log_measure(comps, lattice)
        m = lattice.sites
        idx = np.stack(np.unravel_index(np.arange(p**m), (p,) * m), axis=1)
        phases = np.exp(2j * np.pi * idx / p)
        block = max(1, chunk_rows // phases.shape[0])
        for start in range(0, comps.shape[0], block):
            mod = moduli[start : start + block]
            states = (mod[:, None, :] * phases[None, :, :]).reshape(-1, m)
            rep = np.repeat(logm[start : start + block], phases.shape[0])
            yield states, rep


# === estimates ===


@dataclass(frozen=True)
class CorrelatorEstimate:
    value: complex
    abs_error: float
    n_points: int
    sign_diagnostic: float
    method: str
    warnings: tuple = ()
    unreliable: bool = False


def _logsumexp(values: np.ndarray) -> float:
    top = float(np.max(values))
    return top + float(np.log(np.sum(np.exp(values - top))))


def correlator_bruteforce(
    pair: BoundaryPair,
    h: HamiltonianSpec,
    grid: AmplitudeGrid,
    budget: int = 100_000_000,
) -> CorrelatorEstimate:
    """Exact sum of measure * exp(i*action) over all interior configurations."""
    lat = pair.psi1.lattice
    hmat = hamiltonian_matrix(h, lat)
    scale = lat.alpha * lat.hbar
    psi1, psi2 = pair.psi1.amplitudes, pair.psi2.amplitudes
    n_int = pair.interior_count

    if n_int == 0:
        value = complex(np.exp(1j * edge_action(psi1, psi2, hmat, lat) / scale))
        return CorrelatorEstimate(value, 0.0, 1, 1.0, "bruteforce")

    n_states = grid.slice_state_count(lat.sites)
    required = n_states**n_int
    if required > budget:
        raise GridBudgetError(required, budget)

    comps = grid.site_compositions(lat.sites)
    logm_comps = grid.composition_log_measure(comps, lat)
    shift = float(np.max(logm_comps))

    if n_int == 1:
        total = 0.0 + 0.0j
        weight_sum = 0.0
        for states, logm in grid.iter_slice_states(lat):
            e1 = edge_action(psi1, states, hmat, lat)
            e2 = edge_action(states, psi2, hmat, lat)
            w = np.exp(logm - shift)
            total += complex(np.sum(w * np.exp(1j * (e1 + e2) / scale)))
            weight_sum += float(np.sum(w))
        value = total * np.exp(shift)
        diag = abs(total) / weight_sum
        return CorrelatorEstimate(value, 0.0, required, diag, "bruteforce")

    # n_int >= 2: fold the chain with on-the-fly transfer blocks
    chunks = list(grid.iter_slice_states(lat))
    states = np.concatenate([c[0] for c in chunks])
    logm = np.concatenate([c[1] for c in chunks])
    weights = np.exp(logm - shift)
    h_states = states @ hmat.T
    diag_energy = np.sum(np.conj(states) * h_states, axis=-1).real
    a, hbar, dt = lat.spacing, lat.hbar, lat.dt

    vec = weights * np.exp(1j * edge_action(states, psi2, hmat, lat) / scale)
    block = max(1, 2_000_000 // n_states)
    for layer in range(n_int - 1):
        out = np.empty(n_states, dtype=complex)
        for start in range(0, n_states, block):
            blk = slice(start, min(start + block, n_states))
            overlap = np.conj(states[blk]) @ states.T
            cross = np.conj(states[blk]) @ h_states.T
            edges = hbar * a * overlap.imag - 0.25 * dt * a * (
                diag_energy[blk][:, None] + 2.0 * cross.real + diag_energy[None, :]
            )
            out[blk] = np.exp(1j * edges / scale) @ vec
        vec = out if layer == n_int - 2 else weights * out
    amp1 = weights * np.exp(1j * edge_action(psi1, states, hmat, lat) / scale)
    folded = complex(np.sum(amp1 * vec))
    value = folded * np.exp(n_int * shift)
    diag = abs(folded) / float(np.sum(weights)) ** n_int
    return CorrelatorEstimate(value, 0.0, required, diag, "bruteforce")


# === Metropolis sampling ===


def correlator_metropolis(
    pair: BoundaryPair,
    h: HamiltonianSpec,
    chains: int = 8,
    steps: int = 20_000,
    seed: int = 0,
    grid: AmplitudeGrid | None = None,
    burn_in: int | None = None,
) -> CorrelatorEstimate:
    """Sample interior configurations from the measure; average the phase.

    The target density is the (phase-independent) measure on the same grid
    the brute-force engine enumerates, so the normalization constant is known
    in closed form and the estimate needs no calibration run.  Deterministic
    for a fixed seed: chains run sequentially from spawned seed streams.
    """
    lat = pair.psi1.lattice
    n_int = pair.interior_count
    if n_int < 1:
        raise ValueError("Metropolis sampling needs at least one interior slice")
    if chains < 2:
        raise ValueError("need at least two chains for an error estimate")
    if grid is None:
        grid = AmplitudeGrid(lat.prob_quanta, 8)
    k, p, m = grid.prob_quanta, grid.phase_points, lat.sites
    if k < m:
        raise ValueError("prob_quanta must be >= sites so every site keeps a quantum")
    if burn_in is None:
        burn_in = (steps + 4) // 5

    hmat = hamiltonian_matrix(h, lat)
    scale = lat.alpha * lat.hbar
    psi1, psi2 = pair.psi1.amplitudes, pair.psi2.amplitudes

    comps = grid.site_compositions(m)
    logm_comps = grid.composition_log_measure(comps, lat)
    log_z = n_int * (_logsumexp(logm_comps) + m * np.log(p))

    base = np.full(m, k // m, dtype=np.int64)
    base[: k % m] += 1
    two_pi = 2.0 * np.pi

    def slice_amps(quanta, phase_idx):
        return np.sqrt(quanta / (k * lat.spacing)) * np.exp(2j * np.pi * phase_idx / p)

    chain_means = np.empty(chains, dtype=complex)
    accept_count = 0
    proposal_count = 0
    children = np.random.SeedSequence(seed).spawn(chains)
    for c in range(chains):
        rng = np.random.default_rng(children[c])
        quanta = np.tile(base, (n_int, 1))
        phase_idx = np.zeros((n_int, m), dtype=np.int64)
        amps = [slice_amps(quanta[t], phase_idx[t]) for t in range(n_int)]

        def edge(t):
            left = psi1 if t == 0 else amps[t - 1]
            right = psi2 if t == n_int else amps[t]
            return float(edge_action(left, right, hmat, lat))

        edges = np.array([edge(t) for t in range(n_int + 1)])
        acc = 0.0 + 0.0j
        for step in range(burn_in + steps):
            proposal_count += 1
            t = int(rng.integers(n_int))
            if rng.random() < 0.5:
                i = int(rng.integers(m))
                j = int(rng.integers(m - 1))
                if j >= i:
                    j += 1
                ni, nj = quanta[t, i], quanta[t, j]
                accepted = False
                if ni > 1:
                    log_ratio = 2.0 * (
                        np.log(ni / (ni - 1.0)) + np.log(nj / (nj + 1.0))
                    )
                    if log_ratio >= 0 or np.log(rng.random()) < log_ratio:
                        accepted = True
                if accepted:
                    quanta[t, i] -= 1
                    quanta[t, j] += 1
                    amps[t] = slice_amps(quanta[t], phase_idx[t])
            else:
                site = int(rng.integers(m))
                stride = 1 if rng.random() < 0.5 else -1
                phase_idx[t, site] = (phase_idx[t, site] + stride) % p
                amps[t] = slice_amps(quanta[t], phase_idx[t])
                accepted = True
            if accepted:
                accept_count += 1
                edges[t] = edge(t)
                edges[t + 1] = edge(t + 1)
            if step >= burn_in:
                acc += np.exp(1j * float(np.sum(edges)) / scale)
        chain_means[c] = acc / steps

    mean_phase = complex(np.mean(chain_means))
    z = float(np.exp(log_z))
    value = z * mean_phase
    spread = np.var(chain_means.real, ddof=1) + np.var(chain_means.imag, ddof=1)
    abs_error = z * float(np.sqrt(spread / chains))
    diag = abs(mean_phase)
    rate = accept_count / proposal_count
    warnings = []
    if rate < 0.01 or rate > 0.99:
        warnings.append(f"acceptance rate {rate:.3f} outside [0.01, 0.99]")
    unreliable = diag < 0.01
    if unreliable:
        warnings.append(f"sign diagnostic {diag:.2e} below 0.01; estimate unreliable")
    return CorrelatorEstimate(
        value=value,
        abs_error=abs_error,
        n_points=chains * steps,
        sign_diagnostic=diag,
        method="metropolis",
        warnings=tuple(warnings),
        unreliable=unreliable,
    )


# === history families ===


@dataclass(frozen=True)
class HistoryFamily:
    kind: str  # schrodinger | collapse | frozen
    center: WaveHistory
    label: str
    collapse_slice: int | None = None
    collapse_target: DiscreteWaveFunction | None = None


def build_schrodinger_family(pair: BoundaryPair, h: HamiltonianSpec) -> HistoryFamily:
    """Forward-stepped history from psi1 with the final slice pinned to psi2."""
    lat = pair.psi1.lattice
    prop = PropagatorSpec(h, lat.dt)
    forward = propagate(pair.psi1, prop, pair.t2 - pair.t1)
    slices = np.array(forward.slices)
    slices[-1] = pair.psi2.amplitudes
    center = WaveHistory(lat, slices, fixed_first=True, fixed_last=True)
    return HistoryFamily(kind="schrodinger", center=center, label="schrodinger")


def build_collapse_family(
    pair: BoundaryPair,
    h: HamiltonianSpec,
    collapse_slice: int,
    target: DiscreteWaveFunction | None = None,
) -> HistoryFamily:
    """Stepped history that jumps once at collapse_slice.

    Without an explicit target the tail is the backward-stepped preimage of
    psi2, so the history meets both boundaries exactly and breaks only at the
    jump.  With a target, the tail steps forward from the target and the last
    slice is pinned to psi2.
    """
    lat = pair.psi1.lattice
    length = pair.t2 - pair.t1 + 1
    if not 1 <= collapse_slice <= length - 2:
        raise ValueError("collapse_slice must land on an interior slice")
    prop = PropagatorSpec(h, lat.dt)
    slices = np.empty((length, lat.sites), dtype=complex)
    if collapse_slice >= 2:
        slices[:collapse_slice] = propagate(pair.psi1, prop, collapse_slice - 1).slices
    else:
        slices[0] = pair.psi1.amplitudes
    if target is None:
        back = step_matrix(prop, lat).conj().T
        cur = pair.psi2.amplitudes
        slices[length - 1] = cur
        for t in range(length - 2, collapse_slice - 1, -1):
            cur = back @ cur
            slices[t] = cur
        target = DiscreteWaveFunction(lat, slices[collapse_slice])
    else:
        steps = length - 2 - collapse_slice
        if steps >= 1:
            slices[collapse_slice : length - 1] = propagate(target, prop, steps).slices
        else:
            slices[collapse_slice] = target.amplitudes
        slices[length - 1] = pair.psi2.amplitudes
    center = WaveHistory(lat, slices, fixed_first=True, fixed_last=True)
    return HistoryFamily(
        kind="collapse",
        center=center,
        label=f"collapse@{collapse_slice}",
        collapse_slice=collapse_slice,
        collapse_target=target,
    )


def build_frozen_family(pair: BoundaryPair, h: HamiltonianSpec) -> HistoryFamily:
    """Constant history; only consistent when both boundaries are the same state."""
    if not np.allclose(pair.psi1.amplitudes, pair.psi2.amplitudes, atol=1e-10):
        raise ValueError("frozen family needs identical boundary states")
    center = constant_history(pair.psi1, pair.t2 - pair.t1 + 1)
    return HistoryFamily(kind="frozen", center=center, label="frozen")


@dataclass(frozen=True)
class FamilyContribution:
    label: str
    kind: str
    log_contribution: float
    fluctuation_log: float
    measure_log: float
    broken_slices: tuple
    alpha: float


@dataclass(frozen=True)
class FamilyComparison:
    ranked: tuple
    log_separation: float
    alpha: float
    sigma: float


def family_log_contribution(
    family: HistoryFamily,
    h: HamiltonianSpec,
    alpha: float | None = None,
    sigma: float = 1.0,
    stationary_tol: float = 1e-8,
) -> FamilyContribution:
    """Per-slice quadratic-fluctuation estimate of the family's weight magnitude.

    Each stationary interior slice contributes a full Gaussian ball in every
    site direction, (pi sigma^2 alpha)^M; each broken slice is pinned by its
    phase gradient G to the complexified gradient plane, contributing
    pi sigma^2 alpha^2 exp(-sigma^2 |G|^2 / hbar^2).  The slice measure factor
    multiplies in either case.
    """
    center = family.center
    lat = center.lattice
    if alpha is None:
        alpha = lat.alpha
    fluct = 0.0
    measure = 0.0
    broken = []
    for t in center.interior_indices:
        grad = phase_gradient(center, h, t)
        size = float(np.linalg.norm(grad))
        if size > stationary_tol:
            broken.append(t)
            fluct += (
                np.log(np.pi * sigma**2)
                + 2.0 * np.log(alpha)
                - (sigma * size / lat.hbar) ** 2
            )
        else:
            fluct += lat.sites * np.log(np.pi * sigma**2 * alpha)
        measure += slice_measure_log(center.slices[t])
    return FamilyContribution(
        label=family.label,
        kind=family.kind,
        log_contribution=fluct + measure,
        fluctuation_log=fluct,
        measure_log=measure,
        broken_slices=tuple(broken),
        alpha=float(alpha),
    )


def compare_history_families(
    families: list,
    pair: BoundaryPair,
    h: HamiltonianSpec,
    sigma: float = 1.0,
    stationary_tol: float = 1e-8,
) -> FamilyComparison:
    """Rank family contributions; all centers must meet the pair's boundaries."""
    if not families:
        raise ValueError("no families to compare")
    lat = pair.psi1.lattice
    length = pair.t2 - pair.t1 + 1
    rows = []
    for family in families:
        center = family.center
        if center.length != length:
            raise ValueError(
                f"family {family.label!r} has {center.length} slices, pair spans {length}"
            )
        if not np.allclose(center.slices[0], pair.psi1.amplitudes, atol=1e-9):
            raise ValueError(f"family {family.label!r} does not start at psi1")
        if not np.allclose(center.slices[-1], pair.psi2.amplitudes, atol=1e-9):
            raise ValueError(f"family {family.label!r} does not end at psi2")
        rows.append(
            family_log_contribution(
                family, h, alpha=lat.alpha, sigma=sigma, stationary_tol=stationary_tol
            )
        )
    rows.sort(key=lambda r: r.log_contribution, reverse=True)
    separation = (
        rows[0].log_contribution - rows[1].log_contribution
        if len(rows) > 1
        else float("inf")
    )
    return FamilyComparison(
        ranked=tuple(rows),
        log_separation=float(separation),
        alpha=lat.alpha,
        sigma=sigma,
    )
