"""History measure density, action phase, stationarity, and fluctuation integrals.

The measure density of a history is the product over integrated slices and
sites of 1/|psi|^4 (reported as a natural log).  The weight of a history is
exp(i*S) with S real; S is assembled from an antisymmetrized time difference
plus a midpoint energy term, divided by alpha*hbar.  Around a chosen center
history, ``fluctuation_scaling`` integrates measure*weight over a windowed
perturbation ball per interior slice and reports how the magnitude scales
with alpha.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .lattice import LatticeSpec, WaveHistory
from .operators import HamiltonianSpec, hamiltonian_matrix


class MeasureFloorError(ValueError):
    """An amplitude fell below the probability-quantum floor."""

    def __init__(self, slice_index: int, site: int, value: float, floor: float):
        self.slice_index = slice_index
        self.site = site
        super().__init__(
            f"|psi|^2 = {value:.3e} at slice {slice_index}, site {site} "
            f"is below the amplitude floor {floor:.3e}"
        )


class QuadratureBudgetError(RuntimeError):
    """The requested tensor-product grid exceeds the node budget."""

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"quadrature needs {required} nodes but the budget is {budget}; "
            "reduce nodes_per_dim, the interior slice count, or the site count"
        )


class QuadratureConvergenceError(RuntimeError):
    """Node-count refinement moved the result more than the tolerance allows."""

    def __init__(self, delta: float, tol: float):
        self.delta = delta
        super().__init__(
            f"quadrature not converged: log-magnitude shifted by {delta:.3e} "
            f"under node refinement (tolerance {tol:.3e})"
        )


def amplitude_floor(lattice: LatticeSpec) -> float:
    """Smallest admissible |psi|^2 per site: one probability quantum."""
    return 1.0 / (lattice.prob_quanta * lattice.spacing * lattice.sites)


# === measure ===


def slice_measure_log(amplitudes: np.ndarray) -> float:
    """Natural log of the single-slice measure factor prod 1/|psi|^4."""
    return float(-2.0 * np.sum(np.log(np.abs(np.asarray(amplitudes)) ** 2)))


def measure_log_density(history: WaveHistory) -> float:
    """Log measure over integrated slices; fixed boundary slices do not count."""
    floor = amplitude_floor(history.lattice)
    total = 0.0
    for t in history.interior_indices:
        sq = np.abs(history.slices[t]) ** 2
        bad = np.flatnonzero(sq < floor * (1.0 - 1e-12))
        if bad.size:
            site = int(bad[0])
            raise MeasureFloorError(t, site, float(sq[site]), floor)
        total += -2.0 * float(np.sum(np.log(sq)))
    return total


# === action phase ===


def edge_action(u: np.ndarray, v: np.ndarray, hmat: np.ndarray, lattice: LatticeSpec):
    """Action contribution of one time step, batched over leading axes."""
    a, hbar, dt = lattice.spacing, lattice.hbar, lattice.dt
    overlap = np.sum(np.conj(u) * v, axis=-1)
    mid = (u + v) * 0.5
    energy = np.sum(np.conj(mid) * (mid @ hmat.T), axis=-1)
    return hbar * a * overlap.imag - dt * a * energy.real


def action_numerator(history: WaveHistory, h: HamiltonianSpec) -> float:
    """The real action sum before division by alpha*hbar; exact for any history."""
    hmat = hamiltonian_matrix(h, history.lattice)
    terms = edge_action(history.slices[:-1], history.slices[1:], hmat, history.lattice)
    return float(np.sum(terms))


def action_phase(history: WaveHistory, h: HamiltonianSpec) -> float:
    """The real number S with weight = exp(i*S)."""
    lat = history.lattice
    return action_numerator(history, h) / (lat.alpha * lat.hbar)


def phase_gradient(history: WaveHistory, h: HamiltonianSpec, t: int) -> np.ndarray:
    """Derivative of the action numerator w.r.t. the conjugate amplitudes of slice t.

    The directional derivative along a complex perturbation ``delta`` of
    slice t is 2*Re(sum(conj(G)*delta)).  Vanishes identically on stepped
    (Crank-Nicolson) histories at every slice with two neighbors.
    """
    if not 1 <= t <= history.length - 2:
        raise ValueError("gradient needs a slice with both neighbors present")
    lat = history.lattice
    hmat = hamiltonian_matrix(h, lat)
    prev_, cur, nxt = history.slices[t - 1], history.slices[t], history.slices[t + 1]
    a, hbar, dt = lat.spacing, lat.hbar, lat.dt
    return (
        -0.5j * a * hbar * (nxt - prev_)
        - 0.25 * dt * a * (hmat @ (prev_ + 2.0 * cur + nxt))
    )


def gradient_norm(history: WaveHistory, h: HamiltonianSpec, t: int) -> float:
    return float(np.linalg.norm(phase_gradient(history, h, t)))


# === fluctuation integrals ===


@dataclass(frozen=True)
class FluctuationScaling:
    """Windowed perturbation-integral magnitudes per alpha, plus the fitted slope."""

    family: str
    alphas: tuple
    log_magnitudes: tuple
    slope: float
    dims: int
    nodes_per_dim: int
    sigma: float
    excluded_fraction: float
    convergence_delta: float


def _chart_layout(
    center: WaveHistory,
    h: HamiltonianSpec,
    family: str,
    stationary_tol: float,
) -> list[tuple[int, str, np.ndarray | None]]:
    """Per interior slice: ('full', None) or ('plane', unit gradient direction)."""
    interior = list(center.interior_indices)
    if not interior:
        raise ValueError("center history has no interior slices to integrate")
    if not (center.fixed_first and center.fixed_last):
        raise ValueError("fluctuation integrals require both boundaries fixed")
    layout = []
    worst = 0.0
    for t in interior:
        grad = phase_gradient(center, h, t)
        size = float(np.linalg.norm(grad))
        worst = max(worst, size)
        if size > stationary_tol:
            layout.append((t, "plane", grad / size))
        else:
            layout.append((t, "full", None))
    if family == "solution":
        if worst > stationary_tol:
            raise ValueError(
                f"solution-family center is not stationary: max gradient {worst:.3e}"
            )
        return [(t, "full", None) for t in interior]
    if family == "non_solution":
        if all(kind == "full" for _, kind, _ in layout):
            raise ValueError("non-solution family needs a non-stationary slice")
        return layout
    raise ValueError(f"unknown family {family!r}")


def fluctuation_scaling(
    center: WaveHistory,
    h: HamiltonianSpec,
    alphas: Sequence[float],
    family: str,
    sigma: float = 0.25,
    nodes_per_dim: int = 10,
    node_budget: int = 2_000_000,
    stationary_tol: float = 1e-8,
    convergence_tol: float = 0.05,
    check_convergence: bool = True,
    chunk: int = 100_000,
) -> FluctuationScaling:
    """Magnitude of the windowed measure*weight integral around ``center`` per alpha.

    Solution family: all real and imaginary site directions of every interior
    slice are integrated with a Gaussian window of width sigma*sqrt(alpha),
    giving one factor of alpha per complex dimension.  Non-solution family:
    slices with a nonvanishing phase gradient are integrated only over the
    two-real-dimensional complexified gradient plane, scaled by sigma*alpha,
    which pins the contribution to alpha^2 regardless of the site count.
    """
    alphas = tuple(float(x) for x in alphas)
    if len(alphas) < 2:
        raise ValueError("need at least two alpha values to fit a slope")
    layout = _chart_layout(center, h, family, stationary_tol)
    lat = center.lattice
    sites = lat.sites
    dims = sum(2 * sites if kind == "full" else 2 for _, kind, _ in layout)

    def run(nodes: int) -> tuple[list[float], float]:
        required = nodes**dims
        if required > node_budget:
            raise QuadratureBudgetError(required, node_budget)
        points, weights = np.polynomial.hermite.hermgauss(nodes)
        log_w = np.log(weights)
        hmat = hamiltonian_matrix(h, lat)
        floor = amplitude_floor(lat)
        center_logm = sum(
            slice_measure_log(center.slices[t]) for t, _, _ in layout
        )
        center_action = action_numerator(center, h)
        shape = (nodes,) * dims
        log_mags = []
        excluded_total = 0
        for alpha in alphas:
            scale_full = sigma * np.sqrt(alpha)
            scale_plane = sigma * alpha
            total = 0.0 + 0.0j
            for start in range(0, required, chunk):
                idx = np.arange(start, min(start + chunk, required))
                multi = np.unravel_index(idx, shape)
                node_logw = np.zeros(len(idx))
                for d in range(dims):
                    node_logw += log_w[multi[d]]
                # assemble the perturbed interior slices for this chunk
                slices_batch = {}
                offset = 0
                for t, kind, direction in layout:
                    base = center.slices[t]
                    if kind == "full":
                        re = np.stack(
                            [points[multi[offset + m]] for m in range(sites)], axis=1
                        )
                        im = np.stack(
                            [points[multi[offset + sites + m]] for m in range(sites)],
                            axis=1,
                        )
                        slices_batch[t] = base + scale_full * (re + 1j * im)
                        offset += 2 * sites
                    else:
                        coeff = points[multi[offset]] + 1j * points[multi[offset + 1]]
                        slices_batch[t] = base + scale_plane * coeff[:, None] * direction
                        offset += 2
                # measure relative to the center, with sub-floor nodes excluded
                logm = np.zeros(len(idx))
                keep = np.ones(len(idx), dtype=bool)
                for t, _, _ in layout:
                    sq = np.abs(slices_batch[t]) ** 2
                    keep &= np.all(sq >= floor, axis=1)
                    logm += -2.0 * np.sum(np.log(np.maximum(sq, floor)), axis=1)
                excluded_total += int(np.count_nonzero(~keep))
                # exact action difference (the action is polynomial in the slices)
                action = np.zeros(len(idx))
                seq = (
                    [center.slices[0]]
                    + [slices_batch[t] for t, _, _ in layout]
                    + [center.slices[-1]]
                )
                for u, v in zip(seq[:-1], seq[1:]):
                    action += edge_action(u, v, hmat, lat)
                phase = (action - center_action) / (alpha * lat.hbar)
                vals = np.exp(node_logw + (logm - center_logm)) * np.exp(1j * phase)
                total += complex(np.sum(np.where(keep, vals, 0.0)))
            log_jacobian = sum(
                2 * sites * np.log(scale_full) if kind == "full" else 2 * np.log(scale_plane)
                for _, kind, _ in layout
            )
            magnitude = abs(total)
            if magnitude == 0.0:
                log_mags.append(-np.inf)
            else:
                log_mags.append(center_logm + np.log(magnitude) + log_jacobian)
        return log_mags, excluded_total / (required * len(alphas))

    log_mags, excluded_fraction = run(nodes_per_dim)
    delta = 0.0
    if check_convergence and nodes_per_dim > 3:
        coarse, _ = run(nodes_per_dim - 2)
        delta = float(np.max(np.abs(np.array(coarse) - np.array(log_mags))))
        if delta > convergence_tol:
            raise QuadratureConvergenceError(delta, convergence_tol)
    slope = float(np.polyfit(np.log(alphas), log_mags, 1)[0])
    return FluctuationScaling(
        family=family,
        alphas=alphas,
        log_magnitudes=tuple(log_mags),
        slope=slope,
        dims=dims,
        nodes_per_dim=nodes_per_dim,
        sigma=sigma,
        excluded_fraction=float(excluded_fraction),
        convergence_delta=delta,
    )
