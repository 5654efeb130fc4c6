"""Closed-form measure-contribution arithmetic for the two benchmark profiles.

Everything here is exact log-space evaluation of per-slice measure factors
for the homogeneous profile and the single-peak inhomogeneous profile, the
ratio between them, its large-lattice asymptotics, and the alpha threshold
below which stepped (Schrodinger) histories dominate the correlator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RatioInputs:
    sites: int
    spacing: float
    peak_density: float
    alpha: float = 1e-3
    prob_quanta: int = 16

    def __post_init__(self):
        if self.sites < 2:
            raise ValueError("need at least two sites")
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")
        occupied = self.spacing * self.peak_density
        if not 0.0 < occupied < 1.0:
            raise ValueError(
                f"peak probability a*B2 = {occupied} must lie strictly in (0, 1)"
            )
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.prob_quanta < 2:
            raise ValueError("prob_quanta must be at least 2")

    @property
    def occupied(self) -> float:
        """Probability carried by the peak site."""
        return self.spacing * self.peak_density


# === per-slice log contributions ===


def homogeneous_contribution(inputs: RatioInputs) -> float:
    """Per-slice log measure factor of the flat profile: 2M ln(aM)."""
    m, a = inputs.sites, inputs.spacing
    return 2.0 * m * np.log(a * m)


def inhomogeneous_contribution(inputs: RatioInputs) -> float:
    """Per-slice log measure factor of the single-peak profile."""
    m, a, b2 = inputs.sites, inputs.spacing, inputs.peak_density
    return -2.0 * (
        np.log(b2)
        + (m - 1) * np.log(1.0 - a * b2)
        - (m - 1) * np.log(a * (m - 1))
    )


# === exact and asymptotic ratios ===


def log_contribution_ratio_exact(inputs: RatioInputs) -> float:
    """Log of the homogeneous/inhomogeneous per-slice contribution ratio."""
    m, a, b2 = inputs.sites, inputs.spacing, inputs.peak_density
    return 2.0 * (
        np.log(b2)
        + (m - 1) * np.log(1.0 - a * b2)
        + m * np.log(a * m)
        - (m - 1) * np.log(a * (m - 1))
    )


def contribution_ratio_exact(inputs: RatioInputs) -> float:
    """[B2 (1-aB2)^(M-1) (aM)^M / (a(M-1))^(M-1)]^2, evaluated in log space."""
    return float(np.exp(log_contribution_ratio_exact(inputs)))


def log_contribution_ratio_asymptotic(inputs: RatioInputs) -> float:
    """Large-M form: the (M/(M-1))^(M-1) factor replaced by e."""
    m, a, b2 = inputs.sites, inputs.spacing, inputs.peak_density
    return 2.0 * (np.log(m * a * b2) + (m - 1) * np.log(1.0 - a * b2) + 1.0)


def contribution_ratio_asymptotic(inputs: RatioInputs) -> float:
    """[M aB2 (1-aB2)^(M-1) e]^2, evaluated in log space."""
    return float(np.exp(log_contribution_ratio_asymptotic(inputs)))


def reduced_log_ratio(sites, occupied) -> np.ndarray:
    """Log of the reduced ratio [M (1-aB2)^(M-1)]^2; vectorized over sites.

    Negative for every M >= 3 at aB2 = 1/2, which is the dominance statement:
    concentrating probability always wins measure over staying flat.
    """
    m = np.asarray(sites, dtype=float)
    return 2.0 * (np.log(m) + (m - 1.0) * np.log(1.0 - occupied))


def contribution_ratio_reduced(inputs: RatioInputs) -> float:
    return float(np.exp(reduced_log_ratio(inputs.sites, inputs.occupied)))


# === dominance threshold ===


@dataclass(frozen=True)
class ThresholdReport:
    threshold: float
    schrodinger_dominates: bool
    global_bound: float


def alpha_threshold(inputs: RatioInputs) -> ThresholdReport:
    """Schrodinger histories dominate when alpha < (1 - aB2)^2.

    The smallest nonzero value of (1 - aB2) on a grid of K probability
    quanta is 1/K, so 1/K^2 bounds the threshold from below globally.
    """
    threshold = (1.0 - inputs.occupied) ** 2
    return ThresholdReport(
        threshold=float(threshold),
        schrodinger_dominates=bool(inputs.alpha < threshold),
        global_bound=1.0 / inputs.prob_quanta**2,
    )
