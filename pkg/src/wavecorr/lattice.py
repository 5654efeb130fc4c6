"""Lattice state space: 1D complex wave functions with weighted normalization."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

NORM_TOL = 1e-12


class LatticeWarning(UserWarning):
    """Non-fatal configuration smell (e.g. action scale too large for the grid)."""


# === geometry ===


@dataclass(frozen=True)
class LatticeSpec:
    """Geometry and integration parameters shared by every computation.

    ``spacing`` is the configuration-cell volume used in all inner products;
    for a composite (two-factor) system it is the product of the factor
    spacings.  ``alpha`` is the dimensionless scale dividing the action
    phase; ``prob_quanta`` is the resolution of the discrete probability
    grid (one quantum = 1/prob_quanta of total probability).
    """

    sites: int
    spacing: float
    time_slices: int = 3
    dt: float = 0.1
    hbar: float = 1.0
    alpha: float = 1e-3
    prob_quanta: int = 16
    boundary: str = "periodic"  # "periodic" | "dirichlet"

    def __post_init__(self):
        if self.sites < 2:
            raise ValueError("need at least 2 lattice sites")
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")
        if self.time_slices < 2:
            raise ValueError("need at least 2 time slices")
        if self.dt <= 0 or self.hbar <= 0 or self.alpha <= 0:
            raise ValueError("dt, hbar and alpha must be positive")
        if self.prob_quanta < 2:
            raise ValueError("prob_quanta must be at least 2")
        if self.boundary not in ("periodic", "dirichlet"):
            raise ValueError(f"unknown boundary treatment {self.boundary!r}")
        if self.alpha >= 1.0 / self.prob_quanta**2:
            warnings.warn(
                f"alpha={self.alpha:g} is at or above the grid bound "
                f"1/prob_quanta^2={1.0 / self.prob_quanta ** 2:g}; wave-equation "
                "histories are not guaranteed to dominate in this regime",
                LatticeWarning,
                stacklevel=2,
            )

    def to_dict(self) -> dict:
        return {
            "sites": self.sites,
            "spacing": self.spacing,
            "time_slices": self.time_slices,
            "dt": self.dt,
            "hbar": self.hbar,
            "alpha": self.alpha,
            "prob_quanta": self.prob_quanta,
            "boundary": self.boundary,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LatticeSpec":
        return cls(**data)


# === single-slice states ===


@dataclass(frozen=True, eq=False)
class DiscreteWaveFunction:
    """Complex amplitudes on one time slice, normalized so spacing*sum|psi|^2 = 1."""

    lattice: LatticeSpec
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).copy()
        if amps.shape != (self.lattice.sites,):
            raise ValueError(
                f"expected {self.lattice.sites} amplitudes, got shape {amps.shape}"
            )
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("amplitudes must be finite")
        total = self.lattice.spacing * float(np.sum(np.abs(amps) ** 2))
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized: weighted norm^2 = {total!r}")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_unnormalized(cls, lattice: LatticeSpec, raw) -> "DiscreteWaveFunction":
        raw = np.asarray(raw, dtype=np.complex128)
        scale = np.sqrt(lattice.spacing * np.sum(np.abs(raw) ** 2))
        if scale == 0 or not np.isfinite(scale):
            raise ValueError("cannot normalize a zero or non-finite vector")
        return cls(lattice, raw / scale)

    @property
    def site_probabilities(self) -> np.ndarray:
        """Probability carried by each site: spacing * |amplitude|^2."""
        return self.lattice.spacing * np.abs(self.amplitudes) ** 2


def inner(u: DiscreteWaveFunction, v: DiscreteWaveFunction) -> complex:
    """Weighted inner product spacing * sum(conj(u) v)."""
    return complex(u.lattice.spacing * np.vdot(u.amplitudes, v.amplitudes))


def locality_score(psi: DiscreteWaveFunction) -> float:
    """Inverse participation ratio: 1 for a single-site spike, 1/sites for flat."""
    p = psi.site_probabilities
    return float(np.sum(p * p))


def make_homogeneous(lattice: LatticeSpec) -> DiscreteWaveFunction:
    """Constant-modulus state: every amplitude sqrt(1/(spacing*sites))."""
    amp = np.sqrt(1.0 / (lattice.spacing * lattice.sites))
    return DiscreteWaveFunction(lattice, np.full(lattice.sites, amp, dtype=complex))


def make_inhomogeneous(
    lattice: LatticeSpec, peak_density: float, peak_site: int = 0
) -> DiscreteWaveFunction:
    """Single-peak state: |psi|^2 = peak_density at one site, flat floor elsewhere.

    Valid only while 0 < spacing*peak_density < 1, i.e. the peak carries less
    than the whole probability.
    """
    a = lattice.spacing
    occupied = a * peak_density
    if not 0.0 < occupied < 1.0:
        raise ValueError(
            f"spacing*peak_density = {occupied:g} outside the open interval (0, 1)"
        )
    if not 0 <= peak_site < lattice.sites:
        raise ValueError(f"peak_site {peak_site} outside lattice")
    floor_amp = np.sqrt((1.0 - occupied) / (a * (lattice.sites - 1)))
    amps = np.full(lattice.sites, floor_amp, dtype=complex)
    amps[peak_site] = np.sqrt(peak_density)
    return DiscreteWaveFunction(lattice, amps)


def make_gaussian(
    lattice: LatticeSpec,
    center_site: float,
    width_sites: float,
    wavenumber: float = 0.0,
) -> DiscreteWaveFunction:
    """Gaussian packet centered on ``center_site`` with an optional phase ramp."""
    n = np.arange(lattice.sites)
    envelope = np.exp(-((n - center_site) ** 2) / (4.0 * width_sites**2))
    phase = np.exp(1j * wavenumber * lattice.spacing * n)
    return DiscreteWaveFunction.from_unnormalized(lattice, envelope * phase)


def random_wave(lattice: LatticeSpec, rng: np.random.Generator) -> DiscreteWaveFunction:
    raw = rng.standard_normal(lattice.sites) + 1j * rng.standard_normal(lattice.sites)
    return DiscreteWaveFunction.from_unnormalized(lattice, raw)


# === histories and boundary data ===


@dataclass(frozen=True, eq=False)
class WaveHistory:
    """Time-indexed stack of slices; fixed flags mark non-integrated boundaries."""

    lattice: LatticeSpec
    slices: np.ndarray  # (time, sites) complex
    fixed_first: bool = True
    fixed_last: bool = True

    def __post_init__(self):
        arr = np.asarray(self.slices, dtype=np.complex128).copy()
        if arr.ndim != 2 or arr.shape[1] != self.lattice.sites:
            raise ValueError(f"bad history shape {arr.shape}")
        if arr.shape[0] < 2:
            raise ValueError("a history needs at least 2 slices")
        norms = self.lattice.spacing * np.sum(np.abs(arr) ** 2, axis=1)
        worst = float(np.max(np.abs(norms - 1.0)))
        if worst > 1e-10:
            raise ValueError(f"history slice normalization off by {worst:.3e}")
        arr.flags.writeable = False
        object.__setattr__(self, "slices", arr)

    @property
    def length(self) -> int:
        return self.slices.shape[0]

    @property
    def interior_indices(self) -> range:
        start = 1 if self.fixed_first else 0
        stop = self.length - 1 if self.fixed_last else self.length
        return range(start, stop)

    def wave(self, t: int) -> DiscreteWaveFunction:
        return DiscreteWaveFunction(self.lattice, self.slices[t])

    @classmethod
    def from_waves(
        cls,
        waves: Sequence[DiscreteWaveFunction],
        fixed_first: bool = True,
        fixed_last: bool = True,
    ) -> "WaveHistory":
        arr = np.stack([w.amplitudes for w in waves])
        return cls(waves[0].lattice, arr, fixed_first, fixed_last)


def constant_history(
    psi: DiscreteWaveFunction,
    length: int,
    fixed_first: bool = True,
    fixed_last: bool = True,
) -> WaveHistory:
    """The frozen history repeating one state on every slice."""
    arr = np.tile(psi.amplitudes, (length, 1))
    return WaveHistory(psi.lattice, arr, fixed_first, fixed_last)


@dataclass(frozen=True, eq=False)
class BoundaryPair:
    """The two pinned endpoint states of a correlator, with their time indices."""

    psi1: DiscreteWaveFunction
    psi2: DiscreteWaveFunction
    t1: int = 0
    t2: int = 2

    def __post_init__(self):
        if self.t1 >= self.t2:
            raise ValueError("boundary times must satisfy t1 < t2")
        lat1, lat2 = self.psi1.lattice, self.psi2.lattice
        if lat1.sites != lat2.sites or lat1.spacing != lat2.spacing:
            raise ValueError("boundary states live on different lattices")

    @property
    def interior_count(self) -> int:
        return self.t2 - self.t1 - 1


# === serialization ===


def wave_to_dict(psi: DiscreteWaveFunction) -> dict:
    return {
        "lattice": psi.lattice.to_dict(),
        "amplitudes": [[float(z.real), float(z.imag)] for z in psi.amplitudes],
    }


def wave_from_dict(data: dict) -> DiscreteWaveFunction:
    lattice = LatticeSpec.from_dict(data["lattice"])
    amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
    return DiscreteWaveFunction(lattice, amps)


def history_to_dict(history: WaveHistory) -> dict:
    return {
        "lattice": history.lattice.to_dict(),
        "fixed_first": history.fixed_first,
        "fixed_last": history.fixed_last,
        "slices": [
            [[float(z.real), float(z.imag)] for z in row] for row in history.slices
        ],
    }


def history_from_dict(data: dict) -> WaveHistory:
    lattice = LatticeSpec.from_dict(data["lattice"])
    arr = np.array(
        [[complex(re, im) for re, im in row] for row in data["slices"]],
        dtype=complex,
    )
    return WaveHistory(lattice, arr, data["fixed_first"], data["fixed_last"])
