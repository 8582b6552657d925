"""Potential distributions satisfying a bounded-density condition, and
reproducible counter-based sampling of potential vectors.

Every draw is a pure function of (seed, sample_index, site): sample ``i`` reads
Philox counter blocks ``[i*B, (i+1)*B)`` where ``B = ceil(n_sites / 4)``, so a
block of samples and the same samples drawn one at a time are bit-identical.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy import integrate

from ..errors import DistributionError, DomainError

logger = logging.getLogger(__name__)

UNIFORM = "uniform"
TRIANGULAR = "triangular"
TABLE = "table"
SUPPORTED_KINDS = (UNIFORM, TRIANGULAR, TABLE)

MAX_SEED = (1 << 64) - 1
# Second Philox key word; separates potential draws from other seeded streams.
POTENTIAL_STREAM = 0x9E3779B97F4A7C15
_DRAWS_PER_COUNTER = 4


@dataclass(frozen=True)
class PotentialDistribution:
    """Single-site law of V_x with a certified density bound ``rho_inf``.

    ``edges`` are the density breakpoints. For ``table`` the cell masses are
    stored in ``masses``; uniform and triangular laws need only the support.
    """

    kind: str
    edges: Tuple[float, ...]
    masses: Tuple[float, ...] = ()
    rho_inf: float = field(default=0.0)

    def __post_init__(self) -> None:
        if self.kind not in SUPPORTED_KINDS:
            raise DistributionError(
                f"Unsupported distribution kind '{self.kind}'. "
                f"Available: {', '.join(SUPPORTED_KINDS)}"
            )
        edges = np.asarray(self.edges, dtype=float)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise DistributionError(f"Edges must increase strictly: {self.edges}")
        if self.kind == TABLE:
            masses = np.asarray(self.masses, dtype=float)
            if masses.size != edges.size - 1:
                raise DistributionError(
                    f"{edges.size - 1} cells need as many masses, got {masses.size}"
                )
            if np.any(masses < 0):
                raise DistributionError("Cell masses must be nonnegative")
            if abs(masses.sum() - 1.0) > 1e-10:
                raise DistributionError(
                    f"Cell masses must sum to 1, got {masses.sum():.15g}"
                )
        object.__setattr__(self, "rho_inf", self._peak_density())

    @classmethod
    def uniform(cls, low: float, high: float) -> "PotentialDistribution":
        return cls(UNIFORM, (float(low), float(high)))

    @classmethod
    def triangular(cls, low: float, high: float) -> "PotentialDistribution":
        """Symmetric triangular law on [low, high] peaked at the midpoint."""
        return cls(TRIANGULAR, (float(low), 0.5 * (low + high), float(high)))

    @classmethod
    def table(cls, edges, masses) -> "PotentialDistribution":
        """Piecewise-constant density: cell ``i`` = [edges[i], edges[i+1]) holds masses[i]."""
        return cls(
            TABLE,
            tuple(float(e) for e in edges),
            tuple(float(m) for m in masses),
        )

    @property
    def support(self) -> Tuple[float, float]:
        return self.edges[0], self.edges[-1]

    @property
    def width(self) -> float:
        return self.edges[-1] - self.edges[0]

    @property
    def breakpoints(self) -> np.ndarray:
        """Points where the density or its derivative may jump."""
        return np.asarray(self.edges, dtype=float)

    def _peak_density(self) -> float:
        low, high = self.support
        if self.kind == UNIFORM:
            return 1.0 / (high - low)
        if self.kind == TRIANGULAR:
            return 2.0 / (high - low)
        widths = np.diff(self.edges)
        return float(np.max(np.asarray(self.masses) / widths))

    def density(self, x) -> np.ndarray:
        """Vectorized density; zero outside the half-open support [low, high)."""
        x = np.asarray(x, dtype=float)
        low, high = self.support
        inside = (x >= low) & (x < high)
        if self.kind == UNIFORM:
            return np.where(inside, 1.0 / (high - low), 0.0)
        if self.kind == TRIANGULAR:
            mid, half = 0.5 * (low + high), 0.5 * (high - low)
            values = (1.0 - np.abs(x - mid) / half) / half
            return np.where(inside, np.clip(values, 0.0, None), 0.0)
        edges = np.asarray(self.edges)
        heights = np.asarray(self.masses) / np.diff(edges)
        cells = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, heights.size - 1)
        return np.where(inside, heights[cells], 0.0)

    def ppf(self, u) -> np.ndarray:
        """Inverse CDF mapping [0, 1) into the support."""
        u = np.asarray(u, dtype=float)
        low, high = self.support
        if self.kind == UNIFORM:
            return low + (high - low) * u
        if self.kind == TRIANGULAR:
            width = high - low
            lower = low + width * np.sqrt(0.5 * u)
            upper = high - width * np.sqrt(0.5 * (1.0 - u))
            return np.where(u < 0.5, lower, upper)
        cdf = np.concatenate(([0.0], np.cumsum(self.masses)))
        cdf[-1] = 1.0
        values = np.interp(u, cdf, self.edges)
        return np.clip(values, low, np.nextafter(high, low))

    @property
    def mean(self) -> float:
        if self.kind in (UNIFORM, TRIANGULAR):
            return 0.5 * (self.edges[0] + self.edges[-1])
        edges = np.asarray(self.edges)
        centres = 0.5 * (edges[:-1] + edges[1:])
        return float(np.dot(centres, self.masses))

    def validate(self, grid_points: int = 20001, tolerance: float = 1e-10) -> None:
        """Certify density <= rho_inf on a grid and unit total mass by quadrature."""
        low, high = self.support
        grid = np.linspace(low, high, grid_points, endpoint=False)
        peak = float(np.max(self.density(grid)))
        if peak > self.rho_inf * (1.0 + 1e-12):
            raise DistributionError(
                f"Density reaches {peak:.6g} above rho_inf={self.rho_inf:.6g}"
            )
        total = 0.0
        for left, right in zip(self.edges[:-1], self.edges[1:]):
            piece, _ = integrate.quad(
                lambda t: float(self.density(t)), left, right, epsabs=1e-14
            )
            total += piece
        if abs(total - 1.0) > tolerance:
            raise DistributionError(f"Density integrates to {total:.15g}, not 1")
        logger.debug(f"{self.kind} distribution certified: rho_inf={self.rho_inf}")


def density_bound(dist: PotentialDistribution) -> float:
    """Return rho_inf; for i.i.d. products this is also the conditional bound."""
    return dist.rho_inf


@dataclass(frozen=True)
class PotentialVector:
    """One realization V(ω) together with the (seed, sample_index) that made it."""

    values: np.ndarray
    sample_index: int
    seed: int

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return self.values.size

    def shifted(self, shift: float) -> "PotentialVector":
        return PotentialVector(self.values + shift, self.sample_index, self.seed)


def philox_generator(seed: int, stream: int, counter: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, stream) positioned at ``counter``.

    Both key words are 64 bits wide; seeds outside 0..2**64-1 are refused
    rather than wrapped onto another stream.
    """
    for name, value in (("seed", seed), ("stream", stream)):
        if not 0 <= value <= MAX_SEED:
            raise DomainError(f"Philox {name} must lie in 0..2**64-1, got {value}")
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def uniform_block(seed: int, start: int, count: int, width: int) -> np.ndarray:
    """Uniform [0,1) draws for samples ``start .. start+count-1``, shape (count, width)."""
    blocks = -(-width // _DRAWS_PER_COUNTER)
    generator = philox_generator(seed, POTENTIAL_STREAM, start * blocks)
    draws = generator.random(count * blocks * _DRAWS_PER_COUNTER)
    return draws.reshape(count, blocks * _DRAWS_PER_COUNTER)[:, :width]


def sample_potentials(
    dist: PotentialDistribution, seed: int, start: int, count: int, n_sites: int
) -> np.ndarray:
    """Potential values for a contiguous range of sample indices."""
    if n_sites < 1:
        raise DistributionError(f"n_sites must be positive, got {n_sites}")
    if start < 0 or count < 0:
        raise DistributionError("Sample indices must be nonnegative")
    return dist.ppf(uniform_block(seed, start, count, n_sites))


def sample_potential(
    dist: PotentialDistribution, seed: int, sample_index: int, n_sites: int
) -> PotentialVector:
    values = sample_potentials(dist, seed, sample_index, 1, n_sites)[0]
    return PotentialVector(values, sample_index, seed)
