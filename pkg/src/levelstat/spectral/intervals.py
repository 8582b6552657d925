"""Half-open energy intervals, occupancy counts and spectral projector entries."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Sequence, Tuple

import numpy as np

from ..errors import DomainError, SiteError
from .decomposition import SpectralData


@dataclass(frozen=True)
class Interval:
    """[low, high) with low < high."""

    low: float
    high: float

    def __post_init__(self) -> None:
        if not self.low < self.high:
            raise DomainError(f"Interval needs low < high, got [{self.low}, {self.high})")

    @property
    def length(self) -> float:
        return self.high - self.low

    def mask(self, energies) -> np.ndarray:
        energies = np.asarray(energies)
        return (energies >= self.low) & (energies < self.high)

    def intersects(self, other: "Interval") -> bool:
        return self.low < other.high and other.low < self.high

    def shifted(self, offset: float) -> "Interval":
        return Interval(self.low + offset, self.high + offset)

    @classmethod
    def coerce(cls, value) -> "Interval":
        if isinstance(value, Interval):
            return value
        low, high = value
        return cls(float(low), float(high))


@dataclass(frozen=True)
class IntervalSet:
    intervals: Tuple[Interval, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "intervals", tuple(Interval.coerce(i) for i in self.intervals)
        )

    @classmethod
    def of(cls, *intervals) -> "IntervalSet":
        return cls(tuple(intervals))

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __getitem__(self, index: int) -> Interval:
        return self.intervals[index]

    @cached_property
    def disjoint(self) -> bool:
        return not any(a.intersects(b) for a, b in combinations(self.intervals, 2))

    @property
    def lengths(self) -> np.ndarray:
        return np.array([i.length for i in self.intervals])

    def has_repeats(self) -> bool:
        return len(set(self.intervals)) < len(self.intervals)


def count_in_interval(spec: SpectralData, interval) -> int:
    """Tr P_I = number of eigenvalues in [a, b)."""
    return int(np.count_nonzero(Interval.coerce(interval).mask(spec.eigenvalues)))


def counts_batch(eigenvalues: np.ndarray, interval: Interval) -> np.ndarray:
    """Tr P_I for every row of an (m, N) eigenvalue array."""
    return np.count_nonzero(interval.mask(eigenvalues), axis=-1)


def check_site(site: int, n_sites: int) -> int:
    if not 0 <= site < n_sites:
        raise SiteError(f"Site {site} out of range 0..{n_sites - 1}")
    return int(site)


def check_distinct_sites(sites: Iterable[int], n_sites: int) -> Tuple[int, ...]:
    sites = tuple(check_site(s, n_sites) for s in sites)
    if len(set(sites)) != len(sites):
        raise SiteError(f"Sites must be distinct, got {sites}")
    return sites


def projector_entry(spec: SpectralData, interval, site: int) -> float:
    """⟨δ_x, P_I δ_x⟩ = Σ_{j: E_j ∈ I} |ψ_j(x)|²."""
    site = check_site(site, spec.n_sites)
    mask = Interval.coerce(interval).mask(spec.eigenvalues)
    return float(np.sum(spec.weights[site, mask]))


def projector_entries_batch(
    eigenvalues: np.ndarray,
    eigenvectors: np.ndarray,
    intervals: Sequence[Interval],
    sites: Sequence[int],
) -> np.ndarray:
    """Matrices (⟨δ_{x_k}, P_{I_j} δ_{x_k}⟩)_{j,k} for a stack, shape (m, n, n)."""
    weights = np.abs(eigenvectors[:, list(sites), :]) ** 2  # (m, n_sites_sel, N)
    masks = np.stack([i.mask(eigenvalues) for i in intervals], axis=1)  # (m, n, N)
    return np.einsum("mjN,mkN->mjk", masks.astype(float), weights)
