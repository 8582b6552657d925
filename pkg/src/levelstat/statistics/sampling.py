"""Sample-parallel evaluation with results independent of the worker count.

Samples are cut into chunks of fixed size. Each chunk draws its potentials
from the counter-based stream, builds and diagonalizes its Hamiltonians, and
hands a :class:`SpectralBatch` to a per-sample statistic. Chunks may run on
any thread; their outputs are concatenated in sample-index order.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from ..errors import EigensolverError
from ..operators.hamiltonian import assemble_batch
from ..operators.potentials import PotentialDistribution, sample_potentials
from ..spectral.decomposition import SpectralData, degenerate_mask, eigendecompose_batch

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_SIZE = 2048


@dataclass(frozen=True)
class SpectralBatch:
    """Consecutive samples ``start .. start+len-1``.

    ``eigenvectors`` is None when the runner was asked for eigenvalues only;
    ``eigenvalues`` is None when no hopping matrix was given.
    """

    start: int
    potentials: np.ndarray
    eigenvalues: Optional[np.ndarray] = None
    eigenvectors: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return self.potentials.shape[0]

    @property
    def degenerate(self) -> np.ndarray:
        return degenerate_mask(self.eigenvalues)

    def spectral_data(self, row: int) -> SpectralData:
        return SpectralData(self.eigenvalues[row], self.eigenvectors[row])


Statistic = Callable[[SpectralBatch], np.ndarray]


class SampleRunner:
    """Runs a per-sample statistic over ``n_samples`` seeded realizations."""

    def __init__(
        self,
        dist: PotentialDistribution,
        n_sites: int,
        seed: int,
        n_samples: int,
        *,
        hopping: Optional[np.ndarray] = None,
        threads: Optional[int] = None,
        chunk_size: int = DEFAULT_CHUNK_SIZE,
    ):
        if n_samples < 1:
            raise ValueError(f"n_samples must be positive, got {n_samples}")
        if chunk_size < 1:
            raise ValueError(f"chunk_size must be positive, got {chunk_size}")
        self.dist = dist
        self.n_sites = n_sites
        self.seed = seed
        self.n_samples = n_samples
        self.hopping = hopping
        self.threads = max(1, threads or os.cpu_count() or 1)
        self.chunk_size = chunk_size
        self.logger = logging.getLogger(__name__)

    def chunks(self) -> List[Tuple[int, int]]:
        """(start, count) pairs; they depend on n_samples and chunk_size only."""
        return [
            (start, min(self.chunk_size, self.n_samples - start))
            for start in range(0, self.n_samples, self.chunk_size)
        ]

    def batch(self, start: int, count: int, vectors: bool = True) -> SpectralBatch:
        potentials = sample_potentials(self.dist, self.seed, start, count, self.n_sites)
        if self.hopping is None:
            return SpectralBatch(start, potentials)
        matrices = assemble_batch(self.hopping, potentials)
        if vectors:
            eigenvalues, eigenvectors = eigendecompose_batch(matrices)
            return SpectralBatch(start, potentials, eigenvalues, eigenvectors)
        try:
            eigenvalues = np.linalg.eigvalsh(matrices)
        except np.linalg.LinAlgError as e:
            raise EigensolverError(
                f"Eigensolver did not converge in samples {start}..{start + count - 1}"
            ) from e
        return SpectralBatch(start, potentials, eigenvalues)

    def map(self, statistic: Statistic, vectors: bool = True) -> np.ndarray:
        """Per-sample values of ``statistic`` in sample-index order."""
        chunks = self.chunks()

        def run(chunk: Tuple[int, int]) -> np.ndarray:
            start, count = chunk
            values = np.asarray(statistic(self.batch(start, count, vectors)))
            self.logger.debug(f"Chunk at {start}: {count} samples done")
            return values

        if self.threads == 1 or len(chunks) == 1:
            results = [run(chunk) for chunk in chunks]
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as executor:
                results = list(executor.map(run, chunks))
        return np.concatenate(results, axis=0)
