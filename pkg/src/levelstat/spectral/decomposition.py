"""Dense eigendecomposition and simplicity diagnostics."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import EigensolverError
from ..operators.hamiltonian import Hamiltonian

logger = logging.getLogger(__name__)

DEFAULT_RELATIVE_GAP_TOLERANCE = 1e-12


@dataclass(frozen=True)
class SpectralData:
    """Ascending eigenvalues; column j of ``eigenvectors`` belongs to eigenvalue j."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __post_init__(self) -> None:
        for name in ("eigenvalues", "eigenvectors"):
            array = np.array(getattr(self, name))
            array.setflags(write=False)
            object.__setattr__(self, name, array)

    @property
    def n_sites(self) -> int:
        return self.eigenvalues.size

    @property
    def weights(self) -> np.ndarray:
        """|ψ_j(x)|² indexed [x, j]."""
        return np.abs(self.eigenvectors) ** 2

    @property
    def diameter(self) -> float:
        return float(self.eigenvalues[-1] - self.eigenvalues[0]) if self.n_sites else 0.0

    def check(self, matrix: np.ndarray, tolerance: float = 1e-10) -> None:
        """Raise AssertionError unless ordering, orthonormality and residuals hold."""
        assert np.all(np.diff(self.eigenvalues) >= 0), "eigenvalues not ascending"
        vectors = self.eigenvectors
        gram = vectors.conj().T @ vectors
        deviation = float(np.max(np.abs(gram - np.eye(self.n_sites))))
        assert deviation <= tolerance, f"Gram deviation {deviation:.3g}"
        scale = 1.0 + float(np.linalg.norm(matrix, 2))
        residual = matrix @ vectors - vectors * self.eigenvalues[None, :]
        worst = float(np.max(np.abs(residual)))
        assert worst <= tolerance * scale, f"residual {worst:.3g}"


def eigendecompose_batch(matrices: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Eigenpairs of a stack of hermitian matrices, LAPACK called per matrix."""
    try:
        return np.linalg.eigh(matrices)
    except np.linalg.LinAlgError as e:
        raise EigensolverError(f"Eigensolver did not converge: {e}") from e


def eigendecompose(hamiltonian: Hamiltonian) -> SpectralData:
    eigenvalues, eigenvectors = eigendecompose_batch(hamiltonian.matrix[None, :, :])
    return SpectralData(eigenvalues[0], eigenvectors[0])


@dataclass(frozen=True)
class SimplicityReport:
    min_gap: float
    degenerate: bool
    gap_tolerance: float


def default_gap_tolerance(eigenvalues: np.ndarray) -> float:
    """1e-12 · (1 + spectral diameter)."""
    eigenvalues = np.asarray(eigenvalues)
    diameter = float(eigenvalues[-1] - eigenvalues[0]) if eigenvalues.size else 0.0
    return DEFAULT_RELATIVE_GAP_TOLERANCE * (1.0 + diameter)


def min_gaps(eigenvalues: np.ndarray) -> np.ndarray:
    """Smallest consecutive spacing per row of an (m, N) array; inf when N == 1."""
    eigenvalues = np.atleast_2d(eigenvalues)
    if eigenvalues.shape[1] < 2:
        return np.full(eigenvalues.shape[0], np.inf)
    return np.min(np.diff(eigenvalues, axis=1), axis=1)


def degenerate_mask(eigenvalues: np.ndarray) -> np.ndarray:
    """Per-sample degeneracy flags using the default relative tolerance."""
    eigenvalues = np.atleast_2d(eigenvalues)
    diameter = eigenvalues[:, -1] - eigenvalues[:, 0]
    tolerance = DEFAULT_RELATIVE_GAP_TOLERANCE * (1.0 + diameter)
    return min_gaps(eigenvalues) < tolerance


def simplicity_report(spec: SpectralData, gap_tolerance: float | None = None) -> SimplicityReport:
    if gap_tolerance is None:
        gap_tolerance = default_gap_tolerance(spec.eigenvalues)
    gap = float(min_gaps(spec.eigenvalues)[0])
    return SimplicityReport(gap, gap < gap_tolerance, gap_tolerance)
