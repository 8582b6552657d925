"""The operator M = (H⊗1 - 1⊗H)² on antisymmetric two-site functions.

Basis vectors are δ⁻_{xy} = (e_x⊗e_y - e_y⊗e_x)/√2 for x < y in
lexicographic order. A vector of C^N ⊗ C^N is held as an N×N matrix, so
(H⊗1)v is H V and (1⊗H)v is V Hᵀ. K = H⊗1 - 1⊗H maps antisymmetric vectors
to symmetric ones, and M_pq = <K δ⁻_p, K δ⁻_q>.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import DegreeFitError, DimensionError
from ..operators.hamiltonian import Hamiltonian

logger = logging.getLogger(__name__)

DET_TOLERANCE = 1e-8
FIT_TOLERANCE = 1e-8
PSD_TOLERANCE = 1e-10

MatrixLike = Union[Hamiltonian, np.ndarray]


def _as_matrix(hamiltonian: MatrixLike) -> np.ndarray:
    if isinstance(hamiltonian, Hamiltonian):
        hamiltonian = hamiltonian.matrix
    matrix = np.asarray(hamiltonian)
    if not np.iscomplexobj(matrix):
        matrix = matrix.astype(float)
    if matrix.ndim < 2 or matrix.shape[-1] != matrix.shape[-2]:
        raise DimensionError(f"Expected square matrices, got shape {matrix.shape}")
    if matrix.shape[-1] < 2:
        raise DimensionError("The antisymmetric subspace needs at least two sites")
    return matrix


@lru_cache(maxsize=None)
def antisymmetric_pairs(n_sites: int) -> Tuple[Tuple[int, int], ...]:
    return tuple((x, y) for x in range(n_sites) for y in range(x + 1, n_sites))


@lru_cache(maxsize=None)
def antisymmetric_basis(n_sites: int) -> np.ndarray:
    """(P, N, N) stack of δ⁻_{xy} as matrices, read-only."""
    pairs = antisymmetric_pairs(n_sites)
    basis = np.zeros((len(pairs), n_sites, n_sites))
    for p, (x, y) in enumerate(pairs):
        basis[p, x, y] = 1.0 / math.sqrt(2.0)
        basis[p, y, x] = -1.0 / math.sqrt(2.0)
    basis.setflags(write=False)
    return basis


@dataclass(frozen=True, eq=False)
class AntisymmetricOperator:
    matrix: np.ndarray
    pairs: Tuple[Tuple[int, int], ...]

    @property
    def dimension(self) -> int:
        return len(self.pairs)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def is_psd(self, tolerance: float = PSD_TOLERANCE) -> bool:
        norm = float(np.linalg.norm(self.matrix, 2))
        return bool(self.eigenvalues()[0] >= -tolerance * norm)

    def coordinates(self, first: np.ndarray, second: np.ndarray) -> np.ndarray:
        """Components of (ψ⊗φ - φ⊗ψ)/√2 on δ⁻_{xy}: ψ(x)φ(y) - φ(x)ψ(y)."""
        x, y = np.array(self.pairs).T
        return first[x] * second[y] - second[x] * first[y]


def antisymmetric_matrices(matrices: np.ndarray) -> np.ndarray:
    """M for a stack of Hamiltonians, shape (m, P, P)."""
    matrices = _as_matrix(matrices)
    single = matrices.ndim == 2
    stack = matrices[None] if single else matrices
    basis = antisymmetric_basis(stack.shape[-1])
    images = np.einsum("mxa,pay->mpxy", stack, basis) - np.einsum(
        "pxa,mya->mpxy", basis, stack
    )
    gram = np.einsum("mpxy,mqxy->mpq", images.conj(), images)
    gram = 0.5 * (gram + np.swapaxes(gram, -1, -2).conj())
    if not np.iscomplexobj(matrices):
        gram = gram.real
    return gram[0] if single else gram


def build_antisymmetric_operator(hamiltonian: MatrixLike) -> AntisymmetricOperator:
    matrix = _as_matrix(hamiltonian)
    if matrix.ndim != 2:
        raise DimensionError("build_antisymmetric_operator takes a single matrix")
    return AntisymmetricOperator(
        antisymmetric_matrices(matrix), antisymmetric_pairs(matrix.shape[0])
    )


def spacing_product(eigenvalues: np.ndarray) -> np.ndarray:
    """∏_{j<k} (E_j - E_k)² along the last axis."""
    eigenvalues = np.asarray(eigenvalues, dtype=float)
    j, k = np.triu_indices(eigenvalues.shape[-1], 1)
    differences = eigenvalues[..., j] - eigenvalues[..., k]
    return np.prod(differences**2, axis=-1)


class DetMResult(NamedTuple):
    det: float
    spectral_product: float
    relative_error: float
    agrees: bool


def _compare(gram: np.ndarray, eigenvalues: np.ndarray) -> Tuple[np.ndarray, ...]:
    """det M and the spacing product with their agreement, vectorized over rows."""
    sign, logdet = np.linalg.slogdet(gram)
    det = np.real(sign) * np.exp(logdet)
    product = spacing_product(eigenvalues)
    j, k = np.triu_indices(eigenvalues.shape[-1], 1)
    with np.errstate(divide="ignore"):
        squares = (eigenvalues[..., j] - eigenvalues[..., k]) ** 2
        logproduct = np.sum(np.log(squares), axis=-1)
    both = (np.real(sign) > 0) & np.isfinite(logproduct)
    with np.errstate(invalid="ignore"):
        shift = np.expm1(logdet - np.where(both, logproduct, 0.0))
    relative = np.where(both, np.abs(shift), np.inf)
    norm = np.linalg.norm(gram, 2, axis=(-2, -1))
    floor = DET_TOLERANCE * np.maximum(norm, 1.0) ** gram.shape[-1]
    degenerate = ~np.isfinite(logproduct)
    agrees = np.where(degenerate, np.abs(det) <= floor, relative <= DET_TOLERANCE)
    relative = np.where(degenerate, np.abs(det - product), relative)
    return det, product, relative, agrees


def det_M(hamiltonian: MatrixLike) -> DetMResult:
    """det M from the assembled matrix, checked against ∏_{j<k}(E_j - E_k)²."""
    matrix = _as_matrix(hamiltonian)
    if matrix.ndim != 2:
        raise DimensionError("det_M takes a single matrix; use det_M_batch for stacks")
    gram = antisymmetric_matrices(matrix)
    det, product, relative, agrees = _compare(gram, np.linalg.eigvalsh(matrix))
    return DetMResult(float(det), float(product), float(relative), bool(agrees))


def det_M_batch(matrices: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(det M, spacing product, agreement) for a stack of Hamiltonians."""
    matrices = _as_matrix(matrices)
    gram = antisymmetric_matrices(matrices)
    det, product, _, agrees = _compare(gram, np.linalg.eigvalsh(matrices))
    return det, product, agrees


class DegreeProbe(NamedTuple):
    degree: int
    max_degree: int
    stated_bound: int
    exceeds_stated_bound: bool
    residual: float


def chebyshev_points(center: float, radius: float, count: int) -> np.ndarray:
    k = np.arange(count)
    return center + radius * np.cos(np.pi * (k + 0.5) / count)


def degree_probe(
    hamiltonian: MatrixLike, site: int, points: Optional[Sequence[float]] = None
) -> DegreeProbe:
    """Minimal polynomial degree of v ↦ det M(H with H[site, site] = v).

    The degree is at most 2(|Λ| - 1): one eigenvalue follows v and the
    others stay bounded. ``stated_bound`` is |Λ|, which the degree exceeds
    for |Λ| > 2 unless the site is special.
    """
    matrix = _as_matrix(hamiltonian)
    n_sites = matrix.shape[0]
    if not 0 <= site < n_sites:
        raise DimensionError(f"Site {site} outside 0..{n_sites - 1}")
    max_degree = 2 * (n_sites - 1)
    if points is None:
        radius = max(1.0, float(np.linalg.norm(matrix, 2)))
        center = float(np.mean(np.real(np.diag(matrix))))
        points = chebyshev_points(center, radius, max_degree + 5)
    points = np.unique(np.asarray(points, dtype=float))
    if points.size < max_degree + 3:
        raise DegreeFitError(
            f"Need at least {max_degree + 3} distinct points, got {points.size}"
        )

    stack = np.repeat(matrix[None], points.size, axis=0)
    stack[:, site, site] = points
    values, _, _ = det_M_batch(stack)
    scale = float(np.max(np.abs(values)))

    for degree in range(points.size - 1):
        fit = np.polynomial.Chebyshev.fit(points, values, degree)
        residual = float(np.max(np.abs(fit(points) - values)))
        if residual <= FIT_TOLERANCE * scale:
            if degree > max_degree:
                raise DegreeFitError(
                    f"Fitted degree {degree} exceeds 2(|Λ|-1) = {max_degree}"
                )
            logger.debug(f"det M in V_{site}: degree {degree}, residual {residual:.3g}")
            relative = residual / scale if scale > 0 else 0.0
            return DegreeProbe(degree, max_degree, n_sites, degree > n_sites, relative)
    raise DegreeFitError(
        f"No degree below {points.size - 1} fits det M to {FIT_TOLERANCE:g}"
    )
