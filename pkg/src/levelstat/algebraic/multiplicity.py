"""Characteristic polynomials as functions of the free potentials V_Σ.

P_E(V_Σ) = det(H(V_Σ) - E) is affine in each V_x, so ∂P_E/∂V_x is the
principal minor of H - E with row and column x removed, and a central
difference in V_x is exact up to rounding.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import permutations
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..errors import (
    DegenerateSpectrumError,
    DegenerateSystemError,
    DimensionError,
    DomainError,
    SiteError,
)
from ..operators.graph import GraphSpec, build_hopping
from ..spectral.decomposition import default_gap_tolerance, min_gaps
from ..spectral.intervals import check_distinct_sites

logger = logging.getLogger(__name__)

TARGET_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class MultiplicityProblem:
    """The system P_{E_j}(V_Σ) = 0, j = 1..n, on the free sites Σ.

    ``frozen_potential`` holds V_y for the sites outside Σ, either as a full
    length-|Λ| vector (entries on Σ ignored) or in increasing site order.
    ``onsite`` adds a deterministic diagonal to T.
    """

    graph: GraphSpec
    free_sites: Tuple[int, ...]
    targets: Tuple[float, ...]
    frozen_potential: np.ndarray = field(default_factory=lambda: np.zeros(0))
    onsite: Optional[Tuple[float, ...]] = None

    def __post_init__(self) -> None:
        n_sites = self.graph.n_sites
        free = check_distinct_sites(self.free_sites, n_sites)
        targets = tuple(float(e) for e in self.targets)
        if not free:
            raise SiteError("At least one free site is required")
        if len(targets) != len(free):
            raise DimensionError(
                f"{len(free)} free sites need {len(free)} targets, got {len(targets)}"
            )
        if len(set(targets)) != len(targets):
            raise DomainError(f"Targets must be pairwise distinct, got {targets}")
        frozen_sites = [y for y in range(n_sites) if y not in free]
        values = np.asarray(self.frozen_potential, dtype=float).ravel()
        full = np.zeros(n_sites)
        if values.size == n_sites:
            full[frozen_sites] = values[frozen_sites]
        elif values.size == len(frozen_sites):
            full[frozen_sites] = values
        elif values.size != 0 or frozen_sites:
            raise DimensionError(
                f"frozen_potential needs {len(frozen_sites)} or {n_sites} values, "
                f"got {values.size}"
            )
        onsite = np.zeros(n_sites)
        if self.onsite is not None:
            onsite = np.asarray(self.onsite, dtype=float)
        if onsite.shape != (n_sites,):
            raise DimensionError(f"onsite needs {n_sites} values, got {onsite.size}")
        full.setflags(write=False)
        object.__setattr__(self, "free_sites", free)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "frozen_potential", full)
        object.__setattr__(self, "onsite", tuple(float(v) for v in onsite))

    @property
    def n(self) -> int:
        return len(self.free_sites)

    @property
    def n_sites(self) -> int:
        return self.graph.n_sites

    @property
    def frozen_sites(self) -> Tuple[int, ...]:
        return tuple(y for y in range(self.n_sites) if y not in self.free_sites)

    def base_matrix(self) -> np.ndarray:
        """T + diag(onsite) + diag(frozen potential), zero potential on Σ."""
        matrix = build_hopping(self.graph).copy()
        diagonal = np.arange(self.n_sites)
        matrix[diagonal, diagonal] += np.asarray(self.onsite) + self.frozen_potential
        return matrix

    def matrices(self, free_values) -> np.ndarray:
        """H(V_Σ) for a stack of free-site vectors, shape (m, N, N)."""
        free_values = np.atleast_2d(np.asarray(free_values, dtype=float))
        if free_values.shape[-1] != self.n:
            raise DimensionError(
                f"Expected {self.n} free values, got {free_values.shape[-1]}"
            )
        stack = np.repeat(self.base_matrix()[None], free_values.shape[0], axis=0)
        sites = np.asarray(self.free_sites)
        stack[:, sites, sites] += free_values
        return stack

    @property
    def is_diagonal(self) -> bool:
        return not self.graph.edges

    def scale(self) -> float:
        norm = float(np.linalg.norm(self.base_matrix(), 2))
        return 1.0 + norm + max(abs(e) for e in self.targets)

    def check_targets(self) -> None:
        """Raise if a target hits the spectrum of the frozen block."""
        frozen = list(self.frozen_sites)
        if not frozen:
            return
        block = self.base_matrix()[np.ix_(frozen, frozen)]
        spectrum = np.linalg.eigvalsh(block)
        tolerance = TARGET_TOLERANCE * self.scale()
        for target in self.targets:
            distance = float(np.min(np.abs(spectrum - target)))
            if distance <= tolerance:
                raise DegenerateSystemError(
                    f"Target {target} lies within {distance:.3g} of the frozen-block "
                    "spectrum; perturb the targets"
                )


def _shifted(matrices: np.ndarray, targets: Sequence[float]) -> np.ndarray:
    """(m, n, N, N) stack of H - E_j."""
    eye = np.eye(matrices.shape[-1])
    return matrices[:, None, :, :] - np.asarray(targets)[None, :, None, None] * eye


def char_poly_batch(problem: MultiplicityProblem, free_values) -> np.ndarray:
    """P_{E_j}(V_Σ) for every row and target, shape (m, n)."""
    values = np.linalg.det(_shifted(problem.matrices(free_values), problem.targets))
    return values.real if np.iscomplexobj(values) else values


def char_poly_eval(problem: MultiplicityProblem, free_values, energy: float) -> float:
    """det(H(V_Σ) - E) by pivoted LU."""
    matrix = problem.matrices(free_values)[0]
    value = np.linalg.det(matrix - energy * np.eye(problem.n_sites))
    return float(np.real(value))


def char_poly_jacobian(problem: MultiplicityProblem, free_values) -> np.ndarray:
    """∂P_{E_j}/∂V_{x_k} via principal minors, shape (m, n, n) indexed [., j, k]."""
    shifted = _shifted(problem.matrices(free_values), problem.targets)
    keep_all = np.arange(problem.n_sites)
    columns = []
    for site in problem.free_sites:
        keep = keep_all[keep_all != site]
        minor = shifted[:, :, keep[:, None], keep[None, :]]
        columns.append(np.linalg.det(minor))
    jacobian = np.stack(columns, axis=-1)
    return jacobian.real if np.iscomplexobj(jacobian) else jacobian


def residual_scale(problem: MultiplicityProblem, free_values) -> np.ndarray:
    """Hadamard bound ∏_rows ||row|| of H - E_j; |P_{E_j}| never exceeds it."""
    shifted = _shifted(problem.matrices(free_values), problem.targets)
    return np.prod(np.linalg.norm(shifted, axis=-1), axis=-1)


@dataclass(frozen=True, eq=False)
class SolutionSet:
    """Distinct real roots of the system with their Jacobian determinants."""

    solutions: np.ndarray
    jacobian_dets: np.ndarray
    residuals: np.ndarray
    starts_used: int = 0
    converged: int = 0
    merges: int = 0
    rejected_singular: int = 0

    @property
    def count(self) -> int:
        return int(self.solutions.shape[0])

    def __len__(self) -> int:
        return self.count

    def matches(self, other: "SolutionSet", tolerance: float = 1e-8) -> bool:
        """Set equality up to ``tolerance`` relative to the coordinate size."""
        if self.count != other.count:
            return False
        unused = list(range(other.count))
        for row in self.solutions:
            for index in unused:
                candidate = other.solutions[index]
                limit = tolerance * (1.0 + np.max(np.abs(row)))
                if np.max(np.abs(row - candidate)) <= limit:
                    unused.remove(index)
                    break
            else:
                return False
        return True


def sort_solutions(solutions: np.ndarray) -> np.ndarray:
    """Row order for lexicographic sorting (first coordinate most significant)."""
    if solutions.shape[0] == 0:
        return np.arange(0)
    return np.lexsort(solutions.T[::-1])


def diagonal_case_enumerate(problem: MultiplicityProblem) -> SolutionSet:
    """Exact roots without hopping: V_{x_k} = E_{π(k)} - onsite_{x_k} for every π."""
    if not problem.is_diagonal:
        raise DomainError("Closed-form enumeration needs a graph without edges")
    problem.check_targets()
    onsite = np.asarray(problem.onsite)[list(problem.free_sites)]
    rows = np.array(
        [np.asarray(p) - onsite for p in permutations(problem.targets)], dtype=float
    )
    rows = rows[sort_solutions(rows)]
    dets = np.linalg.det(char_poly_jacobian(problem, rows))
    residuals = np.max(np.abs(char_poly_batch(problem, rows)), axis=1)
    return SolutionSet(rows, dets, residuals, converged=rows.shape[0])


class JacobianCheck(NamedTuple):
    analytic: float
    factored: float
    finite_difference: float
    profile_determinant: float
    agrees: bool


def _close(a: float, b: float, relative: float) -> bool:
    return abs(a - b) <= relative * max(abs(a), abs(b)) + 1e-300


def jacobian_condition(
    problem: MultiplicityProblem, solution, relative: float = 1e-6
) -> JacobianCheck:
    """det ∂P_{E_j}/∂V_{x_k} three ways.

    The factored form is D(E;Σ) · ∏_j ∏_{λ ≠ E_j} (λ - E_j), where D is the
    determinant of |ψ_j(x_k)|² and λ runs over the whole spectrum of H(V_Σ);
    for Σ = Λ this is ∏_j ∏_{m≠j} (E_m - E_j).
    """
    solution = np.asarray(solution, dtype=float).ravel()
    matrix = problem.matrices(solution)[0]
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    tolerance = default_gap_tolerance(eigenvalues)
    if min_gaps(eigenvalues)[0] < tolerance:
        raise DegenerateSpectrumError("Spectrum at the solution is degenerate")

    analytic = float(np.linalg.det(char_poly_jacobian(problem, solution)[0]))

    indices = [int(np.argmin(np.abs(eigenvalues - e))) for e in problem.targets]
    if len(set(indices)) != len(indices):
        raise DegenerateSpectrumError("Two targets matched the same eigenvalue")
    weights = np.abs(eigenvectors) ** 2
    profile = float(np.linalg.det(weights[np.ix_(list(problem.free_sites), indices)].T))
    factor = 1.0
    for index in indices:
        energy = eigenvalues[index]
        factor *= float(np.prod(np.delete(eigenvalues, index) - energy))
    factored = profile * factor

    step = 1e-6 * (1.0 + float(np.max(np.abs(solution))))
    columns = []
    for k in range(problem.n):
        offset = np.zeros(problem.n)
        offset[k] = step
        upper = char_poly_batch(problem, solution + offset)[0]
        lower = char_poly_batch(problem, solution - offset)[0]
        columns.append((upper - lower) / (2.0 * step))
    finite_difference = float(np.linalg.det(np.stack(columns, axis=-1)))

    agrees = _close(analytic, factored, relative) and _close(
        analytic, finite_difference, relative
    )
    return JacobianCheck(analytic, factored, finite_difference, profile, agrees)
