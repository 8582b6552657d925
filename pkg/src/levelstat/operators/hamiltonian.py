"""Assembly of H = T + V."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DimensionError
from .graph import GraphSpec
from .potentials import PotentialVector


@dataclass(frozen=True)
class Hamiltonian:
    """H_Λ(ω) with the graph and potential it was built from."""

    matrix: np.ndarray
    graph: Optional[GraphSpec] = None
    potential: Optional[PotentialVector] = None

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix)
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def n_sites(self) -> int:
        return self.matrix.shape[0]

    @property
    def norm(self) -> float:
        """Spectral norm."""
        return float(np.linalg.norm(self.matrix, 2)) if self.n_sites else 0.0

    def with_site_potential(self, site: int, value: float) -> "Hamiltonian":
        """Copy with the diagonal entry at ``site`` replaced by ``value``."""
        matrix = self.matrix.copy()
        matrix[site, site] = value
        return Hamiltonian(matrix, self.graph, None)


def assemble_hamiltonian(
    hopping: np.ndarray, potential: PotentialVector, graph: Optional[GraphSpec] = None
) -> Hamiltonian:
    """Return H = T + diag(V); the hermitian structure of T is preserved exactly."""
    hopping = np.asarray(hopping)
    if hopping.ndim != 2 or hopping.shape[0] != hopping.shape[1]:
        raise DimensionError(f"T must be square, got shape {hopping.shape}")
    if hopping.shape[0] != len(potential):
        raise DimensionError(
            f"T is {hopping.shape[0]}x{hopping.shape[0]} but V has "
            f"{len(potential)} entries"
        )
    matrix = hopping.copy()
    matrix[np.diag_indices_from(matrix)] += potential.values
    return Hamiltonian(matrix, graph, potential)


def assemble_batch(hopping: np.ndarray, potentials: np.ndarray) -> np.ndarray:
    """Stack of Hamiltonians, shape (m, N, N), for potentials of shape (m, N)."""
    potentials = np.asarray(potentials, dtype=float)
    if potentials.ndim != 2 or potentials.shape[1] != hopping.shape[0]:
        raise DimensionError(
            f"Potentials of shape {potentials.shape} do not fit T of "
            f"shape {hopping.shape}"
        )
    stack = np.repeat(hopping[None, :, :], potentials.shape[0], axis=0)
    diagonal = np.arange(hopping.shape[0])
    stack[:, diagonal, diagonal] += potentials
    return stack
