"""Closed forms for H(ω) = [[a + ω_1, c], [conj(c), b + ω_2]].

Eigenvalues are ordered E_1 >= E_2. With u = ω_1 - ω_2 + a - b and
D = sqrt(u² + 4|c|²):

    E_{1,2} = (ω_1 + ω_2 + a + b ± D) / 2

so E_1 - E_2 = D >= 2|c| everywhere, and the map ω → (E_1, E_2) is two-to-one
onto the half-plane E_1 - E_2 > 2|c| with |det ∂E/∂ω| = sqrt(D² - 4|c|²) / D.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..errors import DomainError
from ..operators.graph import GraphSpec
from ..operators.potentials import PotentialDistribution


@dataclass(frozen=True)
class TwoByTwoModel:
    a: float = 0.0
    b: float = 0.0
    c: complex = 1.0

    @property
    def coupling(self) -> float:
        """|c|."""
        return abs(complex(self.c))

    @property
    def gap(self) -> float:
        """Smallest possible eigenvalue spacing, 2|c|."""
        return 2.0 * self.coupling

    @property
    def offset(self) -> float:
        """a - b, the shift between ω_1 - ω_2 and u."""
        return self.a - self.b

    def require_coupling(self) -> None:
        if self.coupling == 0.0:
            raise DomainError("c = 0 decouples the sites; the density is singular")

    def matrix(self, omega1: float, omega2: float) -> np.ndarray:
        c = complex(self.c)
        matrix = np.array([[self.a + omega1, c], [c.conjugate(), self.b + omega2]])
        return matrix.real.copy() if c.imag == 0 else matrix

    def graph(self) -> GraphSpec:
        """Two sites joined by c; the on-site a, b live in the potential."""
        return GraphSpec.from_edges(2, [(0, 1, self.c)])

    def eigenvalue_range(self, dist: PotentialDistribution) -> Tuple[float, float]:
        """Interval containing every eigenvalue for ω in the support."""
        low, high = dist.support
        return (
            min(self.a, self.b) + low - self.coupling,
            max(self.a, self.b) + high + self.coupling,
        )


def eigenvalues_2x2(model: TwoByTwoModel, omega1, omega2) -> Tuple[np.ndarray, np.ndarray]:
    """(E_1, E_2) with E_1 >= E_2; broadcasts over array inputs."""
    omega1 = np.asarray(omega1, dtype=float)
    omega2 = np.asarray(omega2, dtype=float)
    total = omega1 + omega2 + model.a + model.b
    spread = np.hypot(omega1 - omega2 + model.offset, model.gap)
    return 0.5 * (total + spread), 0.5 * (total - spread)


def _sub_gap_root(model: TwoByTwoModel, spacing: np.ndarray) -> np.ndarray:
    """sqrt(Δ² - 4|c|²) computed as sqrt((Δ - 2|c|)(Δ + 2|c|))."""
    return np.sqrt(np.clip((spacing - model.gap) * (spacing + model.gap), 0.0, None))


def jacobian_2x2(model: TwoByTwoModel, e1, e2):
    """|det ∂(E_1,E_2)/∂(ω_1,ω_2)| = sqrt(Δ² - 4|c|²)/Δ, Δ = E_1 - E_2 > 2|c|."""
    spacing = np.asarray(e1, dtype=float) - np.asarray(e2, dtype=float)
    if np.any(spacing <= model.gap):
        raise DomainError(
            f"Jacobian needs E_1 - E_2 > 2|c| = {model.gap}; got spacing "
            f"{float(np.min(spacing))}"
        )
    value = _sub_gap_root(model, spacing) / spacing
    return float(value) if np.ndim(value) == 0 else value


def invert_to_potentials(
    model: TwoByTwoModel, e1: float, e2: float
) -> List[Tuple[float, float]]:
    """All real (ω_1, ω_2) with eigenvalues (e1, e2); one when the gap is saturated."""
    spacing = float(e1) - float(e2)
    if spacing < model.gap:
        raise DomainError(
            f"No real potentials: E_1 - E_2 = {spacing} < 2|c| = {model.gap}"
        )
    total = float(e1) + float(e2) - model.a - model.b
    root = float(_sub_gap_root(model, np.float64(spacing)))
    branches = [root, -root] if root > 0.0 else [0.0]
    solutions = []
    for u in branches:
        difference = u - model.offset
        solutions.append((0.5 * (total + difference), 0.5 * (total - difference)))
    return solutions


def joint_density(model: TwoByTwoModel, dist: PotentialDistribution, e1, e2):
    """Density of the ordered pair (E_1, E_2), both ω branches summed.

    Zero for E_1 - E_2 <= 2|c|. A branch whose ω leaves the support adds zero.
    """
    model.require_coupling()
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    spacing = e1 - e2
    root = _sub_gap_root(model, spacing)
    above = spacing > model.gap
    total = e1 + e2 - model.a - model.b
    density = np.zeros(np.broadcast(e1, e2).shape)
    safe_root = np.where(above, root, 1.0)
    for sign in (1.0, -1.0):
        difference = sign * root - model.offset
        omega1 = 0.5 * (total + difference)
        omega2 = 0.5 * (total - difference)
        density = density + dist.density(omega1) * dist.density(omega2)
    value = np.where(above, density * spacing / safe_root, 0.0)
    return float(value) if np.ndim(value) == 0 else value
