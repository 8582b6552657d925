"""Right-hand sides of the eigenvalue-statistics inequalities."""

from __future__ import annotations

import math
from typing import Sequence

PROVEN = "proven"
CONJECTURED = "conjectured"


def wegner_bound(rho_inf: float, length: float, n_sites: int) -> float:
    """E[Tr P_I] <= ρ_∞ |I| |Λ|."""
    return rho_inf * length * n_sites


def minami_bound(rho_inf: float, length: float, n_sites: int) -> float:
    """E[Tr P_I (Tr P_I - 1)] <= (π²/2) (ρ_∞ |I| |Λ|)²."""
    return 0.5 * math.pi**2 * (rho_inf * length * n_sites) ** 2


def n_level_bound(rho_inf: float, length: float, n_sites: int, n: int) -> float:
    """P{Tr P_I >= n} <= (πⁿ/n!) (ρ_∞ |I| |Λ|)ⁿ."""
    return math.pi**n / math.factorial(n) * (rho_inf * length * n_sites) ** n


def joint_interval_bound(
    rho_inf: float, lengths: Sequence[float], n_sites: int, constant: float = 1.0
) -> float:
    """Conjectured C_n ρⁿ ∏|I_j| |Λ|; false in general."""
    return constant * rho_inf ** len(lengths) * math.prod(lengths) * n_sites


def spectral_averaging_bound(rho_inf: float, lengths: Sequence[float]) -> float:
    """E|det(⟨δ_{x_k}, P_{I_j} δ_{x_k}⟩)| <= n! ρⁿ ∏|I_j|."""
    n = len(lengths)
    return math.factorial(n) * rho_inf**n * math.prod(lengths)


def profile_event_bound(
    rho_inf: float, lengths: Sequence[float], set_sizes: Sequence[int], alpha: float
) -> float:
    """P(E_α) <= (n!/αⁿ) ρⁿ ∏ |I_j| |B_j|."""
    n = len(lengths)
    return (
        math.factorial(n)
        / alpha**n
        * rho_inf**n
        * math.prod(lengths)
        * math.prod(set_sizes)
    )


def multiplicity_bound(n: int) -> int:
    return math.factorial(n)
