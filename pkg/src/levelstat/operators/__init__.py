"""Finite-graph Hamiltonians H = T + V(ω) and their random potentials."""

from .graph import CHAIN, EDGES, TORUS, GraphSpec, build_hopping
from .hamiltonian import Hamiltonian, assemble_batch, assemble_hamiltonian
from .potentials import (
    MAX_SEED,
    SUPPORTED_KINDS,
    PotentialDistribution,
    PotentialVector,
    density_bound,
    philox_generator,
    sample_potential,
    sample_potentials,
)

__all__ = [
    "CHAIN",
    "EDGES",
    "TORUS",
    "GraphSpec",
    "build_hopping",
    "Hamiltonian",
    "assemble_batch",
    "assemble_hamiltonian",
    "MAX_SEED",
    "SUPPORTED_KINDS",
    "PotentialDistribution",
    "PotentialVector",
    "density_bound",
    "philox_generator",
    "sample_potential",
    "sample_potentials",
]
