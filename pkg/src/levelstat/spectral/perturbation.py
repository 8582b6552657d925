"""First-order eigenvalue response to a single on-site potential."""

from __future__ import annotations

import logging
from typing import NamedTuple

import numpy as np

from ..errors import DegenerateSpectrumError, SiteError
from ..operators.graph import GraphSpec, build_hopping
from ..operators.hamiltonian import assemble_hamiltonian
from ..operators.potentials import PotentialVector
from .decomposition import eigendecompose

logger = logging.getLogger(__name__)

DEFAULT_STEP = 1e-5
GAP_FACTOR = 10.0


class FeynmanHellmannResult(NamedTuple):
    analytic: float
    numeric: float

    def agrees(self, relative: float = 1e-6, absolute: float = 1e-9) -> bool:
        return abs(self.analytic - self.numeric) <= relative * abs(self.analytic) + absolute


def feynman_hellmann_check(
    graph: GraphSpec,
    potential: PotentialVector,
    site: int,
    eigenindex: int,
    step: float = DEFAULT_STEP,
) -> FeynmanHellmannResult:
    """Compare ∂E_j/∂V_x = |ψ_j(x)|² with a central difference of step ``step``.

    Refuses eigenvalues whose distance to the rest of the spectrum is at most
    ``10 * step * ||H||``.
    """
    hamiltonian = assemble_hamiltonian(build_hopping(graph), potential, graph)
    n_sites = hamiltonian.n_sites
    if not 0 <= site < n_sites:
        raise SiteError(f"Site {site} out of range 0..{n_sites - 1}")
    if not 0 <= eigenindex < n_sites:
        raise SiteError(f"Eigen-index {eigenindex} out of range 0..{n_sites - 1}")
    if step <= 0:
        raise ValueError(f"Step must be positive, got {step}")

    spectrum = eigendecompose(hamiltonian)
    energies = spectrum.eigenvalues
    others = np.delete(energies, eigenindex)
    gap = float(np.min(np.abs(others - energies[eigenindex]))) if others.size else np.inf
    threshold = GAP_FACTOR * step * hamiltonian.norm
    if gap <= threshold:
        raise DegenerateSpectrumError(
            f"Eigenvalue {eigenindex} has gap {gap:.3g} <= {threshold:.3g}; "
            f"the derivative is not defined to the requested accuracy"
        )

    analytic = float(spectrum.weights[site, eigenindex])
    value = float(potential.values[site])
    upper = eigendecompose(hamiltonian.with_site_potential(site, value + step))
    lower = eigendecompose(hamiltonian.with_site_potential(site, value - step))
    numeric = float(
        (upper.eigenvalues[eigenindex] - lower.eigenvalues[eigenindex]) / (2.0 * step)
    )
    logger.debug(
        f"Feynman-Hellmann j={eigenindex} x={site}: analytic={analytic!r} numeric={numeric!r}"
    )
    return FeynmanHellmannResult(analytic, numeric)
