"""The two-site model: closed-form spectrum, density and gap-edge probes."""

from .model import (
    TwoByTwoModel,
    eigenvalues_2x2,
    invert_to_potentials,
    jacobian_2x2,
    joint_density,
)
from .probes import (
    BoundRow,
    DensityGrid,
    ScalingTable,
    analytic_grid,
    default_start,
    grid_edges,
    mc_vs_analytic,
    modified_bound_check,
    sample_pairs,
    singular_scaling_probe,
    straddling_intervals,
)
from .quadrature import (
    corner_cdf,
    edge_window_mass,
    overlap_total,
    pair_overlap,
    rectangle_mass,
)

__all__ = [
    "TwoByTwoModel",
    "eigenvalues_2x2",
    "invert_to_potentials",
    "jacobian_2x2",
    "joint_density",
    "BoundRow",
    "DensityGrid",
    "ScalingTable",
    "analytic_grid",
    "default_start",
    "grid_edges",
    "mc_vs_analytic",
    "modified_bound_check",
    "sample_pairs",
    "singular_scaling_probe",
    "straddling_intervals",
    "corner_cdf",
    "edge_window_mass",
    "overlap_total",
    "pair_overlap",
    "rectangle_mass",
]
