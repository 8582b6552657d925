"""Root counting for the characteristic-polynomial system and the antisymmetric operator."""

from .antisymmetric import (
    AntisymmetricOperator,
    DegreeProbe,
    DetMResult,
    antisymmetric_matrices,
    antisymmetric_pairs,
    build_antisymmetric_operator,
    degree_probe,
    det_M,
    det_M_batch,
    spacing_product,
)
from .multiplicity import (
    JacobianCheck,
    MultiplicityProblem,
    SolutionSet,
    char_poly_batch,
    char_poly_eval,
    char_poly_jacobian,
    diagonal_case_enumerate,
    jacobian_condition,
)
from .newton import NewtonSearch, default_box, solve_multilinear_system

__all__ = [
    "AntisymmetricOperator",
    "DegreeProbe",
    "DetMResult",
    "antisymmetric_matrices",
    "antisymmetric_pairs",
    "build_antisymmetric_operator",
    "degree_probe",
    "det_M",
    "det_M_batch",
    "spacing_product",
    "JacobianCheck",
    "MultiplicityProblem",
    "SolutionSet",
    "char_poly_batch",
    "char_poly_eval",
    "char_poly_jacobian",
    "diagonal_case_enumerate",
    "jacobian_condition",
    "NewtonSearch",
    "default_box",
    "solve_multilinear_system",
]
