"""Helmholtz layer potentials with singular and near-singular quadrature."""

from .kernels import KINDS, Wavenumber, kernel_eval, kernel_values, principal_sqrt
from .operators import (
    Density,
    FarField,
    assemble_operator,
    assemble_operators,
    dump_matrix,
    evaluate_potential,
    far_field,
    far_field_cauchy,
    far_field_first_order,
    load_matrix,
)
from .quadrature import QuadOptions, TargetSet

__all__ = [
    "KINDS",
    "Density",
    "FarField",
    "QuadOptions",
    "TargetSet",
    "Wavenumber",
    "assemble_operator",
    "assemble_operators",
    "dump_matrix",
    "evaluate_potential",
    "far_field",
    "far_field_cauchy",
    "far_field_first_order",
    "kernel_eval",
    "kernel_values",
    "load_matrix",
    "principal_sqrt",
]
