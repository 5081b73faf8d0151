"""Closed-form thin-body far fields and reduced operators."""

from .curve import THIN_VARIANTS, CurveQuadrature, curve_quadrature, thin_soundhard_farfield
from .reduced import ReducedOperators, reduced_curve_operators
from .screen import (
    PanelQuadrature,
    ScreenOperator,
    panel_quadrature,
    screen_farfield,
    screen_K_operator,
    screen_normal_data,
)

__all__ = [
    "THIN_VARIANTS",
    "CurveQuadrature",
    "PanelQuadrature",
    "ReducedOperators",
    "ScreenOperator",
    "curve_quadrature",
    "panel_quadrature",
    "reduced_curve_operators",
    "screen_K_operator",
    "screen_farfield",
    "screen_normal_data",
    "thin_soundhard_farfield",
]
