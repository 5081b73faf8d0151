"""Thin bodies, their boundary quadratures and the blow-up map."""

from .bodies import (
    ScreenGeometry,
    TubeGeometry,
    blowdown,
    blowup,
    build_inner_surface,
    build_screen_surface,
    build_tube_surface,
    graded_breaks,
    project_to_generator,
    screen_body,
    tube_body,
)
from .curves import CircularArc, GeneratingCurve, ParametricCurve, StraightSegment, curve_eval, estimate_r0
from .patches import Patch, Rule
from .surface import SurfaceNodes, SurfaceQuadrature, dump_surface, load_surface, sphere_surface

__all__ = [
    "CircularArc",
    "GeneratingCurve",
    "ParametricCurve",
    "Patch",
    "Rule",
    "ScreenGeometry",
    "StraightSegment",
    "SurfaceNodes",
    "SurfaceQuadrature",
    "TubeGeometry",
    "blowdown",
    "blowup",
    "build_inner_surface",
    "build_screen_surface",
    "build_tube_surface",
    "curve_eval",
    "dump_surface",
    "estimate_r0",
    "graded_breaks",
    "load_surface",
    "project_to_generator",
    "screen_body",
    "sphere_surface",
    "tube_body",
]
