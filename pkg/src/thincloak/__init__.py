"""Boundary-integral laboratory for regularized thin-body cloaks."""

from . import asymptotics, geometry, harness, numerics, potentials, solvers
from .errors import (
    ConditioningError,
    ConfigError,
    DomainError,
    FitError,
    GeometryError,
    GridMismatchError,
    NumericalError,
    QuadratureError,
    ResonanceError,
    SingularityError,
    SolverError,
    ThinCloakError,
    UnsupportedGeometryError,
)
from .geometry import (
    CircularArc,
    ScreenGeometry,
    StraightSegment,
    TubeGeometry,
    build_screen_surface,
    build_tube_surface,
    sphere_surface,
)
from .numerics import DirectionGrid
from .potentials import FarField, assemble_operator, far_field
from .solvers import (
    ContentSpec,
    LossyLayerSpec,
    energy_residual,
    mie_sound_hard_sphere,
    solve_cloak,
    solve_screen_cloak,
    solve_sound_hard,
)

__version__ = "0.1.0"

__all__ = [
    "CircularArc",
    "ConditioningError",
    "ConfigError",
    "ContentSpec",
    "DirectionGrid",
    "DomainError",
    "FarField",
    "FitError",
    "GeometryError",
    "GridMismatchError",
    "LossyLayerSpec",
    "NumericalError",
    "QuadratureError",
    "ResonanceError",
    "ScreenGeometry",
    "SingularityError",
    "SolverError",
    "StraightSegment",
    "ThinCloakError",
    "TubeGeometry",
    "UnsupportedGeometryError",
    "assemble_operator",
    "asymptotics",
    "build_screen_surface",
    "build_tube_surface",
    "energy_residual",
    "far_field",
    "geometry",
    "harness",
    "mie_sound_hard_sphere",
    "numerics",
    "potentials",
    "solve_cloak",
    "solve_screen_cloak",
    "solve_sound_hard",
    "sphere_surface",
]
