"""Exception hierarchy shared by all modules."""


class ThinCloakError(Exception):
    """Base class for all library errors."""


class DomainError(ThinCloakError, ValueError):
    """An argument lies outside the domain of an operation."""


class ConfigError(ThinCloakError, ValueError):
    """Invalid or inconsistent configuration."""


class GeometryError(ThinCloakError):
    """The requested body is not well defined (self-intersection, ambiguity)."""


class UnsupportedGeometryError(GeometryError):
    """The operation is restricted to a narrower class of bodies."""


class SingularityError(ThinCloakError, ValueError):
    """A kernel was evaluated at coincident points."""


class QuadratureError(ThinCloakError):
    """A quadrature rule could not be constructed for the given input."""


class NumericalError(ThinCloakError):
    """A numerical procedure failed; the CLI maps this to exit code 2."""


class SolverError(NumericalError):
    """Dense solve failed (singular matrix to working precision)."""

    def __init__(self, message: str, condition: float | None = None):
        super().__init__(message)
        self.condition = condition


class ResonanceError(SolverError):
    """Solve failed close to an interior eigenvalue of the obstacle."""


class ConditioningError(SolverError):
    """Condition estimate beyond the configured threshold."""


class FitError(NumericalError, ValueError):
    """Rate fit impossible (too few or nonpositive samples)."""


class GridMismatchError(ThinCloakError, ValueError):
    """Two far fields are sampled on different direction grids."""
