"""Exception types shared across the package."""


class CglError(Exception):
    """Base class for all package-specific errors."""


class GridMismatch(CglError):
    """A field does not belong to the domain it was used with."""


class DegenerateEigenvalue(CglError):
    """The eigenvalue is not simple; it cannot seed a continuation."""


class EigensolverError(CglError):
    """The radial eigensolver failed to converge."""


class NoConvergence(CglError):
    """Newton correction did not reach the tolerance within the iteration cap."""

    def __init__(self, message, iterations=None, residual=None):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


class SingularBordered(CglError):
    """The bordered linear system is singular (lost simplicity or hit a fold)."""


class AlphaZero(CglError):
    """The amplitude scaling mu**(1/alpha) is undefined at alpha = 0."""


class GridTooCoarse(CglError):
    """The target grid cannot hold the requested modes."""


class Blowup(CglError):
    """Time integration exceeded the blowup threshold."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class ConfigError(CglError):
    """Configuration text failed to parse or violates an invariant."""
