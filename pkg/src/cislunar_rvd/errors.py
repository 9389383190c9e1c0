"""Exception types shared across the package."""


class SingularityError(ValueError):
    """A separation distance fell below the configured singularity floor."""


class ConvergenceError(RuntimeError):
    """An iterative procedure failed to converge; carries the final residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateGeometryError(ValueError):
    """Desired thrust is (numerically) parallel to the Earth line."""


class RiccatiError(RuntimeError):
    """The algebraic Riccati equation has no acceptable stabilizing solution."""


class ConfigError(ValueError):
    """A scenario configuration file failed to parse or validate."""
