"""Exceptions raised across the package."""


class SingularMatrix(ArithmeticError):
    """Exact elimination found no pivot; the system is rank-deficient."""


class UnsupportedDegree(ValueError):
    """A catalog knot recipe cannot be formed for the requested degree."""


class OutOfRegion(ValueError):
    """Evaluation point lies outside the region a filter is valid for."""


class MeshTooCoarse(ValueError):
    """The filter support does not fit inside the DG domain."""


class UnstableStep(FloatingPointError):
    """Time integration produced non-finite coefficients."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""
