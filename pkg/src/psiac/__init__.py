"""Exact one-sided spline filtering of DG advection output."""

from .apply import (FilteredField, InteriorFilter, build_T_general, build_T_uniform, convolution_matrix,
                    filter_deriv, filter_eval, filter_field, symmetric_filter_eval)
from .dg import EXAMPLES, DGField, Mesh, l2_project, solve_example
from .errors import (ConfigError, MeshTooCoarse, OutOfRegion, SingularMatrix, UnstableStep,
                     UnsupportedDegree)
from .exact import RatMatrix, RatPoly, rat_inverse, rat_solve
from .kernels import FilterSpec, filter_catalog, kernel_coefficients

__all__ = [
    "ConfigError", "DGField", "EXAMPLES", "FilterSpec", "FilteredField", "InteriorFilter", "Mesh",
    "MeshTooCoarse", "OutOfRegion", "RatMatrix", "RatPoly", "SingularMatrix", "UnstableStep",
    "UnsupportedDegree", "build_T_general", "build_T_uniform", "convolution_matrix", "filter_catalog",
    "filter_deriv", "filter_eval", "filter_field", "kernel_coefficients", "l2_project", "rat_inverse",
    "rat_solve", "solve_example", "symmetric_filter_eval",
]
