"""Numerical toolkit for the Racah algebra, its finite-dimensional
representations, Racah polynomials, and su(1,1) recoupling."""
from .exceptions import ConvergenceError, DimensionError, ParameterError, RacahkitError

__version__ = "0.1.0"

__all__ = ["ConvergenceError", "DimensionError", "ParameterError", "RacahkitError", "__version__"]
