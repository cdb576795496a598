"""Lifted extended polymatroid cuts for submodular sets with GUB rows."""

from .core import ConcaveFunction, GubInstance, Inequality, Point, normalize_instance
from .lifting import epi_coefficients, lepi_coefficients, lepi_coefficients_fast, lepi_coefficients_general
from .linopt import optimize_linear, optimize_linear_X
from .permutation import frontier_sets, make_partial_ascending
from .separation import Inside, Violated, separate

__version__ = "0.1.0"
