"""Shapley-value analysis of predictive coalition games on Bayesian networks."""

__version__ = "0.1.0"

from .errors import CapacityError, InputError, NumericalError, ShapbnError
from .graph import Dag, RelevanceClass

__all__ = [
    "__version__",
    "ShapbnError",
    "InputError",
    "CapacityError",
    "NumericalError",
    "Dag",
    "RelevanceClass",
]
