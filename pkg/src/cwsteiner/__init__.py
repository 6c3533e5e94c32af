"""Exact Steiner tree on graphs given by k-clique-expressions, in O*(3^k) randomized time."""

from .expr import Instance, gen_random_instance, parse_instance, realize
from .pattern import Pattern
from .solver import SolveReport, run_dp, sample_weights, solve

__all__ = ["Instance", "Pattern", "SolveReport", "gen_random_instance", "parse_instance",
           "realize", "run_dp", "sample_weights", "solve"]
__version__ = "0.1.0"
