"""
Operator analysis: moduli of pseudo-gradients, resolvent bounds and the
relations between monotonicity properties.
"""
from src.analysis.operator_constants import (
    BoxSampler,
    OperatorConstants,
    exact_quadratic_constants,
    matrix_constants,
    sampled_constants,
)
from src.analysis.property_lattice import DerivedModuli, apply_rule, derive_constants
from src.analysis.resolvent import ResolventConstants, eval_resolvent, resolvent_constants

__all__ = [
    "BoxSampler",
    "DerivedModuli",
    "OperatorConstants",
    "ResolventConstants",
    "apply_rule",
    "derive_constants",
    "eval_resolvent",
    "exact_quadratic_constants",
    "matrix_constants",
    "resolvent_constants",
    "sampled_constants",
]
