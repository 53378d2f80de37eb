"""Exact stable allocations for binary valuations under strongly Pigou-Dalton criteria."""

from .criteria import BUILTIN_CRITERIA, Criterion, Ordering, compare, more_balanced, score
from .divisible import DivSolution, is_stable_div, solve_stable_div
from .flow import solve_linear_objective, solve_stable_ind
from .layers import LayerPartition, NotStableError, compute_layers
from .model import (
    Allocation,
    FractionalAllocation,
    Instance,
    InstanceError,
    format_allocation,
    format_profile,
    parse_instance,
    profile,
    validate_instance,
)
from .transfers import apply_transfer, find_narrowing_transfer, is_stable, stabilize

__all__ = [
    "Allocation",
    "BUILTIN_CRITERIA",
    "Criterion",
    "DivSolution",
    "FractionalAllocation",
    "Instance",
    "InstanceError",
    "LayerPartition",
    "NotStableError",
    "Ordering",
    "apply_transfer",
    "compare",
    "compute_layers",
    "find_narrowing_transfer",
    "format_allocation",
    "format_profile",
    "is_stable",
    "is_stable_div",
    "more_balanced",
    "parse_instance",
    "profile",
    "score",
    "solve_linear_objective",
    "solve_stable_div",
    "solve_stable_ind",
    "stabilize",
    "validate_instance",
]
