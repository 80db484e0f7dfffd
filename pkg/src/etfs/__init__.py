"""Optimal sanitization of a string against sensitive patterns using gadget symbols."""

from .aetfs_dag import build_decision_dag, solve_dag
from .cli import run, solve
from .dyadic_accel import reduce_dag, solve_aetfs_dyadic, solve_etfs_dyadic
from .errors import SanitizeError
from .etfs_dp import Solution, solve_baseline
from .model import (
    UNIT,
    SanitizationInstance,
    SensitiveSet,
    Weights,
    derive_view,
    load_instance,
    make_instance,
    normalize_sensitive_set,
    parse_instance,
    verify_feasible,
)
from .oracle import enumerate_optimal

__all__ = [
    "UNIT", "SanitizationInstance", "SanitizeError", "SensitiveSet", "Solution", "Weights",
    "build_decision_dag", "derive_view", "enumerate_optimal", "load_instance", "make_instance",
    "normalize_sensitive_set", "parse_instance", "reduce_dag", "run", "solve", "solve_aetfs_dyadic",
    "solve_baseline", "solve_dag", "solve_etfs_dyadic", "verify_feasible",
]
