"""
Convergence and certificate-verification metrics over trajectories.
"""
from src.diagnostics.convergence import (
    ConvergenceVerdict,
    DiagnosticSample,
    check_nonincreasing,
    detect_convergence,
    diagnostic_samples,
)
from src.diagnostics.lyapunov import LYAPUNOV_KINDS, default_kind, evaluate_lyapunov, lyapunov_series
from src.diagnostics.rate import RateEstimate, estimate_rate, rate_experiment
from src.diagnostics.verification import (
    PropertyResult,
    check_eigenvalue_map,
    check_equilibrium_invariance,
    check_lyapunov_monotone,
    check_resolvent_bounds,
    check_stability_intervals,
    run_property_suites,
)

__all__ = [
    "LYAPUNOV_KINDS",
    "ConvergenceVerdict",
    "DiagnosticSample",
    "PropertyResult",
    "RateEstimate",
    "check_eigenvalue_map",
    "check_equilibrium_invariance",
    "check_lyapunov_monotone",
    "check_nonincreasing",
    "check_resolvent_bounds",
    "check_stability_intervals",
    "default_kind",
    "detect_convergence",
    "diagnostic_samples",
    "estimate_rate",
    "evaluate_lyapunov",
    "lyapunov_series",
    "rate_experiment",
    "run_property_suites",
]
