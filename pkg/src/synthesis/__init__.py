"""
Parameter synthesis: certified (alpha, beta, c) for every convergence condition.
"""
from src.synthesis.certificate import Interval, ParameterCertificate
from src.synthesis.general import (
    synth_full_hypomonotone,
    synth_full_monotone,
    synth_partial_general,
    synth_partial_monotone,
)
from src.synthesis.quadratic import (
    QuadraticStabilityReport,
    build_M,
    eigenvalue_map,
    quadratic_stability_intervals,
    solve_lyapunov,
    spectral_abscissa,
    synth_full_quadratic,
    synth_quadratic_partial,
)
from src.synthesis.reference_table import CellDiff, TableRow, compare_rows, compute_rows, reference_table

__all__ = [
    "CellDiff",
    "Interval",
    "ParameterCertificate",
    "QuadraticStabilityReport",
    "TableRow",
    "build_M",
    "compare_rows",
    "compute_rows",
    "eigenvalue_map",
    "quadratic_stability_intervals",
    "reference_table",
    "solve_lyapunov",
    "spectral_abscissa",
    "synth_full_hypomonotone",
    "synth_full_monotone",
    "synth_full_quadratic",
    "synth_partial_general",
    "synth_partial_monotone",
    "synth_quadratic_partial",
]
