"""
Stability intervals and consensus gains for quadratic games.

For F(x) = A x + b the full-information closed loop is linear with matrix

    M = [[-A - beta I,  beta I],
         [ alpha I,    -alpha I]]

whose eigenvalues are the roots of s^2 + (alpha + beta + rho) s + alpha rho for
every eigenvalue rho of A. An eigenvalue rho = r + jk with r < 0 restricts

    beta  in (-r, (k^2 + r^2) / (-r)),
    alpha in (0, -(beta + r) + sqrt((beta + r) k^2 / (-r))).
"""
from dataclasses import dataclass, field
import logging
import math
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import scipy.linalg

from src.games.quadratic_game import QuadraticGame
from src.graphs.comm_graph import CommGraph, lambda2
from src.synthesis.certificate import (
    DIST_QUAD,
    FULL_QUAD,
    POSITIVE,
    Interval,
    ParameterCertificate,
    infeasible,
)
from src.utils.errors import InfeasibleParametersError

logger = logging.getLogger(__name__)

ZERO_TOL = 1e-12
LYAPUNOV_RESIDUAL_TOL = 1e-8
BETA_WEIGHT_LOW = 0.9

CASE_ZERO = "i"
CASE_STABLE = "ii"
CASE_UNSTABLE = "iii"


def eigenvalue_map(rho: complex, alpha: float, beta: float) -> Tuple[complex, complex]:
    """The two eigenvalues of M contributed by the eigenvalue rho of A."""
    s = alpha + beta + rho
    root = np.sqrt(complex(s * s - 4.0 * alpha * rho))
    return complex((-s + root) / 2.0), complex((-s - root) / 2.0)


def classify_eigenvalue(rho: complex, scale: float = 1.0) -> str:
    """
    'i' for rho = 0, 'ii' for a nonzero rho with Re rho >= 0, 'iii' for Re rho < 0.
    Real parts within ZERO_TOL * (1 + |rho|) count as zero.
    """
    tol = ZERO_TOL * (1.0 + abs(rho)) * scale
    if abs(rho) <= tol:
        return CASE_ZERO
    if rho.real >= -tol:
        return CASE_STABLE
    return CASE_UNSTABLE


def beta_interval(rho: complex) -> Interval:
    r, k = rho.real, rho.imag
    return Interval(-r, (k * k + r * r) / (-r))


def alpha_bound(rho: complex, beta: float) -> float:
    """Upper end of the alpha interval of a case-iii eigenvalue at beta (<= 0 when beta is outside)."""
    r, k = rho.real, rho.imag
    shifted = beta + r
    if shifted <= 0.0:
        return 0.0
    return -shifted + math.sqrt(shifted * k * k / (-r))


def build_M(A: np.ndarray, alpha: float, beta: float) -> np.ndarray:
    """Closed-loop matrix of the full-information dynamics in (x, r) coordinates."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    identity = np.eye(n)
    return np.block([[-A - beta * identity, beta * identity], [alpha * identity, -alpha * identity]])


def spectral_abscissa(M: np.ndarray) -> float:
    return float(np.max(np.linalg.eigvals(M).real))


@dataclass
class QuadraticStabilityReport:
    """
    Classification of the eigenvalues of A and the intersected (beta, alpha)
    intervals they impose.

    Attributes:
        eigenvalues: Spectrum of the (scaled) matrix
        cases: Case tag per eigenvalue
        beta_intervals: beta interval per case-iii eigenvalue, keyed by its index
        beta_range: Intersection over case-iii eigenvalues
        beta: Chosen beta (0.9 low + 0.1 high)
        alpha_range: Alpha interval at the chosen beta
        feasible: False if the beta intersection is empty
        blocking: Eigenvalue whose interval empties the intersection
        scale: Factor applied to A before the analysis
    """

    eigenvalues: np.ndarray
    cases: List[str]
    beta_intervals: Dict[int, Interval] = field(default_factory=dict)
    beta_range: Optional[Interval] = None
    beta: Optional[float] = None
    alpha_range: Optional[Interval] = None
    feasible: bool = True
    blocking: Optional[complex] = None
    reason: Optional[str] = None
    scale: float = 1.0

    @property
    def unstable_indices(self) -> List[int]:
        return [i for i, case in enumerate(self.cases) if case == CASE_UNSTABLE]

    def alpha_max(self, beta: float) -> float:
        """Smallest alpha bound over the case-iii eigenvalues at beta (inf when there are none)."""
        bounds = [alpha_bound(complex(self.eigenvalues[i]), beta) for i in self.unstable_indices]
        return min(bounds) if bounds else math.inf

    def require_feasible(self) -> "QuadraticStabilityReport":
        if not self.feasible:
            raise InfeasibleParametersError(self.reason, reason=self.reason, blocking=self.blocking)
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            "eigenvalues": [[float(rho.real), float(rho.imag)] for rho in self.eigenvalues],
            "cases": list(self.cases),
            "beta_intervals": {str(i): interval.to_list() for i, interval in self.beta_intervals.items()},
            "beta_range": self.beta_range.to_list() if self.beta_range else None,
            "beta": self.beta,
            "alpha_range": self.alpha_range.to_list() if self.alpha_range else None,
            "feasible": self.feasible,
            "blocking": None if self.blocking is None else [self.blocking.real, self.blocking.imag],
            "scale": self.scale,
        }


def _matrix_of(qg: Union[QuadraticGame, np.ndarray]) -> np.ndarray:
    return np.asarray(qg.A if isinstance(qg, QuadraticGame) else qg, dtype=float)


def quadratic_stability_intervals(qg: Union[QuadraticGame, np.ndarray], scale: float = 1.0,
                                  beta: Optional[float] = None) -> QuadraticStabilityReport:
    """
    Classify the eigenvalues of scale * A and intersect their stability intervals.

    Args:
        qg: Quadratic game or its matrix A
        scale: Factor applied to A (1/N for the distributed result)
        beta: Beta at which to evaluate the alpha interval (default pick otherwise)

    Returns:
        QuadraticStabilityReport; an empty intersection gives feasible=False with
        the blocking eigenvalue
    """
    A = scale * _matrix_of(qg)
    eigenvalues = scipy.linalg.eigvals(A)
    norm = max(1.0, float(np.max(np.abs(eigenvalues)))) if eigenvalues.size else 1.0
    cases = [classify_eigenvalue(complex(rho), norm) for rho in eigenvalues]
    report = QuadraticStabilityReport(eigenvalues=eigenvalues, cases=cases, scale=scale)

    for i in report.unstable_indices:
        report.beta_intervals[i] = beta_interval(complex(eigenvalues[i]))
    logger.debug(f"Eigenvalue cases: {dict(zip(range(len(cases)), cases))}")

    if not report.beta_intervals:
        report.beta_range = POSITIVE
        report.beta = 1.0 if beta is None else float(beta)
        report.alpha_range = POSITIVE
        return report

    low_index = max(report.beta_intervals, key=lambda i: report.beta_intervals[i].low)
    high_index = min(report.beta_intervals, key=lambda i: report.beta_intervals[i].high)
    report.beta_range = Interval(report.beta_intervals[low_index].low, report.beta_intervals[high_index].high)
    if report.beta_range.empty:
        report.feasible = False
        report.blocking = complex(eigenvalues[high_index])
        report.reason = (f"beta intervals do not intersect: eigenvalue {report.blocking:.6g} allows beta < "
                         f"{report.beta_range.high:.6g} but beta > {report.beta_range.low:.6g} is required")
        logger.warning(report.reason)
        return report

    report.beta = report.beta_range.pick(BETA_WEIGHT_LOW) if beta is None else float(beta)
    report.alpha_range = Interval(0.0, report.alpha_max(report.beta))
    return report


def solve_lyapunov(M: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Solve P M + M^T P = -I for symmetric P.

    Returns:
        (P, residual norm ||P M + M^T P + I||)
    """
    identity = np.eye(M.shape[0])
    P = scipy.linalg.solve_continuous_lyapunov(M.T, -identity)
    P = 0.5 * (P + P.T)
    residual = float(np.linalg.norm(P @ M + M.T @ P + identity))
    if residual > LYAPUNOV_RESIDUAL_TOL * max(1.0, float(np.linalg.norm(P))):
        logger.warning(f"Lyapunov residual {residual:.3e} above tolerance")
    return P, residual


def _choose_alpha(report: QuadraticStabilityReport, alpha: Optional[float]) -> float:
    if alpha is None:
        return report.alpha_range.pick()
    if not report.alpha_range.contains(alpha):
        raise InfeasibleParametersError(f"alpha={alpha} outside {report.alpha_range.to_list()}",
                                        reason="alpha out of range", blocking=alpha)
    return float(alpha)


def _check_beta(report: QuadraticStabilityReport, beta: Optional[float]) -> None:
    if beta is not None and not report.beta_range.contains(beta):
        raise InfeasibleParametersError(f"beta={beta} outside {report.beta_range.to_list()}",
                                        reason="beta out of range", blocking=beta)


def synth_full_quadratic(qg: Union[QuadraticGame, np.ndarray], alpha: Optional[float] = None,
                         beta: Optional[float] = None) -> ParameterCertificate:
    """
    Full-information certificate for a quadratic game: intervals on the
    unscaled A and the Lyapunov matrix P of M for the chosen pair.
    """
    report = quadratic_stability_intervals(qg, beta=beta)
    if not report.feasible:
        return infeasible(FULL_QUAD, report.reason, blocking=report.blocking,
                          aux={"stability": report.to_dict()})
    _check_beta(report, beta)
    alpha = _choose_alpha(report, alpha)

    M = build_M(_matrix_of(qg), alpha, report.beta)
    abscissa = spectral_abscissa(M)
    aux: Dict[str, Any] = {"stability": report.to_dict(), "spectral_abscissa": abscissa}
    if abscissa < 0.0:
        P, residual = solve_lyapunov(M)
        aux.update({"P": P, "p": float(np.linalg.norm(P, 2)), "lyapunov_residual": residual})
    else:
        # zero eigenvalues of A leave M marginally stable
        logger.info(f"{FULL_QUAD}: M not Hurwitz (abscissa {abscissa:.3g}); no Lyapunov matrix")

    logger.info(f"{FULL_QUAD}: beta={report.beta:.6g}, alpha={alpha:.6g}")
    return ParameterCertificate(theorem=FULL_QUAD, feasible=True, alpha_range=report.alpha_range,
                                beta_range=report.beta_range, alpha=alpha, beta=report.beta, aux=aux)


def extended_gain(qg: QuadraticGame) -> float:
    """Spectral norm of the extended matrix acting on stacked estimates."""
    return float(np.linalg.norm(qg.extended_matrix(), 2))


def synth_quadratic_partial(qg: QuadraticGame, N: Optional[int] = None, g: Optional[CommGraph] = None,
                            alpha: Optional[float] = None, beta: Optional[float] = None,
                            c_factor: float = 1.01) -> ParameterCertificate:
    """
    Distributed certificate for a quadratic game.

    Intervals come from A/N; P solves P M + M^T P = -I for M = build_M(A/N,
    alpha, beta), p = ||P||_2, L_A is the spectral norm of the extended
    matrix and c_min = (L_A + (L_A (p/sqrt(N) + 1/2))^2) / lambda2.

    p never falls below p_lower_bound = 1/(2 |spectral abscissa of M|). With
    beta == alpha the bound p <= N / (2 L_A + 4 alpha N) is reported along
    with whether it holds; for trace-free A it cannot hold, since the mean
    real part of the spectrum of M is then -alpha.

    Raises:
        InfeasibleParametersError: if M is not Hurwitz for the chosen pair
        DisconnectedGraphError: if g is disconnected
    """
    N = qg.n_agents if N is None else int(N)
    g = CommGraph.ring(N) if g is None else g
    lam2 = lambda2(g)

    report = quadratic_stability_intervals(qg, scale=1.0 / N, beta=beta)
    if not report.feasible:
        return infeasible(DIST_QUAD, report.reason, blocking=report.blocking, aux={"stability": report.to_dict()})
    _check_beta(report, beta)
    alpha = _choose_alpha(report, alpha)
    beta = report.beta

    M = build_M(qg.A / N, alpha, beta)
    abscissa = spectral_abscissa(M)
    if not abscissa < 0.0:
        logger.error(f"{DIST_QUAD}: scaled closed loop not Hurwitz (abscissa {abscissa:.3g})")
        raise InfeasibleParametersError(f"M is not Hurwitz for alpha={alpha}, beta={beta}",
                                        reason="M not Hurwitz", blocking=abscissa)

    P, residual = solve_lyapunov(M)
    p = float(np.linalg.norm(P, 2))
    L_A = extended_gain(qg)
    c_min = (L_A + (L_A * (p / math.sqrt(N) + 0.5)) ** 2) / lam2

    aux: Dict[str, Any] = {
        "stability": report.to_dict(),
        "P": P,
        "p": p,
        "lyapunov_residual": residual,
        "L_A": L_A,
        "lambda2": lam2,
        "N": N,
        "spectral_abscissa": abscissa,
        "p_lower_bound": 1.0 / (2.0 * abs(abscissa)),
    }
    if math.isclose(alpha, beta, rel_tol=1e-12):
        p_bound = N / (2.0 * L_A + 4.0 * alpha * N)
        aux["p_bound"] = p_bound
        aux["p_bound_satisfied"] = p <= p_bound + 1e-9
        if not aux["p_bound_satisfied"]:
            logger.warning(f"{DIST_QUAD}: p={p:.6g} exceeds N/(2 L_A + 4 alpha N)={p_bound:.6g}")

    logger.info(f"{DIST_QUAD}: beta={beta:.6g}, alpha={alpha:.6g}, p={p:.6g}, c_min={c_min:.6g}")
    return ParameterCertificate(theorem=DIST_QUAD, feasible=True, alpha_range=report.alpha_range,
                                beta_range=report.beta_range, alpha=alpha, beta=beta, c_min=c_min,
                                c=c_factor * c_min, aux=aux)
