"""
Parameter synthesis for monotone and hypomonotone games from operator moduli.

Full-information results certify (alpha, beta); the partial-information
results add the consensus gain c through the algebraic connectivity of the
communication graph.
"""
import logging
import math
from typing import Optional

import numpy as np

from src.analysis.operator_constants import OperatorConstants
from src.analysis.resolvent import resolvent_constants
from src.graphs.comm_graph import CommGraph, lambda2
from src.synthesis.certificate import (
    DIST_GENERAL,
    DIST_MONOTONE,
    FULL_HYPO,
    FULL_MONOTONE,
    POSITIVE,
    Interval,
    ParameterCertificate,
    alpha_upper_bound,
    infeasible,
    phi_matrix,
)
from src.utils.errors import InfeasibleParametersError

logger = logging.getLogger(__name__)

ALPHA_VARIANTS = ("full", "partial")
BETA_WEIGHT_LOW = 0.9


def _check_d(d: float) -> None:
    if not 0.0 < d < 1.0:
        raise ValueError(f"Lyapunov weight d must lie in (0, 1), got {d}")


def _phi_positive_definite(phi: np.ndarray) -> bool:
    return phi[0, 0] > 0.0 and phi[1, 1] > 0.0 and float(np.linalg.det(phi)) > 0.0


def synth_full_monotone(alpha: Optional[float] = None, beta: Optional[float] = None,
                        constants: Optional[OperatorConstants] = None) -> ParameterCertificate:
    """
    Any alpha, beta > 0 drive the full-information dynamics of a monotone game
    to its equilibrium set.

    Args:
        alpha, beta: Requested values (default 1)
        constants: Operator moduli; a positive mu makes the certificate infeasible

    Raises:
        InfeasibleParametersError: if a requested value is not positive
    """
    if constants is not None and constants.mu_hypo > 0.0:
        return infeasible(FULL_MONOTONE, f"operator is hypomonotone (mu={constants.mu_hypo:.6g}), not monotone",
                          blocking=constants.mu_hypo)
    alpha = 1.0 if alpha is None else float(alpha)
    beta = 1.0 if beta is None else float(beta)
    for name, value in (("alpha", alpha), ("beta", beta)):
        if not value > 0.0:
            logger.error(f"{name}={value} rejected: must be positive")
            raise InfeasibleParametersError(f"{name}={value} must be positive", reason=f"{name} not positive",
                                            blocking=value)
    return ParameterCertificate(theorem=FULL_MONOTONE, feasible=True, alpha_range=POSITIVE, beta_range=POSITIVE,
                                alpha=alpha, beta=beta)


def _hypo_alpha(constants: OperatorConstants, beta: float, lam: float, beta_margin: float,
                d: float):
    """Resolvent constants at lam, the alpha bound, or an infeasibility reason."""
    resolvent = resolvent_constants(constants, lam)
    if not resolvent.feasible:
        return None, None, resolvent.reason
    if resolvent.kappa_J >= 1.0:
        return resolvent, None, f"kappa_J={resolvent.kappa_J:.6g} >= 1 at lambda={lam:.6g}"
    alpha_max = alpha_upper_bound(beta_margin, d, resolvent.L_J, resolvent.kappa_J)
    if not alpha_max > 0.0:
        return resolvent, None, f"empty alpha interval at beta={beta:.6g}"
    return resolvent, alpha_max, None


def synth_full_hypomonotone(constants: OperatorConstants, d: float = 0.5, alpha_variant: str = "full",
                            N: int = 1, beta: Optional[float] = None,
                            alpha: Optional[float] = None) -> ParameterCertificate:
    """
    Certificate for the full-information dynamics of a mu-hypomonotone,
    R-inverse Lipschitz game.

    beta ranges over (mu, 1/(mu R^2)); with lam = 1/beta the alpha bound is
    4d(1-d)(beta - m)(1-kappa_J)/((1-d) + d(L_J + L_J^2))^2 where m = mu for
    alpha_variant="full" and m = mu/N for alpha_variant="partial".
    """
    _check_d(d)
    if alpha_variant not in ALPHA_VARIANTS:
        raise ValueError(f"alpha_variant must be one of {ALPHA_VARIANTS}, got {alpha_variant!r}")
    if constants.inv_lipschitz is None:
        return infeasible(FULL_HYPO, "operator is not inverse Lipschitz (R undefined)", d=d)

    mu = constants.mu_hypo
    R = constants.inv_lipschitz
    if mu * R ** 2 >= 1.0:
        return infeasible(FULL_HYPO, f"mu R^2 = {mu * R ** 2:.6g} >= 1", blocking=mu * R ** 2, d=d)
    beta_range = Interval(mu, math.inf if mu == 0.0 else 1.0 / (mu * R ** 2))
    if beta is None:
        beta = beta_range.pick(BETA_WEIGHT_LOW)
    elif not beta_range.contains(beta):
        raise InfeasibleParametersError(f"beta={beta} outside {beta_range.to_list()}", reason="beta out of range",
                                        blocking=beta)

    margin = beta - (mu if alpha_variant == "full" else mu / N)
    resolvent, alpha_max, reason = _hypo_alpha(constants, beta, 1.0 / beta, margin, d)
    if reason is not None:
        return infeasible(FULL_HYPO, reason, beta_range=beta_range, beta=beta, d=d)

    alpha_range = Interval(0.0, alpha_max)
    if alpha is None:
        alpha = alpha_range.pick()
    elif not alpha_range.contains(alpha):
        raise InfeasibleParametersError(f"alpha={alpha} outside {alpha_range.to_list()}", reason="alpha out of range",
                                        blocking=alpha)

    phi = phi_matrix(alpha, margin, d, resolvent.L_J, resolvent.kappa_J)
    if not _phi_positive_definite(phi):
        return infeasible(FULL_HYPO, "Phi is not positive definite", beta_range=beta_range, beta=beta, d=d)
    logger.info(f"{FULL_HYPO}: beta={beta:.6g} in {beta_range.to_list()}, alpha={alpha:.6g} < {alpha_max:.6g}")
    return ParameterCertificate(
        theorem=FULL_HYPO,
        feasible=True,
        alpha_range=alpha_range,
        beta_range=beta_range,
        alpha=alpha,
        beta=beta,
        d=d,
        aux={"Phi": phi, "det_Phi": float(np.linalg.det(phi)), "lambda": 1.0 / beta,
             "L_J": resolvent.L_J, "kappa_J": resolvent.kappa_J, "alpha_variant": alpha_variant},
    )


def synth_partial_monotone(g: CommGraph, alpha: Optional[float] = None, beta: Optional[float] = None,
                           c: Optional[float] = None) -> ParameterCertificate:
    """
    Distributed dynamics under extended monotonicity: any alpha, beta, c > 0.
    """
    lambda2(g)
    certificate = synth_full_monotone(alpha, beta)
    c = 1.0 if c is None else float(c)
    if not c > 0.0:
        raise InfeasibleParametersError(f"c={c} must be positive", reason="c not positive", blocking=c)
    return certificate.with_values(theorem=DIST_MONOTONE, c_min=0.0, c=c)


def synth_partial_general(constants: OperatorConstants, N: int, d: float, g: CommGraph,
                          beta: Optional[float] = None, alpha: Optional[float] = None,
                          c_factor: float = 1.01) -> ParameterCertificate:
    """
    Certificate for the distributed dynamics of a hypomonotone game.

    Args:
        constants: Moduli (mu, L_F, R) of the pseudo-gradient
        N: Number of agents
        d: Lyapunov weight in (0, 1)
        g: Connected communication graph
        beta, alpha: Values to certify instead of the default picks
        c_factor: c = c_factor * c_min

    Returns:
        ParameterCertificate; feasible=False when mu N R^2 >= 1 or the
        resolvent at lam = 1/(beta N) is not available

    Raises:
        DisconnectedGraphError: if g is disconnected
    """
    _check_d(d)
    lam2 = lambda2(g)
    if constants.inv_lipschitz is None:
        return infeasible(DIST_GENERAL, "operator is not inverse Lipschitz (R undefined)", d=d)

    mu = constants.mu_hypo
    R = constants.inv_lipschitz
    L_F = constants.lipschitz
    window = mu * N * R ** 2
    if window >= 1.0:
        return infeasible(DIST_GENERAL, f"mu N R^2 = {window:.6g} >= 1", blocking=window, d=d)

    beta_range = Interval(mu / N, math.inf if mu == 0.0 else 1.0 / window)
    if beta is None:
        beta = beta_range.pick(BETA_WEIGHT_LOW)
    elif not beta_range.contains(beta):
        raise InfeasibleParametersError(f"beta={beta} outside {beta_range.to_list()}", reason="beta out of range",
                                        blocking=beta)

    margin = beta - mu / N
    lam = 1.0 / (beta * N)
    resolvent, alpha_max, reason = _hypo_alpha(constants, beta, lam, margin, d)
    if reason is not None:
        return infeasible(DIST_GENERAL, reason, beta_range=beta_range, beta=beta, d=d)

    alpha_range = Interval(0.0, alpha_max)
    if alpha is None:
        alpha = alpha_range.pick()
    elif not alpha_range.contains(alpha):
        raise InfeasibleParametersError(f"alpha={alpha} outside {alpha_range.to_list()}", reason="alpha out of range",
                                        blocking=alpha)

    L_J = resolvent.L_J
    kappa_J = resolvent.kappa_J
    phi = phi_matrix(alpha, margin, d, L_J, kappa_J)
    if not _phi_positive_definite(phi):
        return infeasible(DIST_GENERAL, "Phi is not positive definite", beta_range=beta_range, beta=beta, d=d)
    det_phi = float(np.linalg.det(phi))

    spread = 1.0 + d / math.sqrt(N)
    eta1 = alpha * (1.0 - d) * (1.0 - kappa_J) * spread ** 2 + d * margin * L_J ** 2
    eta2 = alpha * (1.0 + (L_J ** 2 + L_J - 1.0) * d) * spread * L_J
    c_min = ((eta1 + eta2) * L_F ** 2 / (4.0 * det_phi) + L_F) / lam2

    logger.info(f"{DIST_GENERAL}: beta={beta:.6g}, alpha={alpha:.6g} (max {alpha_max:.6g}), c_min={c_min:.6g}")
    return ParameterCertificate(
        theorem=DIST_GENERAL,
        feasible=True,
        alpha_range=alpha_range,
        beta_range=beta_range,
        alpha=alpha,
        beta=beta,
        d=d,
        c_min=c_min,
        c=c_factor * c_min,
        aux={"Phi": phi, "det_Phi": det_phi, "eta1": eta1, "eta2": eta2, "lambda": lam, "L_J": L_J,
             "kappa_J": kappa_J, "lambda2": lam2, "L_F": L_F, "N": N},
    )
