"""
Resolvent module for the Heavy Anchor toolkit.

The resolvent J = (Id + lam T)^-1 of a mu-hypomonotone, R-inverse Lipschitz
operator is single valued and Lipschitz whenever mu R^2 <= lam < 1/mu. This
module evaluates those bounds and the resolvent itself.
"""
from dataclasses import dataclass
import logging
import math
from typing import Any, Callable, Dict, Optional

import numpy as np
import scipy.linalg
import scipy.optimize

from src.analysis.operator_constants import OperatorConstants
from src.games.base_game import Game
from src.utils.errors import ConvergenceError

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class ResolventConstants:
    """
    Lipschitz bound L_J and inner-product bound kappa_J of the resolvent at lam.
    Both are None when lam lies outside the feasibility window.
    """

    lam: float
    L_J: Optional[float]
    kappa_J: Optional[float]
    feasible: bool
    reason: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {"lambda": self.lam, "L_J": self.L_J, "kappa_J": self.kappa_J,
                "feasible": self.feasible, "reason": self.reason}


def feasibility_window(constants: OperatorConstants):
    """Return (mu R^2, 1/mu) with 1/mu = inf for mu = 0, or None when R is undefined."""
    if constants.inv_lipschitz is None:
        return None
    mu = constants.mu_hypo
    upper = math.inf if mu == 0.0 else 1.0 / mu
    return mu * constants.inv_lipschitz ** 2, upper


def resolvent_constants(constants: OperatorConstants, lam: float) -> ResolventConstants:
    """
    Evaluate L_J and kappa_J at lam.

    L_J = sqrt(R^2 / (R^2 + lam^2 - 2 lam mu R^2)) and
    kappa_J = R^2 (1 - mu lam) / (R^2 + lam^2 - 2 mu lam R^2)   when R >= lam,
              R^2 (1 + lam / R) / (R^2 + lam^2 + 2 lam R)      when lam >= R.
    """
    if lam <= 0:
        raise ValueError(f"Resolvent parameter must be positive, got {lam}")
    window = feasibility_window(constants)
    if window is None:
        return ResolventConstants(lam, None, None, False, "inverse Lipschitz modulus undefined")
    lower, upper = window
    if not (lower <= lam < upper):
        reason = f"lambda={lam:.6g} outside [mu R^2, 1/mu) = [{lower:.6g}, {upper:.6g})"
        logger.debug(f"Resolvent infeasible: {reason}")
        return ResolventConstants(lam, None, None, False, reason)

    mu = constants.mu_hypo
    R = constants.inv_lipschitz
    denominator = R ** 2 + lam ** 2 - 2.0 * lam * mu * R ** 2
    L_J = math.sqrt(R ** 2 / denominator)
    if R >= lam:
        kappa_J = R ** 2 * (1.0 - mu * lam) / denominator
    else:
        kappa_J = R ** 2 * (1.0 + lam / R) / (R ** 2 + lam ** 2 + 2.0 * lam * R)
    return ResolventConstants(lam, L_J, kappa_J, True)


def _linear_map(op: Any) -> Optional[np.ndarray]:
    if isinstance(op, np.ndarray):
        return op
    if isinstance(op, Game) and op.is_affine:
        return np.asarray(op.linear_part())
    return None


def eval_resolvent(op: Any, lam: float, v: Any, *, offset: Optional[np.ndarray] = None,
                   lipschitz: Optional[float] = None, mu: float = 0.0, initial: Optional[np.ndarray] = None,
                   tol: float = RESIDUAL_TOL, max_iter: int = 200) -> np.ndarray:
    """
    Solve u + lam T(u) = v.

    Args:
        op: Matrix A (T u = A u), an affine Game, or a callable T
        lam: Resolvent parameter, lam mu < 1
        v: Right-hand side
        offset: Constant b added to a matrix operator (T u = A u + b)
        lipschitz: Lipschitz constant of T, sets the relaxation of the
            fixed-point iteration
        mu: Hypomonotonicity modulus of T
        initial: Starting point (v when None)
        tol: Residual target relative to 1 + ||v||
        max_iter: Iteration budget of the fixed-point stage

    Raises:
        ConvergenceError: when neither stage reaches the residual target
    """
    v = np.asarray(v, dtype=float).reshape(-1)
    target = tol * (1.0 + float(np.linalg.norm(v)))

    matrix = _linear_map(op)
    if matrix is not None:
        if isinstance(op, Game):
            offset = op.b
        rhs = v if offset is None else v - lam * np.asarray(offset, dtype=float)
        return scipy.linalg.solve(np.eye(v.size) + lam * matrix, rhs)

    T: Callable[[np.ndarray], np.ndarray] = op.pseudo_gradient if isinstance(op, Game) else op

    def residual(u: np.ndarray) -> np.ndarray:
        return u + lam * np.asarray(T(u), dtype=float) - v

    u = v.copy() if initial is None else np.asarray(initial, dtype=float).copy()
    # plain iteration u <- v - lam T(u) contracts when lam L < 1; otherwise take
    # gradient-like steps on the strongly monotone map Id + lam T
    if lipschitz is not None and lam * lipschitz < 1.0:
        relaxation = 1.0
    elif lipschitz is not None:
        relaxation = (1.0 - lam * mu) / (1.0 + lam * lipschitz) ** 2
    else:
        relaxation = 0.5

    res = residual(u)
    res_norm = float(np.linalg.norm(res))
    checkpoint = res_norm
    for k in range(1, max_iter + 1):
        if res_norm <= target:
            return u
        u = u - relaxation * res
        res = residual(u)
        res_norm = float(np.linalg.norm(res))
        if k % 20 == 0:
            if not np.isfinite(res_norm) or res_norm > 0.5 * checkpoint:
                logger.debug(f"Resolvent iteration contracting slowly (residual {res_norm:.3e}), switching solver")
                break
            checkpoint = res_norm
    if res_norm <= target:
        return u

    start = u if np.isfinite(res_norm) else (v.copy() if initial is None else np.asarray(initial, dtype=float))
    for method in ("hybr", "lm"):
        solution = scipy.optimize.root(residual, start, method=method, options={"xtol": 1e-14})
        final = float(np.linalg.norm(residual(solution.x)))
        if final <= target:
            return solution.x
        logger.debug(f"Resolvent root solve ({method}) stopped at residual {final:.3e}")
        start = solution.x

    logger.error(f"Resolvent evaluation did not converge: residual {final:.3e} > {target:.3e}")
    raise ConvergenceError(f"Resolvent evaluation did not converge (residual {final:.3e})", residual=final)
