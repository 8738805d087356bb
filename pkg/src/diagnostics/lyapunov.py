"""
Lyapunov functions certifying each convergence result.

Kinds (x* the equilibrium, 1 = 1_N kron):
    full-monotone   1/2 |x - x*|^2 + beta/(2 alpha) |r - x*|^2
    full-hypo       (1-d)/2 |r - x*|^2 + d/2 |x - J(r)|^2,   J resolvent of F at 1/beta
    full-quad       w^T P w,   w = (x - x*, r - x*)
    dist-monotone   1/2 |x - 1 x*|^2 + beta/(2 alpha) |r - 1 x*|^2
    consensus       (1-d)/2 N |r_bar - x*|^2 + d/2 |z_par|^2
    dist-general    consensus + 1/2 |x_perp|^2 + beta/(2 alpha) |r_perp|^2
    dist-quad       1/2 |x_perp|^2 + beta/(2 alpha) |r_perp|^2 + N w_bar^T P w_bar,
                    w_bar = (x_bar - x*, r_bar - x*)
"""
import logging
from typing import Any, Dict, Optional

import numpy as np

from src.analysis.resolvent import eval_resolvent
from src.dynamics.decomposition import decompose
from src.dynamics.trajectory import Trajectory
from src.games.base_game import Game
from src.synthesis.certificate import ParameterCertificate

logger = logging.getLogger(__name__)

LYAPUNOV_KINDS = (
    "full-monotone",
    "full-hypo",
    "full-quad",
    "dist-monotone",
    "consensus",
    "dist-general",
    "dist-quad",
)
NEEDS_GAME = ("full-hypo", "consensus", "dist-general")


def _sq(v: np.ndarray) -> float:
    return float(v @ v)


def _matrix(certificate: ParameterCertificate) -> np.ndarray:
    if "P" not in certificate.aux:
        raise ValueError(f"Certificate {certificate.theorem} carries no Lyapunov matrix P")
    return np.asarray(certificate.aux["P"], dtype=float)


def evaluate_lyapunov(kind: str, state: Any, certificate: ParameterCertificate, equilibrium: np.ndarray,
                      game: Optional[Game] = None, lipschitz: Optional[float] = None, mu: float = 0.0,
                      warm_start: Optional[np.ndarray] = None) -> float:
    """
    Value of the Lyapunov function `kind` at `state`.

    Args:
        kind: One of LYAPUNOV_KINDS
        state: FullState or DistState (anything with x and r)
        certificate: Supplies alpha, beta, d and P
        equilibrium: Equilibrium action profile x* (length n)
        game: Required by the kinds that evaluate a resolvent
        lipschitz, mu: Moduli of F for the resolvent solver
        warm_start: Initial guess for the resolvent solve

    Raises:
        ValueError: for an unknown kind or a missing ingredient
    """
    if kind not in LYAPUNOV_KINDS:
        raise ValueError(f"Unknown Lyapunov kind {kind!r}; choose from {LYAPUNOV_KINDS}")
    if kind in NEEDS_GAME and game is None:
        raise ValueError(f"Lyapunov kind {kind} needs the game to evaluate its resolvent")

    x = np.asarray(state.x, dtype=float).reshape(-1)
    r = np.asarray(state.r, dtype=float).reshape(-1)
    x_star = np.asarray(equilibrium, dtype=float).reshape(-1)
    alpha, beta = certificate.alpha, certificate.beta
    weight = beta / (2.0 * alpha)

    if kind == "full-monotone":
        return 0.5 * _sq(x - x_star) + weight * _sq(r - x_star)
    if kind == "full-hypo":
        d = certificate.d
        anchor = eval_resolvent(game, 1.0 / beta, r, lipschitz=lipschitz, mu=mu, initial=warm_start)
        return 0.5 * (1.0 - d) * _sq(r - x_star) + 0.5 * d * _sq(x - anchor)
    if kind == "full-quad":
        w = np.concatenate((x - x_star, r - x_star))
        return float(w @ _matrix(certificate) @ w)

    N = x.size // x_star.size
    if kind == "dist-monotone":
        lifted = np.tile(x_star, N)
        return 0.5 * _sq(x - lifted) + weight * _sq(r - lifted)

    if kind == "dist-quad":
        blocks_x = x.reshape(N, -1)
        blocks_r = r.reshape(N, -1)
        x_bar = blocks_x.mean(axis=0)
        r_bar = blocks_r.mean(axis=0)
        w_bar = np.concatenate((x_bar - x_star, r_bar - x_star))
        perp = 0.5 * _sq((blocks_x - x_bar).reshape(-1)) + weight * _sq((blocks_r - r_bar).reshape(-1))
        return perp + N * float(w_bar @ _matrix(certificate) @ w_bar)

    d = certificate.d
    parts = decompose(state, game, beta, N=N, lipschitz=lipschitz, mu=mu, initial=warm_start)
    parallel = 0.5 * (1.0 - d) * N * _sq(parts.r_bar - x_star) + 0.5 * d * _sq(parts.z_par)
    if kind == "consensus":
        return parallel
    return parallel + 0.5 * _sq(parts.x_perp) + weight * _sq(parts.r_perp)


def lyapunov_series(trajectory: Trajectory, kind: str, certificate: ParameterCertificate, equilibrium: np.ndarray,
                    game: Optional[Game] = None, lipschitz: Optional[float] = None, mu: float = 0.0) -> np.ndarray:
    """Lyapunov value at every stored sample, warm-starting resolvent solves along the path."""
    values = np.empty(len(trajectory))
    warm = None
    for k in range(len(trajectory)):
        state = trajectory.state(k)
        values[k] = evaluate_lyapunov(kind, state, certificate, equilibrium, game, lipschitz, mu, warm)
        if kind in NEEDS_GAME:
            warm = _anchor_guess(state, trajectory.metadata)
    logger.debug(f"Lyapunov {kind}: V0={values[0]:.4g}, V(T)={values[-1]:.4g}")
    return values


def _anchor_guess(state: Any, metadata: Dict[str, Any]) -> np.ndarray:
    r = np.asarray(state.r, dtype=float)
    n = metadata.get("n") or r.size
    return r.reshape(-1, n).mean(axis=0)


def default_kind(theorem: str) -> str:
    """Lyapunov kind that certifies a theorem tag."""
    if theorem not in LYAPUNOV_KINDS:
        raise ValueError(f"No Lyapunov function for theorem {theorem!r}")
    return theorem
