"""
Discrete-time Heavy Anchor and its classical special cases.

The Euler step
    x+ = x - s F(x) - s beta (x - r),   r+ = r + s alpha (x - r)
eliminates r into the second-order recurrence
    x_{k+2} = (1 - s beta) x_{k+1} - s F(x_{k+1})
              + (1 - s alpha) (x_{k+1} - (1 - s beta) x_k + s F(x_k)) + s^2 alpha beta x_k,
which is optimistic gradient (OGDA) for alpha = beta = 1/(2s) and Polyak's heavy
ball for alpha = 1/s with beta < 0.
"""
import logging
from typing import Callable, Tuple

import numpy as np

from src.games.base_game import Game, as_action_profile
from src.games.quadratic_game import QuadraticGame

logger = logging.getLogger(__name__)

Gradient = Callable[[np.ndarray], np.ndarray]


def discrete_step(game: Game, state: Tuple[np.ndarray, np.ndarray], alpha: float, beta: float,
                  s: float) -> Tuple[np.ndarray, np.ndarray]:
    """One Euler step of the full-information dynamics from (x_k, r_k)."""
    if not s > 0:
        raise ValueError(f"Step s must be positive, got {s}")
    x, r = (np.asarray(v, dtype=float) for v in state)
    gap = x - r
    return x - s * game.pseudo_gradient(x) - s * beta * gap, r + s * alpha * gap


def second_order_recurrence(game: Game, x_k: np.ndarray, x_k1: np.ndarray, alpha: float, beta: float,
                            s: float) -> np.ndarray:
    """x_{k+2} from (x_k, x_{k+1}) without the anchor."""
    x_k = np.asarray(x_k, dtype=float)
    x_k1 = np.asarray(x_k1, dtype=float)
    carried = x_k1 - (1.0 - s * beta) * x_k + s * game.pseudo_gradient(x_k)
    return ((1.0 - s * beta) * x_k1 - s * game.pseudo_gradient(x_k1) + (1.0 - s * alpha) * carried
            + s * s * alpha * beta * x_k)


def ogda_step(grad: Gradient, x_k: np.ndarray, x_km1: np.ndarray, s: float) -> np.ndarray:
    """x_k - (s/2)(2 grad(x_k) - grad(x_{k-1}))."""
    return x_k - 0.5 * s * (2.0 * grad(x_k) - grad(x_km1))


def heavy_ball_step(grad: Gradient, x_k: np.ndarray, x_km1: np.ndarray, s: float, beta: float) -> np.ndarray:
    """x_k - s (grad(x_k) + beta (x_k - x_{k-1}))."""
    return x_k - s * (grad(x_k) + beta * (x_k - x_km1))


def run_discrete(game: Game, x0: np.ndarray, r0: np.ndarray, alpha: float, beta: float, s: float,
                 iterations: int) -> Tuple[np.ndarray, np.ndarray]:
    """Iterate discrete_step; returns (xs, rs) of shape (iterations + 1, n)."""
    x = as_action_profile(game, x0)
    r = as_action_profile(game, r0)
    xs = [x]
    rs = [r]
    for _ in range(iterations):
        x, r = discrete_step(game, (x, r), alpha, beta, s)
        xs.append(x)
        rs.append(r)
    return np.array(xs), np.array(rs)


def second_order_residual(qg: QuadraticGame, x: np.ndarray, xdot: np.ndarray, xddot: np.ndarray, alpha: float,
                          beta: float) -> np.ndarray:
    """x'' + (A + (alpha + beta) I) x' + alpha F(x), zero along continuous solutions."""
    xdot = np.asarray(xdot, dtype=float)
    return (np.asarray(xddot, dtype=float) + qg.A @ xdot + (alpha + beta) * xdot
            + alpha * qg.pseudo_gradient(np.asarray(x, dtype=float)))
