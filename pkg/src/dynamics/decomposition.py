"""
Consensus / orthogonal decomposition of stacked estimates.

Pi_par = (1/N) 1 1^T kron I_n projects onto the consensus subspace
{1_N kron x}; Pi_perp = I - Pi_par. On the consensus subspace the anchor is
compared with h(r) = 1_N kron J(r_bar), J the resolvent of F at lam = 1/(beta N).
"""
from dataclasses import dataclass
import logging
from typing import Any, Optional

import numpy as np

from src.analysis.resolvent import eval_resolvent
from src.dynamics.trajectory import DistState
from src.games.base_game import Game

logger = logging.getLogger(__name__)


def consensus_projector(N: int, n: int) -> np.ndarray:
    """Dense Pi_par."""
    return np.kron(np.full((N, N), 1.0 / N), np.eye(n))


def consensus_average(stacked: np.ndarray, N: int) -> np.ndarray:
    """Average estimate (1/N) sum_i x^i."""
    return np.asarray(stacked, dtype=float).reshape(N, -1).mean(axis=0)


def project_consensus(stacked: np.ndarray, N: int) -> np.ndarray:
    return np.tile(consensus_average(stacked, N), N)


@dataclass(frozen=True)
class Decomposition:
    """
    Attributes:
        x_par, x_perp, r_par, r_perp: Projections of the stacked x and r
        x_bar, r_bar: Consensus averages (length n)
        anchor_point: J(r_bar), the resolvent image of the averaged anchor
        z_par: x_par - 1_N kron anchor_point
        lam: Resolvent parameter 1/(beta N)
    """

    x_par: np.ndarray
    x_perp: np.ndarray
    r_par: np.ndarray
    r_perp: np.ndarray
    x_bar: np.ndarray
    r_bar: np.ndarray
    anchor_point: np.ndarray
    z_par: np.ndarray
    lam: float


def decompose(state: Any, game: Game, beta: float, N: Optional[int] = None, lipschitz: Optional[float] = None,
              mu: float = 0.0, initial: Optional[np.ndarray] = None) -> Decomposition:
    """
    Split a distributed state into consensus and orthogonal parts.

    Args:
        state: DistState, or any object with stacked `x` and `r`
        game: Game supplying F for the resolvent
        beta: Anchor gain; sets lam = 1/(beta N)
        N: Number of agents (game.n_agents when None)
        lipschitz, mu: Moduli of F passed to the resolvent solver
        initial: Warm start for the resolvent solve

    Raises:
        ConvergenceError: if the resolvent solve fails
    """
    N = game.n_agents if N is None else int(N)
    x = np.asarray(state.x, dtype=float).reshape(-1)
    r = np.asarray(state.r, dtype=float).reshape(-1)
    x_bar = consensus_average(x, N)
    r_bar = consensus_average(r, N)
    x_par = np.tile(x_bar, N)
    r_par = np.tile(r_bar, N)

    lam = 1.0 / (beta * N)
    anchor_point = eval_resolvent(game, lam, r_bar, lipschitz=lipschitz, mu=mu, initial=initial)
    return Decomposition(
        x_par=x_par,
        x_perp=x - x_par,
        r_par=r_par,
        r_perp=r - r_par,
        x_bar=x_bar,
        r_bar=r_bar,
        anchor_point=anchor_point,
        z_par=x_par - np.tile(anchor_point, N),
        lam=lam,
    )


def decompose_stacked(x: np.ndarray, r: np.ndarray, game: Game, beta: float, **kwargs: Any) -> Decomposition:
    """decompose() for raw stacked vectors."""
    return decompose(DistState(np.asarray(x, dtype=float), np.asarray(r, dtype=float)), game, beta, **kwargs)
