"""
Sine-coupled pairwise game.

Agent i's cost is w_i x_i^T (5 I) x_o + w_i x_i^T (sin(x_o,2), -sin(x_o,1)) with
opponent o = N+1-i, so its partial gradient is
w_i (5 y + (sin y_2, -sin y_1)) at the opponent's action y.
"""
import logging
from typing import Dict, Optional, Sequence

import numpy as np

from src.games.base_game import Game
from src.games.quadratic_game import QuadraticGame
from src.utils.errors import DimensionError

logger = logging.getLogger(__name__)


class SineCouplingGame(Game):
    """
    N-player game with two-dimensional actions and sinusoidal cross coupling.
    """

    def __init__(self, weights: Sequence[float], gain: float = 5.0, name: Optional[str] = None,
                 constants: Optional[Dict[str, float]] = None):
        """
        Args:
            weights: Per-agent weights w_i
            gain: Diagonal gain of the quadratic part
            name: Optional display name
            constants: Published {mu, L, R} for the fixture, if known
        """
        weights = np.asarray(weights, dtype=float).reshape(-1)
        N = weights.size
        if N < 2 or N % 2:
            logger.error(f"Sine coupling game needs an even number of agents, got {N}")
            raise DimensionError(f"Sine coupling game needs an even number of agents >= 2, got {N}")
        super().__init__([2] * N, name=name)
        self.weights = weights
        self.gain = float(gain)
        self.opponent = np.arange(N)[::-1].copy()
        self._constants = dict(constants) if constants else None
        self._linear = QuadraticGame.from_pairwise(weights, self.gain * np.eye(2)).A

    def _coupling(self, y: np.ndarray) -> np.ndarray:
        """Stacked (sin y_2, -sin y_1) for rows y of an (m, 2) array."""
        return np.stack((np.sin(y[:, 1]), -np.sin(y[:, 0])), axis=1)

    def pseudo_gradient(self, x: np.ndarray) -> np.ndarray:
        y = x.reshape(self.n_agents, 2)[self.opponent]
        return (self.weights[:, None] * (self.gain * y + self._coupling(y))).reshape(-1)

    def partial_gradient_at_estimate(self, i: int, estimate: np.ndarray) -> np.ndarray:
        o = self.opponent[i]
        y = estimate[2 * o:2 * o + 2]
        return self.weights[i] * (self.gain * y + np.array([np.sin(y[1]), -np.sin(y[0])]))

    def extended_pseudo_gradient(self, estimates: np.ndarray) -> np.ndarray:
        blocks = estimates.reshape(self.n_agents, self.n_agents, 2)
        y = blocks[np.arange(self.n_agents), self.opponent]
        return (self.weights[:, None] * (self.gain * y + self._coupling(y))).reshape(-1)

    def linear_part(self) -> Optional[np.ndarray]:
        return np.array(self._linear)

    def equilibrium(self) -> Optional[np.ndarray]:
        # F(0) = 0 and the linear part dominates the bounded coupling
        return np.zeros(self.n)

    def declared_constants(self) -> Optional[Dict[str, float]]:
        return dict(self._constants) if self._constants else None
