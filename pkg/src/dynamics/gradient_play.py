"""
Gradient play x' = -F(x).
"""
import logging
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from src.dynamics.base_dynamics import BaseDynamics
from src.dynamics.trajectory import Trajectory
from src.games.base_game import Game, as_action_profile

logger = logging.getLogger(__name__)


class GradientPlay(BaseDynamics):
    """Each agent descends its own cost."""

    info_mode = "full"
    has_anchor = False

    @property
    def state_size(self) -> int:
        return self.game.n

    def vector_field(self, t: float, z: np.ndarray) -> np.ndarray:
        return -self.game.pseudo_gradient(z)

    def affine_form(self) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        if not self.game.is_affine:
            return None
        return -np.asarray(self.game.linear_part()), -np.asarray(self.game.b)

    def stiff_split(self) -> Tuple[np.ndarray, Callable[[np.ndarray], np.ndarray]]:
        linear = self.game.linear_part()
        K = np.zeros((self.game.n, self.game.n)) if linear is None else -np.asarray(linear)
        return K, lambda z: self.vector_field(0.0, z) - K @ z

    def stiffness(self) -> float:
        return self.lipschitz

    def residuals(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        ne = np.array([np.linalg.norm(self.game.pseudo_gradient(row)) for row in x])
        return ne, np.zeros(len(x))


def simulate_gradient_play(game: Game, x0: Sequence[float], T: float, h: Optional[float] = None,
                           method: str = "rk4", decimation: Optional[int] = None, max_samples: int = 2000,
                           seed: Optional[int] = None) -> Trajectory:
    """
    Integrate x' = -F(x) with fixed-step RK4.

    Raises:
        DimensionError: if x0 does not have length n
        SimulationDivergedError: on a non-finite state
    """
    return GradientPlay(game).simulate(as_action_profile(game, x0), T, h=h, method=method, decimation=decimation,
                                       max_samples=max_samples, seed=seed)
