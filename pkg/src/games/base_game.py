"""
Base Game module for the Heavy Anchor toolkit.
Provides the abstract base class for all games and the evaluation entry points
for the pseudo-gradient and the extended (estimate-space) pseudo-gradient.
"""
from abc import ABC, abstractmethod
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.utils.errors import DimensionError

logger = logging.getLogger(__name__)


class Game(ABC):
    """
    Abstract base class for N-player games with unconstrained actions.

    A game is described by its partial gradients only: agent i's gradient of its
    own cost with respect to its own action, evaluated at any estimate of the
    full action profile. Stacking these at the true profile gives the
    pseudo-gradient F.
    """

    def __init__(self, dims: Sequence[int], name: Optional[str] = None):
        """
        Initialize the game structure.

        Args:
            dims: Per-agent action dimensions n_i (length N, entries >= 1)
            name: Optional display name
        """
        dims = [int(d) for d in dims]
        if not dims or any(d < 1 for d in dims):
            logger.error(f"Invalid action dimensions: {dims}")
            raise DimensionError(f"Action dimensions must be a nonempty list of positive integers, got {dims}")

        self.dims: Tuple[int, ...] = tuple(dims)
        self.n_agents = len(self.dims)
        self.n = int(sum(self.dims))
        self.offsets = np.concatenate(([0], np.cumsum(self.dims))).astype(int)
        self.name = name or self.__class__.__name__
        logger.debug(f"Initializing game {self.name}: N={self.n_agents}, n={self.n}")

    def agent_slice(self, i: int) -> slice:
        """Slice of agent i's block inside an n-vector."""
        return slice(int(self.offsets[i]), int(self.offsets[i + 1]))

    @abstractmethod
    def pseudo_gradient(self, x: np.ndarray) -> np.ndarray:
        """
        Stacked partial gradients F(x) at the action profile x (length n).
        """

    @abstractmethod
    def partial_gradient_at_estimate(self, i: int, estimate: np.ndarray) -> np.ndarray:
        """
        Agent i's partial gradient evaluated at its estimate of the full profile.

        Args:
            i: Agent index (0-based)
            estimate: Length-n estimate vector held by agent i

        Returns:
            Vector of length n_i
        """

    def extended_pseudo_gradient(self, estimates: np.ndarray) -> np.ndarray:
        """
        Stack every agent's partial gradient at its own estimate.

        Args:
            estimates: (N, n) array whose row i is agent i's estimate

        Returns:
            Vector of length n
        """
        out = np.empty(self.n)
        for i in range(self.n_agents):
            out[self.agent_slice(i)] = self.partial_gradient_at_estimate(i, estimates[i])
        return out

    def linear_part(self) -> Optional[np.ndarray]:
        """
        Matrix K with F(x) = K x + remainder(x) and a non-stiff remainder.

        Used by the integrating-factor integrator. Games without a useful
        split return None.
        """
        return None

    @property
    def is_affine(self) -> bool:
        """True when F is affine, so the closed loop is a linear system."""
        return False

    def equilibrium(self) -> Optional[np.ndarray]:
        """Known Nash equilibrium, or None when it has to be computed."""
        return None

    def declared_constants(self) -> Optional[Dict[str, float]]:
        """Operator constants published with a fixture ({mu, L, R}), if any."""
        return None

    def get_metadata(self) -> Dict[str, Any]:
        """
        Get metadata describing the game.
        """
        return {
            "game": self.name,
            "type": self.__class__.__name__,
            "n_agents": self.n_agents,
            "dims": list(self.dims),
            "n": self.n,
        }


def _as_vector(values: Any, expected: int, what: str) -> np.ndarray:
    vector = np.asarray(values, dtype=float).reshape(-1)
    if vector.size != expected:
        logger.error(f"{what} has length {vector.size}, expected {expected}")
        raise DimensionError(f"{what} has length {vector.size}, expected {expected}", expected=expected, actual=vector.size)
    return vector


def as_action_profile(game: Game, x: Any) -> np.ndarray:
    """x as a float vector of length n (DimensionError otherwise)."""
    return _as_vector(x, game.n, "Action profile")


def as_stacked_estimates(game: Game, stacked: Any) -> np.ndarray:
    """Stacked estimates as a float vector of length N*n (DimensionError otherwise)."""
    return _as_vector(stacked, game.n_agents * game.n, "Stacked estimate vector")


def eval_pseudo_gradient(game: Game, x: Any) -> np.ndarray:
    """
    Evaluate the pseudo-gradient F(x).

    Raises:
        DimensionError: if x does not have length n
    """
    x = as_action_profile(game, x)
    return np.asarray(game.pseudo_gradient(x), dtype=float)


def eval_extended_pseudo_gradient(game: Game, stacked_estimates: Any) -> np.ndarray:
    """
    Evaluate the extended pseudo-gradient at stacked estimates (length N*n).

    At consensus, 1_N (x) x, this equals F(x).

    Raises:
        DimensionError: if the input does not have length N*n
    """
    stacked = as_stacked_estimates(game, stacked_estimates)
    return np.asarray(game.extended_pseudo_gradient(stacked.reshape(game.n_agents, game.n)), dtype=float)


def check_extended_monotonicity(game: Game, rng: np.random.Generator, pairs: int = 2000,
                                box: Sequence[float] = (-10.0, 10.0)) -> Tuple[float, bool]:
    """
    Sample the extended monotonicity condition <x - x', R^T(F(x) - F(x'))> >= 0.

    Args:
        game: Game to test
        rng: Random generator
        pairs: Number of sampled estimate pairs
        box: Sampling box per coordinate

    Returns:
        (smallest normalized inner product seen, verdict)
    """
    from src.games.selection import SelectionStructure

    selection = SelectionStructure(game.dims)
    size = game.n_agents * game.n
    worst = np.inf
    for _ in range(pairs):
        a = rng.uniform(box[0], box[1], size=size)
        b = rng.uniform(box[0], box[1], size=size)
        diff = a - b
        norm_sq = float(diff @ diff)
        if norm_sq == 0.0:
            continue
        lifted = selection.scatter(eval_extended_pseudo_gradient(game, a) - eval_extended_pseudo_gradient(game, b))
        worst = min(worst, float(diff @ lifted) / norm_sq)
    verdict = bool(worst >= -1e-12)
    logger.debug(f"Extended monotonicity check on {game.name}: worst ratio {worst:.3e}")
    return worst, verdict


def consistency_gap(game: Game, x: np.ndarray) -> float:
    """
    Largest deviation between F(x) restricted to agent i and agent i's partial
    gradient at the consensus estimate x.
    """
    full = eval_pseudo_gradient(game, x)
    gaps: List[float] = []
    for i in range(game.n_agents):
        local = np.asarray(game.partial_gradient_at_estimate(i, x), dtype=float)
        gaps.append(float(np.max(np.abs(local - full[game.agent_slice(i)]))))
    return max(gaps)
