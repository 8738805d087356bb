"""
Benchmark game fixtures.

- harmonic: two-player zero-sum bilinear game, F(x) = [[0, 1], [-1, 0]] x.
- g1, g2, g3: ten agents, J_i(x) = w_i x_i^T B x_{N+1-i}, B = [[5, 1], [-1, 5]].
- sine: the g1 weights with B = 5 I plus sinusoidal cross coupling.

All fixtures have their Nash equilibrium at the origin.
"""
import logging
from typing import Callable, Dict, List

import numpy as np

from src.games.base_game import Game
from src.games.quadratic_game import QuadraticGame
from src.games.sine_game import SineCouplingGame
from src.utils.errors import ConfigError

logger = logging.getLogger(__name__)

PAIR_BLOCK = np.array([[5.0, 1.0], [-1.0, 5.0]])

G1_WEIGHTS: List[float] = [1, 1, 1, 1, 1, -1, -1, -1, -1, -1]
G2_WEIGHTS: List[float] = [k / 9.0 for k in (-9, -7, -5, -3, -1, 1, 3, 5, 7, 9)]
G3_WEIGHTS: List[float] = [-2, -1, -1, -1, -1, 1, 1, 1, 1, 2]

# published moduli of the sine fixture
SINE_CONSTANTS = {"mu": 1.0, "L": 6.0, "R": 0.25}


def harmonic_game() -> QuadraticGame:
    return QuadraticGame([[0.0, 1.0], [-1.0, 0.0]], [0.0, 0.0], dims=[1, 1], name="harmonic")


def _pairwise(name: str, weights: List[float]) -> Callable[[], QuadraticGame]:
    return lambda: QuadraticGame.from_pairwise(weights, PAIR_BLOCK, name=name)


def sine_game() -> SineCouplingGame:
    return SineCouplingGame(G1_WEIGHTS, gain=5.0, name="sine", constants=SINE_CONSTANTS)


BENCHMARKS: Dict[str, Callable[[], Game]] = {
    "harmonic": harmonic_game,
    "g1": _pairwise("g1", G1_WEIGHTS),
    "g2": _pairwise("g2", G2_WEIGHTS),
    "g3": _pairwise("g3", G3_WEIGHTS),
    "sine": sine_game,
}


def build_benchmark(name: str) -> Game:
    """
    Build a named fixture game.

    Raises:
        ConfigError: for an unknown fixture name
    """
    key = str(name).lower()
    if key not in BENCHMARKS:
        logger.error(f"Unknown benchmark game: {name}")
        raise ConfigError(f"unknown fixture {name!r}; choose from {sorted(BENCHMARKS)}", field_path="game")
    game = BENCHMARKS[key]()
    logger.debug(f"Built benchmark {key}: N={game.n_agents}, n={game.n}")
    return game
