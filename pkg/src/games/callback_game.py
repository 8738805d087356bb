"""
Callback Game module for the Heavy Anchor toolkit.
Wraps user-supplied partial-gradient callbacks, and resolves plugin factories
named in scenario files.
"""
import importlib
import logging
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np

from src.games.base_game import Game
from src.utils.errors import ConfigError, DimensionError

logger = logging.getLogger(__name__)

PartialGradient = Callable[[int, np.ndarray], np.ndarray]


class CallbackGame(Game):
    """
    Game defined by a callback (i, estimate) -> agent i's partial gradient.
    """

    def __init__(self, dims: Sequence[int], partial_gradient: PartialGradient, name: Optional[str] = None,
                 equilibrium: Optional[Sequence[float]] = None, constants: Optional[Dict[str, float]] = None):
        """
        Args:
            dims: Per-agent action dimensions
            partial_gradient: Callback returning a length-n_i vector
            name: Optional display name
            equilibrium: Known Nash equilibrium, if any
            constants: Known {mu, L, R}, if any
        """
        super().__init__(dims, name=name)
        self._callback = partial_gradient
        self._equilibrium = None if equilibrium is None else np.asarray(equilibrium, dtype=float)
        self._constants = dict(constants) if constants else None

    def partial_gradient_at_estimate(self, i: int, estimate: np.ndarray) -> np.ndarray:
        value = np.asarray(self._callback(i, estimate), dtype=float).reshape(-1)
        if value.size != self.dims[i]:
            logger.error(f"Callback for agent {i} returned {value.size} entries, expected {self.dims[i]}")
            raise DimensionError(f"Callback for agent {i} returned {value.size} entries, expected {self.dims[i]}",
                                 expected=self.dims[i], actual=value.size)
        return value

    def pseudo_gradient(self, x: np.ndarray) -> np.ndarray:
        return np.concatenate([self.partial_gradient_at_estimate(i, x) for i in range(self.n_agents)])

    def equilibrium(self) -> Optional[np.ndarray]:
        return None if self._equilibrium is None else self._equilibrium.copy()

    def declared_constants(self) -> Optional[Dict[str, float]]:
        return dict(self._constants) if self._constants else None


def load_plugin_game(factory: str, args: Optional[Dict[str, Any]] = None) -> Game:
    """
    Import `package.module.function` and call it with `args` to build a game.

    Raises:
        ConfigError: if the factory cannot be imported or returns something else
    """
    if "." not in factory:
        raise ConfigError(f"plugin factory must be a dotted path, got {factory!r}", field_path="game.factory")
    module_path, attr = factory.rsplit(".", 1)
    try:
        module = importlib.import_module(module_path)
        builder = getattr(module, attr)
    except (ImportError, AttributeError) as e:
        logger.error(f"Failed to load game plugin '{factory}': {str(e)}")
        raise ConfigError(f"cannot import {factory!r}: {e}", field_path="game.factory") from e

    game = builder(**(args or {}))
    if not isinstance(game, Game):
        logger.error(f"Game plugin '{factory}' returned {type(game).__name__}, not a Game")
        raise ConfigError(f"{factory!r} did not return a Game", field_path="game.factory")
    logger.info(f"Loaded game plugin: {factory} -> {game.name}")
    return game
