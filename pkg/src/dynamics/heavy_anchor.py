"""
Heavy Anchor dynamics.

Full information:
    x' = -F(x) - beta (x - r),   r' = alpha (x - r)

Partial information over a graph with Laplacian L, on stacked estimates:
    x' = -R^T F(x) - beta (x - r) - c (L kron I) x,   r' = alpha (x - r)
"""
import logging
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from src.dynamics.base_dynamics import BaseDynamics
from src.dynamics.trajectory import Trajectory
from src.games.base_game import Game, as_action_profile, as_stacked_estimates
from src.games.quadratic_game import QuadraticGame
from src.games.selection import SelectionStructure
from src.graphs.comm_graph import CommGraph, laplacian_spectrum, lift_laplacian
from src.utils.errors import DisconnectedGraphError

logger = logging.getLogger(__name__)


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            logger.error(f"Parameter {name}={value} must be positive")
            raise ValueError(f"Parameter {name} must be positive, got {value}")


def anchor_block(size: int, alpha: float, beta: float) -> np.ndarray:
    """Linear part of the anchor coupling: [[-beta I, beta I], [alpha I, -alpha I]]."""
    identity = np.eye(size)
    return np.block([[-beta * identity, beta * identity], [alpha * identity, -alpha * identity]])


class HeavyAnchorFull(BaseDynamics):
    """Gradient play with an anchor r low-pass filtering x."""

    info_mode = "full"

    def __init__(self, game: Game, alpha: float, beta: float, lipschitz: Optional[float] = None):
        _check_positive(alpha=alpha, beta=beta)
        super().__init__(game, lipschitz)
        self.alpha = float(alpha)
        self.beta = float(beta)

    @property
    def state_size(self) -> int:
        return 2 * self.game.n

    def vector_field(self, t: float, z: np.ndarray) -> np.ndarray:
        x, r = z[:self.game.n], z[self.game.n:]
        gap = x - r
        return np.concatenate((-self.game.pseudo_gradient(x) - self.beta * gap, self.alpha * gap))

    def affine_form(self) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        if not self.game.is_affine:
            return None
        n = self.game.n
        K = anchor_block(n, self.alpha, self.beta)
        K[:n, :n] -= np.asarray(self.game.linear_part())
        return K, np.concatenate((-np.asarray(self.game.b), np.zeros(n)))

    def stiff_split(self) -> Tuple[np.ndarray, Callable[[np.ndarray], np.ndarray]]:
        n = self.game.n
        K = anchor_block(n, self.alpha, self.beta)
        linear = self.game.linear_part()
        linear = np.zeros((n, n)) if linear is None else np.asarray(linear)
        K[:n, :n] -= linear

        def remainder(z: np.ndarray) -> np.ndarray:
            x = z[:n]
            return np.concatenate((linear @ x - self.game.pseudo_gradient(x), np.zeros(n)))

        return K, remainder

    def stiffness(self) -> float:
        return self.lipschitz + self.beta

    def residuals(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        ne = np.array([np.linalg.norm(self.game.pseudo_gradient(row)) for row in x])
        return ne, np.zeros(len(x))

    def parameters(self) -> Dict[str, Any]:
        return {"alpha": self.alpha, "beta": self.beta}


class HeavyAnchorDistributed(BaseDynamics):
    """Heavy Anchor on stacked estimates with Laplacian consensus."""

    info_mode = "partial"

    def __init__(self, game: Game, graph: CommGraph, alpha: float, beta: float, c: float,
                 lipschitz: Optional[float] = None):
        _check_positive(alpha=alpha, beta=beta, c=c)
        if graph.N != game.n_agents:
            raise ValueError(f"Graph has {graph.N} nodes, game has {game.n_agents} agents")
        spectrum = laplacian_spectrum(graph)
        if not spectrum.connected:
            logger.error(f"Graph {graph.name} is disconnected")
            raise DisconnectedGraphError(f"Graph {graph.name} is disconnected", components=graph.connected_components())
        super().__init__(game, lipschitz)
        self.graph = graph
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.c = float(c)
        self.spectrum = spectrum
        self.selection = SelectionStructure(game.dims)
        self.lifted = lift_laplacian(graph, game.n)

    @property
    def stacked_size(self) -> int:
        return self.selection.stacked_size

    @property
    def state_size(self) -> int:
        return 2 * self.stacked_size

    def lifted_gradient(self, x: np.ndarray) -> np.ndarray:
        """R^T F(x) for stacked estimates x."""
        estimates = x.reshape(self.game.n_agents, self.game.n)
        return self.selection.scatter(self.game.extended_pseudo_gradient(estimates))

    def vector_field(self, t: float, z: np.ndarray) -> np.ndarray:
        size = self.stacked_size
        x, r = z[:size], z[size:]
        gap = x - r
        dx = -self.lifted_gradient(x) - self.beta * gap - self.c * self.lifted.apply(x)
        return np.concatenate((dx, self.alpha * gap))

    def _linear_part(self, extended: Optional[np.ndarray]) -> np.ndarray:
        size = self.stacked_size
        K = anchor_block(size, self.alpha, self.beta)
        K[:size, :size] -= self.c * self.lifted.matrix()
        if extended is not None:
            K[:size, :size] -= self.selection.matrix().T @ extended
        return K

    def affine_form(self) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        if not isinstance(self.game, QuadraticGame):
            return None
        K = self._linear_part(self.game.extended_matrix())
        g = np.concatenate((-self.selection.scatter(self.game.b), np.zeros(self.stacked_size)))
        return K, g

    def stiff_split(self) -> Tuple[np.ndarray, Callable[[np.ndarray], np.ndarray]]:
        size = self.stacked_size
        linear = self.game.linear_part()
        if linear is None:
            linear = np.zeros((self.game.n, self.game.n))
        extended = QuadraticGame(linear, dims=self.game.dims).extended_matrix()
        K = self._linear_part(extended)

        def remainder(z: np.ndarray) -> np.ndarray:
            x = z[:size]
            nonlinear = self.game.extended_pseudo_gradient(x.reshape(self.game.n_agents, self.game.n)) - extended @ x
            return np.concatenate((-self.selection.scatter(nonlinear), np.zeros(size)))

        return K, remainder

    def stiffness(self) -> float:
        return self.lipschitz + self.beta + self.c * self.spectrum.lambda_max

    def consensus_error(self, x: np.ndarray) -> np.ndarray:
        """||Pi_perp x|| per sample row."""
        blocks = x.reshape(x.shape[0], self.game.n_agents, self.game.n)
        return np.linalg.norm(blocks - blocks.mean(axis=1, keepdims=True), axis=(1, 2))

    def residuals(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        actions = x[:, self.selection.own_index]
        ne = np.array([np.linalg.norm(self.game.pseudo_gradient(row)) for row in actions])
        return ne, self.consensus_error(x)

    def parameters(self) -> Dict[str, Any]:
        return {"alpha": self.alpha, "beta": self.beta, "c": self.c, "graph": self.graph.name}


def simulate_heavy_anchor_full(game: Game, x0: Sequence[float], r0: Sequence[float], alpha: float, beta: float,
                               T: float, h: Optional[float] = None, method: str = "rk4",
                               decimation: Optional[int] = None, max_samples: int = 2000,
                               stiffness_factor: float = 0.1, lipschitz: Optional[float] = None,
                               seed: Optional[int] = None) -> Trajectory:
    """
    Integrate the full-information Heavy Anchor dynamics.

    Raises:
        ValueError: if alpha or beta is not positive
        DimensionError: if x0 or r0 does not have length n
        SimulationDivergedError: on a non-finite state
    """
    dynamics = HeavyAnchorFull(game, alpha, beta, lipschitz)
    z0 = np.concatenate((as_action_profile(game, x0), as_action_profile(game, r0)))
    return dynamics.simulate(z0, T, h=h, method=method, decimation=decimation, max_samples=max_samples,
                             stiffness_factor=stiffness_factor, seed=seed)


def simulate_heavy_anchor_distributed(game: Game, g: CommGraph, x0: Sequence[float], r0: Sequence[float],
                                      alpha: float, beta: float, c: float, T: float, h: Optional[float] = None,
                                      method: str = "rk4", decimation: Optional[int] = None,
                                      max_samples: int = 2000, stiffness_factor: float = 0.1,
                                      lipschitz: Optional[float] = None,
                                      seed: Optional[int] = None) -> Trajectory:
    """
    Integrate the distributed Heavy Anchor dynamics on stacked estimates.

    Args:
        game: Game with N agents
        g: Connected communication graph on N nodes
        x0, r0: Stacked initial estimates and anchors (length N*n)
        alpha, beta, c: Positive gains
        T: Horizon
        h: Step size (stiffness rule when None)
        method: "rk4" or "if-rk4"

    Raises:
        DisconnectedGraphError: if g is disconnected
        SimulationDivergedError: on a non-finite state
    """
    dynamics = HeavyAnchorDistributed(game, g, alpha, beta, c, lipschitz)
    z0 = np.concatenate((as_stacked_estimates(game, x0), as_stacked_estimates(game, r0)))
    return dynamics.simulate(z0, T, h=h, method=method, decimation=decimation, max_samples=max_samples,
                             stiffness_factor=stiffness_factor, seed=seed)
