"""
Base Dynamics module for the Heavy Anchor toolkit.
Provides the abstract base class for continuous-time seeking dynamics and the
shared simulation driver.
"""
from abc import ABC, abstractmethod
import logging
import time
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from src.dynamics.integrators import (
    AffineRk4Integrator,
    BaseIntegrator,
    IntegratingFactorRk4,
    Rk4Integrator,
    align_step,
    default_step,
    sampling_stride,
)
from src.dynamics.trajectory import Trajectory
from src.games.base_game import Game
from src.utils.errors import SimulationDivergedError

logger = logging.getLogger(__name__)

METHODS = ("rk4", "if-rk4")


def operator_gain(game: Game, lipschitz: Optional[float] = None) -> float:
    """Lipschitz constant used by the step-size rule."""
    if lipschitz is not None:
        return float(lipschitz)
    declared = game.declared_constants()
    if declared and declared.get("L") is not None:
        return float(declared["L"])
    linear = game.linear_part()
    if linear is not None:
        return float(np.linalg.norm(linear, 2))
    logger.warning(f"No Lipschitz estimate for {game.name}; step-size rule assumes L_F = 1")
    return 1.0


class BaseDynamics(ABC):
    """
    Abstract base class for seeking dynamics z' = f(z) on a stacked state.
    """

    info_mode = "full"
    has_anchor = True

    def __init__(self, game: Game, lipschitz: Optional[float] = None):
        """
        Initialize the dynamics.

        Args:
            game: Game whose equilibria are sought
            lipschitz: Lipschitz constant of the pseudo-gradient for the step rule
        """
        self.game = game
        self.lipschitz = operator_gain(game, lipschitz)
        self.name = self.__class__.__name__
        logger.info(f"Initializing dynamics: {self.name} on {game.name}")

    @property
    @abstractmethod
    def state_size(self) -> int:
        """Length of the stacked integration state."""

    @abstractmethod
    def vector_field(self, t: float, z: np.ndarray) -> np.ndarray:
        """Right-hand side f(t, z)."""

    @abstractmethod
    def affine_form(self) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """(K, g) with f(z) = K z + g when the game is affine, else None."""

    @abstractmethod
    def stiff_split(self) -> Tuple[np.ndarray, Callable[[np.ndarray], np.ndarray]]:
        """(K, N) with f(z) = K z + N(z) and K carrying the stiff linear part."""

    @abstractmethod
    def stiffness(self) -> float:
        """Scale of the fastest mode, for the default step size."""

    @abstractmethod
    def residuals(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Per-sample (ne_residual, consensus_error) for sampled actions/estimates."""

    def split(self, z: np.ndarray) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        if not self.has_anchor:
            return z, None
        half = z.shape[-1] // 2
        return z[..., :half], z[..., half:]

    def default_step(self, stiffness_factor: float = 0.1) -> float:
        return default_step(self.stiffness(), 0.0, stiffness_factor=stiffness_factor)

    def make_integrator(self, method: str, h: float) -> BaseIntegrator:
        if method not in METHODS:
            raise ValueError(f"Unknown integration method {method!r}; choose from {METHODS}")
        if method == "if-rk4":
            K, remainder = self.stiff_split()
            return IntegratingFactorRk4(K, remainder, h)
        affine = self.affine_form()
        if affine is not None:
            return AffineRk4Integrator(affine[0], affine[1], h)
        return Rk4Integrator(self.vector_field, h)

    def parameters(self) -> Dict[str, Any]:
        return {}

    def simulate(self, z0: np.ndarray, T: float, h: Optional[float] = None, method: str = "rk4",
                 decimation: Optional[int] = None, max_samples: int = 2000, stiffness_factor: float = 0.1,
                 seed: Optional[int] = None) -> Trajectory:
        """
        Integrate from z0 over [0, T] and sample the trajectory.

        Raises:
            SimulationDivergedError: on a non-finite state; its `trajectory`
                attribute holds the finite samples as a Trajectory
        """
        if not T > 0:
            raise ValueError(f"Horizon must be positive, got {T}")
        z0 = np.asarray(z0, dtype=float).reshape(-1)
        if z0.size != self.state_size:
            raise ValueError(f"Initial state has length {z0.size}, expected {self.state_size}")
        h = self.default_step(stiffness_factor) if h is None else float(h)
        h, steps = align_step(T, h)
        stride = sampling_stride(steps, decimation, max_samples)
        integrator = self.make_integrator(method, h)

        metadata = {
            "dynamics": self.name,
            "method": method,
            "h": h,
            "steps": steps,
            "decimation": stride,
            "T": float(T),
            "seed": seed,
            "info_mode": self.info_mode,
            "n_agents": self.game.n_agents,
            "n": self.game.n,
            **self.parameters(),
        }
        logger.info(f"{self.name}: T={T}, h={h:.4g}, steps={steps}, stride={stride}, method={method}")
        started = time.perf_counter()
        try:
            times, states = integrator.integrate(z0, steps, stride)
        except SimulationDivergedError as exc:
            times, states = exc.trajectory
            exc.trajectory = self._trajectory(times, states, metadata)
            raise
        metadata["wall_time"] = time.perf_counter() - started
        logger.debug(f"{self.name}: integrated {steps} steps in {metadata['wall_time']:.3f} s")
        return self._trajectory(times, states, metadata)

    def _trajectory(self, times: np.ndarray, states: np.ndarray, metadata: Dict[str, Any]) -> Trajectory:
        x, r = self.split(states)
        ne_residual, consensus_error = self.residuals(x)
        return Trajectory(
            times=times,
            x=x,
            r=r,
            diagnostics={"ne_residual": ne_residual, "consensus_error": consensus_error},
            metadata=dict(metadata),
        )

    def get_metadata(self) -> Dict[str, Any]:
        return {"dynamics": self.name, "game": self.game.name, "info_mode": self.info_mode, **self.parameters()}
