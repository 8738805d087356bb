"""
State and trajectory containers.
"""
from dataclasses import dataclass, field
import logging
from typing import Any, Dict, Optional

import numpy as np

from src.utils.errors import DimensionError

logger = logging.getLogger(__name__)

DIAGNOSTIC_COLUMNS = ("ne_residual", "consensus_error", "lyapunov")


@dataclass(frozen=True)
class FullState:
    """Action profile x and anchor r at time t (full information)."""

    x: np.ndarray
    r: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        if self.x.shape != self.r.shape:
            raise DimensionError(f"x and r must have equal length, got {self.x.size} and {self.r.size}",
                                 expected=self.x.size, actual=self.r.size)

    @property
    def stacked(self) -> np.ndarray:
        return np.concatenate((self.x, self.r))


@dataclass(frozen=True)
class DistState:
    """Stacked estimates x and anchors r (length N*n each) at time t."""

    x: np.ndarray
    r: np.ndarray
    t: float = 0.0
    n_agents: Optional[int] = None

    def __post_init__(self):
        if self.x.shape != self.r.shape:
            raise DimensionError(f"x and r must have equal length, got {self.x.size} and {self.r.size}",
                                 expected=self.x.size, actual=self.r.size)
        if self.n_agents is not None and self.x.size % self.n_agents:
            raise DimensionError(f"Stacked length {self.x.size} is not a multiple of N={self.n_agents}")

    @property
    def stacked(self) -> np.ndarray:
        return np.concatenate((self.x, self.r))

    def estimates(self) -> np.ndarray:
        """(N, n) view of x."""
        return self.x.reshape(self.n_agents, -1)


@dataclass
class Trajectory:
    """
    Sampled solution of a dynamics run.

    Attributes:
        times: Strictly increasing sample times
        x: (samples, dim) actions or stacked estimates
        r: (samples, dim) anchors (None for gradient play)
        diagnostics: Per-sample arrays keyed by DIAGNOSTIC_COLUMNS
        metadata: Integrator and run details (method, h, seed, info_mode, ...)
    """

    times: np.ndarray
    x: np.ndarray
    r: Optional[np.ndarray] = None
    diagnostics: Dict[str, np.ndarray] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.x = np.atleast_2d(np.asarray(self.x, dtype=float))
        if self.r is not None:
            self.r = np.atleast_2d(np.asarray(self.r, dtype=float))
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("Trajectory times must be strictly increasing")
        if self.x.shape[0] != self.times.size or (self.r is not None and self.r.shape[0] != self.times.size):
            raise DimensionError(f"{self.times.size} sample times but {self.x.shape[0]} states")
        for name, values in self.diagnostics.items():
            self.set_diagnostic(name, values)

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    @property
    def final_x(self) -> np.ndarray:
        return self.x[-1]

    @property
    def final_r(self) -> Optional[np.ndarray]:
        return None if self.r is None else self.r[-1]

    def set_diagnostic(self, name: str, values: Any) -> None:
        values = np.asarray(values, dtype=float).reshape(-1)
        if values.size != self.times.size:
            raise DimensionError(f"Diagnostic {name} has {values.size} values for {self.times.size} samples",
                                 expected=self.times.size, actual=values.size)
        self.diagnostics[name] = values

    def state(self, k: int) -> Any:
        """Sample k as a FullState or DistState."""
        r = self.x[k] if self.r is None else self.r[k]
        if self.metadata.get("info_mode") == "partial":
            return DistState(self.x[k], r, float(self.times[k]), n_agents=self.metadata.get("n_agents"))
        return FullState(self.x[k], r, float(self.times[k]))
