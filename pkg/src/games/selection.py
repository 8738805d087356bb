"""
Estimate-space bookkeeping for the partial-information setting.

Agent i holds an estimate x^i of the whole profile; the selection matrix R picks
each agent's own block out of its estimate (R x = true actions) and R^T scatters
a profile back into the estimate space.
"""
from dataclasses import dataclass
import logging
from typing import Sequence

import numpy as np

from src.utils.errors import DimensionError

logger = logging.getLogger(__name__)


class SelectionStructure:
    """
    Row-selection blocks R_i = [0 I_{n_i} 0] stacked as R = diag(R_i).
    """

    def __init__(self, dims: Sequence[int]):
        self.dims = tuple(int(d) for d in dims)
        self.n_agents = len(self.dims)
        self.n = int(sum(self.dims))
        self.offsets = np.concatenate(([0], np.cumsum(self.dims))).astype(int)
        # flat positions of agent i's own block inside the stacked estimate vector
        self.own_index = np.concatenate([
            i * self.n + np.arange(self.offsets[i], self.offsets[i + 1]) for i in range(self.n_agents)
        ])

    @property
    def stacked_size(self) -> int:
        return self.n_agents * self.n

    def block(self, i: int) -> np.ndarray:
        """Dense R_i (n_i x n)."""
        rows = np.zeros((self.dims[i], self.n))
        rows[:, self.offsets[i]:self.offsets[i + 1]] = np.eye(self.dims[i])
        return rows

    def matrix(self) -> np.ndarray:
        """Dense R (n x N*n)."""
        selection = np.zeros((self.n, self.stacked_size))
        selection[np.arange(self.n), self.own_index] = 1.0
        return selection

    def select(self, stacked: np.ndarray) -> np.ndarray:
        """R x: the true action profile held inside a stacked estimate vector."""
        stacked = np.asarray(stacked, dtype=float).reshape(-1)
        if stacked.size != self.stacked_size:
            raise DimensionError(f"Stacked vector has length {stacked.size}, expected {self.stacked_size}",
                                 expected=self.stacked_size, actual=stacked.size)
        return stacked[self.own_index]

    def scatter(self, x: np.ndarray) -> np.ndarray:
        """R^T x: write x_i into slot i of estimate i, zeros elsewhere."""
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size != self.n:
            raise DimensionError(f"Profile has length {x.size}, expected {self.n}", expected=self.n, actual=x.size)
        out = np.zeros(self.stacked_size)
        out[self.own_index] = x
        return out

    def lift(self, x: np.ndarray) -> np.ndarray:
        """Consensus lift 1_N (x) x."""
        return np.tile(np.asarray(x, dtype=float).reshape(-1), self.n_agents)


@dataclass(frozen=True)
class EstimateState:
    """Stacked estimates x and auxiliary estimates r, each of length N*n."""

    x: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        if self.x.shape != self.r.shape or self.x.ndim != 1:
            raise DimensionError(f"Estimate vectors must be flat and equal length, got {self.x.shape} and {self.r.shape}")

    def actions(self, selection: SelectionStructure) -> np.ndarray:
        """True actions R x."""
        return selection.select(self.x)
