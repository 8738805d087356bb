"""
Quadratic Game module for the Heavy Anchor toolkit.
Games with affine pseudo-gradient F(x) = A x + b.
"""
import logging
from typing import Any, Dict, Optional, Sequence

import numpy as np
import scipy.linalg

from src.games.base_game import Game
from src.utils.errors import DimensionError, SingularSystemError

logger = logging.getLogger(__name__)


class QuadraticGame(Game):
    """
    Game whose pseudo-gradient is affine. Block row i of A is agent i's Q_i.
    """

    def __init__(self, A: Any, b: Any = None, dims: Optional[Sequence[int]] = None, name: Optional[str] = None):
        """
        Initialize the quadratic game.

        Args:
            A: n x n matrix
            b: Offset vector (zeros when None)
            dims: Per-agent dimensions; one scalar action per agent when None
            name: Optional display name
        """
        A = np.array(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            logger.error(f"Quadratic game matrix must be square, got shape {A.shape}")
            raise DimensionError(f"Quadratic game matrix must be square, got shape {A.shape}")
        n = A.shape[0]
        dims = list(dims) if dims is not None else [1] * n
        super().__init__(dims, name=name)
        if self.n != n:
            logger.error(f"Action dimensions {dims} sum to {self.n}, matrix has size {n}")
            raise DimensionError(f"Action dimensions sum to {self.n}, matrix has size {n}", expected=n, actual=self.n)

        b = np.zeros(n) if b is None else np.array(b, dtype=float).reshape(-1)
        if b.size != n:
            raise DimensionError(f"Offset has length {b.size}, expected {n}", expected=n, actual=b.size)

        self.A = A
        self.b = b
        self.A.setflags(write=False)
        self.b.setflags(write=False)
        self._extended: Optional[np.ndarray] = None

    @classmethod
    def from_pairwise(cls, weights: Sequence[float], block: Any, name: Optional[str] = None) -> "QuadraticGame":
        """
        Build the ring-paired game J_i(x) = w_i x_i^T B x_{N+1-i}.

        Agent i's gradient is w_i B x_{N+1-i}; an agent paired with itself
        (odd N) gets w_i (B + B^T) x_i.
        """
        block = np.asarray(block, dtype=float)
        m = block.shape[0]
        N = len(weights)
        A = np.zeros((N * m, N * m))
        for i, w in enumerate(weights):
            j = N - 1 - i
            rows = slice(i * m, (i + 1) * m)
            cols = slice(j * m, (j + 1) * m)
            A[rows, cols] += w * (block + block.T if i == j else block)
        return cls(A, np.zeros(N * m), dims=[m] * N, name=name)

    def pseudo_gradient(self, x: np.ndarray) -> np.ndarray:
        return self.A @ x + self.b

    def partial_gradient_at_estimate(self, i: int, estimate: np.ndarray) -> np.ndarray:
        rows = self.agent_slice(i)
        return self.A[rows] @ estimate + self.b[rows]

    def extended_matrix(self) -> np.ndarray:
        """
        Matrix G (n x N*n) with extended pseudo-gradient G x + b.
        """
        if self._extended is None:
            G = np.zeros((self.n, self.n_agents * self.n))
            for i in range(self.n_agents):
                rows = self.agent_slice(i)
                G[rows, i * self.n:(i + 1) * self.n] = self.A[rows]
            G.setflags(write=False)
            self._extended = G
        return self._extended

    def extended_pseudo_gradient(self, estimates: np.ndarray) -> np.ndarray:
        return self.extended_matrix() @ estimates.reshape(-1) + self.b

    def linear_part(self) -> Optional[np.ndarray]:
        return np.array(self.A)

    @property
    def is_affine(self) -> bool:
        return True

    def equilibrium(self) -> Optional[np.ndarray]:
        return solve_quadratic_ne(self)

    def to_dict(self) -> Dict[str, Any]:
        """
        JSON description {dims, A (row-major), b}.
        """
        return {"dims": list(self.dims), "A": self.A.tolist(), "b": self.b.tolist()}

    @classmethod
    def from_dict(cls, description: Dict[str, Any], name: Optional[str] = None) -> "QuadraticGame":
        """
        Build a game from {dims?, A, b?}.
        """
        return cls(description["A"], description.get("b"), dims=description.get("dims"),
                   name=name or description.get("name"))

    def get_metadata(self) -> Dict[str, Any]:
        metadata = super().get_metadata()
        metadata["affine"] = True
        return metadata


def solve_quadratic_ne(qg: QuadraticGame) -> np.ndarray:
    """
    Solve F(x*) = A x* + b = 0.

    Raises:
        SingularSystemError: when A is rank deficient (with rank diagnostics)
    """
    rank = int(np.linalg.matrix_rank(qg.A))
    if rank < qg.n:
        logger.error(f"Game {qg.name}: A has rank {rank} < {qg.n}, equilibrium is not unique or does not exist")
        raise SingularSystemError(
            f"A has rank {rank} of {qg.n}; the equilibrium is not unique or does not exist",
            rank=rank,
            size=qg.n,
        )
    x_star = scipy.linalg.solve(qg.A, -qg.b)
    residual = float(np.linalg.norm(qg.A @ x_star + qg.b))
    logger.debug(f"Game {qg.name}: equilibrium residual {residual:.2e}")
    return x_star
