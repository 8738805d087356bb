"""
Communication Graph module for the Heavy Anchor toolkit.
Builds undirected weighted graphs, their Laplacian L = Deg - W and the
spectral quantities that gate the consensus gain.
"""
from dataclasses import dataclass
import logging
from typing import Any, Dict, List, Optional

import networkx as nx
import numpy as np
import scipy.linalg

from src.utils.errors import DisconnectedGraphError, GraphConstructionError

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12


class CommGraph:
    """
    Undirected communication graph with symmetric nonnegative weights.
    """

    def __init__(self, weights: Any, name: Optional[str] = None):
        """
        Args:
            weights: N x N symmetric nonnegative matrix with zero diagonal
            name: Optional display name

        Raises:
            GraphConstructionError: for asymmetric, negative or self-loop weights
        """
        W = np.array(weights, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1] or W.shape[0] < 1:
            logger.error(f"Graph weights must be a square matrix, got shape {W.shape}")
            raise GraphConstructionError(f"Graph weights must be a square matrix, got shape {W.shape}")
        if np.any(W < 0):
            logger.error("Graph weights must be nonnegative")
            raise GraphConstructionError("Graph weights must be nonnegative")
        if np.max(np.abs(W - W.T)) > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(W)))):
            logger.error("Graph weights must be symmetric")
            raise GraphConstructionError("Graph weights must be symmetric (undirected graph)")
        if np.any(np.diag(W) != 0):
            logger.error("Graph weights must have a zero diagonal")
            raise GraphConstructionError("Graph weights must have a zero diagonal (no self loops)")

        self.weights = W
        self.weights.setflags(write=False)
        self.N = W.shape[0]
        self.name = name or f"graph_{self.N}"

    @classmethod
    def from_networkx(cls, graph: nx.Graph, name: Optional[str] = None) -> "CommGraph":
        return cls(nx.to_numpy_array(graph, nodelist=sorted(graph.nodes), weight="weight"), name=name)

    @classmethod
    def ring(cls, N: int, weight: float = 1.0) -> "CommGraph":
        return cls(weight * nx.to_numpy_array(nx.cycle_graph(N), nodelist=range(N)), name=f"ring_{N}")

    @classmethod
    def complete(cls, N: int, weight: float = 1.0) -> "CommGraph":
        return cls(weight * nx.to_numpy_array(nx.complete_graph(N), nodelist=range(N)), name=f"complete_{N}")

    @classmethod
    def path(cls, N: int, weight: float = 1.0) -> "CommGraph":
        return cls(weight * nx.to_numpy_array(nx.path_graph(N), nodelist=range(N)), name=f"path_{N}")

    @classmethod
    def star(cls, N: int, weight: float = 1.0) -> "CommGraph":
        # networkx star_graph(k) has k + 1 nodes
        return cls(weight * nx.to_numpy_array(nx.star_graph(N - 1), nodelist=range(N)), name=f"star_{N}")

    def to_networkx(self) -> nx.Graph:
        return nx.from_numpy_array(np.array(self.weights))

    def connected_components(self) -> List[List[int]]:
        """Node lists of the connected components, in ascending order."""
        return sorted(sorted(int(v) for v in comp) for comp in nx.connected_components(self.to_networkx()))

    def is_connected(self) -> bool:
        return len(self.connected_components()) == 1

    def get_metadata(self) -> Dict[str, Any]:
        return {"graph": self.name, "N": self.N, "edges": int(np.count_nonzero(np.triu(self.weights)))}


GRAPH_BUILDERS = {
    "ring": CommGraph.ring,
    "complete": CommGraph.complete,
    "path": CommGraph.path,
    "star": CommGraph.star,
}


def build_graph(spec: Dict[str, Any], default_N: Optional[int] = None) -> CommGraph:
    """
    Build a graph from a config mapping {type, N?, weight?, weights?}.

    Raises:
        GraphConstructionError: for an unknown type or missing size
    """
    graph_type = spec.get("type", "ring")
    if graph_type == "custom":
        return CommGraph(spec["weights"], name=spec.get("name", "custom"))
    if graph_type not in GRAPH_BUILDERS:
        raise GraphConstructionError(f"Unknown graph type {graph_type!r}")
    N = spec.get("N") or default_N
    if not N:
        raise GraphConstructionError(f"Graph type {graph_type!r} needs a node count N")
    return GRAPH_BUILDERS[graph_type](int(N), float(spec.get("weight", 1.0)))


def laplacian(g: CommGraph) -> np.ndarray:
    """
    Weighted Laplacian L = Deg - W (symmetric PSD, L 1 = 0).
    """
    return nx.laplacian_matrix(g.to_networkx(), nodelist=range(g.N), weight="weight").toarray().astype(float)


@dataclass(frozen=True)
class LaplacianSpectrum:
    """Ascending Laplacian eigenvalues with the algebraic connectivity."""

    eigenvalues: np.ndarray
    lambda2: float
    lambda_max: float

    @property
    def connected(self) -> bool:
        return self.lambda2 > 1e-10 * max(1.0, self.lambda_max)


def laplacian_spectrum(g: CommGraph) -> LaplacianSpectrum:
    """
    Full symmetric eigendecomposition of L. For a disconnected graph lambda2
    is reported as 0.
    """
    eigenvalues = np.sort(scipy.linalg.eigvalsh(laplacian(g)))
    # the zero eigenvalue is exact in theory
    eigenvalues[0] = 0.0 if abs(eigenvalues[0]) < 1e-10 * max(1.0, eigenvalues[-1]) else eigenvalues[0]
    if g.N == 1:
        return LaplacianSpectrum(eigenvalues, 0.0, 0.0)
    lam2 = float(eigenvalues[1])
    if not g.is_connected():
        lam2 = 0.0
    return LaplacianSpectrum(eigenvalues, lam2, float(eigenvalues[-1]))


def lambda2(g: CommGraph) -> float:
    """
    Algebraic connectivity lambda_2(L).

    Raises:
        DisconnectedGraphError: naming the connected components
    """
    components = g.connected_components()
    if len(components) != 1 or g.N < 2:
        logger.error(f"Graph {g.name} is not connected: components {components}")
        raise DisconnectedGraphError(f"Graph {g.name} is not connected; components: {components}",
                                     components=components)
    return laplacian_spectrum(g).lambda2


class LiftedLaplacian:
    """
    Matrix-free L (x) I_n acting on stacked estimate vectors of length N*n.
    """

    def __init__(self, g: CommGraph, n: int):
        if n < 1:
            raise GraphConstructionError(f"Lifted dimension must be >= 1, got {n}")
        self.graph = g
        self.n = int(n)
        self.L = laplacian(g)
        self.size = g.N * self.n

    def apply(self, stacked: np.ndarray) -> np.ndarray:
        """(L (x) I_n) x computed as L X with X the N x n reshaping."""
        return (self.L @ np.asarray(stacked, dtype=float).reshape(self.graph.N, self.n)).reshape(-1)

    __call__ = apply

    def matrix(self) -> np.ndarray:
        """Dense L (x) I_n, for small systems."""
        return np.kron(self.L, np.eye(self.n))

    def quadratic_form(self, stacked: np.ndarray) -> float:
        stacked = np.asarray(stacked, dtype=float).reshape(-1)
        return float(stacked @ self.apply(stacked))


def lift_laplacian(g: CommGraph, n: int) -> LiftedLaplacian:
    """Applier for L (x) I_n whose kernel is the consensus subspace."""
    return LiftedLaplacian(g, n)
