"""
Communication graphs and Laplacian spectra.
"""
from src.graphs.comm_graph import (
    CommGraph,
    LaplacianSpectrum,
    LiftedLaplacian,
    build_graph,
    lambda2,
    laplacian,
    laplacian_spectrum,
    lift_laplacian,
)

__all__ = [
    "CommGraph",
    "LaplacianSpectrum",
    "LiftedLaplacian",
    "build_graph",
    "lambda2",
    "laplacian",
    "laplacian_spectrum",
    "lift_laplacian",
]
