"""
Continuous- and discrete-time seeking dynamics.
"""
from src.dynamics.base_dynamics import BaseDynamics
from src.dynamics.decomposition import Decomposition, decompose
from src.dynamics.discrete import (
    discrete_step,
    heavy_ball_step,
    ogda_step,
    second_order_recurrence,
    second_order_residual,
)
from src.dynamics.gradient_play import GradientPlay, simulate_gradient_play
from src.dynamics.heavy_anchor import (
    HeavyAnchorDistributed,
    HeavyAnchorFull,
    simulate_heavy_anchor_distributed,
    simulate_heavy_anchor_full,
)
from src.dynamics.trajectory import DistState, FullState, Trajectory

__all__ = [
    "BaseDynamics",
    "Decomposition",
    "DistState",
    "FullState",
    "GradientPlay",
    "HeavyAnchorDistributed",
    "HeavyAnchorFull",
    "Trajectory",
    "decompose",
    "discrete_step",
    "heavy_ball_step",
    "ogda_step",
    "second_order_recurrence",
    "second_order_residual",
    "simulate_gradient_play",
    "simulate_heavy_anchor_distributed",
    "simulate_heavy_anchor_full",
]
