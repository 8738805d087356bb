"""
Games: pseudo-gradients, the estimate-space lift and benchmark fixtures.
"""
from src.games.base_game import (
    Game,
    as_action_profile,
    as_stacked_estimates,
    check_extended_monotonicity,
    eval_extended_pseudo_gradient,
    eval_pseudo_gradient,
)
from src.games.benchmarks import BENCHMARKS, build_benchmark
from src.games.callback_game import CallbackGame, load_plugin_game
from src.games.quadratic_game import QuadraticGame, solve_quadratic_ne
from src.games.selection import EstimateState, SelectionStructure
from src.games.sine_game import SineCouplingGame

__all__ = [
    "BENCHMARKS",
    "CallbackGame",
    "EstimateState",
    "Game",
    "QuadraticGame",
    "SelectionStructure",
    "SineCouplingGame",
    "as_action_profile",
    "as_stacked_estimates",
    "build_benchmark",
    "check_extended_monotonicity",
    "eval_extended_pseudo_gradient",
    "eval_pseudo_gradient",
    "load_plugin_game",
    "solve_quadratic_ne",
]
