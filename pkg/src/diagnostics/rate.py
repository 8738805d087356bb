"""
Exponential rate fits over trajectory tails.
"""
from dataclasses import asdict, dataclass
import logging
from typing import Any, Dict, Optional, Tuple

import numpy as np
import scipy.stats

from src.dynamics.heavy_anchor import simulate_heavy_anchor_full
from src.dynamics.trajectory import Trajectory
from src.games.quadratic_game import QuadraticGame
from src.synthesis.quadratic import eigenvalue_map
from src.utils.seeding import make_rng, uniform_box

logger = logging.getLogger(__name__)

MIN_TAIL_SAMPLES = 50
MIN_R_SQUARED = 0.99
ERROR_FLOOR = 1e-12


@dataclass(frozen=True)
class RateEstimate:
    """
    Fitted decay |x(t) - x*| ~ C exp(-rate t) over a tail window.

    `rate` is None when no estimate is reported; `reason` says why.
    """

    rate: Optional[float]
    window: Optional[Tuple[float, float]]
    r_squared: Optional[float]
    samples: int
    reason: Optional[str] = None

    @property
    def reported(self) -> bool:
        return self.rate is not None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def estimate_rate(trajectory: Trajectory, equilibrium: Optional[np.ndarray] = None, tail_fraction: float = 0.5,
                  min_samples: int = MIN_TAIL_SAMPLES, min_r_squared: float = MIN_R_SQUARED) -> RateEstimate:
    """
    Least-squares slope of log |x(t) - x*| over the last `tail_fraction` of
    the horizon. Without an equilibrium the NE residual is fitted instead.
    Samples below the numerical floor are dropped.
    """
    if equilibrium is None:
        errors = trajectory.diagnostics["ne_residual"]
    else:
        actions = trajectory.x
        x_star = np.asarray(equilibrium, dtype=float).reshape(-1)
        if actions.shape[1] != x_star.size:
            x_star = np.tile(x_star, actions.shape[1] // x_star.size)
        errors = np.linalg.norm(actions - x_star, axis=1)

    times = trajectory.times
    start = times[0] + (1.0 - tail_fraction) * (times[-1] - times[0])
    mask = (times >= start) & (errors > ERROR_FLOOR)
    count = int(np.count_nonzero(mask))
    if count < min_samples:
        reason = "trajectory is at the equilibrium" if np.all(errors <= ERROR_FLOOR) else "too few tail samples"
        logger.info(f"Rate undefined: {reason} ({count} usable samples)")
        return RateEstimate(None, None, None, count, reason)

    fit = scipy.stats.linregress(times[mask], np.log(errors[mask]))
    window = (float(times[mask][0]), float(times[mask][-1]))
    r_squared = float(fit.rvalue ** 2)
    if fit.slope >= 0:
        return RateEstimate(None, window, r_squared, count, "trajectory is not converging")
    if r_squared < min_r_squared:
        return RateEstimate(None, window, r_squared, count, f"poor exponential fit (r^2={r_squared:.3f})")
    rate = float(-fit.slope)
    logger.info(f"Fitted rate {rate:.4g} over t in [{window[0]:.3g}, {window[1]:.3g}] (r^2={r_squared:.4f})")
    return RateEstimate(rate, window, r_squared, count)


def rate_experiment(R: float, T: float = 60.0, h: Optional[float] = None, seed: Optional[int] = None) -> Dict[str, Any]:
    """
    Fitted rate of the full-information dynamics on F(x) = (1/R) [[0, 1], [-1, 0]] x
    with alpha = 5/(9R), beta = 4/(9R), reported next to 1/(3R) and the
    slowest mode of the closed loop. Exploratory: nothing is asserted.
    """
    if not R > 0:
        raise ValueError(f"R must be positive, got {R}")
    game = QuadraticGame(np.array([[0.0, 1.0], [-1.0, 0.0]]) / R, dims=[1, 1], name=f"rotation_R{R:g}")
    alpha = 5.0 / (9.0 * R)
    beta = 4.0 / (9.0 * R)
    rng = make_rng(seed, stream=0)
    x0 = uniform_box(rng, game.n)
    r0 = uniform_box(rng, game.n)
    trajectory = simulate_heavy_anchor_full(game, x0, r0, alpha, beta, T, h=h, seed=seed)
    estimate = estimate_rate(trajectory, np.zeros(game.n))
    modes = [root for rho in np.linalg.eigvals(game.A) for root in eigenvalue_map(complex(rho), alpha, beta)]
    slowest = float(-max(root.real for root in modes))
    logger.info(f"Rate experiment R={R}: fitted {estimate.rate}, slowest mode {slowest:.6g}, 1/(3R)={1.0 / (3.0 * R):.6g}")
    return {
        "R": R,
        "alpha": alpha,
        "beta": beta,
        "T": T,
        "fitted": estimate.to_dict(),
        "slowest_mode_rate": slowest,
        "candidate_rate": 1.0 / (3.0 * R),
    }
