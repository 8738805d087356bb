"""
Convergence verdicts and monotonicity checks over trajectories.
"""
from dataclasses import asdict, dataclass
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.dynamics.trajectory import Trajectory

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiagnosticSample:
    t: float
    ne_residual: float
    consensus_error: float
    lyapunov: Optional[float] = None

    def __post_init__(self):
        for name in ("ne_residual", "consensus_error", "lyapunov"):
            value = getattr(self, name)
            if value is not None and value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value}")


@dataclass(frozen=True)
class ConvergenceVerdict:
    """
    converged is True when both metrics are within tolerance from `time` to
    the end of the horizon.
    """

    converged: bool
    time: Optional[float]
    final_residual: float
    final_consensus_error: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def diagnostic_samples(trajectory: Trajectory) -> List[DiagnosticSample]:
    lyapunov = trajectory.diagnostics.get("lyapunov")
    return [
        DiagnosticSample(
            t=float(t),
            ne_residual=float(trajectory.diagnostics["ne_residual"][k]),
            consensus_error=float(trajectory.diagnostics["consensus_error"][k]),
            lyapunov=None if lyapunov is None else max(0.0, float(lyapunov[k])),
        )
        for k, t in enumerate(trajectory.times)
    ]


def detect_convergence(trajectory: Trajectory, tol_residual: float = 1e-3,
                       tol_consensus: float = 1e-3) -> ConvergenceVerdict:
    """
    First time after which the NE residual and consensus error stay below
    their tolerances.
    """
    if len(trajectory) == 0:
        raise ValueError("Cannot assess convergence of an empty trajectory")
    residual = trajectory.diagnostics["ne_residual"]
    consensus = trajectory.diagnostics["consensus_error"]
    within = (residual <= tol_residual) & (consensus <= tol_consensus)

    final_residual = float(residual[-1])
    final_consensus = float(consensus[-1])
    if not within[-1]:
        logger.info(f"Not converged: residual {final_residual:.3e}, consensus error {final_consensus:.3e}")
        return ConvergenceVerdict(False, None, final_residual, final_consensus)
    outside = np.flatnonzero(~within)
    first = 0 if outside.size == 0 else int(outside[-1]) + 1
    time = float(trajectory.times[first])
    logger.info(f"Converged at t={time:.6g}: residual {final_residual:.3e}, consensus error {final_consensus:.3e}")
    return ConvergenceVerdict(True, time, final_residual, final_consensus)


def check_nonincreasing(values: Sequence[float], slack: Optional[float] = None,
                        relative: float = 1e-8) -> Tuple[bool, float, Optional[int]]:
    """
    Check that a sequence never increases by more than `slack` per step.

    Args:
        values: Sampled sequence (e.g. Lyapunov values)
        slack: Allowed increase per step; relative * (1 + |values[0]|) when None

    Returns:
        (ok, largest increase seen, index of the sample where it occurred)
    """
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return True, 0.0, None
    slack = relative * (1.0 + abs(values[0])) if slack is None else slack
    increases = np.diff(values)
    worst_index = int(np.argmax(increases))
    worst = float(increases[worst_index])
    ok = bool(worst <= slack)
    if not ok:
        logger.warning(f"Sequence increases by {worst:.3e} > {slack:.3e} at sample {worst_index + 1}")
    return ok, max(worst, 0.0), worst_index + 1 if worst > 0 else None
