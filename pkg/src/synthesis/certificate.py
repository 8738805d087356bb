"""
Certificate types returned by the parameter synthesizers.
"""
from dataclasses import dataclass, field, replace
import logging
import math
from typing import Any, Dict, List, Optional

import numpy as np

from src.utils.errors import InfeasibleParametersError

logger = logging.getLogger(__name__)

# governing results
FULL_MONOTONE = "full-monotone"
FULL_HYPO = "full-hypo"
FULL_QUAD = "full-quad"
DIST_MONOTONE = "dist-monotone"
DIST_GENERAL = "dist-general"
DIST_QUAD = "dist-quad"


def _json_number(value: Optional[float]) -> Any:
    if value is None:
        return None
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return float(value)


@dataclass(frozen=True)
class Interval:
    """Open interval (low, high); high may be +inf."""

    low: float
    high: float

    @property
    def empty(self) -> bool:
        return not self.low < self.high

    def contains(self, value: float) -> bool:
        return self.low < value < self.high

    def pick(self, weight_low: float = 0.5) -> float:
        """weight_low * low + (1 - weight_low) * high (1 when unbounded above)."""
        if math.isinf(self.high):
            return max(1.0, 2.0 * self.low) if self.low > 0 else 1.0
        return weight_low * self.low + (1.0 - weight_low) * self.high

    def to_list(self) -> List[Any]:
        return [_json_number(self.low), _json_number(self.high)]


POSITIVE = Interval(0.0, math.inf)


@dataclass(frozen=True)
class ParameterCertificate:
    """
    Feasible Heavy Anchor parameters and the quantities proving them.

    Attributes:
        theorem: Tag of the governing convergence result
        feasible: False when no parameters satisfy the condition
        alpha_range, beta_range: Open feasible intervals (alpha's depends on beta)
        alpha, beta: Chosen values
        d: Lyapunov weight in (0, 1), where the result uses one
        c_min: Infimum of admissible consensus gains (partial information)
        c: Gain used by simulations (c_factor * c_min)
        aux: Certificate payload (Phi, eta1, eta2, P, p, eigenvalue intervals ...)
        reason: Why the certificate is infeasible
        blocking: Quantity that blocks feasibility (e.g. an eigenvalue)
    """

    theorem: str
    feasible: bool
    alpha_range: Optional[Interval] = None
    beta_range: Optional[Interval] = None
    alpha: Optional[float] = None
    beta: Optional[float] = None
    d: Optional[float] = None
    c_min: Optional[float] = None
    c: Optional[float] = None
    aux: Dict[str, Any] = field(default_factory=dict)
    reason: Optional[str] = None
    blocking: Any = None

    def require_feasible(self) -> "ParameterCertificate":
        if not self.feasible:
            raise InfeasibleParametersError(f"{self.theorem}: {self.reason}", reason=self.reason, blocking=self.blocking)
        return self

    def check_parameters(self, alpha: Optional[float] = None, beta: Optional[float] = None,
                         c: Optional[float] = None) -> None:
        """
        Raise InfeasibleParametersError if a proposed value lies outside the
        certified ranges.
        """
        self.require_feasible()
        if beta is not None and not self.beta_range.contains(beta):
            raise InfeasibleParametersError(f"beta={beta} outside certified range {self.beta_range.to_list()}",
                                            reason="beta out of range", blocking=beta)
        if alpha is not None and not self.alpha_range.contains(alpha):
            raise InfeasibleParametersError(f"alpha={alpha} outside certified range {self.alpha_range.to_list()}",
                                            reason="alpha out of range", blocking=alpha)
        if c is not None and self.c_min is not None and not c > self.c_min:
            raise InfeasibleParametersError(f"c={c} does not exceed c_min={self.c_min:.6g}",
                                            reason="c below c_min", blocking=c)

    def with_values(self, **changes: Any) -> "ParameterCertificate":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theorem": self.theorem,
            "feasible": self.feasible,
            "alpha_range": self.alpha_range.to_list() if self.alpha_range else None,
            "beta_range": self.beta_range.to_list() if self.beta_range else None,
            "alpha": self.alpha,
            "beta": self.beta,
            "d": self.d,
            "c_min": self.c_min,
            "c": self.c,
            "aux": {key: (value.tolist() if isinstance(value, np.ndarray) else value) for key, value in self.aux.items()},
            "reason": self.reason,
            "blocking": self.blocking if not isinstance(self.blocking, complex)
            else [self.blocking.real, self.blocking.imag],
        }


def infeasible(theorem: str, reason: str, blocking: Any = None, **fields: Any) -> ParameterCertificate:
    logger.warning(f"{theorem}: infeasible ({reason})")
    return ParameterCertificate(theorem=theorem, feasible=False, reason=reason, blocking=blocking, **fields)


def phi_matrix(alpha: float, beta_margin: float, d: float, L_J: float, kappa_J: float) -> np.ndarray:
    """
    The 2 x 2 weight matrix of the consensus-subspace Lyapunov argument:

        [[(1-d) alpha (1-kappa),            -alpha (1 + (L_J^2 + L_J - 1) d) / 2],
         [-alpha (1 + (L_J^2+L_J-1) d) / 2,  d beta_margin                     ]]

    with beta_margin = beta - mu/N.
    """
    off = -alpha * (1.0 + (L_J ** 2 + L_J - 1.0) * d) / 2.0
    return np.array([[(1.0 - d) * alpha * (1.0 - kappa_J), off], [off, d * beta_margin]])


def alpha_upper_bound(beta_margin: float, d: float, L_J: float, kappa_J: float) -> float:
    """4 d (1-d) beta_margin (1-kappa) / ((1-d) + d (L_J + L_J^2))^2, the bound making Phi positive definite."""
    return 4.0 * d * (1.0 - d) * beta_margin * (1.0 - kappa_J) / ((1.0 - d) + d * (L_J + L_J ** 2)) ** 2
