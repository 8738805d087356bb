"""
Fixed-step integrators.

- Rk4Integrator: classical fourth-order Runge-Kutta for any vector field.
- AffineRk4Integrator: the same scheme for z' = K z + g, with the one-step map
  z -> Phi z + psi assembled once and composed over the sampling stride.
- IntegratingFactorRk4: Lawson RK4 for z' = K z + N(z), exact in the linear part.
"""
from abc import ABC, abstractmethod
import logging
import math
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg

from src.utils.errors import SimulationDivergedError

logger = logging.getLogger(__name__)

VectorField = Callable[[float, np.ndarray], np.ndarray]

MAX_STEP = 0.01
STIFFNESS_FACTOR = 0.1


def rk4_step(f: VectorField, t: float, z: np.ndarray, h: float) -> np.ndarray:
    k1 = f(t, z)
    k2 = f(t + 0.5 * h, z + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, z + 0.5 * h * k2)
    k4 = f(t + h, z + h * k3)
    return z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def default_step(lipschitz: float, beta: float, c: float = 0.0, lambda_max: float = 0.0,
                 stiffness_factor: float = STIFFNESS_FACTOR, max_step: float = MAX_STEP) -> float:
    """h = min(max_step, stiffness_factor / (L_F + beta + c lambda_max))."""
    stiffness = lipschitz + beta + c * lambda_max
    if stiffness <= 0.0:
        return max_step
    return min(max_step, stiffness_factor / stiffness)


def align_step(T: float, h: float) -> Tuple[float, int]:
    """Shrink h so that T is a whole number of steps."""
    if not (T > 0 and h > 0):
        raise ValueError(f"Horizon and step must be positive, got T={T}, h={h}")
    steps = max(1, int(math.ceil(T / h - 1e-9)))
    return T / steps, steps


def sampling_stride(steps: int, decimation: Optional[int] = None, max_samples: int = 2000) -> int:
    """Number of integration steps between stored samples."""
    if decimation:
        return max(1, int(decimation))
    return max(1, steps // max(1, int(max_samples)))


class BaseIntegrator(ABC):
    """
    Fixed-step integrator producing decimated samples.
    """

    method = "base"

    def __init__(self, h: float):
        if not h > 0:
            raise ValueError(f"Step size must be positive, got {h}")
        self.h = float(h)
        self.name = self.__class__.__name__

    @abstractmethod
    def advance(self, z: np.ndarray, t: float, steps: int) -> np.ndarray:
        """
        Take `steps` steps of size h from state z at time t.
        """

    def integrate(self, z0: np.ndarray, steps: int, stride: int = 1) -> Tuple[np.ndarray, np.ndarray]:
        """
        Integrate `steps` steps, storing every `stride`-th state plus the last.

        Returns:
            (times, states) with states of shape (samples, dim)

        Raises:
            SimulationDivergedError: when the state becomes non-finite; carries
                the samples up to the last finite state, which is appended even
                when it falls between strides
        """
        z = np.asarray(z0, dtype=float).copy()
        times: List[float] = [0.0]
        states: List[np.ndarray] = [z.copy()]
        done = 0
        with np.errstate(over="ignore", invalid="ignore"):
            while done < steps:
                chunk = min(stride, steps - done)
                advanced = self.advance(z, done * self.h, chunk)
                finite_steps = chunk
                if not np.all(np.isfinite(advanced)):
                    advanced, finite_steps = self._last_finite(z, done, chunk)
                if finite_steps < chunk:
                    z = advanced
                    if finite_steps:
                        times.append((done + finite_steps) * self.h)
                        states.append(z.copy())
                    t = (done + finite_steps + 1) * self.h
                    logger.error(f"{self.name}: non-finite state at t={t:.6g}, aborting")
                    raise SimulationDivergedError(
                        f"State became non-finite at t={t:.6g}",
                        time=t,
                        trajectory=(np.array(times), np.array(states)),
                    )
                z = advanced
                done += chunk
                times.append(done * self.h)
                states.append(z.copy())
        return np.array(times), np.array(states)

    def _last_finite(self, z: np.ndarray, done: int, chunk: int) -> Tuple[np.ndarray, int]:
        """Re-step a failed chunk one step at a time; returns (last finite state, finite steps taken)."""
        for k in range(chunk):
            stepped = self.advance(z, (done + k) * self.h, 1)
            if not np.all(np.isfinite(stepped)):
                return z, k
            z = stepped
        return z, chunk

    def get_metadata(self) -> Dict[str, object]:
        return {"integrator": self.name, "method": self.method, "h": self.h}


class Rk4Integrator(BaseIntegrator):
    """Classical RK4 on an arbitrary vector field f(t, z)."""

    method = "rk4"

    def __init__(self, field: VectorField, h: float):
        super().__init__(h)
        self.field = field

    def advance(self, z: np.ndarray, t: float, steps: int) -> np.ndarray:
        for k in range(steps):
            z = rk4_step(self.field, t + k * self.h, z, self.h)
        return z


class AffineRk4Integrator(BaseIntegrator):
    """
    RK4 for z' = K z + g. One step is z -> Phi z + psi with E = hK,

        Phi = I + E + E^2/2 + E^3/6 + E^4/24,
        psi = h (I + E/2 + E^2/6 + E^3/24) g,

    so k steps are (Phi^k, sum_j Phi^j psi), built by repeated squaring once
    per stride.
    """

    method = "rk4"

    def __init__(self, K: np.ndarray, g: Optional[np.ndarray], h: float):
        super().__init__(h)
        K = np.asarray(K, dtype=float)
        size = K.shape[0]
        g = np.zeros(size) if g is None else np.asarray(g, dtype=float)
        identity = np.eye(size)
        E = self.h * K
        E2 = E @ E
        E3 = E2 @ E
        self.phi = identity + E + E2 / 2.0 + E3 / 6.0 + E3 @ E / 24.0
        self.psi = self.h * ((identity + E / 2.0 + E2 / 6.0 + E3 / 24.0) @ g)
        self._powers: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}

    def composed(self, steps: int) -> Tuple[np.ndarray, np.ndarray]:
        if steps not in self._powers:
            size = self.phi.shape[0]
            phi_k, psi_k = np.eye(size), np.zeros(size)
            base_phi, base_psi = self.phi, self.psi
            remaining = steps
            while remaining:
                if remaining & 1:
                    phi_k, psi_k = base_phi @ phi_k, base_phi @ psi_k + base_psi
                base_phi, base_psi = base_phi @ base_phi, base_phi @ base_psi + base_psi
                remaining >>= 1
            self._powers[steps] = (phi_k, psi_k)
        return self._powers[steps]

    def advance(self, z: np.ndarray, t: float, steps: int) -> np.ndarray:
        phi_k, psi_k = self.composed(steps)
        return phi_k @ z + psi_k


class IntegratingFactorRk4(BaseIntegrator):
    """
    Lawson (integrating-factor) RK4 for z' = K z + N(z).

    With E = exp(hK/2):
        a = N(u), b = N(E (u + h/2 a)), c = N(E u + h/2 b), d = N(E^2 u + h E c)
        u+ = E^2 u + h/6 (E^2 a + 2 E (b + c) + d)
    """

    method = "if-rk4"

    def __init__(self, K: np.ndarray, remainder: Callable[[np.ndarray], np.ndarray], h: float):
        super().__init__(h)
        self.half = scipy.linalg.expm(0.5 * self.h * np.asarray(K, dtype=float))
        self.remainder = remainder

    def advance(self, z: np.ndarray, t: float, steps: int) -> np.ndarray:
        E, N, h = self.half, self.remainder, self.h
        for _ in range(steps):
            a = N(z)
            Ez = E @ z
            b = N(E @ (z + 0.5 * h * a))
            c = N(Ez + 0.5 * h * b)
            d = N(E @ (Ez + h * c))
            z = E @ (Ez + (h / 6.0) * (E @ a + 2.0 * (b + c))) + (h / 6.0) * d
        return z
