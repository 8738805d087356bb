"""
Operator Constants module for the Heavy Anchor toolkit.

Computes the hypomonotonicity modulus mu, Lipschitz constant L and inverse
Lipschitz modulus R (||x - y|| <= R ||Tx - Ty||) of a pseudo-gradient, exactly for
affine maps and by sampling for everything else.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
import logging
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from src.games.quadratic_game import QuadraticGame
from src.utils.errors import SamplingError
from src.utils.seeding import DEFAULT_SEED, spawn_rngs

logger = logging.getLogger(__name__)

Operator = Callable[[np.ndarray], np.ndarray]

ZERO_TOL = 1e-12


@dataclass(frozen=True)
class OperatorConstants:
    """
    Moduli of an operator T.

    Attributes:
        mu_hypo: mu >= 0 with <Tx - Ty, x - y> >= -mu ||x - y||^2
        lipschitz: L with ||Tx - Ty|| <= L ||x - y||
        inv_lipschitz: R with ||x - y|| <= R ||Tx - Ty|| (None when T is not
            inverse Lipschitz)
        provenance: exact | sampled | declared
        strong_monotone: strong monotonicity modulus (0 when not strongly monotone)
        cocoercive: cocoercivity modulus C, when known
        samples: number of sampled pairs/points behind an estimate
        seed: seed used for sampling
        method: sampling method (pairs | jacobian)
    """

    mu_hypo: float
    lipschitz: float
    inv_lipschitz: Optional[float]
    provenance: str
    strong_monotone: float = 0.0
    cocoercive: Optional[float] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    method: Optional[str] = None

    @property
    def mu(self) -> float:
        return self.mu_hypo

    @property
    def L(self) -> float:
        return self.lipschitz

    @property
    def R(self) -> Optional[float]:
        return self.inv_lipschitz

    def to_dict(self) -> Dict[str, Any]:
        report = {
            "mu": self.mu_hypo,
            "L": self.lipschitz,
            "R": self.inv_lipschitz,
            "provenance": self.provenance,
            "samples": self.samples,
            "seed": self.seed,
        }
        extras = {k: v for k, v in asdict(self).items()
                  if k in ("strong_monotone", "cocoercive", "method") and v is not None}
        report.update(extras)
        return report

    @classmethod
    def declared(cls, values: Dict[str, float]) -> "OperatorConstants":
        """Constants supplied by the user or published with a fixture."""
        return cls(
            mu_hypo=float(values.get("mu", 0.0)),
            lipschitz=float(values["L"]),
            inv_lipschitz=None if values.get("R") is None else float(values["R"]),
            provenance="declared",
        )


def _clean(value: float) -> float:
    return 0.0 if abs(value) < ZERO_TOL else float(value)


def matrix_constants(A: np.ndarray, provenance: str = "exact") -> OperatorConstants:
    """
    Constants of the linear map x -> A x from its symmetric spectrum and SVD.
    """
    A = np.asarray(A, dtype=float)
    sym = 0.5 * (A + A.T)
    lam_min = _clean(float(scipy.linalg.eigvalsh(sym)[0]))
    singular = scipy.linalg.svdvals(A)
    sigma_max = float(singular[0])
    sigma_min = float(singular[-1])

    inv_lipschitz = None
    if sigma_min > ZERO_TOL * max(1.0, sigma_max):
        inv_lipschitz = 1.0 / sigma_min
    else:
        logger.warning("Matrix is singular: inverse Lipschitz modulus undefined")

    cocoercive = None
    if lam_min >= 0.0 and inv_lipschitz is not None:
        # largest C with sym(A) - C A^T A >= 0
        cocoercive = _clean(float(scipy.linalg.eigh(sym, A.T @ A, eigvals_only=True)[0]))

    return OperatorConstants(
        mu_hypo=max(0.0, -lam_min),
        lipschitz=sigma_max,
        inv_lipschitz=inv_lipschitz,
        provenance=provenance,
        strong_monotone=max(0.0, lam_min),
        cocoercive=cocoercive,
    )


def exact_quadratic_constants(qg: QuadraticGame) -> OperatorConstants:
    """
    Exact (mu, L, R) of F(x) = A x + b: mu = max(0, -lambda_min(sym A)),
    L = sigma_max(A), R = 1 / sigma_min(A) (None when A is singular).
    """
    constants = matrix_constants(qg.A)
    logger.debug(f"Exact constants for {qg.name}: {constants.to_dict()}")
    return constants


class BoxSampler:
    """
    Uniform sampler over the box [low, high]^dim.
    """

    def __init__(self, dim: int, box: Sequence[float] = (-10.0, 10.0)):
        self.dim = int(dim)
        self.low, self.high = float(box[0]), float(box[1])

    def __call__(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=self.dim)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=(count, self.dim))


def _pair_chunk(op: Operator, sampler: Callable, rng: np.random.Generator, count: int) -> Tuple[float, float, float, int]:
    mu = -np.inf
    lip = 0.0
    inv = 0.0
    used = 0
    for _ in range(count):
        x = sampler(rng)
        y = sampler(rng)
        dx = x - y
        dx_norm = float(np.linalg.norm(dx))
        if dx_norm == 0.0:
            continue
        dT = np.asarray(op(x), dtype=float) - np.asarray(op(y), dtype=float)
        dT_norm = float(np.linalg.norm(dT))
        used += 1
        mu = max(mu, -float(dT @ dx) / dx_norm ** 2)
        lip = max(lip, dT_norm / dx_norm)
        inv = np.inf if dT_norm == 0.0 else max(inv, dx_norm / dT_norm)
    return mu, lip, inv, used


def numerical_jacobian(op: Operator, x: np.ndarray, step: float = 1e-6) -> np.ndarray:
    """Central finite-difference Jacobian of `op` at x."""
    x = np.asarray(x, dtype=float)
    columns = []
    for k in range(x.size):
        h = step * max(1.0, abs(x[k]))
        e = np.zeros_like(x)
        e[k] = h
        columns.append((np.asarray(op(x + e), dtype=float) - np.asarray(op(x - e), dtype=float)) / (2.0 * h))
    return np.column_stack(columns)


def _jacobian_chunk(op: Operator, sampler: Callable, rng: np.random.Generator, count: int) -> Tuple[float, float, float, int]:
    mu = -np.inf
    lip = 0.0
    inv = 0.0
    for _ in range(count):
        J = numerical_jacobian(op, sampler(rng))
        lam_min = float(scipy.linalg.eigvalsh(0.5 * (J + J.T))[0])
        singular = scipy.linalg.svdvals(J)
        mu = max(mu, -lam_min)
        lip = max(lip, float(singular[0]))
        inv = np.inf if singular[-1] == 0.0 else max(inv, 1.0 / float(singular[-1]))
    return mu, lip, inv, count


def sampled_constants(op: Operator, sampler: Callable, pairs: int = 100000, seed: Optional[int] = None,
                      method: str = "pairs", workers: int = 1) -> OperatorConstants:
    """
    Estimate (mu, L, R) of a nonlinear operator by sampling.

    With method="pairs" the estimates are the largest difference quotients over
    random pairs; with method="jacobian", `pairs` points are drawn and the
    moduli of the symmetric part and singular values of the finite-difference
    Jacobian are maximized. Either way the results are lower bounds on the true
    moduli over the sampled region.

    Args:
        op: Map R^n -> R^n
        sampler: Callable drawing one point from a Generator (e.g. BoxSampler)
        pairs: Number of pairs (or points for the Jacobian method)
        seed: Seed of the sampling streams
        method: "pairs" or "jacobian"
        workers: Number of threads evaluating independent chunks

    Raises:
        SamplingError: if every sampled pair was coincident
    """
    seed = DEFAULT_SEED if seed is None else seed
    chunk = _pair_chunk if method == "pairs" else _jacobian_chunk
    workers = max(1, int(workers))
    counts = [pairs // workers + (1 if k < pairs % workers else 0) for k in range(workers)]
    rngs = spawn_rngs(seed, workers)

    logger.info(f"Sampling operator constants: method={method}, samples={pairs}, workers={workers}, seed={seed}")
    if workers == 1:
        results: List[Tuple[float, float, float, int]] = [chunk(op, sampler, rngs[0], counts[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda args: chunk(op, sampler, *args), zip(rngs, counts)))

    used = sum(r[3] for r in results)
    if used == 0:
        logger.error("All sampled pairs were coincident; no constants estimated")
        raise SamplingError("All sampled pairs were coincident; no constants estimated")

    mu = max(r[0] for r in results)
    lip = max(r[1] for r in results)
    inv = max(r[2] for r in results)
    constants = OperatorConstants(
        mu_hypo=max(0.0, _clean(mu)),
        lipschitz=lip,
        inv_lipschitz=None if not np.isfinite(inv) else inv,
        provenance="sampled",
        samples=used,
        seed=seed,
        method=method,
    )
    logger.info(f"Sampled constants: mu={constants.mu_hypo:.4g}, L={constants.lipschitz:.4g}, R={constants.inv_lipschitz}")
    return constants
