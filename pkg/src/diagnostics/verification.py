"""
Property suites run by `verify` and by the test-suite.

Each check draws seeded random instances, counts failures the way a
validation pass does and returns a PropertyResult.
"""
from dataclasses import asdict, dataclass, field
import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.optimize

from src.analysis.operator_constants import matrix_constants
from src.analysis.resolvent import feasibility_window, resolvent_constants
from src.diagnostics.convergence import check_nonincreasing
from src.dynamics.base_dynamics import BaseDynamics
from src.synthesis.quadratic import (
    CASE_UNSTABLE,
    alpha_bound,
    beta_interval,
    build_M,
    classify_eigenvalue,
    eigenvalue_map,
)
from src.utils.seeding import make_rng

logger = logging.getLogger(__name__)

EIGEN_TOL = 1e-9
BOUND_SLACK = 1e-9


@dataclass
class PropertyResult:
    name: str
    checks: int = 0
    failures: int = 0
    worst: float = 0.0
    skipped: int = 0
    detail: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0 and self.checks > 0

    @property
    def failure_rate(self) -> float:
        return self.failures / self.checks if self.checks else 0.0

    def record(self, ok: bool, excess: float = 0.0) -> None:
        self.checks += 1
        if not ok:
            self.failures += 1
        self.worst = max(self.worst, float(excess))

    def to_dict(self) -> Dict[str, Any]:
        report = asdict(self)
        report.update({"passed": self.passed, "failure_rate": self.failure_rate})
        return report

    def log(self) -> None:
        level = logging.INFO if self.passed else logging.WARNING
        logger.log(level, f"{self.name}: {self.failures} of {self.checks} checks failed "
                          f"({self.failure_rate * 100:.1f}%), worst excess {self.worst:.3e}")


def matched_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Largest distance between two multisets of complex numbers under the best pairing."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.size != b.size:
        return np.inf
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    return float(cost[rows, cols].max()) if a.size else 0.0


def check_eigenvalue_map(trials: int = 100, n: int = 4, seed: Optional[int] = None,
                         tol: float = EIGEN_TOL) -> PropertyResult:
    """eig(M) equals the union of eigenvalue_map(rho) over eig(A) for random (A, alpha, beta)."""
    rng = make_rng(seed, stream=1)
    result = PropertyResult("eigenvalue_map")
    for _ in range(trials):
        A = rng.normal(size=(n, n))
        alpha, beta = rng.uniform(0.05, 3.0, size=2)
        mapped = [root for rho in scipy.linalg.eigvals(A) for root in eigenvalue_map(complex(rho), alpha, beta)]
        direct = scipy.linalg.eigvals(build_M(A, alpha, beta))
        distance = matched_distance(mapped, direct)
        scale = 1.0 + float(np.max(np.abs(direct)))
        result.record(distance <= tol * scale, distance / scale)
    result.log()
    return result


def block_abscissa(rho: complex, alpha: float, beta: float) -> float:
    """Spectral abscissa of the 2x2 block [[-rho - beta, beta], [alpha, -alpha]]."""
    block = np.array([[-rho - beta, beta], [alpha, -alpha]], dtype=complex)
    return float(np.max(np.linalg.eigvals(block).real))


def check_stability_intervals(trials: int = 1000, seed: Optional[int] = None,
                              margin: float = EIGEN_TOL) -> PropertyResult:
    """
    For random case-iii eigenvalues, membership of (alpha, beta) in the
    stability intervals predicts a Hurwitz 2x2 block. Tuples whose abscissa
    lies within `margin` of zero are skipped.
    """
    rng = make_rng(seed, stream=2)
    result = PropertyResult("stability_intervals")
    for _ in range(trials):
        rho = complex(-rng.uniform(0.05, 3.0), rng.uniform(-5.0, 5.0))
        if classify_eigenvalue(rho) != CASE_UNSTABLE:
            continue
        interval = beta_interval(rho)
        beta = rng.uniform(0.0, 1.5 * interval.high + 1.0)
        bound = alpha_bound(rho, beta)
        alpha = rng.uniform(1e-3, max(2.0 * bound, 1.0))
        predicted = interval.contains(beta) and 0.0 < alpha < bound
        abscissa = block_abscissa(rho, alpha, beta)
        if abs(abscissa) <= margin:
            result.skipped += 1
            continue
        actual = abscissa < 0.0
        result.record(predicted == actual, abs(abscissa) if predicted != actual else 0.0)
    result.log()
    return result


def _feasible_linear_operator(rng: np.random.Generator, n: int, attempts: int = 200) -> np.ndarray:
    for _ in range(attempts):
        basis, _ = np.linalg.qr(rng.normal(size=(n, n)))
        symmetric = basis @ np.diag(rng.uniform(-0.5, 1.5, size=n)) @ basis.T
        skew = rng.normal(scale=1.5, size=(n, n))
        A = symmetric + 0.5 * (skew - skew.T)
        window = feasibility_window(matrix_constants(A))
        if window is not None and window[0] < window[1]:
            return A
    raise RuntimeError(f"No operator with a nonempty resolvent window after {attempts} draws")


def check_resolvent_bounds(configs: int = 10, pairs: int = 10000, n: int = 3, seed: Optional[int] = None,
                           slack: float = BOUND_SLACK) -> PropertyResult:
    """
    For random linear T and feasible lambda, sampled pairs satisfy
    |J x - J y| <= L_J |x - y| and <x - y, J x - J y> <= kappa_J |x - y|^2.
    """
    rng = make_rng(seed, stream=3)
    result = PropertyResult("resolvent_bounds")
    for _ in range(configs):
        A = _feasible_linear_operator(rng, n)
        constants = matrix_constants(A)
        lower, upper = feasibility_window(constants)
        low = lower if lower > 0.0 else min(0.05, 0.5 * upper)
        lam = rng.uniform(low, min(upper, low + 2.0))
        bounds = resolvent_constants(constants, lam)
        if not bounds.feasible:
            result.skipped += 1
            continue
        differences = rng.uniform(-10.0, 10.0, size=(pairs, n)) - rng.uniform(-10.0, 10.0, size=(pairs, n))
        images = np.linalg.solve(np.eye(n) + lam * A, differences.T).T
        sq = np.einsum("ij,ij->i", differences, differences)
        lipschitz_excess = np.linalg.norm(images, axis=1) - bounds.L_J * np.sqrt(sq)
        inner_excess = np.einsum("ij,ij->i", differences, images) - bounds.kappa_J * sq
        for excess in (lipschitz_excess, inner_excess):
            worst = float(excess.max())
            result.record(worst <= slack, max(worst, 0.0))
        result.detail.setdefault("lambdas", []).append(float(lam))
    result.log()
    return result


def check_equilibrium_invariance(dynamics: BaseDynamics, equilibrium: np.ndarray, tol: float = EIGEN_TOL) -> PropertyResult:
    """The vector field vanishes at the equilibrium state (x, r) = (x*, x*), lifted when distributed."""
    x_star = np.asarray(equilibrium, dtype=float).reshape(-1)
    copies = dynamics.state_size // x_star.size
    state = np.tile(x_star, copies)
    velocity = dynamics.vector_field(0.0, state)
    size = float(np.linalg.norm(velocity))
    result = PropertyResult("equilibrium_invariance")
    result.record(size <= tol * (1.0 + float(np.linalg.norm(state))), size)
    result.log()
    return result


def check_lyapunov_monotone(values: Sequence[float], relative: float = 1e-8) -> PropertyResult:
    ok, worst, index = check_nonincreasing(values, relative=relative)
    result = PropertyResult("lyapunov_nonincreasing", detail={"index": index, "samples": len(values)})
    result.record(ok, worst)
    result.log()
    return result


def run_property_suites(seed: Optional[int] = None, trials: Optional[Dict[str, int]] = None) -> List[PropertyResult]:
    """Run the scenario-independent suites with their default sizes unless `trials` overrides them."""
    trials = trials or {}
    return [
        check_eigenvalue_map(trials=trials.get("eigenvalue_map", 100), seed=seed),
        check_stability_intervals(trials=trials.get("stability_intervals", 1000), seed=seed),
        check_resolvent_bounds(configs=trials.get("resolvent_configs", 10),
                               pairs=trials.get("resolvent_pairs", 10000), seed=seed),
    ]
