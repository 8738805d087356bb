"""
Test suite for parameter synthesis and the reference parameter table.
"""
import math
import os
import sys
import unittest

import numpy as np
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

# Add parent directory to path for imports
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.analysis import OperatorConstants, exact_quadratic_constants
from src.games import build_benchmark
from src.games.benchmarks import SINE_CONSTANTS
from src.graphs import CommGraph
from src.synthesis import (
    build_M,
    compare_rows,
    compute_rows,
    eigenvalue_map,
    quadratic_stability_intervals,
    reference_table,
    spectral_abscissa,
    synth_full_hypomonotone,
    synth_full_monotone,
    synth_full_quadratic,
    synth_partial_general,
    synth_partial_monotone,
    synth_quadratic_partial,
)
from src.synthesis.certificate import DIST_GENERAL, DIST_QUAD, Interval
from src.synthesis.quadratic import (
    CASE_STABLE,
    CASE_UNSTABLE,
    CASE_ZERO,
    alpha_bound,
    beta_interval,
    classify_eigenvalue,
)
from src.utils.errors import DisconnectedGraphError, InfeasibleParametersError


class TestFullInformationSynthesis(unittest.TestCase):
    """Test case for full-information certificates."""

    def test_monotone_accepts_positive_parameters(self):
        certificate = synth_full_monotone(0.3, 7.0)
        self.assertTrue(certificate.feasible)
        self.assertEqual((certificate.alpha, certificate.beta), (0.3, 7.0))
        certificate.check_parameters(alpha=100.0, beta=1e-3)

    def test_monotone_rejects_nonpositive(self):
        with self.assertRaises(InfeasibleParametersError):
            synth_full_monotone(alpha=0.0)
        with self.assertRaises(InfeasibleParametersError):
            synth_full_monotone(beta=-1.0)

    def test_monotone_rejects_hypomonotone_operator(self):
        certificate = synth_full_monotone(constants=exact_quadratic_constants(build_benchmark("g1")))
        self.assertFalse(certificate.feasible)
        with self.assertRaises(InfeasibleParametersError):
            certificate.require_feasible()

    def test_hypomonotone_pairwise_constants(self):
        constants = OperatorConstants(mu_hypo=1.0, lipschitz=math.sqrt(26.0), inv_lipschitz=1.0 / math.sqrt(26.0),
                                      provenance="exact")
        certificate = synth_full_hypomonotone(constants, d=0.5)
        self.assertTrue(certificate.feasible)
        self.assertAlmostEqual(certificate.beta_range.low, 1.0)
        self.assertAlmostEqual(certificate.beta_range.high, 26.0)
        self.assertAlmostEqual(certificate.beta, 3.5)
        self.assertAlmostEqual(certificate.alpha_range.high, 1.456, places=3)
        self.assertAlmostEqual(certificate.alpha, certificate.alpha_range.high / 2.0)
        self.assertGreater(certificate.aux["det_Phi"], 0.0)

    def test_hypomonotone_window_empty(self):
        constants = OperatorConstants(mu_hypo=1.0, lipschitz=1.0, inv_lipschitz=1.0, provenance="declared")
        certificate = synth_full_hypomonotone(constants)
        self.assertFalse(certificate.feasible)
        self.assertIn("mu R^2", certificate.reason)

    def test_hypomonotone_requested_beta_checked(self):
        constants = OperatorConstants(mu_hypo=1.0, lipschitz=5.0, inv_lipschitz=0.2, provenance="declared")
        with self.assertRaises(InfeasibleParametersError):
            synth_full_hypomonotone(constants, beta=0.5)
        with self.assertRaises(ValueError):
            synth_full_hypomonotone(constants, d=1.0)

    def test_quadratic_harmonic(self):
        """Purely imaginary eigenvalues leave every positive pair stable."""
        certificate = synth_full_quadratic(build_benchmark("harmonic"))
        self.assertTrue(certificate.feasible)
        self.assertEqual(certificate.beta_range.high, math.inf)
        self.assertLess(certificate.aux["spectral_abscissa"], 0.0)
        P = certificate.aux["P"]
        M = build_M(build_benchmark("harmonic").A, certificate.alpha, certificate.beta)
        np.testing.assert_allclose(P @ M + M.T @ P, -np.eye(4), atol=1e-9)

    def test_quadratic_real_negative_eigenvalue(self):
        certificate = synth_full_quadratic(np.array([[-1.0]]))
        self.assertFalse(certificate.feasible)
        self.assertAlmostEqual(certificate.blocking, -1.0)


class TestStabilityIntervals(unittest.TestCase):
    """Test case for eigenvalue classification and the stability intervals."""

    def test_eigenvalue_map_roots(self):
        rho, alpha, beta = complex(-0.3, 1.2), 0.4, 0.9
        for s in eigenvalue_map(rho, alpha, beta):
            self.assertLess(abs(s * s + (alpha + beta + rho) * s + alpha * rho), 1e-12)

    def test_g1_scaled_intervals(self):
        report = quadratic_stability_intervals(build_benchmark("g1"), scale=0.1)
        self.assertTrue(report.feasible)
        self.assertEqual(len(report.unstable_indices), 10)
        self.assertAlmostEqual(report.beta_range.low, 0.1)
        self.assertAlmostEqual(report.beta_range.high, 2.6)
        self.assertAlmostEqual(report.beta, 0.35)
        self.assertAlmostEqual(report.alpha_range.high, -0.25 + math.sqrt(0.625))

    def test_g2_scaled_intervals(self):
        report = quadratic_stability_intervals(build_benchmark("g2"), scale=0.1)
        self.assertAlmostEqual(report.beta_range.high, 13.0 / 45.0)
        self.assertAlmostEqual(report.beta, 107.0 / 900.0)
        self.assertAlmostEqual(report.alpha_range.high, 0.065, delta=0.001)

    def test_classification(self):
        self.assertEqual(classify_eigenvalue(0j), CASE_ZERO)
        self.assertEqual(classify_eigenvalue(complex(0.0, 2.0)), CASE_STABLE)
        self.assertEqual(classify_eigenvalue(complex(0.5, -1.0)), CASE_STABLE)
        self.assertEqual(classify_eigenvalue(complex(-0.5, 1.0)), CASE_UNSTABLE)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(min_value=0.05, max_value=2.0), st.floats(min_value=0.5, max_value=5.0),
           st.floats(min_value=0.02, max_value=0.98), st.floats(min_value=0.02, max_value=0.98))
    def test_interior_points_are_hurwitz(self, neg_real, imag, beta_weight, alpha_weight):
        rho = complex(-neg_real, imag)
        interval = beta_interval(rho)
        beta = interval.low + beta_weight * (interval.high - interval.low)
        alpha = alpha_weight * alpha_bound(rho, beta)
        block = np.array([[-rho - beta, beta], [alpha, -alpha]], dtype=complex)
        self.assertLess(np.max(np.linalg.eigvals(block).real), 0.0)

    def test_alpha_bound_outside_interval(self):
        self.assertEqual(alpha_bound(complex(-0.5, 1.0), 0.2), 0.0)

    def test_interval_pick(self):
        self.assertAlmostEqual(Interval(0.1, 2.6).pick(0.9), 0.35)
        self.assertEqual(Interval(0.0, math.inf).pick(), 1.0)
        self.assertTrue(Interval(1.0, 1.0).empty)


class TestDistributedSynthesis(unittest.TestCase):
    """Test case for partial-information certificates."""

    def setUp(self):
        self.ring = CommGraph.ring(10)

    def test_sine_general_certificate(self):
        certificate = synth_partial_general(OperatorConstants.declared(SINE_CONSTANTS), 10, 0.5, self.ring)
        self.assertTrue(certificate.feasible)
        self.assertAlmostEqual(certificate.beta_range.low, 0.1)
        self.assertAlmostEqual(certificate.beta_range.high, 1.6)
        self.assertAlmostEqual(certificate.beta, 0.25)
        self.assertAlmostEqual(certificate.alpha, 0.0478, delta=0.0005)
        self.assertAlmostEqual(certificate.c_min, 3417.0, delta=0.01 * 3417.0)
        self.assertAlmostEqual(certificate.c, 1.01 * certificate.c_min)

    def test_general_infeasible_window(self):
        certificate = synth_partial_general(exact_quadratic_constants(build_benchmark("g2")), 10, 0.5, self.ring)
        self.assertFalse(certificate.feasible)
        self.assertIn("mu N R^2", certificate.reason)

    def test_general_disconnected_graph(self):
        W = np.zeros((10, 10))
        W[0, 1] = W[1, 0] = 1.0
        with self.assertRaises(DisconnectedGraphError):
            synth_partial_general(OperatorConstants.declared(SINE_CONSTANTS), 10, 0.5, CommGraph(W))

    def test_c_below_minimum_rejected(self):
        certificate = synth_partial_general(OperatorConstants.declared(SINE_CONSTANTS), 10, 0.5, self.ring)
        with self.assertRaises(InfeasibleParametersError):
            certificate.check_parameters(c=0.5 * certificate.c_min)
        certificate.check_parameters(c=2.0 * certificate.c_min)

    def test_partial_monotone(self):
        certificate = synth_partial_monotone(CommGraph.ring(3), c=4.0)
        self.assertEqual(certificate.theorem, "dist-monotone")
        self.assertEqual((certificate.alpha, certificate.beta, certificate.c), (1.0, 1.0, 4.0))

    def test_quadratic_partial_g1(self):
        certificate = synth_quadratic_partial(build_benchmark("g1"), 10, self.ring)
        self.assertTrue(certificate.feasible)
        self.assertAlmostEqual(certificate.alpha, 0.270, delta=0.001)
        self.assertAlmostEqual(certificate.aux["p"], 13.28, delta=0.05)
        self.assertAlmostEqual(certificate.c_min, 1517.0, delta=0.01 * 1517.0)
        self.assertLess(certificate.aux["lyapunov_residual"], 1e-8)
        self.assertLess(spectral_abscissa(build_M(build_benchmark("g1").A / 10, certificate.alpha,
                                                  certificate.beta)), 0.0)

    def test_quadratic_partial_equal_gains_bound_convention(self):
        # (game, alpha = beta, measured p)
        cases = [("harmonic", 0.05, 12.4), ("harmonic", 1.0, 16.7), ("g1", 0.2, 14.0), ("g1", 0.5, 49.6),
                 ("g3", 0.3, 15.6)]
        for name, gain, measured_p in cases:
            with self.subTest(game=name, gain=gain):
                game = build_benchmark(name)
                N = game.n_agents
                graph = CommGraph.complete(N) if N == 2 else self.ring
                certificate = synth_quadratic_partial(game, N, graph, alpha=gain, beta=gain)
                aux = certificate.aux

                M = build_M(game.A / N, gain, gain)
                P = scipy.linalg.solve_continuous_lyapunov(M.T, -np.eye(M.shape[0]))
                np.testing.assert_allclose(aux["P"], 0.5 * (P + P.T), rtol=1e-6, atol=1e-9)
                self.assertAlmostEqual(aux["p"], np.linalg.norm(P, 2), delta=1e-6 * aux["p"])
                self.assertAlmostEqual(aux["p"], measured_p, delta=0.1)

                self.assertAlmostEqual(aux["L_A"], np.linalg.norm(game.extended_matrix(), 2))
                self.assertAlmostEqual(aux["L_A"], np.linalg.norm(game.A, 2))
                self.assertAlmostEqual(aux["p_bound"], N / (2.0 * aux["L_A"] + 4.0 * gain * N))

                self.assertAlmostEqual(np.trace(game.A), 0.0)
                self.assertGreaterEqual(aux["p"], aux["p_lower_bound"] * (1.0 - 1e-9))
                self.assertGreater(aux["p_lower_bound"], aux["p_bound"])
                self.assertFalse(aux["p_bound_satisfied"])

    def test_quadratic_partial_harmonic_bound_values(self):
        certificate = synth_quadratic_partial(build_benchmark("harmonic"), 2, CommGraph.complete(2),
                                              alpha=1.0, beta=1.0)
        self.assertAlmostEqual(certificate.aux["L_A"], 1.0)
        self.assertAlmostEqual(certificate.aux["p_bound"], 0.2)
        # slowest mode of build_M(A/2, 1, 1) has real part (1.936... - 2)/2
        slow = (math.sqrt(3.75) - 2.0) / 2.0
        self.assertAlmostEqual(certificate.aux["spectral_abscissa"], slow, places=9)
        self.assertAlmostEqual(certificate.aux["p_lower_bound"], 1.0 / (2.0 * abs(slow)), places=6)
    def test_quadratic_partial_alpha_out_of_range(self):
        with self.assertRaises(InfeasibleParametersError):
            synth_quadratic_partial(build_benchmark("g1"), 10, self.ring, alpha=5.0)


class TestReferenceTable(unittest.TestCase):
    """Test case for reproducing the reference parameter table."""

    def test_every_cell_within_tolerance(self):
        diffs = compare_rows(compute_rows())
        failures = [diff.to_dict() for diff in diffs if not diff.ok]
        self.assertEqual(failures, [])

    def test_rows_cover_both_distributed_results(self):
        theorems = {(row.game, row.theorem) for row in reference_table()}
        for game in ("g1", "g2", "g3"):
            self.assertIn((game, DIST_QUAD), theorems)
            self.assertIn((game, DIST_GENERAL), theorems)

    def test_perturbed_cell_is_reported(self):
        computed = compute_rows()
        g1 = computed[0].__class__(**{**computed[0].to_dict(), "c_min": 2.0 * computed[0].c_min})
        diffs = compare_rows([g1] + computed[1:])
        failed = [(diff.game, diff.field) for diff in diffs if not diff.ok]
        self.assertEqual(failed, [(computed[0].game, "c_min")])

    def test_missing_row_is_reported(self):
        diffs = compare_rows([])
        self.assertTrue(all(not diff.ok for diff in diffs))
        self.assertEqual(len(diffs), len(reference_table()))


if __name__ == "__main__":
    unittest.main()
