"""
Test suite for operator constants, resolvent bounds and the property lattice.
"""
import math
import os
import sys
import unittest

import numpy as np

# Add parent directory to path for imports
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.analysis import (
    BoxSampler,
    OperatorConstants,
    apply_rule,
    derive_constants,
    eval_resolvent,
    exact_quadratic_constants,
    matrix_constants,
    resolvent_constants,
    sampled_constants,
)
from src.analysis.resolvent import feasibility_window
from src.games import QuadraticGame, build_benchmark, eval_pseudo_gradient
from src.games.benchmarks import SINE_CONSTANTS
from src.utils.errors import DerivationError, SamplingError
from src.utils.seeding import make_rng


class TestOperatorConstants(unittest.TestCase):
    """Test case for exact and sampled operator constants."""

    def test_harmonic_exact_constants(self):
        constants = exact_quadratic_constants(build_benchmark("harmonic"))
        self.assertEqual(constants.mu, 0.0)
        self.assertAlmostEqual(constants.L, 1.0)
        self.assertAlmostEqual(constants.R, 1.0)
        self.assertEqual(constants.provenance, "exact")

    def test_hypomonotone_matrix(self):
        constants = matrix_constants(np.diag([2.0, -1.0]))
        self.assertAlmostEqual(constants.mu, 1.0)
        self.assertAlmostEqual(constants.L, 2.0)
        self.assertAlmostEqual(constants.R, 1.0)
        self.assertIsNone(constants.cocoercive)

    def test_pairwise_game_constants(self):
        """Opposite weights cancel the symmetric part of B, leaving its skew part."""
        constants = exact_quadratic_constants(build_benchmark("g1"))
        self.assertAlmostEqual(constants.mu, 1.0, places=10)
        self.assertAlmostEqual(constants.L, math.sqrt(26.0), places=10)
        self.assertAlmostEqual(constants.R, 1.0 / math.sqrt(26.0), places=10)

    def test_strongly_monotone_cocoercivity(self):
        constants = matrix_constants(np.diag([2.0, 4.0]))
        self.assertAlmostEqual(constants.strong_monotone, 2.0)
        # largest C with diag(2, 4) >= C diag(4, 16)
        self.assertAlmostEqual(constants.cocoercive, 0.25)

    def test_strongly_monotone_example_constants(self):
        constants = exact_quadratic_constants(QuadraticGame([[2.0, 1.0], [-1.0, 3.0]]))
        L = math.sqrt((15.0 + math.sqrt(29.0)) / 2.0)
        self.assertEqual(constants.mu, 0.0)
        self.assertAlmostEqual(constants.strong_monotone, 2.0)
        self.assertAlmostEqual(constants.L, L, places=12)
        self.assertAlmostEqual(constants.R, 1.0 / math.sqrt((15.0 - math.sqrt(29.0)) / 2.0), places=12)

        derived = derive_constants({"strong_monotone": 2.0, "lipschitz": constants.L})
        self.assertAlmostEqual(derived["cocoercive"], 4.0 / (15.0 + math.sqrt(29.0)), places=12)
        self.assertAlmostEqual(derived["inv_lipschitz"], 0.5)
        # the exact modulus is at least the derived one
        self.assertGreaterEqual(constants.cocoercive, derived["cocoercive"] - 1e-12)

    def test_hypomonotone_example_constants(self):
        constants = exact_quadratic_constants(QuadraticGame([[-1.0, 1.0], [-1.0, -1.0]]))
        self.assertAlmostEqual(constants.mu, 1.0, places=12)
        self.assertAlmostEqual(constants.L, math.sqrt(2.0), places=12)
        self.assertAlmostEqual(constants.R, 1.0 / math.sqrt(2.0), places=12)
        self.assertIsNone(constants.cocoercive)

    def test_singular_matrix_has_no_inverse_lipschitz(self):
        constants = matrix_constants(np.array([[1.0, 1.0], [1.0, 1.0]]))
        self.assertIsNone(constants.R)
        self.assertIsNone(feasibility_window(constants))

    def test_declared_constants(self):
        constants = OperatorConstants.declared(SINE_CONSTANTS)
        self.assertEqual((constants.mu, constants.L, constants.R), (1.0, 6.0, 0.25))
        self.assertEqual(constants.to_dict()["provenance"], "declared")

    def test_sampled_pairs_on_linear_map(self):
        """For a rotation every difference quotient equals the exact modulus."""
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])
        constants = sampled_constants(lambda x: A @ x, BoxSampler(2), pairs=2000, seed=3)
        self.assertAlmostEqual(constants.mu, 0.0, places=9)
        self.assertAlmostEqual(constants.L, 1.0, places=9)
        self.assertAlmostEqual(constants.R, 1.0, places=9)
        self.assertEqual(constants.samples, 2000)
        self.assertEqual(constants.provenance, "sampled")

    def test_sampled_constants_are_lower_bounds(self):
        A = np.array([[2.0, 1.0], [0.0, -1.0]])
        exact = matrix_constants(A)
        sampled = sampled_constants(lambda x: A @ x, BoxSampler(2), pairs=5000, seed=4)
        self.assertLessEqual(sampled.mu, exact.mu + 1e-9)
        self.assertLessEqual(sampled.L, exact.L + 1e-9)
        self.assertLessEqual(sampled.R, exact.R + 1e-9)
        self.assertGreater(sampled.L, 0.9 * exact.L)

    def test_sampling_is_reproducible_across_workers(self):
        game = build_benchmark("sine")
        sampler = BoxSampler(game.n)
        first = sampled_constants(game.pseudo_gradient, sampler, pairs=2000, seed=11, workers=2)
        second = sampled_constants(game.pseudo_gradient, sampler, pairs=2000, seed=11, workers=2)
        self.assertEqual(first.to_dict(), second.to_dict())

    def test_sine_jacobian_sampling_matches_published_constants(self):
        game = build_benchmark("sine")
        constants = sampled_constants(game.pseudo_gradient, BoxSampler(game.n), pairs=2000, seed=5,
                                      method="jacobian")
        for key, value in (("mu", constants.mu), ("L", constants.L), ("R", constants.R)):
            published = SINE_CONSTANTS[key]
            self.assertGreater(value, 0.9 * published, msg=key)
            self.assertLessEqual(value, published * (1.0 + 1e-6), msg=key)

    def test_coincident_samples(self):
        with self.assertRaises(SamplingError):
            sampled_constants(lambda x: x, lambda rng: np.zeros(2), pairs=1000)


class TestResolventConstants(unittest.TestCase):
    """Test case for the resolvent feasibility window and its bounds."""

    def setUp(self):
        self.rotation = matrix_constants(np.array([[0.0, 1.0], [-1.0, 0.0]]))

    def test_window_for_monotone_operator(self):
        lower, upper = feasibility_window(self.rotation)
        self.assertEqual(lower, 0.0)
        self.assertEqual(upper, math.inf)

    def test_bounds_below_inverse_lipschitz(self):
        bounds = resolvent_constants(self.rotation, 0.5)
        self.assertTrue(bounds.feasible)
        self.assertAlmostEqual(bounds.L_J, math.sqrt(1.0 / 1.25))
        self.assertAlmostEqual(bounds.kappa_J, 1.0 / 1.25)

    def test_bounds_above_inverse_lipschitz(self):
        bounds = resolvent_constants(self.rotation, 2.0)
        self.assertAlmostEqual(bounds.L_J, math.sqrt(1.0 / 5.0))
        self.assertAlmostEqual(bounds.kappa_J, 3.0 / 9.0)

    def test_bound_is_attained_by_rotation(self):
        lam = 0.5
        J = np.linalg.inv(np.eye(2) + lam * np.array([[0.0, 1.0], [-1.0, 0.0]]))
        self.assertAlmostEqual(np.linalg.norm(J, 2), resolvent_constants(self.rotation, lam).L_J)

    def test_infeasible_lambda(self):
        constants = OperatorConstants(mu_hypo=1.0, lipschitz=1.0, inv_lipschitz=1.0, provenance="declared")
        bounds = resolvent_constants(constants, 1.0)
        self.assertFalse(bounds.feasible)
        self.assertIsNone(bounds.L_J)
        self.assertIn("outside", bounds.reason)

    def test_nonpositive_lambda(self):
        with self.assertRaises(ValueError):
            resolvent_constants(self.rotation, 0.0)

    def test_eval_resolvent_matrix(self):
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])
        v = np.array([1.0, 2.0])
        u = eval_resolvent(A, 0.5, v)
        np.testing.assert_allclose(u + 0.5 * A @ u, v, atol=1e-12)

    def test_eval_resolvent_callable_agrees_with_matrix(self):
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])
        v = np.array([3.0, -1.0])
        direct = eval_resolvent(A, 2.0, v)
        iterative = eval_resolvent(lambda u: A @ u, 2.0, v, lipschitz=1.0)
        np.testing.assert_allclose(iterative, direct, atol=1e-8)

    def test_eval_resolvent_nonlinear_game(self):
        game = build_benchmark("sine")
        v = np.linspace(-1.0, 1.0, game.n)
        u = eval_resolvent(game, 0.05, v, lipschitz=6.0, mu=1.0)
        residual = u + 0.05 * eval_pseudo_gradient(game, u) - v
        self.assertLess(np.linalg.norm(residual), 1e-8)


class TestPropertyLattice(unittest.TestCase):
    """Test case for relations between monotonicity moduli."""

    def test_closure(self):
        derived = derive_constants({"strong_monotone": 2.0, "lipschitz": 4.0})
        self.assertAlmostEqual(derived["inv_lipschitz"], 0.5)
        self.assertAlmostEqual(derived["cocoercive"], 0.125)
        self.assertEqual(derived.sources["cocoercive"], "cocoercive_from_strong_monotone_lipschitz")
        self.assertNotIn("strong_monotone", derived.sources)

    def test_cocoercive_and_inverse_lipschitz(self):
        derived = derive_constants({"cocoercive": 0.5, "inv_lipschitz": 2.0})
        self.assertAlmostEqual(derived["lipschitz"], 2.0)
        self.assertAlmostEqual(derived["strong_monotone"], 0.125)

    def test_convex_rules_need_flag(self):
        with self.assertRaises(DerivationError):
            apply_rule("cocoercive_from_convex_lipschitz", {"lipschitz": 2.0})
        self.assertAlmostEqual(apply_rule("cocoercive_from_convex_lipschitz", {"lipschitz": 2.0},
                                          convex_gradient=True), 0.5)
        self.assertIsNone(derive_constants({"lipschitz": 2.0}).get("cocoercive"))
        self.assertAlmostEqual(derive_constants({"lipschitz": 2.0}, convex_gradient=True)["cocoercive"], 0.5)

    def test_missing_or_invalid_inputs(self):
        with self.assertRaises(DerivationError):
            apply_rule("cocoercive_from_strong_monotone_lipschitz", {"strong_monotone": 1.0})
        with self.assertRaises(DerivationError):
            derive_constants({"lipschitz": -1.0})
        with self.assertRaises(DerivationError):
            derive_constants({"curvature": 1.0})
        with self.assertRaises(DerivationError):
            apply_rule("no_such_rule", {})

    def test_derived_moduli_hold_on_sampled_pairs(self):
        L = math.sqrt((15.0 + math.sqrt(29.0)) / 2.0)
        cases = [
            (np.array([[2.0, 1.0], [-1.0, 3.0]]), derive_constants({"strong_monotone": 2.0, "lipschitz": L})),
            (np.diag([1.0, 3.0]), derive_constants({"cocoercive": 1.0 / 3.0})),
            (np.diag([1.0, 3.0]), derive_constants({"inv_lipschitz": 1.0}, convex_gradient=True)),
        ]
        self.assertAlmostEqual(cases[1][1]["lipschitz"], 3.0)
        self.assertAlmostEqual(cases[2][1]["strong_monotone"], 1.0)
        rng = make_rng(13)
        for A, derived in cases:
            x = rng.uniform(-10.0, 10.0, size=(10000, 2))
            y = rng.uniform(-10.0, 10.0, size=(10000, 2))
            d = x - y
            Ad = d @ A.T
            inner = np.einsum("ij,ij->i", Ad, d)
            norm_d = np.linalg.norm(d, axis=1)
            norm_Ad = np.linalg.norm(Ad, axis=1)
            for key, value in derived.values.items():
                with self.subTest(A=A.tolist(), modulus=key):
                    if key == "lipschitz":
                        gap = value * norm_d - norm_Ad
                    elif key == "inv_lipschitz":
                        gap = value * norm_Ad - norm_d
                    elif key == "strong_monotone":
                        gap = inner - value * norm_d ** 2
                    else:
                        gap = inner - value * norm_Ad ** 2
                    self.assertGreaterEqual(gap.min(), -1e-9 * max(1.0, float(np.max(norm_d ** 2))))

    def test_explicit_rule_order(self):
        derived = derive_constants({"cocoercive": 0.25}, rules=["lipschitz_from_cocoercive"])
        self.assertEqual(derived.values, {"cocoercive": 0.25, "lipschitz": 4.0})


if __name__ == "__main__":
    unittest.main()
