"""
Test suite for the scenario pipeline: game construction, constants,
certification, simulation runs and batches.
"""
import json
import os
import shutil
import sys
import tempfile
import unittest
from unittest.mock import patch

import numpy as np
import yaml

# Add parent directory to path for imports
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.graphs import CommGraph
from src.pipeline import ScenarioPipeline, build_game, resolve_constants, run_batch, select_theorem, synthesize
from src.utils.errors import ConfigError, InfeasibleParametersError, SimulationDivergedError


class TestScenarioComponents(unittest.TestCase):
    """Test case for the pipeline's building blocks."""

    def test_build_game(self):
        self.assertEqual(build_game("harmonic").name, "harmonic")
        self.assertEqual(build_game({"type": "fixture", "name": "g1"}).n_agents, 10)
        game = build_game({"type": "quadratic", "name": "pair", "A": [[0.5, 1.0], [-1.0, 0.5]], "b": [1.0, -1.0]})
        self.assertEqual(game.name, "pair")
        np.testing.assert_allclose(game.pseudo_gradient(game.equilibrium()), [0.0, 0.0], atol=1e-12)
        with self.assertRaises(ConfigError):
            build_game({"type": "unknown"})
        with self.assertRaises(ConfigError):
            build_game("g9")

    def test_resolve_constants_sources(self):
        harmonic = build_game("harmonic")
        exact = resolve_constants(harmonic, {"source": "auto"})
        self.assertEqual(exact.provenance, "exact")
        self.assertAlmostEqual(exact.lipschitz, 1.0)
        declared = resolve_constants(build_game("sine"), {"source": "auto"})
        self.assertEqual((declared.mu_hypo, declared.lipschitz, declared.inv_lipschitz), (1.0, 6.0, 0.25))
        explicit = resolve_constants(harmonic, {"source": "declared", "mu": 2.0, "L": 3.0, "R": 0.5})
        self.assertEqual(explicit.lipschitz, 3.0)
        sampled = resolve_constants(harmonic, {"source": "sampled", "method": "pairs", "pairs": 2000}, seed=4)
        self.assertEqual(sampled.provenance, "sampled")
        self.assertAlmostEqual(sampled.lipschitz, 1.0, places=9)
        self.assertAlmostEqual(sampled.mu_hypo, 0.0, places=9)
        with self.assertRaises(ConfigError):
            resolve_constants(build_game("sine"), {"source": "exact"})

    def test_select_theorem(self):
        cases = [
            ("harmonic", "full", "full-monotone"),
            ("g1", "full", "full-quad"),
            ("sine", "full", "full-hypo"),
            ("g1", "partial", "dist-quad"),
            ("sine", "partial", "dist-general"),
        ]
        for name, info_mode, expected in cases:
            with self.subTest(game=name, info_mode=info_mode):
                game = build_game(name)
                constants = resolve_constants(game, {"source": "auto"})
                self.assertEqual(select_theorem(game, info_mode, constants), expected)

    def test_synthesize_dispatch(self):
        g1 = build_game("g1")
        ring = CommGraph.ring(10)
        constants = resolve_constants(g1, {"source": "auto"})
        certificate = synthesize("dist-quad", g1, constants, ring, c=2000.0)
        self.assertEqual(certificate.c, 2000.0)
        with self.assertRaises(InfeasibleParametersError):
            synthesize("dist-quad", g1, constants, ring, c=1.0)
        with self.assertRaises(ConfigError):
            synthesize("dist-quad", g1, constants)
        sine = build_game("sine")
        with self.assertRaises(ConfigError):
            synthesize("full-quad", sine, resolve_constants(sine, {"source": "auto"}))


class TestScenarioPipeline(unittest.TestCase):
    """Test case for ScenarioPipeline runs."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def _config(self, **changes):
        config = {
            "name": "harmonic_test",
            "game": "harmonic",
            "theorem": "full-monotone",
            "simulation": {"T": 120.0},
            "outputs": {"dir": self.temp_dir},
        }
        config.update(changes)
        return config

    def test_harmonic_anchor_run(self):
        pipeline = ScenarioPipeline(config=self._config(), run_id="test_run")
        summary = pipeline.setup().run()

        self.assertTrue(summary["certified"])
        self.assertTrue(summary["converged"])
        self.assertEqual(summary["params"]["alpha"], 1.0)
        self.assertTrue(summary["lyapunov"]["nonincreasing"])
        self.assertAlmostEqual(summary["rate"]["rate"], 1.0 - np.sqrt(3.0) / 2.0, delta=0.005)

        for suffix in ("trajectory.csv", "plot.dat", "plot.gp", "certificate.json", "summary.json"):
            self.assertTrue(os.path.exists(os.path.join(self.temp_dir, f"harmonic_test_{suffix}")), suffix)
        with open(os.path.join(self.temp_dir, "harmonic_test_summary.json")) as f:
            written = json.load(f)
        self.assertEqual(written["run_id"], "test_run")
        self.assertEqual(pipeline.get_metrics()["status"], "completed_success")
        self.assertEqual(pipeline.get_metrics()["files_written"], 4)

    def test_failed_json_exports_are_counted(self):
        for effect in ({"return_value": False}, {"side_effect": OSError("disk full")}):
            with self.subTest(effect=effect), patch("src.pipeline.JSONExporter.export", **effect):
                pipeline = ScenarioPipeline(config=self._config(), run_id="test_run")
                summary = pipeline.setup().run()
                metrics = pipeline.get_metrics()
                self.assertEqual(metrics["status"], "completed_success")
                self.assertEqual(metrics["files_written"], 2)
                self.assertEqual(metrics["errors"], 2)
                self.assertEqual(set(summary["outputs"]), {"csv", "plot"})
                self.assertFalse(os.path.exists(os.path.join(self.temp_dir, "harmonic_test_summary.json")))

    def test_gradient_play_keeps_norm(self):
        config = self._config(dynamics="gradient", theorem=None,
                              simulation={"T": 20.0, "x0": [3.0, 4.0], "lyapunov": False})
        summary = ScenarioPipeline(config=config).run()
        self.assertFalse(summary["converged"])
        self.assertFalse(summary["certified"])
        self.assertIsNone(summary["lyapunov"])
        self.assertAlmostEqual(summary["final_norm"], 5.0, places=3)

    def test_seeded_initial_conditions(self):
        first = ScenarioPipeline(config=self._config(seed=3)).setup().initial_conditions()
        second = ScenarioPipeline(config=self._config(seed=3)).setup().initial_conditions()
        np.testing.assert_array_equal(first[0], second[0])
        np.testing.assert_array_equal(first[1], second[1])
        self.assertTrue(np.all(np.abs(first[0]) <= 10.0))

    def test_invalid_configuration(self):
        with self.assertRaises(ConfigError):
            ScenarioPipeline(config={"info_mode": "hybrid"})
        with self.assertRaises(ValueError):
            ScenarioPipeline()
        pipeline = ScenarioPipeline(config=self._config(info_mode="partial", theorem=None, dynamics="gradient"))
        with self.assertRaises(ConfigError):
            pipeline.setup()
        self.assertEqual(pipeline.get_metrics()["status"], "setup_failed")

    def test_override_outside_certificate(self):
        config = self._config(game="g1", info_mode="partial", theorem="dist-quad", overrides={"c": 1.0})
        with self.assertRaises(ConfigError) as context:
            ScenarioPipeline(config=config).setup()
        self.assertEqual(context.exception.field_path, "overrides.c")

        forced = ScenarioPipeline(config=config, force=True).setup()
        self.assertTrue(forced.forced)
        self.assertEqual(forced.params["c"], 1.0)
        self.assertGreater(forced.certificate.c_min, 1000.0)

    def test_infeasible_certificate(self):
        config = self._config(game="g2", info_mode="partial", theorem="dist-general")
        pipeline = ScenarioPipeline(config=config)
        with self.assertRaises(InfeasibleParametersError):
            pipeline.setup()
        self.assertFalse(pipeline.certificate.feasible)

    def test_analyze_reports_resolvent_window(self):
        harmonic = ScenarioPipeline(config=self._config()).analyze()
        self.assertTrue(harmonic["resolvent"]["feasible"])
        self.assertTrue(harmonic["resolvent"]["distributed_feasible"])
        g2 = ScenarioPipeline(config=self._config(game="g2", theorem=None)).analyze()
        self.assertFalse(g2["resolvent"]["distributed_feasible"])
        self.assertEqual(g2["resolvent"]["N"], 10)

    def test_divergence_is_reported(self):
        config = self._config(name="unstable", theorem=None, dynamics="gradient",
                              game={"type": "quadratic", "A": [[-100.0, 0.0], [0.0, -100.0]]},
                              simulation={"T": 10.0, "lyapunov": False})
        pipeline = ScenarioPipeline(config=config)
        with self.assertRaises(SimulationDivergedError):
            pipeline.run()
        self.assertEqual(pipeline.summary["status"], "diverged")
        self.assertEqual(pipeline.get_metrics()["status"], "diverged")
        self.assertTrue(os.path.exists(os.path.join(self.temp_dir, "unstable_summary.json")))


class TestRunBatch(unittest.TestCase):
    """Test case for batch runs over scenario files."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def _write(self, name, config):
        path = os.path.join(self.temp_dir, f"{name}.yaml")
        with open(path, "w") as f:
            yaml.safe_dump(config, f)
        return path

    def test_batch_keeps_order_and_reports_failures(self):
        good = self._write("good", {"name": "good", "game": "harmonic", "dynamics": "gradient",
                                    "simulation": {"T": 5.0, "lyapunov": False}})
        bad = self._write("bad", {"name": "bad", "info_mode": "hybrid"})
        summaries = run_batch([good, bad], output_dir=self.temp_dir)
        self.assertEqual(summaries[0]["name"], "good")
        self.assertEqual(summaries[0]["status"], "completed")
        self.assertEqual(summaries[1]["status"], "failed")
        self.assertIn("ConfigError", summaries[1]["error"])


if __name__ == "__main__":
    unittest.main()
