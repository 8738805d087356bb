"""
Test suite for the command-line interface: argument parsing, scenario
overrides and exit codes of every subcommand.
"""
import io
import json
import os
import shutil
import sys
import tempfile
import unittest
from unittest.mock import patch

import yaml

# Add parent directory to path for imports
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.cli import EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE, build_config, main, parse_args
from src.utils.errors import ConfigError

CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "config")


class TestArgumentParsing(unittest.TestCase):
    """Test case for parse_args and build_config."""

    def test_command_is_required(self):
        with patch("sys.stderr", new_callable=io.StringIO):
            with self.assertRaises(SystemExit) as context:
                parse_args([])
        self.assertEqual(context.exception.code, EXIT_USAGE)

    def test_invalid_choice_exits_with_usage_code(self):
        with patch("sys.stderr", new_callable=io.StringIO):
            with self.assertRaises(SystemExit) as context:
                parse_args(["synth", "--theorem", "full-everything"])
        self.assertEqual(context.exception.code, EXIT_USAGE)

    def test_defaults(self):
        args = parse_args(["simulate"])
        self.assertEqual(args.command, "simulate")
        self.assertIsNone(args.config)
        self.assertIsNone(args.log_level)
        self.assertEqual(args.console_level, "WARNING")
        self.assertEqual(args.workers, 1)
        self.assertFalse(args.force)
        self.assertFalse(args.print_config)

    def test_all_overrides(self):
        args = parse_args(["simulate", "-c", "a.yaml", "-c", "b.yaml", "--alpha", "0.5", "--beta", "0.25",
                           "--gain", "3", "-T", "10", "-H", "0.01", "--seed", "4", "--force", "--run-id", "r1"])
        self.assertEqual(args.config, ["a.yaml", "b.yaml"])
        self.assertEqual((args.alpha, args.beta, args.c), (0.5, 0.25, 3.0))
        self.assertEqual((args.horizon, args.step, args.seed), (10.0, 0.01, 4))
        self.assertTrue(args.force)
        self.assertEqual(args.run_id, "r1")

    def test_subcommand_options(self):
        self.assertEqual(parse_args(["explore-rate", "-R", "2"]).R, 2.0)
        self.assertTrue(parse_args(["verify", "--no-scenario"]).no_scenario)
        self.assertEqual(parse_args(["reproduce-table", "--rel-tol", "0.05"]).rel_tol, 0.05)

    def test_build_config_applies_overrides(self):
        manager = build_config(parse_args(["synth", "--game", "g1", "--theorem", "dist-quad", "--graph", "complete",
                                           "--gain", "2000", "--seed", "5"]))
        config = manager.get_config()
        self.assertEqual(config["info_mode"], "partial")
        self.assertEqual(config["name"], "g1")
        self.assertEqual(config["graph"]["type"], "complete")
        self.assertEqual(config["overrides"]["c"], 2000.0)
        self.assertEqual(config["overrides"]["seed"], 5)

    def test_build_config_from_file(self):
        path = os.path.join(CONFIG_DIR, "g1_partial_quadratic.yaml")
        manager = build_config(parse_args(["simulate", "-c", path, "-T", "50"]))
        self.assertEqual(manager.get_nested_value("name"), "g1_partial_quadratic")
        self.assertEqual(manager.get_nested_value("overrides.T"), 50.0)

    def test_build_config_rejects_mismatched_theorem(self):
        with self.assertRaises(ConfigError):
            build_config(parse_args(["synth", "--theorem", "dist-quad", "--info", "full"]))


@patch("src.cli.setup_logging")
class TestMainExitCodes(unittest.TestCase):
    """Test case for main() across subcommands."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def _run(self, argv):
        with patch("sys.stdout", new_callable=io.StringIO) as stdout, patch("sys.stderr", new_callable=io.StringIO):
            code = main(argv + ["--output-dir", self.temp_dir])
        return code, stdout.getvalue()

    def test_analyze(self, mock_setup_logging):
        code, output = self._run(["analyze", "--game", "harmonic"])
        self.assertEqual(code, EXIT_OK)
        report = json.loads(output)
        self.assertAlmostEqual(report["constants"]["L"], 1.0)
        self.assertTrue(report["resolvent"]["feasible"])
        mock_setup_logging.assert_called_once()

    def test_synth_feasible_writes_certificate(self, mock_setup_logging):
        code, output = self._run(["synth", "--game", "g1", "--theorem", "dist-quad"])
        self.assertEqual(code, EXIT_OK)
        certificate = json.loads(output)
        self.assertTrue(certificate["feasible"])
        self.assertGreater(certificate["c"], certificate["c_min"])
        self.assertTrue(os.path.exists(os.path.join(self.temp_dir, "g1_certificate.json")))

    def test_synth_infeasible(self, mock_setup_logging):
        code, output = self._run(["synth", "--game", "g2", "--theorem", "dist-general"])
        self.assertEqual(code, EXIT_INFEASIBLE)
        certificate = json.loads(output)
        self.assertFalse(certificate["feasible"])
        self.assertIn("mu N R^2", certificate["reason"])

    def test_override_below_certified_gain(self, mock_setup_logging):
        code, _ = self._run(["synth", "--game", "g1", "--theorem", "dist-quad", "--gain", "1"])
        self.assertEqual(code, EXIT_USAGE)

    def test_simulate(self, mock_setup_logging):
        code, output = self._run(["simulate", "-c", os.path.join(CONFIG_DIR, "harmonic_full.yaml"), "-T", "60"])
        self.assertEqual(code, EXIT_OK)
        summary = json.loads(output)
        self.assertEqual(summary["name"], "harmonic_full")
        self.assertEqual(summary["params"]["T"], 60.0)
        self.assertTrue(os.path.exists(os.path.join(self.temp_dir, "harmonic_full_trajectory.csv")))

    def test_simulate_batch(self, mock_setup_logging):
        paths = [os.path.join(CONFIG_DIR, "harmonic_gradient.yaml"), os.path.join(CONFIG_DIR, "harmonic_full.yaml")]
        code, output = self._run(["simulate", "-c", paths[0], "-c", paths[1]])
        self.assertEqual(code, EXIT_OK)
        self.assertEqual([summary["name"] for summary in json.loads(output)], ["harmonic_gradient", "harmonic_full"])

    def test_missing_config_file(self, mock_setup_logging):
        code, _ = self._run(["simulate", "-c", os.path.join(self.temp_dir, "missing.yaml")])
        self.assertEqual(code, EXIT_USAGE)

    def test_print_config(self, mock_setup_logging):
        code, output = self._run(["analyze", "--game", "sine", "--print-config"])
        self.assertEqual(code, EXIT_OK)
        config = yaml.safe_load(output)
        self.assertEqual(config["game"], "sine")
        self.assertEqual(config["outputs"]["dir"], self.temp_dir)
        self.assertIn("stiffness_factor", config["simulation"])

    def test_verify(self, mock_setup_logging):
        code, output = self._run(["verify", "--game", "harmonic", "-T", "30"])
        self.assertEqual(code, EXIT_OK)
        names = [result["name"] for result in json.loads(output)]
        self.assertIn("equilibrium_invariance", names)
        self.assertIn("lyapunov_nonincreasing", names)

    def test_reproduce_table(self, mock_setup_logging):
        code, _ = self._run(["reproduce-table"])
        self.assertEqual(code, EXIT_OK)
        with open(os.path.join(self.temp_dir, "reference_table.json")) as f:
            report = json.load(f)
        self.assertEqual(report["failures"], [])

    def test_explore_rate(self, mock_setup_logging):
        code, output = self._run(["explore-rate", "-R", "1", "--seed", "2"])
        self.assertEqual(code, EXIT_OK)
        self.assertAlmostEqual(json.loads(output)["slowest_mode_rate"], 1.0 / 3.0, places=9)


if __name__ == "__main__":
    unittest.main()
