"""
Test suite for scenario configuration, logging setup and seeded streams.
"""
import logging
import os
import shutil
import sys
import tempfile
import unittest

import numpy as np
import yaml

# Add parent directory to path for imports
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.utils.config_manager import DEFAULT_SCENARIO, ConfigManager, deep_merge, missing_keys
from src.utils.errors import ConfigError
from src.utils.logging_utils import generate_run_id, get_run_logger, setup_logging
from src.utils.seeding import DEFAULT_SEED, make_rng, spawn_rngs, uniform_box

CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "config")
SCENARIO_FILES = (
    "harmonic_full.yaml",
    "harmonic_gradient.yaml",
    "g1_partial_quadratic.yaml",
    "g3_partial_quadratic.yaml",
    "sine_partial_general.yaml",
    "sample_scenario.yaml",
)


class TestConfigManager(unittest.TestCase):
    """Test case for ConfigManager."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def _write(self, text):
        path = os.path.join(self.temp_dir, "scenario.yaml")
        with open(path, "w") as f:
            f.write(text)
        return path

    def assertInvalid(self, config, field_path):
        manager = ConfigManager(config=config)
        with self.assertRaises(ConfigError) as context:
            manager.validate()
        self.assertEqual(context.exception.field_path, field_path)
        self.assertFalse(manager.validate_config())

    def test_defaults_are_valid(self):
        manager = ConfigManager()
        manager.validate()
        self.assertEqual(manager.get_config()["seed"], DEFAULT_SEED)
        self.assertEqual(missing_keys(manager.to_dict()), [])

    def test_shipped_scenarios_are_valid(self):
        for name in SCENARIO_FILES:
            with self.subTest(scenario=name):
                manager = ConfigManager(os.path.join(CONFIG_DIR, name))
                self.assertTrue(manager.validate_config())
                self.assertEqual(manager.get_nested_value("name"), os.path.splitext(name)[0])

    def test_merge_keeps_unset_defaults(self):
        manager = ConfigManager(self._write("simulation:\n  T: 5.0\n"))
        self.assertEqual(manager.get_nested_value("simulation.T"), 5.0)
        self.assertEqual(manager.get_nested_value("simulation.method"), "rk4")
        self.assertEqual(manager.get_nested_value("simulation.h", 0.01), 0.01)
        self.assertIsNone(manager.get_nested_value("simulation.unknown"))
        self.assertEqual(DEFAULT_SCENARIO["simulation"]["T"], 100.0)

    def test_deep_merge_does_not_alias(self):
        merged = deep_merge({"a": {"b": [1]}}, {"a": {"c": 2}})
        merged["a"]["b"].append(3)
        self.assertEqual(merged, {"a": {"b": [1, 3], "c": 2}})

    def test_empty_file_uses_defaults(self):
        manager = ConfigManager(self._write(""))
        self.assertEqual(manager.to_dict(), DEFAULT_SCENARIO)

    def test_file_errors(self):
        with self.assertRaises(FileNotFoundError):
            ConfigManager(os.path.join(self.temp_dir, "missing.yaml"))
        with self.assertRaises(ConfigError):
            ConfigManager(self._write("- a\n- b\n"))
        with self.assertRaises(yaml.YAMLError):
            ConfigManager(self._write("game: [unclosed\n"))

    def test_validation_reports_field_path(self):
        self.assertInvalid({"info_mode": "hybrid"}, "info_mode")
        self.assertInvalid({"theorem": "dist-quad"}, "theorem")
        self.assertInvalid({"synthesis": {"d": 1.0}}, "synthesis.d")
        self.assertInvalid({"synthesis": {"c_factor": 1.0}}, "synthesis.c_factor")
        self.assertInvalid({"simulation": {"T": -1.0}}, "simulation.T")
        self.assertInvalid({"simulation": {"method": "euler"}}, "simulation.method")
        self.assertInvalid({"constants": {"pairs": 10}}, "constants.pairs")
        self.assertInvalid({"constants": {"mu": -1.0}}, "constants.mu")
        self.assertInvalid({"overrides": {"alpha": 0.0}}, "overrides.alpha")
        self.assertInvalid({"seed": "abc"}, "seed")
        self.assertInvalid({"game": {"type": "quadratic"}}, "game.A")
        self.assertInvalid({"info_mode": "partial", "graph": {"type": "custom"}}, "graph.weights")
        self.assertInvalid({"info_mode": "partial", "graph": {"N": 1}}, "graph.N")
        self.assertInvalid({"logging": {"level": "LOUD"}}, "logging.level")

    def test_apply_overrides(self):
        manager = ConfigManager()
        manager.apply_overrides({"overrides.alpha": 0.2, "seed": 7, "overrides.beta": None, "extra.key": 1})
        self.assertEqual(manager.get_nested_value("overrides.alpha"), 0.2)
        self.assertIsNone(manager.get_config()["overrides"]["beta"])
        self.assertEqual(manager.get_config()["seed"], 7)
        self.assertEqual(manager.get_section("extra"), {"key": 1})
        self.assertIsNone(manager.get_section("absent"))

    def test_dump_round_trips_through_yaml(self):
        manager = ConfigManager(config={"game": "g1", "info_mode": "partial"})
        reloaded = yaml.safe_load(manager.dump_config())
        self.assertEqual(reloaded, manager.to_dict())
        self.assertEqual(missing_keys({"game": "g1", "graph": {}})[:2], ["name", "seed"])
        self.assertIn("graph.type", missing_keys({"graph": {}}))


class TestLoggingUtils(unittest.TestCase):
    """Test case for the logging helpers."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        for handler in list(logging.getLogger().handlers):
            handler.close()
            logging.getLogger().removeHandler(handler)
        shutil.rmtree(self.temp_dir)

    def test_setup_logging_writes_file(self):
        log_file = os.path.join(self.temp_dir, "logs", "run.log")
        setup_logging(log_file=log_file, log_level="DEBUG", console_level="ERROR")
        logging.getLogger("tests.config").debug("written to file")
        for handler in logging.getLogger().handlers:
            handler.flush()
        with open(log_file) as f:
            self.assertIn("written to file", f.read())

    def test_run_logger_prefix(self):
        adapter = get_run_logger("tests.config", run_id="run_1", component="Pipeline")
        message, _ = adapter.process("hello", {})
        self.assertEqual(message, "[run_id=run_1 component=Pipeline] hello")

    def test_seeded_run_ids_share_suffix(self):
        first = generate_run_id(seed=5)
        second = generate_run_id(seed=5)
        self.assertTrue(first.startswith("run_"))
        self.assertEqual(first.rsplit("_", 1)[1], second.rsplit("_", 1)[1])


class TestSeeding(unittest.TestCase):
    """Test case for seeded random streams."""

    def test_same_seed_same_stream(self):
        np.testing.assert_array_equal(uniform_box(make_rng(3), 5), uniform_box(make_rng(3), 5))

    def test_streams_are_independent(self):
        self.assertFalse(np.array_equal(make_rng(3, stream=1).uniform(size=5), make_rng(3, stream=2).uniform(size=5)))

    def test_box_bounds(self):
        sample = uniform_box(make_rng(), 1000, box=(-2.0, 3.0))
        self.assertTrue(np.all((sample >= -2.0) & (sample <= 3.0)))

    def test_spawned_generators(self):
        rngs = spawn_rngs(11, 3)
        self.assertEqual(len(rngs), 3)
        draws = [rng.uniform() for rng in rngs]
        self.assertEqual(len(set(draws)), 3)
        self.assertEqual(draws, [rng.uniform() for rng in spawn_rngs(11, 3)])


if __name__ == "__main__":
    unittest.main()
