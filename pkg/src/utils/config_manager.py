"""
Configuration Manager module for the Heavy Anchor toolkit.
Loads scenario files (YAML), merges them over the documented defaults and
validates every field, reporting problems by dotted field path.
"""
import copy
import logging
import os
from typing import Any, Dict, List, Optional

import yaml
from yaml.parser import ParserError

from src.utils.errors import ConfigError
from src.utils.seeding import DEFAULT_SEED

logger = logging.getLogger(__name__)

THEOREMS = (
    "full-monotone",
    "full-hypo",
    "full-quad",
    "dist-monotone",
    "dist-general",
    "dist-quad",
)
INFO_MODES = ("full", "partial")
DYNAMICS = ("gradient", "anchor")
GRAPH_TYPES = ("ring", "complete", "path", "star", "custom")
INTEGRATORS = ("rk4", "if-rk4")
CONSTANT_SOURCES = ("auto", "exact", "declared", "sampled")
SAMPLING_METHODS = ("pairs", "jacobian")
ALPHA_VARIANTS = ("full", "partial")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

# Every key a scenario may set, with its default. `--print-config` dumps this
# merged with the user's file.
DEFAULT_SCENARIO: Dict[str, Any] = {
    "name": "scenario",
    "seed": DEFAULT_SEED,
    "game": "harmonic",
    "graph": {
        "type": "ring",
        "N": None,
        "weight": 1.0,
        "weights": None,
    },
    "info_mode": "full",
    "dynamics": "anchor",
    "theorem": None,
    "constants": {
        "source": "auto",
        "mu": None,
        "L": None,
        "R": None,
        "method": "pairs",
        "pairs": 100000,
        "points": 2000,
        "box": [-10.0, 10.0],
        "workers": 1,
    },
    "synthesis": {
        "d": 0.5,
        "c_factor": 1.01,
        "alpha_variant": "full",
    },
    "overrides": {
        "alpha": None,
        "beta": None,
        "c": None,
        "d": None,
        "T": None,
        "h": None,
        "seed": None,
    },
    "simulation": {
        "T": 100.0,
        "h": None,
        "method": "rk4",
        "decimation": None,
        "max_samples": 2000,
        "stiffness_factor": 0.1,
        "init_box": [-10.0, 10.0],
        "x0": None,
        "r0": None,
        "tol_residual": 1e-3,
        "tol_consensus": 1e-3,
        "lyapunov": True,
    },
    "outputs": {
        "dir": "output",
        "csv": True,
        "summary": True,
        "plot": True,
        "certificate": True,
    },
    "logging": {
        "level": "INFO",
        "file": None,
    },
}


def deep_merge(base: Dict[str, Any], update: Dict[str, Any]) -> Dict[str, Any]:
    """Return a copy of `base` with `update` merged in recursively."""
    merged = copy.deepcopy(base)
    for key, value in (update or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _require_choice(value: Any, choices, path: str) -> None:
    if value not in choices:
        raise ConfigError(f"must be one of {list(choices)}, got {value!r}", field_path=path)


def _require_positive(value: Any, path: str, allow_none: bool = True) -> None:
    if value is None and allow_none:
        return
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
        raise ConfigError(f"must be a positive number, got {value!r}", field_path=path)


def _require_box(value: Any, path: str) -> None:
    if not isinstance(value, (list, tuple)) or len(value) != 2 or not float(value[0]) < float(value[1]):
        raise ConfigError(f"must be a [low, high] pair with low < high, got {value!r}", field_path=path)


def validate_scenario(config: Dict[str, Any]) -> None:
    """
    Validate a merged scenario configuration.

    Raises:
        ConfigError: naming the offending field path.
    """
    game = config.get("game")
    if isinstance(game, dict):
        game_type = game.get("type")
        _require_choice(game_type, ("quadratic", "plugin", "fixture"), "game.type")
        if game_type == "quadratic" and "A" not in game:
            raise ConfigError("inline quadratic game needs a matrix", field_path="game.A")
        if game_type == "plugin" and not isinstance(game.get("factory"), str):
            raise ConfigError("plugin game needs a 'module.function' factory", field_path="game.factory")
        if game_type == "fixture" and not isinstance(game.get("name"), str):
            raise ConfigError("fixture game needs a name", field_path="game.name")
    elif not isinstance(game, str):
        raise ConfigError("must be a fixture name or a mapping", field_path="game")

    _require_choice(config.get("info_mode"), INFO_MODES, "info_mode")
    _require_choice(config.get("dynamics"), DYNAMICS, "dynamics")
    if config.get("theorem") is not None:
        _require_choice(config["theorem"], THEOREMS, "theorem")
        partial_theorem = config["theorem"].startswith("dist-")
        if partial_theorem != (config["info_mode"] == "partial"):
            raise ConfigError(
                f"theorem {config['theorem']} does not apply to info_mode {config['info_mode']}",
                field_path="theorem",
            )

    graph = config.get("graph") or {}
    _require_choice(graph.get("type"), GRAPH_TYPES, "graph.type")
    if config["info_mode"] == "partial":
        if graph["type"] == "custom":
            if graph.get("weights") is None:
                raise ConfigError("custom graph needs a weight matrix", field_path="graph.weights")
        elif graph.get("N") is not None and (not isinstance(graph["N"], int) or graph["N"] < 2):
            raise ConfigError("must be an integer >= 2", field_path="graph.N")
    _require_positive(graph.get("weight"), "graph.weight", allow_none=False)

    constants = config.get("constants") or {}
    _require_choice(constants.get("source"), CONSTANT_SOURCES, "constants.source")
    _require_choice(constants.get("method"), SAMPLING_METHODS, "constants.method")
    for key in ("pairs", "points", "workers"):
        _require_positive(constants.get(key), f"constants.{key}", allow_none=False)
    if constants.get("method") == "pairs" and constants.get("pairs", 0) < 1000:
        raise ConfigError("pair sampling needs at least 1000 pairs", field_path="constants.pairs")
    _require_box(constants.get("box"), "constants.box")
    for key in ("mu", "L", "R"):
        value = constants.get(key)
        if value is not None and (isinstance(value, bool) or not isinstance(value, (int, float)) or value < 0):
            raise ConfigError(f"must be a nonnegative number, got {value!r}", field_path=f"constants.{key}")

    synthesis = config.get("synthesis") or {}
    d = synthesis.get("d")
    if not isinstance(d, (int, float)) or not 0.0 < d < 1.0:
        raise ConfigError(f"must lie in (0, 1), got {d!r}", field_path="synthesis.d")
    c_factor = synthesis.get("c_factor")
    if not isinstance(c_factor, (int, float)) or c_factor <= 1.0:
        raise ConfigError(f"must exceed 1, got {c_factor!r}", field_path="synthesis.c_factor")
    _require_choice(synthesis.get("alpha_variant"), ALPHA_VARIANTS, "synthesis.alpha_variant")

    overrides = config.get("overrides") or {}
    for key in ("alpha", "beta", "c", "T", "h"):
        _require_positive(overrides.get(key), f"overrides.{key}")
    if overrides.get("d") is not None and not 0.0 < overrides["d"] < 1.0:
        raise ConfigError(f"must lie in (0, 1), got {overrides['d']!r}", field_path="overrides.d")

    simulation = config.get("simulation") or {}
    _require_positive(simulation.get("T"), "simulation.T", allow_none=False)
    _require_positive(simulation.get("h"), "simulation.h")
    _require_choice(simulation.get("method"), INTEGRATORS, "simulation.method")
    _require_positive(simulation.get("stiffness_factor"), "simulation.stiffness_factor", allow_none=False)
    _require_positive(simulation.get("tol_residual"), "simulation.tol_residual", allow_none=False)
    _require_positive(simulation.get("tol_consensus"), "simulation.tol_consensus", allow_none=False)
    decimation = simulation.get("decimation")
    if decimation is not None and (not isinstance(decimation, int) or decimation < 1):
        raise ConfigError(f"must be a positive integer, got {decimation!r}", field_path="simulation.decimation")
    _require_box(simulation.get("init_box"), "simulation.init_box")

    _require_choice(str((config.get("logging") or {}).get("level", "INFO")).upper(), LOG_LEVELS, "logging.level")

    seed = config.get("seed")
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"must be a nonnegative integer, got {seed!r}", field_path="seed")


class ConfigManager:
    """
    Manager for loading and validating scenario configuration.
    """

    def __init__(self, config_path: str = None, config: Optional[Dict[str, Any]] = None):
        """
        Initialize the config manager.

        Args:
            config_path: Path to the YAML scenario file
            config: Scenario mapping used instead of a file
        """
        self.config_path = config_path
        self.config = deep_merge(DEFAULT_SCENARIO, config or {})

        if config_path:
            self.load_config(config_path)

    def load_config(self, config_path: str) -> Dict[str, Any]:
        """
        Load a scenario from a YAML file and merge it over the defaults.

        Args:
            config_path: Path to the YAML scenario file

        Returns:
            Dictionary containing the merged configuration

        Raises:
            FileNotFoundError: If the config file does not exist
            ParserError: If the YAML file has syntax errors
            ConfigError: If the file does not hold a mapping
        """
        if not os.path.exists(config_path):
            logger.error(f"Configuration file not found: {config_path}")
            raise FileNotFoundError(f"Configuration file not found: {config_path}")

        try:
            logger.info(f"Loading scenario from: {config_path}")
            with open(config_path, "r") as f:
                loaded = yaml.safe_load(f)
        except ParserError as e:
            logger.error(f"YAML syntax error in scenario file: {str(e)}")
            raise

        if loaded is None:
            logger.warning(f"Empty scenario loaded from: {config_path}, using defaults")
            loaded = {}
        if not isinstance(loaded, dict):
            logger.error(f"Scenario file {config_path} does not contain a mapping")
            raise ConfigError("scenario file must contain a mapping", field_path="<root>")

        self.config = deep_merge(DEFAULT_SCENARIO, loaded)
        self.config_path = config_path
        return self.config

    def get_config(self) -> Dict[str, Any]:
        """
        Get the merged configuration.
        """
        return self.config

    def apply_overrides(self, values: Dict[str, Any]) -> Dict[str, Any]:
        """
        Set values by dotted path, skipping entries whose value is None.

        Args:
            values: Mapping such as {"overrides.alpha": 0.2, "seed": 7}

        Returns:
            The updated configuration
        """
        for path, value in values.items():
            if value is None:
                continue
            parts = path.split(".")
            current = self.config
            for part in parts[:-1]:
                current = current.setdefault(part, {})
            current[parts[-1]] = value
            logger.debug(f"Override applied: {path}={value!r}")
        return self.config

    def validate(self) -> None:
        """
        Validate the configuration, raising ConfigError on the first problem.
        """
        validate_scenario(self.config)

    def validate_config(self) -> bool:
        """
        Validate the configuration.

        Returns:
            True if the configuration is valid, False otherwise
        """
        try:
            self.validate()
        except ConfigError as e:
            logger.error(f"Invalid scenario configuration: {str(e)}")
            return False
        return True

    def get_section(self, section_name: str) -> Optional[Dict[str, Any]]:
        """
        Get a specific section from the configuration.

        Args:
            section_name: Name of the configuration section

        Returns:
            Dictionary containing the section or None if not found
        """
        section = self.config.get(section_name)
        if section is None:
            logger.warning(f"Section '{section_name}' not found in configuration")
        return section

    def get_nested_value(self, path: str, default: Any = None) -> Any:
        """
        Get a nested value from the configuration using dot notation.

        Args:
            path: Path to the value in dot notation (e.g., 'simulation.T')
            default: Default value to return if the path is not found or is None

        Returns:
            The value at the specified path or the default
        """
        current = self.config
        for part in path.split("."):
            if not isinstance(current, dict) or part not in current:
                return default
            current = current[part]
        return default if current is None else current

    def dump_config(self) -> str:
        """
        Render the merged configuration, defaults included, as YAML.
        """
        return yaml.safe_dump(self.config, sort_keys=False, default_flow_style=None)

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert the configuration to a (deep-copied) dictionary.
        """
        return copy.deepcopy(self.config)

    def __str__(self) -> str:
        return f"ConfigManager(path={self.config_path}, name={self.config.get('name')})"


def missing_keys(config: Dict[str, Any], defaults: Dict[str, Any] = DEFAULT_SCENARIO, prefix: str = "") -> List[str]:
    """List dotted default keys absent from `config` (used by --print-config checks)."""
    missing = []
    for key, value in defaults.items():
        path = f"{prefix}{key}"
        if key not in config:
            missing.append(path)
        elif isinstance(value, dict) and isinstance(config[key], dict):
            missing.extend(missing_keys(config[key], value, prefix=f"{path}."))
    return missing
