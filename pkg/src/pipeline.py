"""
Scenario pipeline for the Heavy Anchor toolkit.
Builds the game, graph, operator constants and parameter certificate of a
scenario, runs the dynamics and writes trajectory, summary and plot files.
"""
from concurrent.futures import ProcessPoolExecutor
import os
import time
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.analysis.operator_constants import (
    BoxSampler,
    OperatorConstants,
    exact_quadratic_constants,
    sampled_constants,
)
from src.analysis.property_lattice import derive_constants
from src.analysis.resolvent import feasibility_window
from src.diagnostics.convergence import check_nonincreasing, detect_convergence
from src.diagnostics.lyapunov import default_kind, lyapunov_series
from src.diagnostics.rate import estimate_rate
from src.dynamics.base_dynamics import BaseDynamics
from src.dynamics.gradient_play import GradientPlay
from src.dynamics.heavy_anchor import HeavyAnchorDistributed, HeavyAnchorFull
from src.dynamics.trajectory import Trajectory
from src.exporters.csv_exporter import TrajectoryCSVExporter
from src.exporters.json_exporter import JSONExporter
from src.exporters.plot_exporter import PlotDataExporter
from src.games.base_game import Game, as_action_profile, as_stacked_estimates
from src.games.benchmarks import build_benchmark
from src.games.callback_game import load_plugin_game
from src.games.quadratic_game import QuadraticGame
from src.graphs.comm_graph import CommGraph, build_graph
from src.synthesis.certificate import (
    DIST_GENERAL,
    DIST_MONOTONE,
    DIST_QUAD,
    FULL_HYPO,
    FULL_MONOTONE,
    FULL_QUAD,
    ParameterCertificate,
)
from src.synthesis.general import (
    synth_full_hypomonotone,
    synth_full_monotone,
    synth_partial_general,
    synth_partial_monotone,
)
from src.synthesis.quadratic import synth_full_quadratic, synth_quadratic_partial
from src.utils.config_manager import ConfigManager
from src.utils.errors import ConfigError, InfeasibleParametersError, SimulationDivergedError, SingularSystemError
from src.utils.logging_utils import generate_run_id, get_run_logger
from src.utils.seeding import make_rng, uniform_box

logger = get_run_logger(__name__, component="Pipeline")

PARAMETER_NAMES = ("alpha", "beta", "c")


def build_game(spec: Any) -> Game:
    """
    Build the game named by a scenario's `game` entry.

    Args:
        spec: Fixture name, or a mapping with type fixture | quadratic | plugin
    """
    if isinstance(spec, str):
        return build_benchmark(spec)
    game_type = spec.get("type")
    if game_type == "fixture":
        return build_benchmark(spec["name"])
    if game_type == "quadratic":
        try:
            return QuadraticGame.from_dict(spec, name=spec.get("name", "quadratic"))
        except ValueError as e:
            raise ConfigError(str(e), field_path="game.A") from e
    if game_type == "plugin":
        return load_plugin_game(spec["factory"], spec.get("args"))
    raise ConfigError(f"unknown game type {game_type!r}", field_path="game.type")


def resolve_constants(game: Game, spec: Dict[str, Any], seed: Optional[int] = None) -> OperatorConstants:
    """
    Operator constants of the pseudo-gradient from the `constants` section.

    source=auto uses exact constants for quadratic games, explicit or published
    values when present and sampling otherwise.
    """
    source = spec.get("source", "auto")
    explicit = spec.get("L") is not None
    if source == "auto":
        if isinstance(game, QuadraticGame):
            source = "exact"
        elif explicit or game.declared_constants():
            source = "declared"
        else:
            source = "sampled"

    if source == "exact":
        if not isinstance(game, QuadraticGame):
            raise ConfigError(f"exact constants need a quadratic game, got {game.name}", field_path="constants.source")
        return exact_quadratic_constants(game)
    if source == "declared":
        values = {k: spec.get(k) for k in ("mu", "L", "R")} if explicit else game.declared_constants()
        if not values:
            raise ConfigError(f"no declared constants for {game.name}", field_path="constants.L")
        return OperatorConstants.declared(values)

    method = spec.get("method", "pairs")
    count = spec.get("pairs", 100000) if method == "pairs" else spec.get("points", 2000)
    sampler = BoxSampler(game.n, spec.get("box", (-10.0, 10.0)))
    return sampled_constants(game.pseudo_gradient, sampler, pairs=int(count), seed=seed, method=method,
                             workers=int(spec.get("workers", 1)))


def select_theorem(game: Game, info_mode: str, constants: OperatorConstants) -> str:
    """Default convergence result for a game when the scenario names none."""
    quadratic = isinstance(game, QuadraticGame)
    if info_mode == "full":
        if constants.mu_hypo == 0.0:
            return FULL_MONOTONE
        return FULL_QUAD if quadratic else FULL_HYPO
    return DIST_QUAD if quadratic else DIST_GENERAL


def synthesize(theorem: str, game: Game, constants: OperatorConstants, graph: Optional[CommGraph] = None,
               d: float = 0.5, c_factor: float = 1.01, alpha_variant: str = "full",
               alpha: Optional[float] = None, beta: Optional[float] = None,
               c: Optional[float] = None) -> ParameterCertificate:
    """
    Dispatch to the synthesizer of `theorem`.

    Raises:
        InfeasibleParametersError: if a requested alpha, beta or c is not certified
        ConfigError: if the theorem does not apply to the game
    """
    if theorem in (FULL_QUAD, DIST_QUAD) and not isinstance(game, QuadraticGame):
        raise ConfigError(f"{theorem} applies to quadratic games only", field_path="theorem")
    if theorem.startswith("dist-") and graph is None:
        raise ConfigError(f"{theorem} needs a communication graph", field_path="graph")

    if theorem == FULL_MONOTONE:
        certificate = synth_full_monotone(alpha, beta, constants)
    elif theorem == FULL_HYPO:
        certificate = synth_full_hypomonotone(constants, d, alpha_variant, game.n_agents, beta, alpha)
    elif theorem == FULL_QUAD:
        certificate = synth_full_quadratic(game, alpha, beta)
    elif theorem == DIST_MONOTONE:
        certificate = synth_partial_monotone(graph, alpha, beta, c)
    elif theorem == DIST_GENERAL:
        certificate = synth_partial_general(constants, game.n_agents, d, graph, beta, alpha, c_factor)
    elif theorem == DIST_QUAD:
        certificate = synth_quadratic_partial(game, game.n_agents, graph, alpha, beta, c_factor)
    else:
        raise ConfigError(f"unknown theorem {theorem!r}", field_path="theorem")

    if c is not None and certificate.feasible and theorem != DIST_MONOTONE:
        certificate.check_parameters(c=c)
        certificate = certificate.with_values(c=float(c))
    return certificate


class ScenarioPipeline:
    """
    Orchestrator for one scenario: setup, certify, simulate, diagnose, export.
    """

    def __init__(self, config_path: str = None, config: Dict[str, Any] = None, output_dir: str = None,
                 run_id: str = None, force: bool = False):
        """
        Initialize the pipeline with a scenario.

        Args:
            config_path: Path to the YAML scenario file
            config: Scenario mapping (takes precedence over config_path)
            output_dir: Directory for output files (outputs.dir when None)
            run_id: Custom run ID for this run
            force: Accept overrides outside the certified ranges

        Raises:
            ConfigError: if the scenario is invalid
        """
        if config is not None:
            self.config_manager = ConfigManager(config=config)
        elif config_path:
            self.config_manager = ConfigManager(config_path)
        else:
            logger.error("No configuration provided for scenario pipeline")
            raise ValueError("No configuration provided for scenario pipeline")
        self.config_manager.validate()
        self.config = self.config_manager.get_config()

        overrides = self.config["overrides"]
        self.seed = int(overrides["seed"] if overrides.get("seed") is not None else self.config["seed"])
        self.run_id = run_id if run_id else generate_run_id(self.seed)
        self.logger = get_run_logger(__name__, run_id=self.run_id, component="Pipeline")
        self.output_dir = output_dir or self.config["outputs"]["dir"]
        self.force = force
        self.name = self.config["name"]

        self.game: Optional[Game] = None
        self.graph: Optional[CommGraph] = None
        self.constants: Optional[OperatorConstants] = None
        self.theorem: Optional[str] = None
        self.certificate: Optional[ParameterCertificate] = None
        self.params: Dict[str, Any] = {}
        self.forced = False
        self.trajectory: Optional[Trajectory] = None
        self.summary: Dict[str, Any] = {}

        self.metrics = {
            "run_id": self.run_id,
            "scenario": self.name,
            "start_time": None,
            "end_time": None,
            "duration_seconds": None,
            "samples": 0,
            "files_written": 0,
            "errors": 0,
            "status": "initialized",
        }
        self.logger.info(f"Initialized scenario pipeline '{self.name}' (seed={self.seed})")

    @property
    def info_mode(self) -> str:
        return self.config["info_mode"]

    @property
    def partial(self) -> bool:
        return self.info_mode == "partial"

    def setup(self) -> "ScenarioPipeline":
        """
        Build the game, graph and constants, and certify parameters.

        Returns:
            Self for method chaining
        """
        self.logger.info("Setting up scenario components")
        try:
            if self.partial and self.config["dynamics"] == "gradient":
                raise ConfigError("gradient play runs with full information only", field_path="dynamics")
            self.game = build_game(self.config["game"])
            if self.partial:
                self.graph = build_graph(self.config["graph"], default_N=self.game.n_agents)
            self.constants = resolve_constants(self.game, self.config["constants"], self.seed)
            if self.config["dynamics"] == "anchor":
                self._certify()
            self.metrics["status"] = "ready"
            self.logger.info(f"Setup complete: game={self.game.name}, info_mode={self.info_mode}, "
                             f"theorem={self.theorem}, params={self.params}")
            return self
        except Exception as e:
            self.logger.error(f"Error setting up scenario: {str(e)}")
            self.metrics["errors"] += 1
            self.metrics["status"] = "setup_failed"
            raise

    def _requested(self) -> Dict[str, Optional[float]]:
        overrides = self.config["overrides"]
        return {name: overrides.get(name) for name in PARAMETER_NAMES}

    def _certify(self) -> None:
        synthesis = self.config["synthesis"]
        overrides = self.config["overrides"]
        self.theorem = self.config.get("theorem") or select_theorem(self.game, self.info_mode, self.constants)
        options = {
            "d": overrides["d"] if overrides.get("d") is not None else synthesis["d"],
            "c_factor": synthesis["c_factor"],
            "alpha_variant": synthesis["alpha_variant"],
        }
        requested = self._requested()
        try:
            certificate = synthesize(self.theorem, self.game, self.constants, self.graph, **options, **requested)
        except InfeasibleParametersError as e:
            if all(value is None for value in requested.values()):
                raise
            name = (e.reason or "alpha").split()[0]
            field = name if name in PARAMETER_NAMES else "alpha"
            if not self.force:
                raise ConfigError(str(e), field_path=f"overrides.{field}") from e
            self.logger.warning(f"Forcing uncertified overrides: {str(e)}")
            self.forced = True
            certificate = synthesize(self.theorem, self.game, self.constants, self.graph, **options)
        self.certificate = certificate

        chosen = {name: getattr(certificate, name) for name in PARAMETER_NAMES}
        chosen.update({name: value for name, value in requested.items() if value is not None})
        if not certificate.feasible:
            missing = [name for name in PARAMETER_NAMES[:3 if self.partial else 2] if requested[name] is None]
            if not self.force or missing:
                certificate.require_feasible()
            self.logger.warning(f"{self.theorem} is infeasible; running forced parameters {requested}")
            self.forced = True
        self.params = {**chosen, "d": certificate.d if certificate.d is not None else options["d"]}

    def build_dynamics(self) -> BaseDynamics:
        """Dynamics object of the scenario with the certified (or forced) parameters."""
        if self.game is None:
            self.setup()
        lipschitz = self.constants.lipschitz if self.constants else None
        if self.config["dynamics"] == "gradient":
            return GradientPlay(self.game)
        if self.partial:
            return HeavyAnchorDistributed(self.game, self.graph, self.params["alpha"], self.params["beta"],
                                          self.params["c"], lipschitz)
        return HeavyAnchorFull(self.game, self.params["alpha"], self.params["beta"], lipschitz)

    def initial_conditions(self) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        """
        Seeded x0 and r0 drawn uniformly from simulation.init_box unless given.
        """
        simulation = self.config["simulation"]
        rng = make_rng(self.seed, stream=0)
        size = self.game.n_agents * self.game.n if self.partial else self.game.n
        check = as_stacked_estimates if self.partial else as_action_profile
        x0 = simulation.get("x0")
        x0 = uniform_box(rng, size, simulation["init_box"]) if x0 is None else check(self.game, x0)
        if self.config["dynamics"] == "gradient":
            return x0, None
        r0 = simulation.get("r0")
        r0 = uniform_box(rng, size, simulation["init_box"]) if r0 is None else check(self.game, r0)
        return x0, r0

    def _horizon(self) -> Tuple[float, Optional[float]]:
        overrides = self.config["overrides"]
        simulation = self.config["simulation"]
        T = overrides["T"] if overrides.get("T") is not None else simulation["T"]
        h = overrides["h"] if overrides.get("h") is not None else simulation.get("h")
        return float(T), h

    def simulate(self) -> Trajectory:
        """
        Integrate the scenario's dynamics.

        Raises:
            SimulationDivergedError: on a non-finite state
        """
        simulation = self.config["simulation"]
        T, h = self._horizon()
        x0, r0 = self.initial_conditions()
        z0 = x0 if r0 is None else np.concatenate((x0, r0))
        dynamics = self.build_dynamics()
        return dynamics.simulate(z0, T, h=h, method=simulation["method"], decimation=simulation.get("decimation"),
                                 max_samples=simulation["max_samples"],
                                 stiffness_factor=simulation["stiffness_factor"], seed=self.seed)

    def analyze(self) -> Dict[str, Any]:
        """
        Constants report: moduli, derived moduli and resolvent feasibility.
        """
        if self.game is None:
            self.game = build_game(self.config["game"])
            self.constants = resolve_constants(self.game, self.config["constants"], self.seed)
        constants = self.constants
        report: Dict[str, Any] = {"game": self.game.get_metadata(), "constants": constants.to_dict()}

        known = {"lipschitz": constants.lipschitz, "inv_lipschitz": constants.inv_lipschitz}
        if constants.strong_monotone > 0.0:
            known["strong_monotone"] = constants.strong_monotone
        if constants.cocoercive:
            known["cocoercive"] = constants.cocoercive
        derived = derive_constants({k: v for k, v in known.items() if v})
        report["derived"] = {"values": derived.values, "sources": derived.sources}

        window = feasibility_window(constants)
        N = self.game.n_agents
        if window is None:
            report["resolvent"] = {"feasible": False, "reason": "inverse Lipschitz modulus undefined"}
        else:
            mu_R2 = constants.mu_hypo * constants.inv_lipschitz ** 2
            report["resolvent"] = {
                "window": [window[0], window[1]],
                "feasible": window[0] < window[1],
                "mu_R2": mu_R2,
                "distributed_feasible": mu_R2 * N < 1.0,
                "N": N,
            }
        self.logger.info(f"Analyzed {self.game.name}: {constants.to_dict()}")
        return report

    def run(self) -> Dict[str, Any]:
        """
        Run the scenario: simulate, evaluate diagnostics, export.

        Returns:
            Summary dictionary

        Raises:
            SimulationDivergedError: after exporting the finite part of the run
        """
        if self.game is None:
            self.setup()
        self.logger.info(f"Starting scenario run {self.run_id}")
        self.metrics["start_time"] = time.time()
        self.metrics["status"] = "running"

        try:
            try:
                trajectory = self.simulate()
            except SimulationDivergedError as e:
                self.metrics["status"] = "diverged"
                self.trajectory = e.trajectory
                self.summary = self._summary(e.trajectory, diverged_at=e.time)
                self._export(e.trajectory, self.summary)
                raise

            self.trajectory = trajectory
            self.metrics["samples"] = len(trajectory)
            self.summary = self._summary(trajectory)
            self._export(trajectory, self.summary)
            self.metrics["status"] = "completed_success"
            return self.summary

        except Exception as e:
            self.logger.error(f"Error running scenario: {str(e)}")
            self.metrics["errors"] += 1
            if self.metrics["status"] == "running":
                self.metrics["status"] = "failed"
            raise
        finally:
            self.metrics["end_time"] = time.time()
            self.metrics["duration_seconds"] = self.metrics["end_time"] - self.metrics["start_time"]
            self.logger.info(f"Scenario run {self.run_id} finished with status: {self.metrics['status']}")
            self._log_metrics()

    def equilibrium(self) -> Optional[np.ndarray]:
        if self.game is None:
            return None
        try:
            return self.game.equilibrium()
        except SingularSystemError as e:
            self.logger.warning(f"No unique equilibrium: {str(e)}")
            return None

    def lyapunov(self, trajectory: Trajectory) -> Optional[Dict[str, Any]]:
        """
        Evaluate the certificate's Lyapunov function along the trajectory and
        check that it never increases beyond 1e-8 (1 + V0) per sample.
        """
        if self.certificate is None or not self.certificate.feasible or self.forced:
            return None
        equilibrium = self.equilibrium()
        if equilibrium is None:
            self.logger.info("Equilibrium unknown; Lyapunov values skipped")
            return None
        kind = default_kind(self.theorem)
        if kind in ("full-quad", "dist-quad") and "P" not in self.certificate.aux:
            self.logger.info(f"Certificate carries no Lyapunov matrix; {kind} values skipped")
            return None
        values = lyapunov_series(trajectory, kind, self.certificate, equilibrium, self.game,
                                 self.constants.lipschitz, self.constants.mu_hypo)
        trajectory.set_diagnostic("lyapunov", values)
        ok, worst, index = check_nonincreasing(values)
        return {"kind": kind, "initial": float(values[0]), "final": float(values[-1]),
                "nonincreasing": ok, "worst_increase": worst, "index": index}

    def _summary(self, trajectory: Trajectory, diverged_at: Optional[float] = None) -> Dict[str, Any]:
        simulation = self.config["simulation"]
        T, _ = self._horizon()
        params = {**self.params, "T": T, "h": trajectory.metadata["h"], "method": trajectory.metadata["method"]}
        summary: Dict[str, Any] = {
            "name": self.name,
            "run_id": self.run_id,
            "seed": self.seed,
            "game": self.game.name,
            "info_mode": self.info_mode,
            "dynamics": self.config["dynamics"],
            "theorem": self.theorem,
            "certified": self.certificate is not None and self.certificate.feasible and not self.forced,
            "params": params,
            "samples": len(trajectory),
            "wall_time": trajectory.metadata.get("wall_time"),
        }
        if diverged_at is not None:
            summary.update({"status": "diverged", "diverged_at": diverged_at, "converged": False})
            return summary

        verdict = detect_convergence(trajectory, simulation["tol_residual"], simulation["tol_consensus"])
        rate = estimate_rate(trajectory, self.equilibrium())
        summary.update({
            "status": "completed",
            "converged": verdict.converged,
            "convergence_time": verdict.time,
            "final_residual": verdict.final_residual,
            "final_consensus_error": verdict.final_consensus_error,
            "final_norm": float(np.linalg.norm(trajectory.final_x)),
            "rate": rate.to_dict(),
            "lyapunov": self.lyapunov(trajectory) if simulation.get("lyapunov", True) else None,
        })
        return summary

    def _path(self, suffix: str) -> str:
        return os.path.join(self.output_dir, f"{self.name}_{suffix}")

    def _export(self, trajectory: Trajectory, summary: Dict[str, Any]) -> None:
        """
        Write the enabled outputs; failures are counted, not raised.
        """
        outputs = self.config["outputs"]
        os.makedirs(self.output_dir, exist_ok=True)
        jobs = []
        if outputs.get("csv"):
            jobs.append(("csv", TrajectoryCSVExporter, self._path("trajectory.csv"), trajectory))
        if outputs.get("plot"):
            jobs.append(("plot", PlotDataExporter, self._path("plot.dat"), trajectory))
        if outputs.get("certificate") and self.certificate is not None:
            jobs.append(("certificate", JSONExporter, self._path("certificate.json"), self.certificate))
        written = {}
        for label, exporter_class, path, payload in jobs:
            try:
                exporter = exporter_class({"file_path": path, "run_id": self.run_id})
                if exporter.export(payload):
                    written[label] = path
                    self.metrics["files_written"] += 1
                else:
                    self.metrics["errors"] += 1
            except Exception as e:
                self.logger.error(f"Error in exporter {exporter_class.__name__}: {str(e)}")
                self.metrics["errors"] += 1
        if outputs.get("summary"):
            path = self._path("summary.json")
            summary["outputs"] = {**written, "summary": path}
            try:
                exported = JSONExporter({"file_path": path, "run_id": self.run_id}).export(summary)
            except Exception as e:
                self.logger.error(f"Error in exporter JSONExporter: {str(e)}")
                exported = False
            if exported:
                self.metrics["files_written"] += 1
            else:
                self.metrics["errors"] += 1
                summary["outputs"] = written
        else:
            summary["outputs"] = written

    def _log_metrics(self) -> None:
        self.logger.info(f"Run ID: {self.metrics['run_id']}")
        self.logger.info(f"Status: {self.metrics['status']}")
        if self.metrics["start_time"] and self.metrics["end_time"]:
            self.logger.info(f"Duration: {self.metrics['duration_seconds']:.2f} seconds")
        self.logger.info(f"Samples: {self.metrics['samples']}")
        self.logger.info(f"Files written: {self.metrics['files_written']}")
        self.logger.info(f"Errors: {self.metrics['errors']}")

    def get_metrics(self) -> Dict[str, Any]:
        return self.metrics


def run_pipeline_from_config(config_path: str, output_dir: str = None, force: bool = False) -> Dict[str, Any]:
    """
    Helper function to run a scenario from a configuration file.

    Returns:
        The run summary
    """
    pipeline = ScenarioPipeline(config_path, output_dir=output_dir, force=force)
    pipeline.setup()
    return pipeline.run()


def _run_one(config_path: str, output_dir: Optional[str], force: bool) -> Dict[str, Any]:
    try:
        return run_pipeline_from_config(config_path, output_dir, force)
    except Exception as e:
        return {"config": config_path, "status": "failed", "error": f"{type(e).__name__}: {e}"}


def run_batch(config_paths: Sequence[str], workers: int = 1, output_dir: str = None,
              force: bool = False) -> List[Dict[str, Any]]:
    """
    Run independent scenarios, in worker processes when workers > 1.

    Returns:
        One summary per scenario, in input order; failed scenarios report
        status "failed" and the error
    """
    if workers <= 1 or len(config_paths) <= 1:
        return [_run_one(path, output_dir, force) for path in config_paths]
    logger.info(f"Running {len(config_paths)} scenarios on {workers} processes")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_one, path, output_dir, force) for path in config_paths]
        return [future.result() for future in futures]
