"""
Command Line Interface for the Heavy Anchor toolkit.
Analyze operator constants, synthesize parameters, simulate scenarios, run
the property suites and reproduce the reference parameter table.

Exit codes: 0 ok, 1 usage or configuration error, 2 infeasible parameters,
3 verification failure or divergence.
"""
import argparse
import logging
import os
import sys
import time
from typing import Any, Dict, List, Optional

import pandas as pd
import yaml

from src.diagnostics.rate import rate_experiment
from src.diagnostics.verification import (
    check_equilibrium_invariance,
    check_lyapunov_monotone,
    run_property_suites,
)
from src.exporters.json_exporter import JSONExporter, dumps
from src.pipeline import ScenarioPipeline, run_batch
from src.synthesis.reference_table import ABS_TOL, REL_TOL, compare_rows, compute_rows
from src.utils.config_manager import THEOREMS, ConfigManager
from src.utils.errors import ConfigError, InfeasibleParametersError, SimulationDivergedError
from src.utils.logging_utils import get_logger, setup_logging

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFICATION = 3

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class ToolkitArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with EXIT_USAGE."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", action="append", default=None,
                        help="Scenario file (YAML); repeat with simulate to run a batch")
    common.add_argument("--game", default=None, help="Fixture name: harmonic, g1, g2, g3, sine")
    common.add_argument("--theorem", choices=THEOREMS, default=None, help="Convergence result to certify")
    common.add_argument("--info", choices=["full", "partial"], default=None, help="Information setting")
    common.add_argument("--dynamics", choices=["gradient", "anchor"], default=None, help="Seeking dynamics")
    common.add_argument("--graph", choices=["ring", "complete", "path", "star"], default=None,
                        help="Communication graph for partial information")
    common.add_argument("--seed", type=int, default=None, help="Seed for initial conditions and sampling")
    common.add_argument("-T", "--horizon", type=float, default=None, help="Simulation horizon")
    common.add_argument("-H", "--step", type=float, default=None, help="Integrator step size")
    common.add_argument("--alpha", type=float, default=None, help="Override alpha")
    common.add_argument("--beta", type=float, default=None, help="Override beta")
    common.add_argument("--gain", dest="c", type=float, default=None, help="Override the consensus gain c")
    common.add_argument("--output-dir", default=None, help="Directory for output files (default: outputs.dir)")
    common.add_argument("--run-id", default=None, help="Specify a custom run ID")
    common.add_argument("-l", "--log-file", default=None,
                        help="Path to the log file (default: heavy_anchor.log in current directory)")
    common.add_argument("--log-level", choices=LOG_LEVELS, default=None,
                        help="Logging level (default: logging.level of the scenario, else INFO)")
    common.add_argument("--console-level", choices=LOG_LEVELS, default="WARNING",
                        help="Console logging level (default: WARNING)")
    common.add_argument("--print-config", action="store_true",
                        help="Print the merged scenario with every default and exit")
    common.add_argument("--force", action="store_true", help="Accept overrides outside the certified ranges")
    common.add_argument("--workers", type=int, default=1, help="Worker processes for batches and sampling")
    return common


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Parse command line arguments.

    Returns:
        Parsed arguments
    """
    common = _common_options()
    parser = ToolkitArgumentParser(description="Heavy Anchor Nash equilibrium seeking toolkit")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    commands.add_parser("analyze", parents=[common], help="Operator constants and resolvent feasibility")
    commands.add_parser("synth", parents=[common], help="Certified (alpha, beta, c) for the scenario")
    commands.add_parser("simulate", parents=[common], help="Run the scenario and write its outputs")
    verify = commands.add_parser("verify", parents=[common], help="Run the property suites")
    verify.add_argument("--no-scenario", action="store_true", help="Skip the scenario-specific checks")
    table = commands.add_parser("reproduce-table", parents=[common], help="Recompute the reference table")
    table.add_argument("--rel-tol", type=float, default=REL_TOL, help="Relative tolerance per cell")
    table.add_argument("--abs-tol", type=float, default=ABS_TOL, help="Absolute tolerance per cell")
    explore = commands.add_parser("explore-rate", parents=[common],
                                  help="Fitted rate of the R-parametrized 2x2 game (exploratory)")
    explore.add_argument("-R", "--inv-lipschitz", dest="R", type=float, default=1.0,
                         help="Inverse Lipschitz modulus of the test game (default: 1)")
    return parser.parse_args(argv)


def build_config(args: argparse.Namespace) -> ConfigManager:
    """
    Merge the scenario file (if any) with command-line overrides.

    Raises:
        ConfigError: if the result is invalid
    """
    path = args.config[0] if args.config else None
    manager = ConfigManager(path)
    info = args.info
    if info is None and args.theorem is not None:
        info = "partial" if args.theorem.startswith("dist-") else "full"
    manager.apply_overrides({
        "game": args.game,
        "name": args.game if args.game and not path else None,
        "theorem": args.theorem,
        "info_mode": info,
        "dynamics": args.dynamics,
        "graph.type": args.graph,
        "constants.workers": args.workers if args.workers > 1 else None,
        "overrides.seed": args.seed,
        "overrides.T": args.horizon,
        "overrides.h": args.step,
        "overrides.alpha": args.alpha,
        "overrides.beta": args.beta,
        "overrides.c": args.c,
        "outputs.dir": args.output_dir,
    })
    manager.validate()
    return manager


def _emit(payload: Any) -> None:
    print(dumps(payload))


def _pipeline(args: argparse.Namespace, manager: ConfigManager) -> ScenarioPipeline:
    return ScenarioPipeline(config=manager.to_dict(), output_dir=args.output_dir, run_id=args.run_id,
                            force=args.force)


def cmd_analyze(args: argparse.Namespace, manager: ConfigManager) -> int:
    _emit(_pipeline(args, manager).analyze())
    return EXIT_OK


def cmd_synth(args: argparse.Namespace, manager: ConfigManager) -> int:
    manager.apply_overrides({"dynamics": "anchor"})
    pipeline = _pipeline(args, manager)
    try:
        pipeline.setup()
    except InfeasibleParametersError as e:
        if pipeline.certificate is None:
            raise
        logger.warning(f"Infeasible: {str(e)}")
    certificate = pipeline.certificate
    _emit(certificate)
    if manager.get_nested_value("outputs.certificate", False):
        path = os.path.join(pipeline.output_dir, f"{pipeline.name}_certificate.json")
        JSONExporter({"file_path": path}).export(certificate)
    return EXIT_OK if certificate.feasible else EXIT_INFEASIBLE


def cmd_simulate(args: argparse.Namespace, manager: ConfigManager) -> int:
    if args.config and len(args.config) > 1:
        summaries = run_batch(args.config, workers=args.workers, output_dir=args.output_dir, force=args.force)
        _emit(summaries)
        failed = [s for s in summaries if s.get("status") != "completed"]
        if failed:
            logger.warning(f"{len(failed)} of {len(summaries)} scenarios did not complete")
            return EXIT_VERIFICATION
        return EXIT_OK

    pipeline = _pipeline(args, manager)
    pipeline.setup()
    try:
        summary = pipeline.run()
    except SimulationDivergedError as e:
        logger.error(f"Simulation diverged at t={e.time}")
        _emit(pipeline.summary)
        return EXIT_VERIFICATION
    _emit(summary)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, manager: ConfigManager) -> int:
    seed = manager.get_nested_value("overrides.seed", manager.get_nested_value("seed"))
    results = run_property_suites(seed=seed)

    if not args.no_scenario:
        pipeline = _pipeline(args, manager)
        pipeline.setup()
        equilibrium = pipeline.equilibrium()
        if equilibrium is not None:
            results.append(check_equilibrium_invariance(pipeline.build_dynamics(), equilibrium))
        summary = pipeline.run()
        lyapunov = summary.get("lyapunov")
        if lyapunov is not None:
            results.append(check_lyapunov_monotone(pipeline.trajectory.diagnostics["lyapunov"]))

    report = [result.to_dict() for result in results]
    _emit(report)
    failed = [result.name for result in results if not result.passed]
    if failed:
        logger.error(f"Property checks failed: {failed}")
        return EXIT_VERIFICATION
    return EXIT_OK


def reproduce_table(rel_tol: float = REL_TOL, abs_tol: float = ABS_TOL) -> Dict[str, Any]:
    """Recompute every reference row and diff it cell by cell."""
    started = time.perf_counter()
    rows = compute_rows()
    diffs = compare_rows(rows, rel_tol=rel_tol, abs_tol=abs_tol)
    return {
        "rows": [row.to_dict() for row in rows],
        "diffs": [diff.to_dict() for diff in diffs],
        "failures": [diff.to_dict() for diff in diffs if not diff.ok],
        "wall_time": time.perf_counter() - started,
    }


def cmd_reproduce_table(args: argparse.Namespace, manager: ConfigManager) -> int:
    report = reproduce_table(args.rel_tol, args.abs_tol)
    frame = pd.DataFrame(report["rows"])
    print(frame.to_string(index=False, float_format=lambda v: f"{v:.6g}"))
    output_dir = args.output_dir or manager.get_nested_value("outputs.dir", "output")
    JSONExporter({"file_path": os.path.join(output_dir, "reference_table.json")}).export(report)
    if report["failures"]:
        for failure in report["failures"]:
            logger.error(f"Table cell {failure['game']}/{failure['theorem']}/{failure['field']}: "
                         f"expected {failure['expected']}, got {failure['actual']}")
        return EXIT_VERIFICATION
    logger.info(f"All {len(report['diffs'])} table cells within tolerance")
    return EXIT_OK


def cmd_explore_rate(args: argparse.Namespace, manager: ConfigManager) -> int:
    horizon = args.horizon if args.horizon is not None else 60.0
    seed = manager.get_nested_value("overrides.seed", manager.get_nested_value("seed"))
    _emit(rate_experiment(args.R, T=horizon, h=args.step, seed=seed))
    return EXIT_OK


def _configure_logging(args: argparse.Namespace, section: Optional[Dict[str, Any]] = None) -> None:
    """Command-line flags win over the scenario's logging section."""
    section = section or {}
    level = args.log_level or str(section.get("level") or "INFO").upper()
    setup_logging(
        log_file=args.log_file or section.get("file") or "heavy_anchor.log",
        log_level=getattr(logging, level),
        console_level=getattr(logging, args.console_level),
    )


HANDLERS = {
    "analyze": cmd_analyze,
    "synth": cmd_synth,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "reproduce-table": cmd_reproduce_table,
    "explore-rate": cmd_explore_rate,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point for the toolkit CLI.

    Returns:
        Process exit code
    """
    args = parse_args(argv)

    _configure_logging(args)
    logger.info(f"Heavy Anchor toolkit: {args.command}")

    try:
        manager = build_config(args)
    except (ConfigError, FileNotFoundError, yaml.YAMLError) as e:
        logger.error(f"Invalid configuration: {str(e)}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    section = manager.get_section("logging") or {}
    scenario_level = str(section.get("level") or "INFO").upper()
    if (args.log_file is None and section.get("file")) or (args.log_level is None and scenario_level != "INFO"):
        _configure_logging(args, section)

    if args.print_config:
        print(manager.dump_config())
        return EXIT_OK

    try:
        return HANDLERS[args.command](args, manager)
    except ConfigError as e:
        logger.error(f"Invalid configuration: {str(e)}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleParametersError as e:
        logger.error(f"Infeasible parameters: {str(e)}")
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except SimulationDivergedError as e:
        logger.error(f"Simulation diverged at t={e.time}: {str(e)}")
        print(f"diverged at t={e.time}", file=sys.stderr)
        return EXIT_VERIFICATION


if __name__ == "__main__":
    sys.exit(main())
