"""
Reference parameter table for the ten-agent quadratic fixtures.

Each row lists the certified beta interval, the chosen beta, d, the alpha
interval at that beta, the chosen alpha and c_min for one fixture under one
distributed result, on a ring of ten agents.
"""
from dataclasses import asdict, dataclass
import logging
from typing import Any, Dict, List, Optional, Sequence

from src.analysis.operator_constants import exact_quadratic_constants
from src.games.benchmarks import build_benchmark
from src.graphs.comm_graph import CommGraph
from src.synthesis.certificate import DIST_GENERAL, DIST_QUAD, ParameterCertificate
from src.synthesis.general import synth_partial_general
from src.synthesis.quadratic import synth_quadratic_partial

logger = logging.getLogger(__name__)

REL_TOL = 0.02
ABS_TOL = 0.005
NUMERIC_FIELDS = ("beta_min", "beta_max", "beta", "d", "alpha_min", "alpha_max", "alpha", "c_min")


@dataclass(frozen=True)
class TableRow:
    game: str
    theorem: str
    feasible: bool
    beta_min: Optional[float] = None
    beta_max: Optional[float] = None
    beta: Optional[float] = None
    d: Optional[float] = None
    alpha_min: Optional[float] = None
    alpha_max: Optional[float] = None
    alpha: Optional[float] = None
    c_min: Optional[float] = None

    @classmethod
    def from_certificate(cls, game: str, certificate: ParameterCertificate) -> "TableRow":
        if not certificate.feasible:
            return cls(game=game, theorem=certificate.theorem, feasible=False)
        return cls(
            game=game,
            theorem=certificate.theorem,
            feasible=True,
            beta_min=certificate.beta_range.low,
            beta_max=certificate.beta_range.high,
            beta=certificate.beta,
            d=certificate.d,
            alpha_min=certificate.alpha_range.low,
            alpha_max=certificate.alpha_range.high,
            alpha=certificate.alpha,
            c_min=certificate.c_min,
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


REFERENCE_ROWS: List[TableRow] = [
    TableRow("g1", DIST_QUAD, True, 0.1, 2.6, 0.35, None, 0.0, 0.540, 0.270, 1517.0),
    TableRow("g1", DIST_GENERAL, True, 0.1, 2.6, 0.35, 0.5, 0.0, 0.145, 0.072, 1668.0),
    TableRow("g2", DIST_QUAD, True, 0.1, 13.0 / 45.0, 107.0 / 900.0, None, 0.0, 0.065, 0.032, 2.22e6),
    TableRow("g2", DIST_GENERAL, False),
    TableRow("g3", DIST_QUAD, True, 0.2, 2.6, 0.44, None, 0.0, 0.581, 0.290, 7739.0),
    TableRow("g3", DIST_GENERAL, True, 0.2, 1.3, 0.31, 0.5, 0.0, 0.064, 0.032, 15057.0),
]


@dataclass(frozen=True)
class CellDiff:
    game: str
    theorem: str
    field: str
    expected: Any
    actual: Any
    abs_diff: Optional[float]
    rel_diff: Optional[float]
    ok: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def reference_table() -> List[TableRow]:
    return list(REFERENCE_ROWS)


def compute_row(game_name: str, theorem: str, d: float = 0.5) -> TableRow:
    """Synthesize one table row on a ring graph of the fixture's size."""
    game = build_benchmark(game_name)
    graph = CommGraph.ring(game.n_agents)
    if theorem == DIST_QUAD:
        certificate = synth_quadratic_partial(game, game.n_agents, graph)
    elif theorem == DIST_GENERAL:
        certificate = synth_partial_general(exact_quadratic_constants(game), game.n_agents, d, graph)
    else:
        raise ValueError(f"No table column for theorem {theorem!r}")
    return TableRow.from_certificate(game_name, certificate)


def compute_rows(rows: Optional[Sequence[TableRow]] = None, d: float = 0.5) -> List[TableRow]:
    rows = REFERENCE_ROWS if rows is None else rows
    computed = [compute_row(row.game, row.theorem, d) for row in rows]
    logger.info(f"Computed {len(computed)} table rows")
    return computed


def _cell(game: str, theorem: str, name: str, expected: Any, actual: Any, rel_tol: float,
          abs_tol: float) -> CellDiff:
    if expected is None or actual is None:
        return CellDiff(game, theorem, name, expected, actual, None, None, expected is None and actual is None)
    abs_diff = abs(actual - expected)
    rel_diff = abs_diff / abs(expected) if expected != 0 else None
    ok = abs_diff <= max(abs_tol, rel_tol * abs(expected))
    return CellDiff(game, theorem, name, expected, actual, abs_diff, rel_diff, ok)


def compare_rows(computed: Sequence[TableRow], reference: Optional[Sequence[TableRow]] = None,
                 rel_tol: float = REL_TOL, abs_tol: float = ABS_TOL) -> List[CellDiff]:
    """
    Diff computed rows against reference rows, cell by cell.

    A numeric cell passes when its absolute difference is within
    max(abs_tol, rel_tol * |expected|). Rows are matched on (game, theorem).
    """
    reference = REFERENCE_ROWS if reference is None else reference
    by_key = {(row.game, row.theorem): row for row in computed}
    diffs: List[CellDiff] = []
    for expected in reference:
        actual = by_key.get((expected.game, expected.theorem))
        if actual is None:
            diffs.append(CellDiff(expected.game, expected.theorem, "row", "present", None, None, None, False))
            continue
        diffs.append(CellDiff(expected.game, expected.theorem, "feasible", expected.feasible, actual.feasible,
                              None, None, expected.feasible == actual.feasible))
        if not (expected.feasible and actual.feasible):
            continue
        for name in NUMERIC_FIELDS:
            diffs.append(_cell(expected.game, expected.theorem, name, getattr(expected, name), getattr(actual, name),
                               rel_tol, abs_tol))
    failures = [diff for diff in diffs if not diff.ok]
    if failures:
        logger.warning(f"{len(failures)} table cells outside tolerance")
    return diffs
