"""
Trajectory CSV exporter for the Heavy Anchor toolkit.
"""
from typing import Any, Dict, List

import pandas as pd

from src.dynamics.trajectory import DIAGNOSTIC_COLUMNS, Trajectory
from src.exporters.base_exporter import BaseExporter
from src.utils.logging_utils import get_run_logger


def state_columns(prefix: str, width: int, n_agents: int, partial: bool) -> List[str]:
    """x_1..x_n for profiles; x_{i}_{j} (agent i's estimate of coordinate j) for stacked estimates."""
    if not partial:
        return [f"{prefix}_{j + 1}" for j in range(width)]
    n = width // n_agents
    return [f"{prefix}_{i + 1}_{j + 1}" for i in range(n_agents) for j in range(n)]


def trajectory_frame(trajectory: Trajectory) -> pd.DataFrame:
    """One row per sample: time, states, then diagnostics."""
    partial = trajectory.metadata.get("info_mode") == "partial"
    n_agents = int(trajectory.metadata.get("n_agents") or 1)
    frames = [pd.DataFrame({"time": trajectory.times})]
    frames.append(pd.DataFrame(trajectory.x, columns=state_columns("x", trajectory.x.shape[1], n_agents, partial)))
    if trajectory.r is not None:
        frames.append(pd.DataFrame(trajectory.r, columns=state_columns("r", trajectory.r.shape[1], n_agents, partial)))
    diagnostics = {name: trajectory.diagnostics[name] for name in DIAGNOSTIC_COLUMNS if name in trajectory.diagnostics}
    frames.append(pd.DataFrame(diagnostics))
    return pd.concat(frames, axis=1)


class TrajectoryCSVExporter(BaseExporter):
    """
    Writes a trajectory as CSV with header time, x_*, r_*, diagnostics.
    """

    def __init__(self, config: Dict[str, Any]):
        """
        Args:
            config: Dictionary containing configuration parameters including:
                - file_path: Target CSV file (required)
                - delimiter: Field separator (default: ',')
                - float_format: printf-style format for floats (default: '%.12g')
                - run_id: Run identifier for log lines
        """
        super().__init__(config)
        self.logger = get_run_logger(__name__, run_id=config.get("run_id"), component="TrajectoryCSVExporter")
        if not self.file_path:
            self.logger.error("file_path is required for the CSV exporter")
            raise ValueError("file_path is required for the CSV exporter")
        self.delimiter = config.get("delimiter", ",")
        self.float_format = config.get("float_format", "%.12g")

    def export(self, payload: Trajectory) -> bool:
        if not self.validate_destination():
            self.logger.error(f"CSV destination validation failed for {self.file_path}")
            return False
        try:
            frame = trajectory_frame(payload)
            frame.to_csv(self.file_path, sep=self.delimiter, index=False, encoding=self.encoding,
                         float_format=self.float_format)
        except (OSError, ValueError) as e:
            self.logger.error(f"Error writing trajectory to {self.file_path}: {str(e)}")
            return False
        self.logger.info(f"Wrote {len(frame)} samples to {self.file_path}")
        return True

    def get_metadata(self) -> Dict[str, Any]:
        metadata = super().get_metadata()
        metadata["format"] = "CSV"
        return metadata

