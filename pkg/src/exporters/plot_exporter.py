"""
Plot-data exporter: whitespace-separated columns plus a gnuplot script.

Each plotted series occupies two columns (time, value) so the file can be
consumed by any plotting tool; no rendering happens here.
"""
import logging
import os
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.dynamics.trajectory import Trajectory
from src.exporters.base_exporter import BaseExporter

logger = logging.getLogger(__name__)

DEFAULT_SERIES = ("ne_residual", "consensus_error", "lyapunov")


class PlotDataExporter(BaseExporter):
    """
    Writes `<file_path>` (.dat) and `<stem>.gp`.
    """

    def __init__(self, config: Dict[str, Any]):
        """
        Args:
            config: Dictionary containing configuration parameters including:
                - file_path: Target .dat file
                - series: Diagnostic names to plot (default: residual, consensus, Lyapunov)
                - actions: Also plot the first `actions` state coordinates (default: 0)
                - log_scale: Logarithmic y axis (default: True)
        """
        super().__init__(config)
        self.series: Sequence[str] = config.get("series", DEFAULT_SERIES)
        self.actions = int(config.get("actions", 0))
        self.log_scale = config.get("log_scale", True)

    @property
    def script_path(self) -> str:
        return os.path.splitext(self.file_path)[0] + ".gp"

    def _columns(self, trajectory: Trajectory) -> List[tuple]:
        columns = [(name, trajectory.diagnostics[name]) for name in self.series if name in trajectory.diagnostics]
        for j in range(min(self.actions, trajectory.x.shape[1])):
            columns.append((f"x_{j + 1}", trajectory.x[:, j]))
        return columns

    def export(self, payload: Trajectory) -> bool:
        if not self.validate_destination():
            logger.error(f"Plot destination validation failed for {self.file_path}")
            return False
        columns = self._columns(payload)
        if not columns:
            logger.warning("No series to plot")
            return False

        times = payload.times
        data = np.column_stack([block for _, values in columns for block in (times, values)])
        header = " ".join(f"t_{name} {name}" for name, _ in columns)
        np.savetxt(self.file_path, data, header=header, fmt="%.10e")
        self._write_script(columns)
        logger.info(f"Wrote {len(columns)} plot series to {self.file_path}")
        return True

    def _write_script(self, columns: List[tuple], title: Optional[str] = None) -> None:
        data_name = os.path.basename(self.file_path)
        lines = [
            "set xlabel 't'",
            "set key outside",
            f"set title '{title or os.path.splitext(data_name)[0]}'",
        ]
        if self.log_scale:
            lines.append("set logscale y")
        plots = [f"'{data_name}' using {2 * k + 1}:{2 * k + 2} with lines title '{name}'"
                 for k, (name, _) in enumerate(columns)]
        lines.append("plot " + ", \\\n     ".join(plots))
        with open(self.script_path, "w", encoding=self.encoding) as f:
            f.write("\n".join(lines) + "\n")

    def get_metadata(self) -> Dict[str, Any]:
        metadata = super().get_metadata()
        metadata.update({"format": "gnuplot-data", "script": self.script_path})
        return metadata
