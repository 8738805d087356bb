"""
Exporters for trajectories, summaries and plot data.
"""
from src.exporters.base_exporter import BaseExporter
from src.exporters.csv_exporter import TrajectoryCSVExporter, trajectory_frame
from src.exporters.json_exporter import JSONEncoder, JSONExporter
from src.exporters.plot_exporter import PlotDataExporter

__all__ = [
    "BaseExporter",
    "JSONEncoder",
    "JSONExporter",
    "PlotDataExporter",
    "TrajectoryCSVExporter",
    "trajectory_frame",
]
