"""
JSON exporter for the Heavy Anchor toolkit.
Writes run summaries, certificates and constant reports.
"""
import json
import logging
import math
from typing import Any, Dict

import numpy as np
import pandas as pd

from src.exporters.base_exporter import BaseExporter

logger = logging.getLogger(__name__)


class JSONEncoder(json.JSONEncoder):
    """
    JSON encoder handling NumPy and pandas values, complex numbers and
    objects with a to_dict() method. Infinities are written as strings.
    """

    def default(self, obj):
        if hasattr(obj, "to_dict"):
            return _clean(obj.to_dict())
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return _finite(float(obj))
        if isinstance(obj, np.bool_):
            return bool(obj)
        if isinstance(obj, (complex, np.complexfloating)):
            return [float(obj.real), float(obj.imag)]
        if isinstance(obj, np.ndarray):
            return _clean(obj.tolist())
        if isinstance(obj, pd.Series):
            return obj.tolist()
        return super().default(obj)

    def iterencode(self, o, _one_shot=False):
        return super().iterencode(_clean(o), _one_shot)


def _finite(value: float) -> Any:
    if math.isnan(value):
        return None
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def _clean(obj: Any) -> Any:
    """Replace non-finite floats recursively so the output is strict JSON."""
    if isinstance(obj, float):
        return _finite(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(payload: Any, indent: int = 2) -> str:
    return json.dumps(payload, cls=JSONEncoder, indent=indent, allow_nan=False)


class JSONExporter(BaseExporter):
    """
    Exporter for JSON documents.
    """

    def __init__(self, config: Dict[str, Any]):
        """
        Args:
            config: Dictionary containing configuration parameters including:
                - file_path: Path to the target JSON file
                - indent: Indentation level for pretty printing (default: 2)
        """
        super().__init__(config)
        self.indent = config.get("indent", 2)

    def export(self, payload: Any) -> bool:
        if not self.validate_destination():
            raise ValueError(f"Invalid or inaccessible JSON destination: {self.file_path}")
        try:
            text = dumps(payload, self.indent)
            with open(self.file_path, "w", encoding=self.encoding) as f:
                f.write(text)
        except (OSError, TypeError, ValueError) as e:
            logger.error(f"Error writing JSON file {self.file_path}: {str(e)}")
            raise
        logger.info(f"Wrote JSON document to {self.file_path}")
        return True

    def get_metadata(self) -> Dict[str, Any]:
        metadata = super().get_metadata()
        metadata.update({"format": "JSON", "indent": self.indent})
        return metadata
