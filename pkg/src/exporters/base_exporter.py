"""
Base Exporter module for the Heavy Anchor toolkit.
Provides the abstract base class for all result exporters.
"""
from abc import ABC, abstractmethod
import logging
import os
from typing import Any, Dict

logger = logging.getLogger(__name__)


class BaseExporter(ABC):
    """
    Abstract base class for writers of run artifacts.
    """

    def __init__(self, config: Dict[str, Any]):
        """
        Initialize the exporter with configuration.

        Args:
            config: Dictionary containing configuration parameters including:
                - file_path: Target file
                - create_dirs: Create missing parent directories (default: True)
                - encoding: File encoding (default: 'utf-8')
        """
        self.config = config
        self.name = self.__class__.__name__
        self.file_path = config.get("file_path")
        self.create_dirs = config.get("create_dirs", True)
        self.encoding = config.get("encoding", "utf-8")
        logger.debug(f"Initializing exporter: {self.name}")

    @abstractmethod
    def export(self, payload: Any) -> bool:
        """
        Write the payload to the destination.

        Returns:
            True if the export succeeded
        """

    def validate_destination(self) -> bool:
        """
        Check that the destination file can be written, creating its parent
        directory when allowed.
        """
        if not self.file_path:
            logger.error(f"{self.name}: file_path not provided in configuration")
            return False

        parent_dir = os.path.dirname(os.path.abspath(self.file_path))
        if not os.path.exists(parent_dir):
            if not self.create_dirs:
                logger.error(f"Destination directory does not exist: {parent_dir}")
                return False
            try:
                os.makedirs(parent_dir, exist_ok=True)
                logger.info(f"Created directory: {parent_dir}")
            except OSError as e:
                logger.error(f"Failed to create directory {parent_dir}: {str(e)}")
                return False

        if os.path.exists(self.file_path) and not os.access(self.file_path, os.W_OK):
            logger.error(f"No write permission for file: {self.file_path}")
            return False
        return True

    def get_metadata(self) -> Dict[str, Any]:
        """
        Get metadata about the export.
        """
        metadata = {"exporter": self.name, "destination": self.file_path}
        if self.file_path and os.path.exists(self.file_path):
            metadata["size_bytes"] = os.stat(self.file_path).st_size
        return metadata
