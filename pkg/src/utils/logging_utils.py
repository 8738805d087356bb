"""
Logging for the Heavy Anchor toolkit.

One console handler on stderr (stdout carries command results) and one
rotating file handler. Batch scenarios run in worker processes, so file
records carry the process name.
"""
import logging
import logging.config
import os
import random
from datetime import datetime
from typing import Any, Dict, Optional, Union

LOG_FILE = 'heavy_anchor.log'
CONSOLE_FORMAT = '%(asctime)s [%(levelname)s] %(name)s: %(message)s'
FILE_FORMAT = '%(asctime)s [%(levelname)s] [%(processName)s] [%(name)s:%(lineno)s] %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
MAX_LOG_BYTES = 10 * 1024 * 1024
RUN_ID_ALPHABET = 'abcdefghijklmnopqrstuvwxyz0123456789'

Level = Union[str, int]


def build_log_config(log_file: str = LOG_FILE, log_level: Level = logging.INFO,
                     console_level: Level = logging.INFO) -> Dict[str, Any]:
    """
    dictConfig mapping for the console and rotating file handlers.

    The root logger passes everything; each handler filters at its own level.
    """
    return {
        'version': 1,
        'disable_existing_loggers': False,
        'formatters': {
            'console': {'format': CONSOLE_FORMAT, 'datefmt': DATE_FORMAT},
            'file': {'format': FILE_FORMAT, 'datefmt': DATE_FORMAT},
        },
        'handlers': {
            'console': {
                'class': 'logging.StreamHandler',
                'level': console_level,
                'formatter': 'console',
                'stream': 'ext://sys.stderr',
            },
            'file': {
                'class': 'logging.handlers.RotatingFileHandler',
                'level': log_level,
                'formatter': 'file',
                'filename': log_file,
                'maxBytes': MAX_LOG_BYTES,
                'backupCount': 5,
                'encoding': 'utf8',
            },
        },
        'root': {'handlers': ['console', 'file'], 'level': 'DEBUG'},
    }


def setup_logging(log_file: Optional[str] = None, log_level: Level = logging.INFO,
                  console_level: Level = logging.INFO) -> None:
    """
    Configure the root logger, creating the log file's directory if needed.

    Args:
        log_file: Log file path; heavy_anchor.log in the working directory when None
        log_level: Level of the file handler
        console_level: Level of the console handler
    """
    log_file = log_file or LOG_FILE
    log_dir = os.path.dirname(log_file)
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
    logging.config.dictConfig(build_log_config(log_file, log_level, console_level))
    logging.getLogger(__name__).debug(f"Logging to {log_file} at level {logging.getLevelName(log_level)}")


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)


class RunLoggerAdapter(logging.LoggerAdapter):
    """
    Prefixes messages with "[run_id=... component=...]" for the fields that are set.
    """

    def __init__(self, logger: logging.Logger, run_id: Optional[str] = None, component: Optional[str] = None):
        context = {key: value for key, value in (('run_id', run_id), ('component', component)) if value}
        super().__init__(logger, context)

    def process(self, msg, kwargs):
        if not self.extra:
            return msg, kwargs
        prefix = ' '.join(f"{key}={value}" for key, value in self.extra.items())
        return f"[{prefix}] {msg}", kwargs


def get_run_logger(name: str, run_id: Optional[str] = None, component: Optional[str] = None) -> RunLoggerAdapter:
    """
    Get a logger adapter carrying run context.

    Args:
        name: Name for the logger, typically the module name.
        run_id: Optional id of the scenario run.
        component: Optional name of the emitting component.

    Returns:
        RunLoggerAdapter instance.
    """
    return RunLoggerAdapter(logging.getLogger(name), run_id=run_id, component=component)


def generate_run_id(seed: Optional[int] = None) -> str:
    """
    Generate a run id for tracking a scenario execution.

    Seeded runs get a suffix derived from the seed; the timestamp still differs.

    Args:
        seed: Optional scenario seed.

    Returns:
        Run id string of the form run_<timestamp>_<suffix>.
    """
    timestamp = datetime.now().strftime('%Y%m%d%H%M%S')
    chooser = random.Random(seed) if seed is not None else random.SystemRandom()
    suffix = ''.join(chooser.choices(RUN_ID_ALPHABET, k=6))
    return f"run_{timestamp}_{suffix}"
