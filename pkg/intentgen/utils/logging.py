"""Logging configuration for intentgen.

Records from every ``intentgen.*`` logger go to the application log file
and stderr. While a pipeline run is active they are also copied to the
run directory's ``run.log``.
"""

import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Union

from ..config import init_config

PACKAGE_LOGGER = "intentgen"
RUN_LOG_FILE = "run.log"
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

_loggers = {}
_configured = False


def setup_logging() -> None:
    """Attach the file and stderr handlers to the package logger."""
    global _configured
    if _configured:
        return

    config = init_config()

    log_file = Path(config.log_file)
    log_file.parent.mkdir(parents=True, exist_ok=True)

    formatter = logging.Formatter(LOG_FORMAT)
    package = logging.getLogger(PACKAGE_LOGGER)
    for handler in (logging.FileHandler(log_file, encoding='utf-8'), logging.StreamHandler(sys.stderr)):
        handler.setFormatter(formatter)
        package.addHandler(handler)
    package.setLevel(getattr(logging, config.log_level.upper(), logging.INFO))

    _configured = True


def get_logger(name: str) -> logging.Logger:
    """
    Get or create a logger instance.

    Args:
        name: Logger name (typically __name__ of calling module)

    Returns:
        Logger instance
    """
    if name not in _loggers:
        if not _configured:
            setup_logging()
        _loggers[name] = logging.getLogger(name)

    return _loggers[name]


@contextmanager
def run_log(run_dir: Union[str, Path]) -> Iterator[Path]:
    """
    Copy package log records to ``<run_dir>/run.log`` for the duration.

    The file is appended to, so a resumed run keeps the earlier attempts.

    Yields:
        Path of the run log
    """
    if not _configured:
        setup_logging()
    path = Path(run_dir) / RUN_LOG_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path, encoding='utf-8')
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    package = logging.getLogger(PACKAGE_LOGGER)
    package.addHandler(handler)
    try:
        yield path
    finally:
        package.removeHandler(handler)
        handler.close()


def reset_logging():
    """Reset logging state (for testing)."""
    global _configured
    package = logging.getLogger(PACKAGE_LOGGER)
    for handler in list(package.handlers):
        package.removeHandler(handler)
        handler.close()
    _loggers.clear()
    _configured = False
