"""
Logging Configuration Module
Every module logs through a child of the 'capra' logger; the handlers live
on that parent only, so a run writes one stream and one daily file.
"""

import logging
import sys
from datetime import datetime
from typing import Optional

from src.config import LOGS_DIR, LOG_LEVEL, LOG_TO_FILE

ROOT_LOGGER = 'capra'
LOG_FORMAT = '%(asctime)s | capra | %(levelname)-8s | %(name)s | %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def _logger_name(name: str) -> str:
    """'src.core.vectors_norms' -> 'capra.core.vectors_norms'."""
    if name == ROOT_LOGGER or name.startswith(ROOT_LOGGER + '.'):
        return name
    if name.startswith('src.'):
        name = name[len('src.'):]
    return f"{ROOT_LOGGER}.{name}"


def _configure_root(log_file: Optional[str]) -> logging.Logger:
    root = logging.getLogger(ROOT_LOGGER)
    root.setLevel(getattr(logging, LOG_LEVEL.upper(), logging.INFO))
    if root.handlers:
        return root

    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

    # stderr keeps stdout machine readable
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(logging.INFO)
    console_handler.setFormatter(formatter)
    root.addHandler(console_handler)

    if LOG_TO_FILE:
        if log_file is None:
            log_file = f"capra_{datetime.now().strftime('%Y%m%d')}.log"
        file_handler = logging.FileHandler(LOGS_DIR / log_file)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    root.propagate = False
    return root


def setup_logger(name: str, log_file: Optional[str] = None) -> logging.Logger:
    """
    Logger for a module, placed under the 'capra' hierarchy

    The first call installs the console handler (INFO) and, unless
    CAPRA_LOG_TO_FILE=0, the daily file handler (DEBUG) on 'capra'.

    Args:
        name: Module name, usually __name__
        log_file: File name under the logs directory for the first call

    Returns:
        Logger named capra.<module>
    """
    _configure_root(log_file)
    return logging.getLogger(_logger_name(name))
