"""Logging configuration for cayley-bi.

The CLI process logs to a rotating file and to stderr. Canonical-form
worker processes (``--jobs``) only log to stderr, at the level the parent
passes them, so that a single process owns the log file.
"""

from __future__ import annotations

import logging
import logging.config
import os
from pathlib import Path
from typing import Any

__all__ = [
    "configure_logging",
    "configure_worker_logging",
    "current_stderr_level",
    "file_level",
    "log_dir",
    "log_file",
]

_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
_WORKER_FORMAT = "%(asctime)s [%(levelname)s] %(processName)s %(name)s: %(message)s"
_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

_MAX_BYTES = 5_242_880  # 5 MB
_BACKUP_COUNT = 5

# Chatty third-party loggers held at WARNING whatever the root level.
_QUIET = ("sympy", "concurrent.futures")


def log_dir() -> Path:
    """``$CAYLEY_BI_LOG_DIR``, or ``~/.cayley-bi/logs``."""
    override = os.environ.get("CAYLEY_BI_LOG_DIR")
    return Path(override) if override else Path.home() / ".cayley-bi" / "logs"


def log_file() -> Path:
    return log_dir() / "cayley-bi.log"


def file_level() -> str:
    """``$CAYLEY_BI_LOG_LEVEL`` if it names a level, else ``INFO``."""
    name = os.environ.get("CAYLEY_BI_LOG_LEVEL", "INFO").upper()
    return name if isinstance(logging.getLevelName(name), int) else "INFO"


def _numeric(name: str) -> int:
    level = logging.getLevelName(name)
    return level if isinstance(level, int) else logging.WARNING


def _stderr_handler(level: str, fmt: str) -> dict[str, Any]:
    return {
        "class": "logging.StreamHandler",
        "stream": "ext://sys.stderr",
        "formatter": fmt,
        "level": level,
    }


def _apply(handlers: dict[str, dict[str, Any]], formatters: dict[str, str], level: str) -> None:
    logging.config.dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {
                key: {"format": fmt, "datefmt": _DATE_FORMAT} for key, fmt in formatters.items()
            },
            "handlers": handlers,
            "root": {"level": level, "handlers": list(handlers)},
            "loggers": {name: {"level": "WARNING"} for name in _QUIET},
        }
    )


def configure_logging(*, stderr_level: str = "WARNING") -> None:
    """Rotating file handler at :func:`file_level`, stderr handler at ``stderr_level``."""
    log_dir().mkdir(parents=True, exist_ok=True)
    to_file = file_level()
    _apply(
        {
            "file": {
                "class": "logging.handlers.RotatingFileHandler",
                "filename": str(log_file()),
                "maxBytes": _MAX_BYTES,
                "backupCount": _BACKUP_COUNT,
                "encoding": "utf-8",
                "formatter": "standard",
                "level": to_file,
            },
            "stderr": _stderr_handler(stderr_level, "standard"),
        },
        {"standard": _FORMAT},
        min(stderr_level, to_file, key=_numeric),
    )


def configure_worker_logging(level: str) -> None:
    """Stderr-only logging for a worker process, tagged with the process name."""
    _apply({"stderr": _stderr_handler(level, "worker")}, {"worker": _WORKER_FORMAT}, level)


def current_stderr_level() -> str:
    """Level of the root stderr handler, for passing to worker processes."""
    root = logging.getLogger()
    levels = [h.level for h in root.handlers if type(h) is logging.StreamHandler]
    return str(logging.getLevelName(min(levels))) if levels else "WARNING"
