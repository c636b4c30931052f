"""Tests for cayley_bi.logging_config."""

from __future__ import annotations

import logging
import logging.handlers
from pathlib import Path

import pytest

from cayley_bi.logging_config import (
    configure_logging,
    configure_worker_logging,
    current_stderr_level,
    file_level,
    log_dir,
    log_file,
)


class TestPaths:
    def test_env_override(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("CAYLEY_BI_LOG_DIR", str(tmp_path / "x"))
        assert log_dir() == tmp_path / "x"
        assert log_file() == tmp_path / "x" / "cayley-bi.log"

    def test_default_under_home(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.delenv("CAYLEY_BI_LOG_DIR", raising=False)
        assert log_dir() == Path.home() / ".cayley-bi" / "logs"


class TestConfigure:
    def test_creates_file_handler(self, _isolated_log_dir: Path) -> None:
        configure_logging()
        root = logging.getLogger()
        assert _isolated_log_dir.is_dir()
        assert any(isinstance(h, logging.handlers.RotatingFileHandler) for h in root.handlers)
        assert root.level == logging.INFO

    def test_debug_lowers_root_level(self) -> None:
        configure_logging(stderr_level="DEBUG")
        assert logging.getLogger().level == logging.DEBUG

    def test_writes_info_to_file(self) -> None:
        configure_logging()
        logging.getLogger("cayley_bi.test").info("hello %s", "file")
        for handler in logging.getLogger().handlers:
            handler.flush()
        assert "hello file" in log_file().read_text(encoding="utf-8")

    def test_file_level_from_env(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("CAYLEY_BI_LOG_LEVEL", "debug")
        configure_logging()
        root = logging.getLogger()
        assert root.level == logging.DEBUG
        assert current_stderr_level() == "WARNING"

    def test_sympy_held_at_warning(self) -> None:
        configure_logging(stderr_level="DEBUG")
        assert logging.getLogger("sympy").level == logging.WARNING


class TestFileLevel:
    def test_default(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.delenv("CAYLEY_BI_LOG_LEVEL", raising=False)
        assert file_level() == "INFO"

    def test_unknown_name_falls_back(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("CAYLEY_BI_LOG_LEVEL", "chatty")
        assert file_level() == "INFO"


class TestWorkerLogging:
    def test_stderr_only(self) -> None:
        configure_worker_logging("DEBUG")
        handlers = logging.getLogger().handlers
        assert len(handlers) == 1
        assert not isinstance(handlers[0], logging.handlers.RotatingFileHandler)
        assert current_stderr_level() == "DEBUG"

    def test_no_stderr_handler(self) -> None:
        root = logging.getLogger()
        for handler in list(root.handlers):
            root.removeHandler(handler)
        assert current_stderr_level() == "WARNING"
