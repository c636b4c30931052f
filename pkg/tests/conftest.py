"""Shared test fixtures for cayley-bi."""

from __future__ import annotations

import logging
import random
from collections.abc import Callable, Iterator
from pathlib import Path

import pytest

from cayley_bi.groups import (
    Group,
    group_dicyclic,
    group_dihedral,
    group_semidirect_cyclic,
)
from cayley_bi.spectra import ConnectionSet, connection_set

type RandomSet = Callable[[Group, random.Random], ConnectionSet]


@pytest.fixture(autouse=True)
def _isolated_log_dir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:  # pyright: ignore[reportUnusedFunction]
    """Keep CLI log files out of the home directory."""
    log_dir = tmp_path / "logs"
    monkeypatch.setenv("CAYLEY_BI_LOG_DIR", str(log_dir))
    monkeypatch.delenv("CAYLEY_BI_LOG_LEVEL", raising=False)
    return log_dir


@pytest.fixture(autouse=True)
def _restore_root_logger() -> Iterator[None]:  # pyright: ignore[reportUnusedFunction]
    """Undo handlers installed by configure_logging."""
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    for handler in root.handlers:
        if handler not in handlers:
            handler.close()
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def s3() -> Group:
    return group_semidirect_cyclic(3, 2, 2, name="S3")


@pytest.fixture
def d8() -> Group:
    return group_dihedral(4)


@pytest.fixture
def q8() -> Group:
    return group_dicyclic(2)


@pytest.fixture
def f20() -> Group:
    """``<a, b | a^5 = b^4 = 1, b^-1 a b = a^3>``; ``a`` is 1, ``b`` is 5."""
    return group_semidirect_cyclic(5, 4, 3, name="F20")


@pytest.fixture
def f42() -> Group:
    return group_semidirect_cyclic(7, 6, 3, name="F42")


@pytest.fixture
def random_set() -> RandomSet:
    """Factory for uniformly random inverse-closed sets."""

    def build(group: Group, rng: random.Random) -> ConnectionSet:
        chosen = [x for x in range(1, group.order) if x <= group.inv[x] and rng.random() < 0.5]
        return connection_set(group, chosen, close_inverse=True)

    return build
