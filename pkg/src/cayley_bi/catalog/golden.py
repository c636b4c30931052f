"""Published character tables and witness sets, entered by hand.

Column orders follow the published tables; comparisons against computed
tables go through :func:`cayley_bi.characters.tables_match`.
"""

from __future__ import annotations

from dataclasses import dataclass

from cayley_bi.cyclotomic import Cyclotomic, cyc_from_rational, cyc_root
from cayley_bi.groups import Matrix2

__all__ = [
    "GOLDEN_TABLES",
    "SL23_S",
    "SL23_T",
    "GoldenTable",
]


@dataclass(frozen=True)
class GoldenTable:
    class_sizes: tuple[int, ...]
    rows: tuple[tuple[Cyclotomic, ...], ...]


def _row(*values: int | Cyclotomic) -> tuple[Cyclotomic, ...]:
    return tuple(v if isinstance(v, Cyclotomic) else cyc_from_rational(v) for v in values)


_I = cyc_root(4, 1)
_Z3, _Z3_2 = cyc_root(3, 1), cyc_root(3, 2)
_Z6, _Z6_5 = cyc_root(6, 1), cyc_root(6, 5)

F20_TABLE = GoldenTable(
    class_sizes=(1, 5, 5, 5, 4),
    rows=(
        _row(1, 1, 1, 1, 1),
        _row(1, 1, -1, -1, 1),
        _row(1, -1, _I, -_I, 1),
        _row(1, -1, -_I, _I, 1),
        _row(4, 0, 0, 0, -1),
    ),
)

F42_TABLE = GoldenTable(
    class_sizes=(1, 7, 7, 7, 7, 7, 6),
    rows=(
        _row(1, 1, 1, 1, 1, 1, 1),
        _row(1, -1, 1, 1, -1, -1, 1),
        _row(1, 1, _Z3_2, _Z3, _Z3, _Z3_2, 1),
        _row(1, 1, _Z3, _Z3_2, _Z3_2, _Z3, 1),
        _row(1, -1, _Z3, _Z3_2, _Z6, _Z6_5, 1),
        _row(1, -1, _Z3_2, _Z3, _Z6_5, _Z6, 1),
        _row(6, 0, 0, 0, 0, 0, -1),
    ),
)

GOLDEN_TABLES: dict[str, GoldenTable] = {
    "[20,3]": F20_TABLE,
    "[42,1]": F42_TABLE,
}

# Sextets of SL(2,3) over GF(3), entries in 0..2. S holds elements of
# order 3, T elements of order 6; their Cayley graphs are isomorphic.
SL23_S: tuple[Matrix2, ...] = (
    ((1, 1), (0, 1)),
    ((0, 1), (2, 2)),
    ((0, 2), (1, 2)),
    ((2, 1), (2, 0)),
    ((1, 2), (0, 1)),
    ((2, 2), (1, 0)),
)

SL23_T: tuple[Matrix2, ...] = (
    ((2, 0), (1, 2)),
    ((1, 2), (1, 0)),
    ((1, 1), (2, 0)),
    ((0, 1), (2, 1)),
    ((0, 2), (1, 1)),
    ((2, 0), (2, 2)),
)
