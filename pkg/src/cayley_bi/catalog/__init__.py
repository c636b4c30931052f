"""Catalog of the small non-abelian groups whose BI and CI status is known.

Entries are registered as recipes and built lazily: a group, its character
table and its automorphisms are only computed when a command asks for them.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Any

from cayley_bi.catalog.golden import GOLDEN_TABLES, SL23_S, SL23_T, GoldenTable
from cayley_bi.formats import normalize_label, parse_group_spec
from cayley_bi.groups import Group, sl23_index
from cayley_bi.spectra import ConnectionSet, connection_set
from cayley_bi.types import UnknownLabel

__all__ = [
    "CATALOG_REGISTRY",
    "CatalogEntry",
    "catalog_list",
    "get_entry",
    "get_group",
    "golden_set",
]


@dataclass(frozen=True)
class CatalogEntry:
    """One catalog group with its published BI and CI status.

    ``bi_expected`` and ``ci_expected`` are ``"Y"`` or ``"N"``, or ``"-"`` where
    nothing is recorded. ``bi_reproduced`` is set only where an exhaustive
    check contradicts the published BI column; ``note`` says why.
    """

    label: str
    name: str
    recipe: str
    bi_expected: str
    ci_expected: str = "-"
    bi_reproduced: str | None = None
    note: str = ""

    @property
    def order(self) -> int:
        if self.label.startswith("["):
            return int(self.label[1:].split(",", 1)[0])
        return self.build().order

    @property
    def golden_table(self) -> GoldenTable | None:
        return GOLDEN_TABLES.get(self.label)

    @property
    def golden_sets(self) -> tuple[str, ...]:
        return ("S", "T") if self.label == "[24,3]" else ()

    def build(self) -> Group:
        """The group, built once per process."""
        return _build(self.label)

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-friendly dict."""
        return {
            "label": self.label,
            "name": self.name,
            "order": self.order,
            "recipe": self.recipe,
            "bi_expected": self.bi_expected,
            "ci_expected": self.ci_expected,
            "golden_table": self.golden_table is not None,
            "golden_sets": list(self.golden_sets),
            "bi_reproduced": self.bi_reproduced,
            "note": self.note,
        }


# Registry mapping label -> entry, in catalog order.
CATALOG_REGISTRY: dict[str, CatalogEntry] = {}


def _register(
    label: str,
    name: str,
    recipe: str,
    bi: str,
    ci: str = "-",
    *,
    reproduced: str | None = None,
    note: str = "",
) -> None:
    CATALOG_REGISTRY[label] = CatalogEntry(label, name, recipe, bi, ci, reproduced, note)


_register("[6,1]", "S3", "sdp 3 2 2", "Y", "Y")
_register("[8,3]", "D8", "dihedral 4", "N", "N")
_register("[8,4]", "Q8", "dicyclic 2", "Y", "Y")
_register("[10,1]", "D10", "dihedral 5", "Y", "Y")
_register("[12,1]", "Dic3", "sdp 3 4 2", "Y", "Y")
_register("[12,3]", "A4", "perm 4\n(0 1 2)\n(0 1)(2 3)", "Y", "Y")
_register("[12,4]", "D12", "dihedral 6", "N", "N")
_register("[14,1]", "D14", "dihedral 7", "Y", "Y")
_register(
    "[16,3]",
    "(C4xC2):C2",
    "perm 8\n(0 1 2 3)(4 5 6 7)\n(0 4)(1 5)(2 6)(3 7)\n(1 5)(3 7)",
    "N",
    "N",
)
_register("[16,4]", "C4:C4", "sdp 4 4 3", "N", "N")
_register("[16,6]", "M16", "sdp 8 2 5", "N", "N")
_register("[16,7]", "D16", "dihedral 8", "N", "N")
_register("[16,8]", "SD16", "sdp 8 2 3", "N", "N")
_register("[16,9]", "Q16", "dicyclic 4", "N", "N")
_register("[16,11]", "C2xD8", "dp C2 D8", "N", "N")
_register("[16,12]", "C2xQ8", "dp C2 Q8", "N", "N")
_register(
    "[16,13]",
    "C4oD8",
    "perm 8\n(0 1 2 3)(4 5 6 7)\n(0 4)(1 5)(2 6)(3 7)\n(4 6)(5 7)",
    "N",
    "N",
)
_register("[18,1]", "D18", "dihedral 9", "Y", "Y")
_register("[18,3]", "C3xS3", "dp C3 S3", "N", "N")
_register(
    "[18,4]",
    "(C3xC3):C2",
    "perm 9\n(0 1 2)(3 4 5)(6 7 8)\n(0 3 6)(1 4 7)(2 5 8)\n(1 2)(3 6)(4 8)(5 7)",
    "Y",
    "Y",
)
_register("[20,1]", "Dic5", "sdp 5 4 4", "Y", "Y")
_register("[20,3]", "F20", "sdp 5 4 3", "Y", "N")
_register("[20,4]", "D20", "dihedral 10", "N", "N")
_register("[21,1]", "F21", "sdp 7 3 2", "Y", "Y")
_register("[22,1]", "D22", "dihedral 11", "Y", "Y")
_register("[24,1]", "C3:C8", "sdp 3 8 2", "Y", "Y")
_register("[24,3]", "SL(2,3)", "sl23", "N", "N")
_register("[24,4]", "Dic6", "dicyclic 6", "N", "N")
_register("[24,5]", "C4xS3", "dp C4 S3", "N", "N")
_register("[24,6]", "D24", "dihedral 12", "N", "N")
_register("[24,7]", "C2xDic3", "dp C2 Dic3", "N", "N")
_register("[24,8]", "C3:D8", "perm 7\n(4 5 6)\n(0 1 2 3)(5 6)\n(1 3)", "N", "N")
_register("[24,10]", "C3xD8", "dp C3 D8", "N", "N")
_register(
    "[24,11]",
    "C3xQ8",
    "dp C3 Q8",
    "N",
    "N",
    reproduced="Y",
    note=(
        "published as non-BI, but all 4096 inverse-closed subsets pass: "
        "isomorphic Cayley graphs always have equal M sets"
    ),
)
_register("[24,12]", "S4", "perm 4\n(0 1 2 3)\n(0 1)", "N", "N")
_register("[24,13]", "C2xA4", "dp C2 A4", "N", "N")
_register("[24,14]", "C2xC2xS3", "dp C2 D12", "N", "N")
_register("[26,1]", "D26", "dihedral 13", "Y", "Y")
_register(
    "[27,3]",
    "He3",
    "perm 9\n(0 1 2)(3 4 5)(6 7 8)\n(0 3 6)(1 4 7)(2 5 8)\n(3 4 5)(6 8 7)",
    "N",
    "N",
)
_register("[27,4]", "C9:C3", "sdp 9 3 4", "N", "N")
_register("[28,1]", "Dic7", "sdp 7 4 6", "Y", "Y")
_register("[28,3]", "D28", "dihedral 14", "N", "N")
_register("[30,1]", "C5xS3", "dp C5 S3", "Y", "Y")
_register("[30,2]", "C3xD10", "dp C3 D10", "Y", "Y")
_register("[30,3]", "D30", "dihedral 15", "Y", "Y")
_register("[42,1]", "F42", "sdp 7 6 3", "Y", "N")
_register("C5", "C5", "cyclic 5", "Y")
_register("C6", "C6", "cyclic 6", "Y")
_register("C2xC2", "C2xC2", "dp C2 C2", "Y")


def catalog_list(max_order: int | None = None) -> list[CatalogEntry]:
    """Catalog entries in registration order, optionally up to an order."""
    entries = list(CATALOG_REGISTRY.values())
    if max_order is None:
        return entries
    return [e for e in entries if e.order <= max_order]


def get_entry(key: str) -> CatalogEntry:
    """Look up an entry by label (``[20,3]``, ``20,3``) or name (``F20``).

    Raises:
        UnknownLabel: If nothing matches.
    """
    label = normalize_label(key)
    entry = CATALOG_REGISTRY.get(label)
    if entry is not None:
        return entry
    for candidate in CATALOG_REGISTRY.values():
        if candidate.name.lower() == label.lower():
            return candidate
    available = ", ".join(CATALOG_REGISTRY)
    msg = f"Unknown group '{key}'. Available: {available}"
    raise UnknownLabel(msg)


@functools.cache
def _build(label: str) -> Group:
    entry = CATALOG_REGISTRY[label]
    return parse_group_spec(entry.recipe, name=entry.name)


def get_group(key: str) -> Group:
    return get_entry(key).build()


def golden_set(key: str, which: str) -> ConnectionSet:
    """A published witness set of a catalog group, ``which`` is ``"S"`` or ``"T"``.

    Raises:
        UnknownLabel: If the group has no such set.
    """
    entry = get_entry(key)
    if which not in entry.golden_sets:
        msg = f"{entry.label} has no golden set {which!r}"
        raise UnknownLabel(msg)
    matrices = SL23_S if which == "S" else SL23_T
    return connection_set(entry.build(), [sl23_index(m) for m in matrices])
