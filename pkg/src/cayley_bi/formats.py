"""Text formats: group specs, connection-set files and JSON reports.

A group spec is one recipe, optionally spread over several lines::

    sdp 5 4 3                  # <a, b | a^5 = b^4 = 1, b^-1 a b = a^3>
    cyclic 6
    dihedral 4                 # order 8
    dicyclic 3                 # order 12
    sl23
    dp C2 D8                   # direct product of two group ids
    perm 8                     # then one generator per line, 0-based cycles
    (0 1 2 3)(4 5 6 7)
    (1 5)(3 7)

Group ids are ``C<n>``, ``D<order>``, ``Q<order>``, ``Dic<n>``, or a catalog
label or name. A connection-set file lists element indices or words in the
named generators (``a^2*b``, ``b^-1``), separated by whitespace or commas.
``#`` starts a comment in both formats.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import replace
from pathlib import Path
from typing import Any

from cayley_bi.characters import CharacterTable, table_from_dict
from cayley_bi.groups import (
    GENERATOR_NAMES,
    Group,
    group_cyclic,
    group_dicyclic,
    group_dihedral,
    group_direct_product,
    group_from_permutations,
    group_semidirect_cyclic,
    group_sl23,
)
from cayley_bi.spectra import ConnectionSet, connection_set
from cayley_bi.types import CayleyBIError, FormatError, UnknownLabel

logger = logging.getLogger(__name__)

__all__ = [
    "dump_connection_set",
    "evaluate_word",
    "load_character_table",
    "load_connection_set",
    "load_group_spec",
    "load_witness",
    "normalize_label",
    "parse_connection_set",
    "parse_group_spec",
    "parse_permutation",
    "read_json",
    "resolve_group",
    "write_json",
]

_LABEL = re.compile(r"^\s*\[?\s*(\d+)\s*[,-]\s*(\d+)\s*\]?\s*$")
_CYCLE = re.compile(r"\(([^()]*)\)")
_FACTOR = re.compile(r"^([a-h])(?:\^(-?\d+))?$")
_GROUP_ID = re.compile(r"^(C|D|Q|Dic)(\d+)$")


def _strip_comments(text: str) -> list[str]:
    lines = (line.split("#", 1)[0].strip() for line in text.splitlines())
    return [line for line in lines if line]


def normalize_label(text: str) -> str:
    """``"20,3"``, ``"20-3"`` and ``"[20, 3]"`` all become ``"[20,3]"``.

    Anything else is returned stripped and unchanged.
    """
    m = _LABEL.match(text)
    if m is None:
        return text.strip()
    return f"[{int(m.group(1))},{int(m.group(2))}]"


# ---------------------------------------------------------------------------
# Group specs
# ---------------------------------------------------------------------------


def parse_permutation(degree: int, text: str) -> tuple[int, ...]:
    """Image list of a permutation written in 0-based cycle notation.

    Raises:
        FormatError: If the text is not a product of disjoint cycles.
    """
    rest = _CYCLE.sub("", text).strip()
    if rest:
        msg = f"unexpected text {rest!r} in permutation {text!r}"
        raise FormatError(msg)
    image = list(range(degree))
    seen: set[int] = set()
    for body in _CYCLE.findall(text):
        try:
            points = [int(p) for p in body.replace(",", " ").split()]
        except ValueError as exc:
            msg = f"non-integer point in cycle ({body})"
            raise FormatError(msg) from exc
        if seen & set(points) or len(set(points)) != len(points):
            msg = f"cycles of {text!r} are not disjoint"
            raise FormatError(msg)
        if any(not 0 <= p < degree for p in points):
            msg = f"cycle ({body}) leaves 0..{degree - 1}"
            raise FormatError(msg)
        seen.update(points)
        for p, q in zip(points, points[1:] + points[:1], strict=True):
            image[p] = q
    return tuple(image)


def _ints(args: list[str], count: int, keyword: str) -> list[int]:
    if len(args) != count:
        msg = f"{keyword} takes {count} integer arguments, got {args}"
        raise FormatError(msg)
    try:
        return [int(a) for a in args]
    except ValueError as exc:
        msg = f"{keyword} arguments must be integers, got {args}"
        raise FormatError(msg) from exc


def resolve_group(ident: str) -> Group:
    """Build a group from a short id or a catalog label or name.

    Raises:
        UnknownLabel: If the id is neither a family id nor in the catalog.
    """
    m = _GROUP_ID.match(ident.strip())
    if m is not None:
        family, n = m.group(1), int(m.group(2))
        if family == "C":
            return group_cyclic(n)
        if family == "Dic":
            return group_dicyclic(n)
        if n % (2 if family == "D" else 4) == 0:
            return group_dihedral(n // 2) if family == "D" else group_dicyclic(n // 4)
    from cayley_bi.catalog import get_group

    return get_group(ident)


def parse_group_spec(text: str, name: str = "") -> Group:
    """Build the group a spec describes.

    Raises:
        FormatError: If the spec is malformed.
        CayleyBIError: Whatever the chosen constructor raises.
    """
    lines = _strip_comments(text)
    if not lines:
        msg = "empty group spec"
        raise FormatError(msg)
    keyword, *args = lines[0].split()
    keyword = keyword.lower()
    if keyword != "perm" and len(lines) > 1:
        msg = f"{keyword} spec takes a single line, got {len(lines)}"
        raise FormatError(msg)
    if keyword == "sdp":
        m, n, r = _ints(args, 3, keyword)
        group = group_semidirect_cyclic(m, n, r)
    elif keyword == "cyclic":
        group = group_cyclic(*_ints(args, 1, keyword))
    elif keyword == "dihedral":
        group = group_dihedral(*_ints(args, 1, keyword))
    elif keyword == "dicyclic":
        group = group_dicyclic(*_ints(args, 1, keyword))
    elif keyword == "sl23":
        _ints(args, 0, keyword)
        group = group_sl23()
    elif keyword == "dp":
        if len(args) != 2:
            msg = f"dp takes two group ids, got {args}"
            raise FormatError(msg)
        group = group_direct_product(resolve_group(args[0]), resolve_group(args[1]))
    elif keyword == "perm":
        (degree,) = _ints(args, 1, keyword)
        gens = [parse_permutation(degree, line) for line in lines[1:]]
        if not gens:
            msg = "perm spec lists no generators"
            raise FormatError(msg)
        group = group_from_permutations(degree, gens)
    else:
        msg = f"unknown group recipe {keyword!r}"
        raise FormatError(msg)
    return replace(group, name=name) if name else group


def load_group_spec(path: Path) -> Group:
    return parse_group_spec(path.read_text(encoding="utf-8"), name=path.stem)


# ---------------------------------------------------------------------------
# Connection-set files
# ---------------------------------------------------------------------------


def evaluate_word(group: Group, word: str) -> int:
    """Element index of a word such as ``a^2*b^-1``, ``1`` or ``#7``.

    Raises:
        FormatError: If the word uses unknown generators or syntax.
    """
    word = word.strip()
    if word == "1":
        return 0
    if word.startswith("#"):
        try:
            return int(word[1:])
        except ValueError as exc:
            msg = f"bad element reference {word!r}"
            raise FormatError(msg) from exc
    names = GENERATOR_NAMES[: len(group.generators)]
    result = 0
    for factor in word.split("*"):
        m = _FACTOR.match(factor.strip())
        if m is None or m.group(1) not in names:
            msg = f"cannot read {factor!r} in {word!r}; generators are {', '.join(names) or 'none'}"
            raise FormatError(msg)
        g = group.generators[names.index(m.group(1))]
        result = group.mul[result][group.power(g, int(m.group(2) or 1))]
    return result


def parse_connection_set(group: Group, text: str, *, close_inverse: bool = False) -> ConnectionSet:
    """Read a connection set from indices or words.

    Raises:
        FormatError: If a token cannot be read.
        InvalidConnectionSet: If the result is not a valid connection set.
    """
    members: list[int] = []
    for line in _strip_comments(text):
        for token in line.replace(",", " ").split():
            members.append(int(token) if token.isdigit() else evaluate_word(group, token))
    return connection_set(group, members, close_inverse=close_inverse)


def load_connection_set(path: Path, group: Group, *, close_inverse: bool = False) -> ConnectionSet:
    text = path.read_text(encoding="utf-8")
    return parse_connection_set(group, text, close_inverse=close_inverse)


def dump_connection_set(s: ConnectionSet) -> str:
    """One member per line as ``word  # index``; reads back with :func:`parse_connection_set`."""
    lines = [f"# {s.group.name}, |S| = {len(s)}"]
    lines += [f"{word}  # {x}" for x, word in zip(s.members, s.words(), strict=True)]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def write_json(path: Path, data: dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    logger.info("Wrote %s", path)


def read_json(path: Path) -> dict[str, Any]:
    """Read a JSON object.

    Raises:
        FormatError: If the file is not valid JSON or not an object.
    """
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        msg = f"{path} is not valid JSON: {exc}"
        raise FormatError(msg) from exc
    if not isinstance(data, dict):
        msg = f"{path} does not hold a JSON object"
        raise FormatError(msg)
    return data


def load_character_table(path: Path, group: Group) -> CharacterTable:
    """Read a table written by ``chartable --json`` for ``group``."""
    return table_from_dict(group, read_json(path))


def load_witness(path: Path, group: Group) -> tuple[ConnectionSet, ConnectionSet]:
    """The ``S`` and ``T`` sets of a witness stored in a JSON report.

    Accepts a witness object itself or any report carrying one under
    ``"witness"`` (also inside ``"rows"`` of a classification report).

    Raises:
        FormatError: If no witness is found.
    """
    data = read_json(path)
    candidates: list[Any] = [data, data.get("witness")]
    candidates += [row.get("witness") for row in data.get("rows", []) if isinstance(row, dict)]
    for item in candidates:
        if isinstance(item, dict) and "S" in item and "T" in item:
            try:
                s = connection_set(group, item["S"]["members"])
                t = connection_set(group, item["T"]["members"])
            except (KeyError, TypeError) as exc:
                msg = f"malformed witness in {path}: {exc}"
                raise FormatError(msg) from exc
            except CayleyBIError as exc:
                msg = f"witness in {path} does not fit {group.name}: {exc}"
                raise FormatError(msg) from exc
            return s, t
    msg = f"no witness found in {path}"
    raise FormatError(msg)
