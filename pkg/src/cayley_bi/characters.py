"""Irreducible character tables by the Burnside-Dixon method.

The class matrices of the group are diagonalized simultaneously over a
prime field ``GF(p)`` with ``p = 1 (mod exponent)``. Each common eigenvector
yields a character modulo ``p``, which is lifted to exact cyclotomic values
through the eigenvalue multiplicities of each class representative.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Protocol

import numpy as np
import numpy.typing as npt
from sympy import nextprime
from sympy.ntheory import primitive_root, sqrt_mod
from sympy.polys.domains import GF
from sympy.polys.matrices import DomainMatrix

from cayley_bi.cyclotomic import Cyclotomic, cyc_from_rational, parse_cyclotomic
from cayley_bi.groups import (
    ConjugacyPartition,
    Group,
    conjugacy_classes,
    element_orders,
    exponent,
)
from cayley_bi.types import FormatError, Inconsistent, NoSuchDegree, NoSuitablePrime

logger = logging.getLogger(__name__)

__all__ = [
    "CharacterTable",
    "character_table",
    "class_structure_constants",
    "column_sum",
    "dixon_prime",
    "linear_characters",
    "table_from_dict",
    "table_to_dict",
    "tables_match",
]

PRIME_SEARCH_LIMIT = 100_000


class TableLike(Protocol):
    """Anything with class sizes and rows of exact values."""

    @property
    def class_sizes(self) -> tuple[int, ...]: ...

    @property
    def rows(self) -> tuple[tuple[Cyclotomic, ...], ...]: ...


@dataclass(frozen=True, eq=False)
class CharacterTable:
    """Exact irreducible characters of a group, one row per character.

    Columns follow the order of ``partition.classes``; the first row is the
    principal character.
    """

    group: Group
    partition: ConjugacyPartition
    rows: tuple[tuple[Cyclotomic, ...], ...]
    degrees: tuple[int, ...]
    conductor: int
    prime: int
    power_map: tuple[tuple[int, ...], ...]
    """``power_map[k][l]`` is the class of ``rep_k ** l`` for ``0 <= l < exponent``."""

    @property
    def h(self) -> int:
        return len(self.rows)

    @property
    def class_sizes(self) -> tuple[int, ...]:
        return self.partition.sizes

    @property
    def rep_orders(self) -> tuple[int, ...]:
        orders = element_orders(self.group)
        return tuple(orders[r] for r in self.partition.reps)

    @property
    def degree_set(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.degrees)))

    def value(self, i: int, x: int) -> Cyclotomic:
        """``chi_i(x)`` for an element index ``x``."""
        return self.rows[i][self.partition.class_of[x]]

    def rows_of_degree(self, nu: int) -> tuple[int, ...]:
        """Row indices of the characters of degree ``nu``.

        Raises:
            NoSuchDegree: If no character has degree ``nu``.
        """
        found = tuple(i for i, d in enumerate(self.degrees) if d == nu)
        if not found:
            msg = (
                f"{self.group.name} has no character of degree {nu}; "
                f"degrees are {self.degree_set}"
            )
            raise NoSuchDegree(msg)
        return found

    def inverse_class(self, k: int) -> int:
        rep = self.partition.reps[k]
        return self.partition.class_of[self.group.inv[rep]]

    def check_orthogonality(self) -> None:
        """Verify both orthogonality relations and the degree sum exactly.

        Raises:
            Inconsistent: On the first relation that fails.
        """
        n = self.group.order
        sizes = self.class_sizes
        if sum(d * d for d in self.degrees) != n:
            msg = f"sum of squared degrees {self.degrees} is not {n}"
            raise Inconsistent(msg)
        conj_rows = [[v.conj() for v in row] for row in self.rows]
        for i, j in itertools.combinations_with_replacement(range(self.h), 2):
            total = sum(
                (sizes[k] * self.rows[i][k] * conj_rows[j][k] for k in range(self.h)),
                cyc_from_rational(0),
            )
            if total != (n if i == j else 0):
                msg = f"rows {i} and {j} are not orthogonal: {total}"
                raise Inconsistent(msg)
        for k, m in itertools.combinations_with_replacement(range(self.h), 2):
            total = sum(
                (self.rows[i][k] * conj_rows[i][m] for i in range(self.h)),
                cyc_from_rational(0),
            )
            expected = n // sizes[k] if k == m else 0
            if total != expected:
                msg = f"columns {k} and {m} are not orthogonal: {total}"
                raise Inconsistent(msg)


# ---------------------------------------------------------------------------
# Class algebra
# ---------------------------------------------------------------------------


def class_structure_constants(
    group: Group, partition: ConjugacyPartition
) -> npt.NDArray[np.int64]:
    """``a[i, j, k]`` counts pairs ``(x, y)`` in ``C_i x C_j`` with ``xy = rep_k``."""
    h = len(partition)
    a = np.zeros((h, h, h), dtype=np.int64)
    mul, inv, class_of = group.mul, group.inv, partition.class_of
    for k, z in enumerate(partition.reps):
        for x in range(group.order):
            a[class_of[x], class_of[mul[inv[x]][z]], k] += 1
    return a


def dixon_prime(order: int, exp: int) -> int:
    """Smallest prime ``p = 1 (mod exp)`` with ``p > 2 * sqrt(order)``.

    Raises:
        NoSuitablePrime: If none is found below ``PRIME_SEARCH_LIMIT``.
    """
    p = 2 * math.isqrt(order)
    while p < PRIME_SEARCH_LIMIT:
        p = int(nextprime(p))
        if p * p > 4 * order and p % exp == 1 % exp:
            return p
    msg = f"no prime below {PRIME_SEARCH_LIMIT} for order {order}, exponent {exp}"
    raise NoSuitablePrime(msg)


def _power_map(group: Group, partition: ConjugacyPartition, e: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for rep in partition.reps:
        powers = [0]
        for _ in range(1, e):
            powers.append(group.mul[powers[-1]][rep])
        out.append(tuple(partition.class_of[x] for x in powers))
    return tuple(out)


def _roots_mod_p(coeffs: Sequence[int], p: int) -> list[int]:
    roots = []
    for z in range(p):
        acc = 0
        for c in coeffs:
            acc = (acc * z + c) % p
        if acc == 0:
            roots.append(z)
    return roots


def _common_eigenvectors(a: npt.NDArray[np.int64], p: int) -> list[list[int]]:
    """Split ``GF(p)^h`` into the common eigenlines of all class matrices.

    Subspaces are kept as row bases in reduced echelon form. For a space
    ``S`` with pivot columns ``P``, the restriction of ``M_i`` acts on
    pivot coordinates through ``R = (S * M_i^T)[:, P]``.
    """
    h = a.shape[0]
    field = GF(p, symmetric=False)
    spaces = [DomainMatrix.eye(h, field)]
    for i in range(1, h):
        if all(s.shape[0] == 1 for s in spaces):
            break
        m_t = DomainMatrix.from_list(a[i].T.tolist(), field)
        refined = []
        for space in spaces:
            if space.shape[0] == 1:
                refined.append(space)
                continue
            _, pivots = space.rref()
            r = (space * m_t).extract(list(range(space.shape[0])), list(pivots))
            char = [int(c) % p for c in r.charpoly()]
            eye = DomainMatrix.eye(r.shape[0], field)
            for z in _roots_mod_p(char, p):
                basis = (r.transpose() - eye * field(z)).nullspace()
                sub, _ = (basis * space).rref()
                refined.append(sub)
        spaces = refined
    if len(spaces) != h or any(s.shape[0] != 1 for s in spaces):
        msg = f"class matrices split GF({p})^{h} into {[s.shape[0] for s in spaces]}"
        raise Inconsistent(msg)
    return [[int(x) % p for x in s.to_list()[0]] for s in spaces]


def _lift(
    residues: Sequence[int],
    orders: Sequence[int],
    power_map: Sequence[Sequence[int]],
    degree: int,
    e: int,
    p: int,
) -> tuple[Cyclotomic, ...]:
    """Lift a character modulo ``p`` to exact values in ``Q(zeta_e)``.

    For a class representative of order ``o``, the multiplicity of the
    eigenvalue ``zeta_o^t`` is ``(1/o) * sum_l chi(g^l) * zeta_o^(-t*l)``,
    computed in ``GF(p)`` where ``zeta_e`` corresponds to ``z``.
    """
    z = pow(int(primitive_root(p)), (p - 1) // e, p)
    values = []
    for k, o in enumerate(orders):
        zo = pow(z, e // o, p)
        o_inv = pow(o, -1, p)
        coeffs = [0] * e
        for t in range(o):
            m = sum(residues[power_map[k][l]] * pow(zo, (-t * l) % o, p) for l in range(o))
            m = m * o_inv % p
            if m > degree:
                msg = f"eigenvalue multiplicity {m} exceeds degree {degree} on class {k}"
                raise Inconsistent(msg)
            coeffs[t * (e // o)] += m
        values.append(Cyclotomic.from_coeffs(e, coeffs))
    return tuple(values)


def _row_key(degree: int, row: Sequence[Cyclotomic]) -> tuple[Any, ...]:
    return (degree, tuple((-re, -im) for re, im in (v.sort_key() for v in row)))


@functools.cache
def character_table(group: Group) -> CharacterTable:
    """Compute the exact character table of ``group``.

    Rows are sorted by degree and then by descending float values, so the
    principal character comes first.

    Raises:
        NoSuitablePrime: If no usable prime is found.
        Inconsistent: If the modular computation does not produce a valid table.
    """
    partition = conjugacy_classes(group)
    sizes = partition.sizes
    n, e = group.order, exponent(group)
    p = dixon_prime(n, e)
    logger.info(
        "Character table of %s: %d classes, exponent %d, prime %d", group.name, len(sizes), e, p
    )

    a = class_structure_constants(group, partition)
    inv_class = [partition.class_of[group.inv[r]] for r in partition.reps]
    power_map = _power_map(group, partition, e)
    orders = element_orders(group)
    rep_orders = [orders[r] for r in partition.reps]

    built = []
    for w in _common_eigenvectors(a, p):
        scale = pow(w[0], -1, p)
        omega = [x * scale % p for x in w]
        norm = (
            sum(omega[j] * omega[inv_class[j]] * pow(sizes[j], -1, p) for j in range(len(sizes)))
            % p
        )
        root = sqrt_mod(n * pow(norm, -1, p) % p, p)
        if root is None:
            msg = f"degree square is not a residue modulo {p}"
            raise Inconsistent(msg)
        degree = min(int(root), p - int(root))
        residues = [omega[j] * degree * pow(sizes[j], -1, p) % p for j in range(len(sizes))]
        row = _lift(residues, rep_orders, power_map, degree, e, p)
        built.append((degree, row))

    built.sort(key=lambda item: _row_key(*item))
    table = CharacterTable(
        group=group,
        partition=partition,
        rows=tuple(row for _, row in built),
        degrees=tuple(d for d, _ in built),
        conductor=e,
        prime=p,
        power_map=power_map,
    )
    logger.debug("%s degrees %s", group.name, table.degrees)
    return table


# ---------------------------------------------------------------------------
# Derived queries
# ---------------------------------------------------------------------------


def linear_characters(table: CharacterTable) -> tuple[int, ...]:
    """Row indices of the degree-1 characters."""
    return tuple(i for i, d in enumerate(table.degrees) if d == 1)


def column_sum(table: CharacterTable, i: int) -> Cyclotomic:
    """``sum chi_i(g)`` over the non-identity elements of the group."""
    total = sum(
        (size * v for size, v in zip(table.class_sizes, table.rows[i], strict=True)),
        cyc_from_rational(0),
    )
    return total - table.rows[i][0]


def tables_match(computed: TableLike, golden: TableLike) -> bool:
    """True if the tables agree up to a row bijection and a column bijection.

    Column bijections must preserve class sizes and fix the identity class.
    """
    sizes_a, sizes_b = computed.class_sizes, golden.class_sizes
    if sorted(sizes_a) != sorted(sizes_b) or len(computed.rows) != len(golden.rows):
        return False
    if sizes_a[0] != 1 or sizes_b[0] != 1:
        return False

    def by_size(sizes: Sequence[int]) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for k, s in enumerate(sizes):
            if k:
                out.setdefault(s, []).append(k)
        return out

    ours, theirs = by_size(sizes_a), by_size(sizes_b)
    target = Counter(golden.rows)
    keys = sorted(ours)
    for perms in itertools.product(*(itertools.permutations(theirs[s]) for s in keys)):
        # golden column dst reads computed column column[dst]
        column = [0] * len(sizes_a)
        for s, perm in zip(keys, perms, strict=True):
            for src, dst in zip(ours[s], perm, strict=True):
                column[dst] = src
        permuted = Counter(
            tuple(row[column[k]] for k in range(len(row))) for row in computed.rows
        )
        if permuted == target:
            return True
    return False


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def table_to_dict(table: CharacterTable) -> dict[str, Any]:
    """JSON-friendly dump of a character table."""
    return {
        "group": table.group.name,
        "order": table.group.order,
        "conductor": table.conductor,
        "prime": table.prime,
        "classes": [
            {"rep": rep, "size": size, "order": order}
            for rep, size, order in zip(
                table.partition.reps, table.class_sizes, table.rep_orders, strict=True
            )
        ],
        "degrees": list(table.degrees),
        "rows": [[v.render() for v in row] for row in table.rows],
        "display": [[str(v) for v in row] for row in table.rows],
    }


def table_from_dict(group: Group, data: dict[str, Any]) -> CharacterTable:
    """Rebuild a table written by :func:`table_to_dict` for ``group``.

    Raises:
        FormatError: If the dump does not fit the group or is malformed.
    """
    partition = conjugacy_classes(group)
    try:
        reps = tuple(int(c["rep"]) for c in data["classes"])
        rows = tuple(tuple(parse_cyclotomic(str(v)) for v in row) for row in data["rows"])
        prime = int(data.get("prime", 0))
    except (KeyError, TypeError, ValueError) as exc:
        msg = f"malformed character table: {exc}"
        raise FormatError(msg) from exc
    if data.get("order", group.order) != group.order or len(reps) != len(partition):
        msg = f"table for order {data.get('order')} does not fit {group.name}"
        raise FormatError(msg)
    column = [partition.class_of[r] for r in reps]
    if sorted(column) != list(range(len(partition))):
        msg = f"class representatives {list(reps)} do not cover the classes of {group.name}"
        raise FormatError(msg)
    reordered = []
    for row in rows:
        if len(row) != len(partition):
            msg = f"row of length {len(row)} in a table with {len(partition)} classes"
            raise FormatError(msg)
        out: list[Cyclotomic] = [row[0]] * len(row)
        for src, dst in enumerate(column):
            out[dst] = row[src]
        reordered.append(tuple(out))
    degrees = []
    for row in reordered:
        q = row[0].to_rational()
        if q is None or q.denominator != 1 or q <= 0:
            msg = f"degree {row[0]} is not a positive integer"
            raise FormatError(msg)
        degrees.append(int(q))
    e = exponent(group)
    return CharacterTable(
        group=group,
        partition=partition,
        rows=tuple(reordered),
        degrees=tuple(degrees),
        conductor=e,
        prime=prime,
        power_map=_power_map(group, partition, e),
    )
