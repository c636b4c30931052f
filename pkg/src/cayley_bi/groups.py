"""Finite groups as explicit multiplication tables.

Every group is stored as an immutable ``order x order`` table of element
indices with the identity fixed at index 0. Constructors enumerate elements
deterministically so that connection-set files stay reproducible.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from collections import deque
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field

from cayley_bi.types import (
    BadTwist,
    ClosureTooLarge,
    InvalidGroup,
    InvalidPermutation,
)

logger = logging.getLogger(__name__)

__all__ = [
    "GENERATOR_NAMES",
    "MAX_ORDER",
    "AutomorphismSet",
    "ConjugacyPartition",
    "Group",
    "automorphism_group",
    "check_group_axioms",
    "conjugacy_classes",
    "derived_subgroup",
    "element_order",
    "element_orders",
    "element_words",
    "exponent",
    "group_cyclic",
    "group_dicyclic",
    "group_dihedral",
    "group_direct_product",
    "group_from_permutations",
    "group_semidirect_cyclic",
    "group_sl23",
    "is_abelian",
    "sl23_elements",
    "sl23_index",
    "subgroup_generated",
]

MAX_ORDER = 64

type Table = tuple[tuple[int, ...], ...]
type Matrix2 = tuple[tuple[int, int], tuple[int, int]]


@dataclass(frozen=True, eq=False)
class Group:
    """A finite group given by its multiplication table.

    Groups compare by identity: two separately constructed copies of the
    same group are different objects with independent caches.
    """

    order: int
    mul: Table
    inv: tuple[int, ...]
    name: str
    generators: tuple[int, ...] = field(default=())
    """Indices of the named generators ``a, b, c, ...`` used in set files."""

    @property
    def identity(self) -> int:
        return 0

    def multiply(self, x: int, y: int) -> int:
        return self.mul[x][y]

    def power(self, x: int, k: int) -> int:
        """Return ``x**k`` for any integer ``k``."""
        if k < 0:
            x, k = self.inv[x], -k
        result = 0
        row = self.mul
        for _ in range(k % element_order(self, x) if x else 0):
            result = row[result][x]
        return result

    def product(self, xs: Iterable[int]) -> int:
        result = 0
        for x in xs:
            result = self.mul[result][x]
        return result

    def __repr__(self) -> str:
        return f"Group({self.name!r}, order={self.order})"


@dataclass(frozen=True)
class ConjugacyPartition:
    """Conjugacy classes sorted by (size, smallest member)."""

    classes: tuple[tuple[int, ...], ...]
    reps: tuple[int, ...]
    class_of: tuple[int, ...]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    def __len__(self) -> int:
        return len(self.classes)


@dataclass(frozen=True)
class AutomorphismSet:
    """All automorphisms of a group, each a permutation of element indices."""

    maps: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.maps)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.maps)

    @staticmethod
    def apply(alpha: Sequence[int], elements: Iterable[int]) -> frozenset[int]:
        """Image of a set of elements under ``alpha``."""
        return frozenset(alpha[x] for x in elements)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def check_group_axioms(group: Group) -> None:
    """Verify identity, inverse, Latin-square and associativity laws.

    Raises:
        InvalidGroup: On the first violated law.
    """
    n = group.order
    mul = group.mul
    full = tuple(range(n))
    for x in range(n):
        if mul[0][x] != x or mul[x][0] != x:
            msg = f"{group.name}: index 0 is not an identity at element {x}"
            raise InvalidGroup(msg)
        if mul[x][group.inv[x]] != 0:
            msg = f"{group.name}: inv[{x}] = {group.inv[x]} is not an inverse"
            raise InvalidGroup(msg)
        if tuple(sorted(mul[x])) != full:
            msg = f"{group.name}: row {x} is not a permutation"
            raise InvalidGroup(msg)
        if tuple(sorted(mul[y][x] for y in range(n))) != full:
            msg = f"{group.name}: column {x} is not a permutation"
            raise InvalidGroup(msg)
    for x, y, z in itertools.product(range(n), repeat=3):
        if mul[mul[x][y]][z] != mul[x][mul[y][z]]:
            msg = f"{group.name}: ({x}*{y})*{z} != {x}*({y}*{z})"
            raise InvalidGroup(msg)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def _inverses(mul: Table) -> tuple[int, ...]:
    return tuple(row.index(0) for row in mul)


def _check_permutation(degree: int, perm: Sequence[int]) -> tuple[int, ...]:
    if len(perm) != degree or sorted(perm) != list(range(degree)):
        msg = f"{list(perm)} is not a permutation of 0..{degree - 1}"
        raise InvalidPermutation(msg)
    return tuple(perm)


def group_from_permutations(
    degree: int,
    generators: Sequence[Sequence[int]],
    name: str = "",
) -> Group:
    """Close a list of permutations into a group.

    Permutations are image lists (``p[i]`` is the image of ``i``) and are
    composed left to right: ``x*y`` applies ``x`` first. Elements are
    numbered in breadth-first order from the identity, multiplying by the
    generators in the order given.

    Raises:
        InvalidPermutation: If a generator is not a permutation.
        ClosureTooLarge: If the closure exceeds ``MAX_ORDER`` elements.
    """
    if degree < 1:
        msg = f"degree must be positive, got {degree}"
        raise InvalidPermutation(msg)
    gens = [_check_permutation(degree, g) for g in generators]
    identity = tuple(range(degree))
    index: dict[tuple[int, ...], int] = {identity: 0}
    elements = [identity]
    queue: deque[tuple[int, ...]] = deque([identity])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = tuple(g[x[i]] for i in range(degree))
            if y not in index:
                if len(elements) == MAX_ORDER:
                    msg = f"closure exceeds {MAX_ORDER} elements"
                    raise ClosureTooLarge(msg)
                index[y] = len(elements)
                elements.append(y)
                queue.append(y)
    mul = tuple(
        tuple(index[tuple(y[x[i]] for i in range(degree))] for y in elements)
        for x in elements
    )
    label = name or f"perm({degree}; {len(gens)} gens)"
    logger.debug("Closed %d generators into %s of order %d", len(gens), label, len(mul))
    return Group(
        order=len(mul),
        mul=mul,
        inv=_inverses(mul),
        name=label,
        generators=tuple(index[g] for g in gens),
    )


def group_semidirect_cyclic(m: int, n: int, r: int, name: str = "") -> Group:
    """Build ``<a, b | a^m = b^n = 1, b^-1 a b = a^r>``.

    The element ``a^i b^j`` has index ``i + m*j``.

    Raises:
        BadTwist: If ``r^n != 1 (mod m)`` or ``gcd(r, m) != 1``.
        ClosureTooLarge: If ``m*n`` exceeds ``MAX_ORDER``.
    """
    if m < 1 or n < 1:
        msg = f"m and n must be positive, got m={m}, n={n}"
        raise BadTwist(msg)
    if pow(r, n, m) != 1 % m or math.gcd(r, m) != 1:
        msg = f"r={r} does not satisfy r^{n} = 1 (mod {m}) with gcd(r, {m}) = 1"
        raise BadTwist(msg)
    if m * n > MAX_ORDER:
        msg = f"order {m * n} exceeds {MAX_ORDER}"
        raise ClosureTooLarge(msg)
    # b^j a^k = a^(k * r^-j) b^j
    r_inv = pow(r, n - 1, m) if m > 1 else 0
    twist = [pow(r_inv, j, m) if m > 1 else 0 for j in range(n)]
    mul = tuple(
        tuple(
            (i + k * twist[j]) % m + m * ((j + l) % n)
            for l in range(n)
            for k in range(m)
        )
        for j in range(n)
        for i in range(m)
    )
    gens = tuple(g for g, keep in ((1, m > 1), (m, n > 1)) if keep)
    return Group(
        order=m * n,
        mul=mul,
        inv=_inverses(mul),
        name=name or f"sdp({m},{n},{r})",
        generators=gens,
    )


def group_cyclic(n: int) -> Group:
    """The cyclic group of order ``n``."""
    return group_semidirect_cyclic(n, 1, 1, name=f"C{n}")


def group_dihedral(n: int) -> Group:
    """The dihedral group of order ``2n``, ``<r, s | r^n = s^2 = 1, srs = r^-1>``."""
    return group_semidirect_cyclic(n, 2, n - 1 if n > 1 else 0, name=f"D{2 * n}")


def group_dicyclic(n: int) -> Group:
    """The dicyclic group ``<a, b | a^2n = 1, b^2 = a^n, b^-1 a b = a^-1>``.

    It has order ``4n``; ``a^i b^j`` has index ``i + 2n*j``.
    """
    if n < 1:
        msg = f"n must be positive, got {n}"
        raise BadTwist(msg)
    m = 2 * n
    if 2 * m > MAX_ORDER:
        msg = f"order {2 * m} exceeds {MAX_ORDER}"
        raise ClosureTooLarge(msg)

    def product(i: int, j: int, k: int, l: int) -> int:
        if j == 0:
            return (i + k) % m + m * l
        if l == 0:
            return (i - k) % m + m
        return (i - k + n) % m

    mul = tuple(
        tuple(product(i, j, k, l) for l in range(2) for k in range(m))
        for j in range(2)
        for i in range(m)
    )
    name = "Q8" if n == 2 else f"Dic{n}"
    return Group(order=2 * m, mul=mul, inv=_inverses(mul), name=name, generators=(1, m))


def group_direct_product(a: Group, b: Group) -> Group:
    """Direct product with ``(x, y)`` at index ``x + |A|*y``.

    Raises:
        ClosureTooLarge: If ``|A|*|B|`` exceeds ``MAX_ORDER``.
    """
    na, nb = a.order, b.order
    if na * nb > MAX_ORDER:
        msg = f"order {na * nb} exceeds {MAX_ORDER}"
        raise ClosureTooLarge(msg)
    mul = tuple(
        tuple(
            a.mul[x1][x2] + na * b.mul[y1][y2] for y2 in range(nb) for x2 in range(na)
        )
        for y1 in range(nb)
        for x1 in range(na)
    )
    gens = tuple(g for g in a.generators) + tuple(na * g for g in b.generators)
    return Group(
        order=na * nb,
        mul=mul,
        inv=_inverses(mul),
        name=f"{a.name}x{b.name}",
        generators=gens,
    )


@functools.cache
def sl23_elements() -> tuple[Matrix2, ...]:
    """The 24 matrices of SL(2,3) in index order.

    The identity comes first; the rest follow in lexicographic order of
    their row-major entries.
    """
    mats: list[Matrix2] = []
    for a, b, c, d in itertools.product(range(3), repeat=4):
        if (a * d - b * c) % 3 == 1:
            mats.append(((a, b), (c, d)))
    identity: Matrix2 = ((1, 0), (0, 1))
    mats.remove(identity)
    return (identity, *mats)


def sl23_index(matrix: Sequence[Sequence[int]]) -> int:
    """Index of a 2x2 matrix over GF(3) in :func:`group_sl23`.

    Raises:
        InvalidGroup: If the matrix is not in SL(2,3).
    """
    key: Matrix2 = (
        (int(matrix[0][0]) % 3, int(matrix[0][1]) % 3),
        (int(matrix[1][0]) % 3, int(matrix[1][1]) % 3),
    )
    try:
        return sl23_elements().index(key)
    except ValueError:
        msg = f"{key} is not in SL(2,3)"
        raise InvalidGroup(msg) from None


def group_sl23() -> Group:
    """SL(2,3) with matrix multiplication mod 3."""
    elements = sl23_elements()
    index = {m: i for i, m in enumerate(elements)}

    def matmul(x: Matrix2, y: Matrix2) -> Matrix2:
        return (
            (
                (x[0][0] * y[0][0] + x[0][1] * y[1][0]) % 3,
                (x[0][0] * y[0][1] + x[0][1] * y[1][1]) % 3,
            ),
            (
                (x[1][0] * y[0][0] + x[1][1] * y[1][0]) % 3,
                (x[1][0] * y[0][1] + x[1][1] * y[1][1]) % 3,
            ),
        )

    mul = tuple(tuple(index[matmul(x, y)] for y in elements) for x in elements)
    gens = (index[((1, 1), (0, 1))], index[((0, 1), (2, 0))])
    return Group(order=24, mul=mul, inv=_inverses(mul), name="SL(2,3)", generators=gens)


# ---------------------------------------------------------------------------
# Queries
# ---------------------------------------------------------------------------


@functools.cache
def element_orders(group: Group) -> tuple[int, ...]:
    """Order of every element, by index."""
    orders = [0] * group.order
    orders[0] = 1
    for x in range(1, group.order):
        y, t = x, 1
        while y != 0:
            y = group.mul[y][x]
            t += 1
        orders[x] = t
    return tuple(orders)


def element_order(group: Group, x: int) -> int:
    """Least ``t >= 1`` with ``x^t`` the identity."""
    return element_orders(group)[x]


def exponent(group: Group) -> int:
    """Least common multiple of the element orders."""
    return math.lcm(*element_orders(group))


def is_abelian(group: Group) -> bool:
    mul = group.mul
    return all(
        mul[x][y] == mul[y][x]
        for x in range(group.order)
        for y in range(x + 1, group.order)
    )


@functools.cache
def conjugacy_classes(group: Group) -> ConjugacyPartition:
    """Partition the group into conjugacy classes.

    Classes are sorted by (size, smallest member), so the identity class
    ``(0,)`` always comes first.
    """
    n = group.order
    mul, inv = group.mul, group.inv
    seen = [False] * n
    found: list[tuple[int, ...]] = []
    for x in range(n):
        if seen[x]:
            continue
        orbit = sorted({mul[mul[inv[g]][x]][g] for g in range(n)})
        for y in orbit:
            seen[y] = True
        found.append(tuple(orbit))
    found.sort(key=lambda c: (len(c), c[0]))
    class_of = [0] * n
    for idx, cls in enumerate(found):
        for y in cls:
            class_of[y] = idx
    return ConjugacyPartition(
        classes=tuple(found),
        reps=tuple(c[0] for c in found),
        class_of=tuple(class_of),
    )


def subgroup_generated(group: Group, elements: Iterable[int]) -> tuple[int, ...]:
    """Closure of ``elements`` and the identity under multiplication."""
    gens = sorted(set(elements) - {0})
    found = {0}
    frontier = [0]
    mul = group.mul
    while frontier:
        nxt: list[int] = []
        for x in frontier:
            for g in gens:
                y = mul[x][g]
                if y not in found:
                    found.add(y)
                    nxt.append(y)
        frontier = nxt
    return tuple(sorted(found))


@functools.cache
def derived_subgroup(group: Group) -> tuple[int, ...]:
    """The commutator subgroup, as a sorted index tuple."""
    mul, inv = group.mul, group.inv
    commutators = {
        mul[mul[inv[x]][inv[y]]][mul[x][y]]
        for x in range(group.order)
        for y in range(group.order)
    }
    return subgroup_generated(group, commutators)


def _generating_tuple(group: Group) -> tuple[int, ...]:
    """A generating tuple of minimal length, smallest indices first."""
    if group.order == 1:
        return ()
    orders = element_orders(group)
    # higher-order elements first keeps the image search small
    candidates = sorted(range(1, group.order), key=lambda x: (-orders[x], x))
    for k in itertools.count(1):
        for combo in itertools.combinations(candidates, k):
            if len(subgroup_generated(group, combo)) == group.order:
                return combo
    raise AssertionError("unreachable")  # pragma: no cover


@functools.cache
def automorphism_group(group: Group) -> AutomorphismSet:
    """All automorphisms, by brute force over images of a generating tuple.

    Each candidate image tuple must match the generators' element orders;
    the induced map is built along a breadth-first spanning tree and kept
    when it is a bijective homomorphism.
    """
    n = group.order
    mul = group.mul
    gens = _generating_tuple(group)
    orders = element_orders(group)

    # spanning tree: element x = parent[x] * gens[via[x]]
    parent = [-1] * n
    via = [-1] * n
    order_bfs = [0]
    seen = {0}
    for x in order_bfs:
        for gi, g in enumerate(gens):
            y = mul[x][g]
            if y not in seen:
                seen.add(y)
                parent[y] = x
                via[y] = gi
                order_bfs.append(y)

    pools = [[y for y in range(n) if orders[y] == orders[g]] for g in gens]
    maps: list[tuple[int, ...]] = []
    for images in itertools.product(*pools):
        alpha = [0] * n
        for x in order_bfs[1:]:
            alpha[x] = mul[alpha[parent[x]]][images[via[x]]]
        if len(set(alpha)) != n:
            continue
        if all(
            alpha[mul[x][g]] == mul[alpha[x]][images[gi]]
            for gi, g in enumerate(gens)
            for x in range(n)
        ):
            maps.append(tuple(alpha))
    logger.debug("%s has %d automorphisms", group.name, len(maps))
    return AutomorphismSet(maps=tuple(maps))


GENERATOR_NAMES = "abcdefgh"


@functools.cache
def element_words(group: Group) -> tuple[str, ...]:
    """Shortest word in the named generators for every element.

    Words use positive powers only, e.g. ``a^2*b``; the identity is ``1``.
    Elements the named generators do not reach are rendered as ``#<index>``.
    """
    names = GENERATOR_NAMES[: len(group.generators)]
    words: list[list[tuple[str, int]] | None] = [None] * group.order
    words[0] = []
    queue: deque[int] = deque([0])
    while queue:
        x = queue.popleft()
        for name, g in zip(names, group.generators, strict=True):
            y = group.mul[x][g]
            if words[y] is None:
                prefix = list(words[x] or [])
                if prefix and prefix[-1][0] == name:
                    prefix[-1] = (name, prefix[-1][1] + 1)
                else:
                    prefix.append((name, 1))
                words[y] = prefix
                queue.append(y)
    out = []
    for x, word in enumerate(words):
        if word is None:
            out.append(f"#{x}")
        elif not word:
            out.append("1")
        else:
            out.append("*".join(n if k == 1 else f"{n}^{k}" for n, k in word))
    return tuple(out)
