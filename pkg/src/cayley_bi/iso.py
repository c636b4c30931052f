"""Canonical forms of small simple graphs by individualization-refinement.

Cells of an ordered partition are refined by the sorted colors of each
vertex's neighbours until stable. When the partition is not discrete the
search branches on the vertices of the first largest non-singleton cell.
Each leaf gives a relabeling and the canonical form is the lexicographically
smallest relabeled adjacency matrix over all leaves. Subtrees known to be
equivalent under a discovered or supplied automorphism are skipped.
"""

from __future__ import annotations

import itertools
import logging
import threading
from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from cayley_bi.spectra import char_poly_of_matrix
from cayley_bi.types import TooLarge

logger = logging.getLogger(__name__)

__all__ = [
    "BRUTE_FORCE_LIMIT",
    "CanonicalForm",
    "CanonicalFormCache",
    "are_isomorphic",
    "brute_force_isomorphic",
    "canonical_form",
    "relabel",
]

BRUTE_FORCE_LIMIT = 8

type Adjacency = npt.NDArray[np.integer]
type Cells = list[list[int]]
type Certificate = tuple[int, ...]


@dataclass(frozen=True)
class CanonicalForm:
    """Adjacency of the canonically relabeled graph as a row-major bit string.

    The first bit (row 0, column 0) is the most significant bit of ``bits``.
    """

    n: int
    bits: int

    @property
    def hex(self) -> str:
        width = (self.n * self.n + 3) // 4
        return format(self.bits, f"0{width}x") if width else ""

    @classmethod
    def from_hex(cls, n: int, text: str) -> CanonicalForm:
        return cls(n=n, bits=int(text, 16) if text else 0)


def _neighbours(adj: Adjacency) -> list[list[int]]:
    return [np.flatnonzero(row).tolist() for row in np.asarray(adj)]


def _refine(cells: Cells, nbrs: Sequence[Sequence[int]], n: int) -> Cells:
    """Split cells by the sorted colors of neighbours until nothing changes."""
    while True:
        color = [0] * n
        for idx, cell in enumerate(cells):
            for v in cell:
                color[v] = idx
        refined: Cells = []
        for cell in cells:
            if len(cell) == 1:
                refined.append(cell)
                continue
            split: dict[tuple[int, ...], list[int]] = {}
            for v in cell:
                split.setdefault(tuple(sorted(color[u] for u in nbrs[v])), []).append(v)
            refined.extend(split[key] for key in sorted(split))
        if len(refined) == len(cells):
            return refined
        cells = refined


def _individualize(cells: Cells, target: int, v: int) -> Cells:
    rest = [u for u in cells[target] if u != v]
    return cells[:target] + [[v], rest] + cells[target + 1 :]


def _target_cell(cells: Cells) -> int | None:
    best, size = None, 1
    for idx, cell in enumerate(cells):
        if len(cell) > size:
            best, size = idx, len(cell)
    return best


def _certificate(order: Sequence[int], nbrs: Sequence[Sequence[int]], n: int) -> Certificate:
    position = [0] * n
    for i, v in enumerate(order):
        position[v] = i
    rows = []
    for v in order:
        row = 0
        for u in nbrs[v]:
            row |= 1 << (n - 1 - position[u])
        rows.append(row)
    return tuple(rows)


class _Orbits:
    """Union-find over vertices for the group generated by some permutations."""

    def __init__(self, n: int, generators: Iterable[Sequence[int]]) -> None:
        self.parent = list(range(n))
        for gamma in generators:
            for v, w in enumerate(gamma):
                self.union(v, w)

    def find(self, v: int) -> int:
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def union(self, v: int, w: int) -> None:
        a, b = self.find(v), self.find(w)
        if a != b:
            self.parent[max(a, b)] = min(a, b)


class _Search:
    def __init__(self, adj: Adjacency, known: Iterable[Sequence[int]]) -> None:
        self.n = int(adj.shape[0])
        self.nbrs = _neighbours(adj)
        self.automorphisms: list[tuple[int, ...]] = [tuple(g) for g in known]
        self.first: tuple[Certificate, list[int]] | None = None
        self.best: tuple[Certificate, list[int]] | None = None
        self.leaves = 0

    def run(self) -> Certificate:
        root = _refine([list(range(self.n))], self.nbrs, self.n)
        self._explore(root, [])
        assert self.best is not None
        return self.best[0]

    def _stabilizer(self, prefix: Sequence[int]) -> list[tuple[int, ...]]:
        return [g for g in self.automorphisms if all(g[v] == v for v in prefix)]

    def _explore(self, cells: Cells, prefix: list[int]) -> None:
        target = _target_cell(cells)
        if target is None:
            self._leaf([c[0] for c in cells])
            return
        explored: list[int] = []
        for v in cells[target]:
            orbits = _Orbits(self.n, self._stabilizer(prefix))
            if any(orbits.find(v) == orbits.find(w) for w in explored):
                continue
            explored.append(v)
            child = _refine(_individualize(cells, target, v), self.nbrs, self.n)
            self._explore(child, [*prefix, v])

    def _leaf(self, order: list[int]) -> None:
        self.leaves += 1
        cert = _certificate(order, self.nbrs, self.n)
        for known in (self.first, self.best):
            if known is not None and known[0] == cert:
                gamma = [0] * self.n
                for u, w in zip(order, known[1], strict=True):
                    gamma[u] = w
                if any(gamma[v] != v for v in range(self.n)):
                    self.automorphisms.append(tuple(gamma))
                break
        if self.first is None:
            self.first = (cert, order)
        if self.best is None or cert < self.best[0]:
            self.best = (cert, order)


def canonical_form(
    adj: Adjacency, known_automorphisms: Iterable[Sequence[int]] = ()
) -> CanonicalForm:
    """Canonical form of a simple undirected graph given by its adjacency.

    ``known_automorphisms`` may list automorphisms of the graph (for a Cayley
    graph, the left translations) to prune the search; the result does not
    depend on them.
    """
    n = int(adj.shape[0])
    if n == 0:
        return CanonicalForm(n=0, bits=0)
    search = _Search(adj, known_automorphisms)
    rows = search.run()
    bits = 0
    for row in rows:
        bits = (bits << n) | row
    logger.debug("Canonical form on %d vertices after %d leaves", n, search.leaves)
    return CanonicalForm(n=n, bits=bits)


def relabel(adj: Adjacency, perm: Sequence[int]) -> Adjacency:
    """The graph with vertex ``v`` renamed to ``perm[v]``."""
    out = np.zeros_like(adj)
    p = np.asarray(perm)
    out[np.ix_(p, p)] = adj
    return out


def _degree_sequence(adj: Adjacency) -> list[int]:
    return sorted(np.asarray(adj).sum(axis=1).tolist())


def are_isomorphic(g1: Adjacency, g2: Adjacency) -> bool:
    """Isomorphism via degree and char-poly prefilters, then canonical forms."""
    if g1.shape != g2.shape or _degree_sequence(g1) != _degree_sequence(g2):
        return False
    if char_poly_of_matrix(g1) != char_poly_of_matrix(g2):
        return False
    return canonical_form(g1) == canonical_form(g2)


def brute_force_isomorphic(g1: Adjacency, g2: Adjacency) -> bool:
    """Try every vertex bijection.

    Raises:
        TooLarge: For graphs on more than ``BRUTE_FORCE_LIMIT`` vertices.
    """
    n = int(g1.shape[0])
    if n > BRUTE_FORCE_LIMIT:
        msg = f"brute force supports at most {BRUTE_FORCE_LIMIT} vertices, got {n}"
        raise TooLarge(msg)
    if g1.shape != g2.shape:
        return False
    a, b = np.asarray(g1), np.asarray(g2)
    return any(
        np.array_equal(relabel(a, perm), b) for perm in itertools.permutations(range(n))
    )


class CanonicalFormCache:
    """Thread-safe insert-or-get cache; the first stored value wins.

    The engine keys it by ``(group, mask)``, so one cache may serve several groups.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._forms: dict[Hashable, CanonicalForm] = {}

    def get_or_compute(
        self, key: Hashable, compute: Callable[[], CanonicalForm]
    ) -> CanonicalForm:
        with self._lock:
            found = self._forms.get(key)
        if found is not None:
            return found
        form = compute()
        with self._lock:
            return self._forms.setdefault(key, form)

    def __len__(self) -> int:
        with self._lock:
            return len(self._forms)

    def __contains__(self, key: Hashable) -> bool:
        with self._lock:
            return key in self._forms
