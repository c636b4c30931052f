"""Cayley graphs, their spectra, and the character identities they satisfy.

Spectral equality between graphs is decided on exact integer
characteristic polynomials. Float eigenvalues are used for reports, for
clustering multiplicities and for the power-sum cross-check against the
character table.
"""

from __future__ import annotations

import functools
import logging
from collections import Counter
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx
import numpy as np
import numpy.typing as npt
from sympy import Poly, Symbol
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix

from cayley_bi.characters import CharacterTable, linear_characters
from cayley_bi.cyclotomic import Cyclotomic, cyc_from_rational
from cayley_bi.groups import (
    Group,
    conjugacy_classes,
    element_orders,
    element_words,
    subgroup_generated,
)
from cayley_bi.types import (
    BabaiCheck,
    CharSumSet,
    ClusterAmbiguity,
    InvalidConnectionSet,
    InvalidGroup,
    SpectrumReport,
    StructureTag,
    StructureViolation,
)

logger = logging.getLogger(__name__)

__all__ = [
    "CLUSTER_TOLERANCE",
    "CayleyGraph",
    "ConnectionSet",
    "babai_cross_check",
    "babai_power_sum_check",
    "build_cayley",
    "char_poly_exact",
    "char_poly_of_matrix",
    "character_sums",
    "character_sums_from_profile",
    "charsum_set_from_sums",
    "classify_f20_spectrum",
    "classify_f42_spectrum",
    "connection_set",
    "eigenvalues",
    "eigenvalues_exact",
    "eigenvalues_float",
    "f20_mu",
    "f42_mu",
    "is_f20",
    "is_f42",
    "spectrum_report",
]

CLUSTER_TOLERANCE = 1e-8
MATCH_TOLERANCE = 1e-6

type Spectrum = tuple[tuple[float, int], ...]


# ---------------------------------------------------------------------------
# Connection sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConnectionSet:
    """An inverse-closed, identity-free subset of a group.

    Raises:
        InvalidConnectionSet: If a member is out of range, is the identity,
            or has its inverse missing.
    """

    group: Group
    members: tuple[int, ...]

    def __post_init__(self) -> None:
        members = tuple(sorted(set(self.members)))
        object.__setattr__(self, "members", members)
        n = self.group.order
        for x in members:
            if not 0 <= x < n:
                msg = f"element {x} is not in {self.group.name} (order {n})"
                raise InvalidConnectionSet(msg)
        if members and members[0] == 0:
            msg = "connection set contains the identity"
            raise InvalidConnectionSet(msg)
        missing = sorted({self.group.inv[x] for x in members} - set(members))
        if missing:
            msg = f"connection set is not inverse-closed: missing {missing}"
            raise InvalidConnectionSet(msg)

    @classmethod
    def from_mask(cls, group: Group, mask: int) -> ConnectionSet:
        return cls(group, tuple(x for x in range(group.order) if mask >> x & 1))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, x: object) -> bool:
        return x in self.members

    @functools.cached_property
    def mask(self) -> int:
        """Bitset of the members, bit ``x`` for element ``x``."""
        bits = 0
        for x in self.members:
            bits |= 1 << x
        return bits

    @functools.cached_property
    def order_partition(self) -> dict[int, tuple[int, ...]]:
        """Members grouped by element order (the sets ``S_k``)."""
        orders = element_orders(self.group)
        out: dict[int, list[int]] = {}
        for x in self.members:
            out.setdefault(orders[x], []).append(x)
        return {k: tuple(v) for k, v in sorted(out.items())}

    @functools.cached_property
    def order_profile(self) -> dict[int, int]:
        return {k: len(v) for k, v in self.order_partition.items()}

    @functools.cached_property
    def class_profile(self) -> tuple[int, ...]:
        """Number of members in each conjugacy class."""
        partition = conjugacy_classes(self.group)
        counts = [0] * len(partition)
        for x in self.members:
            counts[partition.class_of[x]] += 1
        return tuple(counts)

    def count(self, order: int) -> int:
        """``|S_k|`` for ``k = order``."""
        return self.order_profile.get(order, 0)

    def words(self) -> tuple[str, ...]:
        table = element_words(self.group)
        return tuple(table[x] for x in self.members)

    def is_generating(self) -> bool:
        return len(subgroup_generated(self.group, self.members)) == self.group.order

    def complement(self) -> ConnectionSet:
        """``G* \\ S``."""
        return ConnectionSet(
            self.group, tuple(x for x in range(1, self.group.order) if x not in self.members)
        )

    def image(self, alpha: Sequence[int]) -> ConnectionSet:
        """The set ``alpha(S)`` for a group automorphism ``alpha``."""
        return ConnectionSet(self.group, tuple(alpha[x] for x in self.members))


def connection_set(
    group: Group, members: Iterable[int], *, close_inverse: bool = False
) -> ConnectionSet:
    """Build a connection set, optionally adding missing inverses first."""
    chosen = set(members)
    if close_inverse:
        chosen |= {group.inv[x] for x in chosen if 0 <= x < group.order}
    return ConnectionSet(group, tuple(chosen))


# ---------------------------------------------------------------------------
# Graphs and polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CayleyGraph:
    """``Cay(G, S)``: ``x ~ y`` iff ``x^-1 y`` is in ``S``."""

    group: Group
    set: ConnectionSet
    adjacency: npt.NDArray[np.uint8]

    @property
    def n(self) -> int:
        return self.group.order

    def to_networkx(self) -> nx.Graph:
        return nx.from_numpy_array(self.adjacency)

    def is_connected(self) -> bool:
        return self.n <= 1 or bool(nx.is_connected(self.to_networkx()))


def build_cayley(group: Group, s: ConnectionSet) -> CayleyGraph:
    adj = np.zeros((group.order, group.order), dtype=np.uint8)
    members = list(s.members)
    for x in range(group.order):
        row = group.mul[x]
        adj[x, [row[m] for m in members]] = 1
    return CayleyGraph(group=group, set=s, adjacency=adj)


def char_poly_of_matrix(adj: npt.NDArray[np.integer]) -> tuple[int, ...]:
    """``det(xI - A)`` over the integers, highest degree first."""
    matrix = DomainMatrix.from_list(adj.astype(np.int64).tolist(), ZZ)
    return tuple(int(c) for c in matrix.charpoly())


def char_poly_exact(graph: CayleyGraph) -> tuple[int, ...]:
    return char_poly_of_matrix(graph.adjacency)


def _cluster(values: Sequence[float]) -> Spectrum:
    clusters: list[list[float]] = []
    for v in sorted(values, reverse=True):
        if clusters and clusters[-1][0] - v <= CLUSTER_TOLERANCE:
            clusters[-1].append(v)
        else:
            clusters.append([v])
    return tuple((float(np.mean(c)), len(c)) for c in clusters)


def eigenvalues_float(graph: CayleyGraph) -> Spectrum:
    """Eigenvalues with multiplicities, largest first.

    Raises:
        ClusterAmbiguity: If two clusters lie within ten times the tolerance.
    """
    values = np.linalg.eigvalsh(graph.adjacency.astype(np.float64))
    spectrum = _cluster(values.tolist())
    for (a, _), (b, _) in zip(spectrum, spectrum[1:], strict=False):
        if a - b < 10 * CLUSTER_TOLERANCE:
            msg = f"eigenvalue clusters {a!r} and {b!r} are too close to separate"
            raise ClusterAmbiguity(msg)
    return spectrum


def eigenvalues_exact(graph: CayleyGraph) -> Spectrum:
    """Eigenvalues from the square-free factorization of the char-poly."""
    x = Symbol("x")
    _, factors = Poly(list(char_poly_exact(graph)), x, domain=ZZ).sqf_list()
    found: list[tuple[float, int]] = []
    for factor, mult in factors:
        for root in factor.nroots(n=30):
            found.append((complex(root).real, mult))
    found.sort(key=lambda item: -item[0])
    return tuple(found)


def eigenvalues(graph: CayleyGraph) -> Spectrum:
    """Float eigenvalues, falling back to the exact path on ambiguity."""
    try:
        return eigenvalues_float(graph)
    except ClusterAmbiguity:
        logger.debug("Cluster ambiguity on %s; using exact factorization", graph.group.name)
        return eigenvalues_exact(graph)


def _multiplicity(spectrum: Spectrum, value: float) -> int:
    return sum(m for v, m in spectrum if abs(v - value) <= MATCH_TOLERANCE)


# ---------------------------------------------------------------------------
# Character sums
# ---------------------------------------------------------------------------


def character_sums(table: CharacterTable, s: ConnectionSet) -> tuple[Cyclotomic, ...]:
    """``sum_{x in S} chi_i(x)`` for every row ``i``."""
    return character_sums_from_profile(table, s.class_profile)


def character_sums_from_profile(
    table: CharacterTable, profile: Sequence[int]
) -> tuple[Cyclotomic, ...]:
    """Character sums of any set meeting class ``k`` in ``profile[k]`` elements."""
    zero = cyc_from_rational(0, table.conductor)
    return tuple(
        sum((count * row[k] for k, count in enumerate(profile) if count), zero)
        for row in table.rows
    )


def charsum_set_from_sums(
    table: CharacterTable,
    sums: Sequence[Cyclotomic],
    nu: int,
    *,
    multiset: bool = False,
) -> CharSumSet:
    """Collect the sums of the degree-``nu`` rows into a :class:`CharSumSet`."""
    picked = sorted((sums[i] for i in table.rows_of_degree(nu)), key=Cyclotomic.sort_key)
    if not multiset:
        unique: list[Cyclotomic] = []
        for v in picked:
            if not unique or unique[-1] != v:
                unique.append(v)
        picked = unique
    return CharSumSet(degree=nu, values=tuple(picked), multiset=multiset)


def _tuple_sum(table: CharacterTable, i: int, s: ConnectionSet, t: int) -> Cyclotomic:
    """``sum chi_i(s_1 ... s_t)`` over all ``t``-tuples from ``S``."""
    group = table.group
    counts = {0: 1}
    for _ in range(t):
        nxt: dict[int, int] = {}
        for x, c in counts.items():
            row = group.mul[x]
            for m in s.members:
                y = row[m]
                nxt[y] = nxt.get(y, 0) + c
        counts = nxt
    per_class = [0] * table.h
    for x, c in counts.items():
        per_class[table.partition.class_of[x]] += c
    zero = cyc_from_rational(0, table.conductor)
    return sum((c * table.rows[i][k] for k, c in enumerate(per_class) if c), zero)


def _root_multiplicity(poly: Sequence[int], r: Fraction) -> int:
    """Multiplicity of ``r`` as a root of ``poly``, coefficients highest degree first."""
    coeffs = [Fraction(c) for c in poly]
    count = 0
    while len(coeffs) > 1:
        quotient = [coeffs[0]]
        for c in coeffs[1:]:
            quotient.append(c + quotient[-1] * r)
        if quotient.pop() != 0:
            break
        coeffs = quotient
        count += 1
    return count


def babai_power_sum_check(
    table: CharacterTable,
    s: ConnectionSet,
    i: int,
    t: int,
    spectrum: Spectrum | None = None,
    char_poly: Sequence[int] | None = None,
) -> BabaiCheck:
    """Compare a character's ``t``-th eigenvalue power sum with the spectrum.

    A linear character contributes the eigenvalue ``lambda(S)`` once, so the
    eigenvalue must occur at least as often as the linear characters sharing
    its sum. Rational sums are located exactly, as roots of the integer
    char-poly; irrational ones are matched in the float spectrum. For a
    character of degree ``n_i`` the power sum is the trace of ``A^t`` minus
    the contributions of all other characters, divided by ``n_i``.
    """
    if t not in (1, 2):
        msg = f"power sums are checked for t = 1 or 2, got {t}"
        raise ValueError(msg)
    if spectrum is None:
        spectrum = eigenvalues(build_cayley(table.group, s))
    right = _tuple_sum(table, i, s, t)
    sums = {j: _tuple_sum(table, j, s, 1) for j in linear_characters(table)}
    sharing = Counter(sums.values())
    located = True
    poly = char_poly

    def from_spectrum(j: int) -> Fraction | float:
        nonlocal located, poly
        value = sums[j]
        exact = value.to_rational()
        if exact is not None:
            if poly is None:
                poly = char_poly_exact(build_cayley(table.group, s))
            if _root_multiplicity(poly, exact) < sharing[value]:
                located = False
            return exact
        target = value.to_complex().real
        nearest = min(spectrum, key=lambda item: abs(item[0] - target))[0]
        missing = _multiplicity(spectrum, target) < sharing[value]
        if missing or abs(nearest - target) > MATCH_TOLERANCE:
            located = False
        return nearest

    exact_check = False
    if i in sums:
        base = from_spectrum(i)
        exact_right = right.to_rational()
        if isinstance(base, Fraction) and exact_right is not None:
            exact_check = True
            left = float(base**t)
            ok = base**t == exact_right
        else:
            left = float(base) ** t
            ok = abs(left - right.to_complex()) <= MATCH_TOLERANCE
    else:
        trace = sum(m * v**t for v, m in spectrum)
        others = 0.0
        for j in range(table.h):
            if j == i:
                continue
            if j in sums:
                others += float(from_spectrum(j)) ** t
            else:
                others += table.degrees[j] * _tuple_sum(table, j, s, t).to_complex().real
        left = (trace - others) / table.degrees[i]
        ok = abs(left - right.to_complex()) <= MATCH_TOLERANCE
    return BabaiCheck(
        character=i,
        degree=table.degrees[i],
        t=t,
        left=float(left),
        right=right,
        ok=bool(located and ok),
        exact=exact_check,
    )


def babai_cross_check(
    table: CharacterTable, s: ConnectionSet, spectrum: Spectrum | None = None
) -> tuple[BabaiCheck, ...]:
    """``t = 1`` for every character and ``t = 2`` for the nonlinear ones."""
    graph = build_cayley(table.group, s)
    if spectrum is None:
        spectrum = eigenvalues(graph)
    poly = char_poly_exact(graph)
    checks = [babai_power_sum_check(table, s, i, 1, spectrum, poly) for i in range(table.h)]
    checks += [
        babai_power_sum_check(table, s, i, 2, spectrum, poly)
        for i in range(table.h)
        if table.degrees[i] > 1
    ]
    return tuple(checks)


# ---------------------------------------------------------------------------
# Structure of the order-20 and order-42 Frobenius groups
# ---------------------------------------------------------------------------


def is_f20(group: Group) -> bool:
    return group.order == 20 and sorted(conjugacy_classes(group).sizes) == [1, 4, 5, 5, 5]


def is_f42(group: Group) -> bool:
    return group.order == 42 and sorted(conjugacy_classes(group).sizes) == [1, 6, 7, 7, 7, 7, 7]


def _require_generating(s: ConnectionSet) -> None:
    if not s.is_generating():
        msg = f"spectrum structure needs a generating set, got {list(s.members)}"
        raise InvalidConnectionSet(msg)


def _check_top(s: ConnectionSet, spectrum: Spectrum) -> None:
    top, mult = spectrum[0]
    if abs(top - len(s)) > MATCH_TOLERANCE or mult != 1:
        msg = f"largest eigenvalue {top} (x{mult}) is not a simple |S| = {len(s)}"
        raise StructureViolation(msg)


def _check_residues(
    family: str,
    kind: str,
    s: ConnectionSet,
    spectrum: Spectrum,
    roles: dict[str, Fraction],
    expected: dict[str, int],
    modulus: int,
) -> StructureTag:
    multiplicities = {role: _multiplicity(spectrum, float(roles[role])) for role in expected}
    residues = {role: m % modulus for role, m in multiplicities.items()}
    for role, want in expected.items():
        if residues[role] != want:
            msg = (
                f"{family} {kind}: {role} = {roles[role]} has multiplicity "
                f"{multiplicities[role]}, expected {want} mod {modulus}"
            )
            raise StructureViolation(msg)
    named = [len(s)] + [float(roles[role]) for role in expected]
    for v, m in spectrum:
        if all(abs(v - w) > MATCH_TOLERANCE for w in named) and m % modulus:
            msg = f"{family} {kind}: eigenvalue {v} has multiplicity {m}, not 0 mod {modulus}"
            raise StructureViolation(msg)
    return StructureTag(
        family=family,
        kind=kind,
        mu={"mu1": str(len(s))} | {role: str(v) for role, v in roles.items()},
        multiplicities=multiplicities,
        residues=residues,
    )


def f20_mu(s: ConnectionSet) -> tuple[Fraction, Fraction]:
    """``(mu_2, mu_3)`` from the order profile of an F20 connection set."""
    s2, s4, s5 = s.count(2), s.count(4), s.count(5)
    return Fraction(s2 - s4 + s5), Fraction(s5 - s2)


def f42_mu(s: ConnectionSet) -> tuple[Fraction, Fraction, Fraction]:
    """``(mu_2, mu_3, mu_5)`` from the order profile of an F42 connection set."""
    s2, s3, s6, s7 = (Fraction(s.count(k)) for k in (2, 3, 6, 7))
    return (
        -s2 + s3 - s6 + s7,
        s2 - s3 / 2 - s6 / 2 + s7,
        -s2 - s3 / 2 + s6 / 2 + s7,
    )


def classify_f20_spectrum(s: ConnectionSet, spectrum: Spectrum | None = None) -> StructureTag:
    """Classify the spectrum of a generating F20 Cayley graph.

    Type 1 has distinct ``mu_2`` and ``mu_3`` with multiplicities ``1`` and
    ``2`` mod 4. Type 2 has ``mu_2 = mu_3 = theta`` with multiplicity ``3``
    mod 4. In both types ``|S|`` is simple and every other eigenvalue has
    multiplicity divisible by 4.

    Raises:
        StructureViolation: If the spectrum does not have this shape.
    """
    if not is_f20(s.group):
        msg = f"{s.group.name} is not the Frobenius group of order 20"
        raise InvalidGroup(msg)
    _require_generating(s)
    if spectrum is None:
        spectrum = eigenvalues(build_cayley(s.group, s))
    _check_top(s, spectrum)
    mu2, mu3 = f20_mu(s)
    if mu2 != mu3:
        return _check_residues(
            "F20", "type1", s, spectrum, {"mu2": mu2, "mu3": mu3}, {"mu2": 1, "mu3": 2}, 4
        )
    return _check_residues("F20", "type2", s, spectrum, {"theta": mu2}, {"theta": 3}, 4)


def classify_f42_spectrum(s: ConnectionSet, spectrum: Spectrum | None = None) -> StructureTag:
    """Classify the spectrum of a generating F42 Cayley graph.

    The type follows from which of ``mu_2``, ``mu_3``, ``mu_5`` coincide:

    ====== ================= ==========================
    type   coincidence       multiplicities mod 6
    ====== ================= ==========================
    type1  none              mu2: 1, mu3: 2, mu5: 2
    type2  mu3 = mu5         mu2: 1, mu3: 4
    type3  mu2 = mu5         mu2: 3, mu3: 2
    type4  mu2 = mu3         mu2: 3, mu5: 2
    type5  all equal         mu2: 5
    ====== ================= ==========================

    Raises:
        StructureViolation: If the spectrum does not have this shape.
    """
    if not is_f42(s.group):
        msg = f"{s.group.name} is not the Frobenius group of order 42"
        raise InvalidGroup(msg)
    _require_generating(s)
    if spectrum is None:
        spectrum = eigenvalues(build_cayley(s.group, s))
    _check_top(s, spectrum)
    mu2, mu3, mu5 = f42_mu(s)
    if mu2 == mu3 == mu5:
        kind, roles, expected = "type5", {"mu2": mu2}, {"mu2": 5}
    elif mu3 == mu5:
        kind, roles, expected = "type2", {"mu2": mu2, "mu3": mu3}, {"mu2": 1, "mu3": 4}
    elif mu2 == mu5:
        kind, roles, expected = "type3", {"mu2": mu2, "mu3": mu3}, {"mu2": 3, "mu3": 2}
    elif mu2 == mu3:
        kind, roles, expected = "type4", {"mu2": mu2, "mu5": mu5}, {"mu2": 3, "mu5": 2}
    else:
        kind = "type1"
        roles = {"mu2": mu2, "mu3": mu3, "mu5": mu5}
        expected = {"mu2": 1, "mu3": 2, "mu5": 2}
    tag = _check_residues("F42", kind, s, spectrum, roles, expected, 6)
    logger.debug("F42 spectrum %s for |S|=%d", kind, len(s))
    return tag


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def spectrum_report(
    table: CharacterTable, s: ConnectionSet, *, babai: bool = True
) -> SpectrumReport:
    """Assemble exact and float spectral data for ``Cay(G, S)``."""
    graph = build_cayley(table.group, s)
    spectrum = eigenvalues(graph)
    sums = character_sums(table, s)
    tag = None
    if s.is_generating() and len(s):
        if is_f20(table.group):
            tag = classify_f20_spectrum(s, spectrum)
        elif is_f42(table.group):
            tag = classify_f42_spectrum(s, spectrum)
    return SpectrumReport(
        group=table.group.name,
        members=s.members,
        char_poly=char_poly_exact(graph),
        eigs=spectrum,
        babai_m1=tuple(sums[i] for i in linear_characters(table)),
        m_sets={nu: charsum_set_from_sums(table, sums, nu) for nu in table.degree_set},
        order_profile=dict(s.order_profile),
        class_profile=s.class_profile,
        connected=graph.is_connected(),
        structure_tag=tag,
        babai=babai_cross_check(table, s, spectrum) if babai else (),
    )
