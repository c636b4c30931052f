"""BI and CI decision procedures over enumerated connection sets.

Inverse-closed subsets of ``G*`` are unions of *atoms*: involution
singletons followed by inverse pairs ``{x, x^-1}`` with ``x < x^-1``. A set
is encoded twice: as an element bitmask (bit ``x`` for element ``x``) and as
an incidence vector over the atoms. Enumeration visits incidence vectors in
descending lexicographic order, so earlier atoms are taken first.

A whole-group check keeps one representative per automorphism orbit,
computes each representative's M-profile from its class profile and a
closed-walk signature of its graph, and resolves canonical forms only for
signature buckets that mix different M-profiles.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
import time
from collections.abc import Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from types import TracebackType
from typing import Self

import numpy as np
import numpy.typing as npt
from sympy import Matrix, Rational

from cayley_bi.characters import CharacterTable, character_table, linear_characters
from cayley_bi.cyclotomic import Cyclotomic
from cayley_bi.groups import (
    AutomorphismSet,
    Group,
    automorphism_group,
    conjugacy_classes,
    derived_subgroup,
    element_orders,
    subgroup_generated,
)
from cayley_bi.iso import CanonicalForm, CanonicalFormCache, canonical_form
from cayley_bi.logging_config import configure_worker_logging, current_stderr_level
from cayley_bi.spectra import (
    MATCH_TOLERANCE,
    ConnectionSet,
    Spectrum,
    build_cayley,
    character_sums,
    character_sums_from_profile,
    charsum_set_from_sums,
    connection_set,
    spectrum_report,
)
from cayley_bi.types import (
    BIMode,
    BIReport,
    BIViolation,
    BudgetExceeded,
    CharSumSet,
    CIWitness,
    ClassifyRow,
    Inconsistent,
    InvalidConnectionSet,
    Method,
    NonBIWitness,
    PairReport,
    SizeReport,
    SpectrumReport,
    StructureViolation,
    WitnessRoute,
)

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_BUDGET",
    "DEFAULT_SAMPLES",
    "F42_CASES",
    "FULL_MODE_LIMIT",
    "BIEngine",
    "EngineConfig",
    "bi_check_group",
    "bi_check_pair",
    "bi_check_size",
    "char_sum_set",
    "ci_check_pair",
    "complement_set",
    "construct_non_bi_witness",
    "count_connection_sets",
    "enumerate_connection_sets",
    "f20_roles_from_spectrum",
    "find_non_ci_witness",
    "first_differing_degree",
    "is_bi_graph",
    "m_profile",
    "m_profiles_equal",
    "mode_sizes",
    "recover_order_profile_f20",
    "recover_order_profile_f42",
    "transfer_matrix_f42",
]

DEFAULT_BUDGET = 2**20
DEFAULT_SAMPLES = 2**12
FULL_MODE_LIMIT = 22
WALK_PRIME = 2_147_483_647
BATCH_CELLS = 1 << 22

type Mask = int
type MProfile = tuple[CharSumSet, ...]
type Masks = npt.NDArray[np.uint64]


@dataclass(frozen=True)
class EngineConfig:
    """Parameters shared by every enumeration of one run.

    Attributes:
        budget: Most sets enumerated exhaustively for one size.
        jobs: Worker processes for canonical forms.
        seed: Seed of the sampling fallback.
        multiset: Compare M sets with multiplicities.
        orbits: Keep one set per automorphism orbit.
        samples: Sets drawn per size when the budget is exceeded.
    """

    budget: int = DEFAULT_BUDGET
    jobs: int = 1
    seed: int = 0
    multiset: bool = False
    orbits: bool = True
    samples: int = DEFAULT_SAMPLES

    def __post_init__(self) -> None:
        for name in ("budget", "jobs", "samples"):
            value = getattr(self, name)
            if value < 1:
                msg = f"{name} must be at least 1, got {value}"
                raise ValueError(msg)


# ---------------------------------------------------------------------------
# M sets
# ---------------------------------------------------------------------------


def _same_group(s: ConnectionSet, t: ConnectionSet) -> None:
    if s.group is not t.group:
        msg = f"connection sets belong to different groups: {s.group.name} and {t.group.name}"
        raise InvalidConnectionSet(msg)


def char_sum_set(
    table: CharacterTable, s: ConnectionSet, nu: int, *, multiset: bool = False
) -> CharSumSet:
    """``M_nu^S``: the sums over ``S`` of the degree-``nu`` characters.

    Raises:
        NoSuchDegree: If no character has degree ``nu``.
    """
    return charsum_set_from_sums(table, character_sums(table, s), nu, multiset=multiset)


def _profile_from_sums(
    table: CharacterTable, sums: Sequence[Cyclotomic], multiset: bool
) -> MProfile:
    return tuple(
        charsum_set_from_sums(table, sums, nu, multiset=multiset) for nu in table.degree_set
    )


def m_profile(table: CharacterTable, s: ConnectionSet, *, multiset: bool = False) -> MProfile:
    """``M_nu^S`` for every degree of the table, in increasing degree."""
    return _profile_from_sums(table, character_sums(table, s), multiset)


def m_profiles_equal(
    table: CharacterTable, s: ConnectionSet, t: ConnectionSet, *, multiset: bool = False
) -> bool:
    return first_differing_degree(table, s, t, multiset=multiset) is None


def first_differing_degree(
    table: CharacterTable, s: ConnectionSet, t: ConnectionSet, *, multiset: bool = False
) -> int | None:
    """Smallest degree ``nu`` with ``M_nu^S != M_nu^T``, or None."""
    _same_group(s, t)
    ps, pt = m_profile(table, s, multiset=multiset), m_profile(table, t, multiset=multiset)
    for nu, a, b in zip(table.degree_set, ps, pt, strict=True):
        if a != b:
            return nu
    return None


def complement_set(group: Group, s: ConnectionSet) -> ConnectionSet:
    """``G* \\ S``."""
    if s.group is not group:
        msg = f"connection set belongs to {s.group.name}, not {group.name}"
        raise InvalidConnectionSet(msg)
    return s.complement()


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Atoms:
    bits: tuple[int, ...]
    involutions: int

    @property
    def pairs(self) -> int:
        return len(self.bits) - self.involutions

    def splits(self, size: int) -> list[tuple[int, int]]:
        """``(involutions, pairs)`` choices that make up ``size`` elements."""
        return [
            (i, (size - i) // 2)
            for i in range(size % 2, min(size, self.involutions) + 1, 2)
            if (size - i) // 2 <= self.pairs
        ]


@functools.cache
def _atoms(group: Group) -> _Atoms:
    inv = group.inv
    singles = [x for x in range(1, group.order) if inv[x] == x]
    pairs = [x for x in range(1, group.order) if x < inv[x]]
    bits = tuple(1 << x for x in singles) + tuple((1 << x) | (1 << inv[x]) for x in pairs)
    return _Atoms(bits=bits, involutions=len(singles))


def count_connection_sets(group: Group, size: int) -> int:
    """Number of inverse-closed subsets of ``G*`` with ``size`` elements."""
    atoms = _atoms(group)
    return sum(
        math.comb(atoms.involutions, i) * math.comb(atoms.pairs, j) for i, j in atoms.splits(size)
    )


def _combinations(bits: Sequence[int], k: int) -> tuple[Masks, Masks]:
    """Element masks and incidence keys of every ``k``-subset of ``bits``."""
    width = len(bits)
    masks: list[int] = []
    keys: list[int] = []
    for combo in itertools.combinations(range(width), k):
        mask = key = 0
        for idx in combo:
            mask |= bits[idx]
            key |= 1 << (width - 1 - idx)
        masks.append(mask)
        keys.append(key)
    return np.array(masks, dtype=np.uint64), np.array(keys, dtype=np.uint64)


def _enumerate_masks(group: Group, size: int) -> Masks:
    """All masks of one size in descending incidence order."""
    atoms = _atoms(group)
    m = atoms.involutions
    found: list[Masks] = []
    keys: list[Masks] = []
    for i, j in atoms.splits(size):
        single_masks, single_keys = _combinations(atoms.bits[:m], i)
        pair_masks, pair_keys = _combinations(atoms.bits[m:], j)
        found.append((single_masks[:, None] | pair_masks[None, :]).ravel())
        shifted = single_keys << np.uint64(atoms.pairs)
        keys.append((shifted[:, None] | pair_keys[None, :]).ravel())
    if not found:
        return np.zeros(0, dtype=np.uint64)
    masks, order = np.concatenate(found), np.argsort(np.concatenate(keys))[::-1]
    return masks[order]


def _incidence_keys(group: Group, masks: Masks) -> Masks:
    atoms = _atoms(group)
    width = len(atoms.bits)
    keys = np.zeros(masks.shape, dtype=np.uint64)
    for idx, bits in enumerate(atoms.bits):
        low = np.uint64(bits & -bits)
        keys |= np.where((masks & low) != 0, np.uint64(1 << (width - 1 - idx)), np.uint64(0))
    return keys


def _sort_by_incidence(group: Group, masks: Masks) -> Masks:
    return masks[np.argsort(_incidence_keys(group, masks))[::-1]]


def _sample_masks(group: Group, size: int, count: int, rng: np.random.Generator) -> Masks:
    """Distinct masks drawn uniformly from the sets of one size."""
    atoms = _atoms(group)
    m = atoms.involutions
    splits = atoms.splits(size)
    weights = np.array(
        [math.comb(m, i) * math.comb(atoms.pairs, j) for i, j in splits], dtype=np.float64
    )
    picks = rng.choice(len(splits), size=count, p=weights / weights.sum())
    bits = np.array(atoms.bits, dtype=np.uint64)
    drawn: list[Masks] = []
    for option, (i, j) in enumerate(splits):
        k = int(np.count_nonzero(picks == option))
        if not k:
            continue
        chosen = np.zeros(k, dtype=np.uint64)
        for pool, take in ((bits[:m], i), (bits[m:], j)):
            if take:
                idx = rng.random((k, len(pool))).argsort(axis=1)[:, :take]
                chosen |= np.bitwise_or.reduce(pool[idx], axis=1)
        drawn.append(chosen)
    return np.unique(np.concatenate(drawn)) if drawn else np.zeros(0, dtype=np.uint64)


def _members(mask: Mask) -> tuple[int, ...]:
    return tuple(x for x in range(mask.bit_length()) if mask >> x & 1)


def _generates(group: Group, mask: Mask) -> bool:
    return len(subgroup_generated(group, _members(mask))) == group.order


def enumerate_connection_sets(
    group: Group, size: int, generating_only: bool = False
) -> Iterator[ConnectionSet]:
    """Every inverse-closed subset of ``G*`` of one size.

    Sets come in descending lexicographic order of their incidence vector
    over the atoms (involutions, then inverse pairs).
    """
    if not 0 <= size < max(group.order, 1):
        msg = f"size must lie in 0..{group.order - 1}, got {size}"
        raise ValueError(msg)
    for mask in _enumerate_masks(group, size).tolist():
        if generating_only and not _generates(group, mask):
            continue
        yield ConnectionSet.from_mask(group, mask)


def mode_sizes(group: Group, mode: BIMode) -> tuple[int, ...]:
    """Connection-set sizes a whole-group check of ``mode`` covers."""
    n = group.order
    if mode is BIMode.REDUCED:
        return tuple(range(max(math.ceil(n / 2) - 1, 0), n))
    return tuple(range(n))


# ---------------------------------------------------------------------------
# Invariants of enumerated sets
# ---------------------------------------------------------------------------


@functools.cache
def _left_division(group: Group) -> npt.NDArray[np.intp]:
    """``table[x, y]`` is the index of ``x^-1 y``."""
    mul, inv = group.mul, group.inv
    rows = [[mul[inv[x]][y] for y in range(group.order)] for x in range(group.order)]
    return np.array(rows, dtype=np.intp)


@functools.cache
def _class_masks(group: Group) -> tuple[np.uint64, ...]:
    return tuple(
        np.uint64(sum(1 << x for x in cls)) for cls in conjugacy_classes(group).classes
    )


def _indicator(group: Group, masks: Masks) -> npt.NDArray[np.int64]:
    shifts = np.arange(group.order, dtype=np.uint64)
    return ((masks[:, None] >> shifts[None, :]) & np.uint64(1)).astype(np.int64)


def _walk_signatures(group: Group, masks: Masks) -> list[bytes]:
    """Closed walks at the identity of lengths ``2..|G|`` modulo a prime.

    These determine ``tr(A^t)`` for ``t <= |G|`` and hence the characteristic
    polynomial modulo the prime, so equal graphs get equal signatures.
    """
    n = group.order
    bits = _indicator(group, masks)
    adjacency = bits[:, _left_division(group)]
    walks = bits
    columns = np.zeros((len(masks), max(n - 1, 0)), dtype=np.int64)
    for t in range(n - 1):
        walks = np.matmul(walks[:, None, :], adjacency)[:, 0, :] % WALK_PRIME
        columns[:, t] = walks[:, 0]
    return [row.tobytes() for row in columns]


def _class_profiles(group: Group, masks: Masks) -> list[tuple[int, ...]]:
    counts = np.stack([np.bitwise_count(masks & cm) for cm in _class_masks(group)], axis=1)
    return [tuple(row) for row in counts.astype(np.int64).tolist()]


def _orbit_tables(group: Group, auts: AutomorphismSet) -> npt.NDArray[np.uint64]:
    """Byte lookup tables: ``tables[a, pos, b]`` is the image of byte ``b`` at ``pos``."""
    n = group.order
    nbytes = (n + 7) // 8
    byte_bits = ((np.arange(256)[:, None] >> np.arange(8)[None, :]) & 1).astype(bool)
    tables = np.zeros((len(auts), nbytes, 256), dtype=np.uint64)
    for a, alpha in enumerate(auts):
        images = np.zeros(nbytes * 8, dtype=np.uint64)
        images[:n] = np.array([1 << alpha[x] for x in range(n)], dtype=np.uint64)
        for pos in range(nbytes):
            chunk = images[pos * 8 : (pos + 1) * 8]
            spread = np.where(byte_bits, chunk[None, :], np.uint64(0))
            tables[a, pos] = np.bitwise_or.reduce(spread, axis=1)
    return tables


def _orbit_maxima(masks: Masks, tables: npt.NDArray[np.uint64]) -> Masks:
    best = masks.copy()
    for table in tables:
        image = np.zeros_like(masks)
        for pos in range(table.shape[0]):
            byte = ((masks >> np.uint64(8 * pos)) & np.uint64(0xFF)).astype(np.intp)
            image |= table[pos][byte]
        np.maximum(best, image, out=best)
    return best


def _translations(group: Group) -> tuple[tuple[int, ...], ...]:
    """Left translations ``x -> g x``; automorphisms of every Cayley graph of ``group``."""
    return group.mul[1:]


def _form_of(group: Group, mask: Mask) -> CanonicalForm:
    s = ConnectionSet.from_mask(group, mask)
    return canonical_form(build_cayley(group, s).adjacency, _translations(group))


_WORKER_GROUP: Group | None = None


def _init_worker(group: Group, log_level: str) -> None:
    global _WORKER_GROUP
    configure_worker_logging(log_level)
    _WORKER_GROUP = group
    logger.debug("Worker ready for %s", group.name)


def _worker_form(mask: Mask) -> CanonicalForm:
    assert _WORKER_GROUP is not None
    return _form_of(_WORKER_GROUP, mask)


# ---------------------------------------------------------------------------
# Per-size scans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Candidate:
    index: int
    mask: Mask
    signature: bytes
    profile: MProfile


@dataclass(frozen=True)
class _SizeScan:
    size: int
    total: int
    examined: int
    method: Method
    candidates: tuple[_Candidate, ...]

    @property
    def buckets(self) -> int:
        return len({c.signature for c in self.candidates})


class _Scanner:
    """Enumerates, reduces and evaluates the connection sets of one group."""

    def __init__(
        self,
        group: Group,
        table: CharacterTable,
        config: EngineConfig,
        *,
        cache: CanonicalFormCache | None = None,
        auts: AutomorphismSet | None = None,
        sampling: bool = True,
    ) -> None:
        self.group = group
        self.table = table
        self.config = config
        self.cache = cache if cache is not None else CanonicalFormCache()
        self.sampling = sampling
        self.coverage: dict[int, tuple[int, int]] = {}
        self._auts = auts
        self._orbit_lookup: npt.NDArray[np.uint64] | None = None
        self._profiles: dict[tuple[int, ...], MProfile] = {}
        self._rng = np.random.default_rng(config.seed)
        self._pool: ProcessPoolExecutor | None = None

    def __enter__(self) -> Self:
        return self

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    @property
    def automorphisms(self) -> AutomorphismSet:
        if self._auts is None:
            self._auts = automorphism_group(self.group)
        return self._auts

    def _orbit_reduce(self, masks: Masks) -> Masks:
        if self._orbit_lookup is None:
            self._orbit_lookup = _orbit_tables(self.group, self.automorphisms)
        step = 1 << 15
        reps = [
            _orbit_maxima(masks[lo : lo + step], self._orbit_lookup)
            for lo in range(0, len(masks), step)
        ]
        return np.unique(np.concatenate(reps))

    def profile_of(self, class_profile: tuple[int, ...]) -> MProfile:
        found = self._profiles.get(class_profile)
        if found is None:
            sums = character_sums_from_profile(self.table, class_profile)
            found = _profile_from_sums(self.table, sums, self.config.multiset)
            self._profiles[class_profile] = found
        return found

    def scan(self, size: int, *, generating_only: bool, orbits: bool) -> _SizeScan:
        """Representatives of one size with their signatures and M-profiles.

        Raises:
            BudgetExceeded: If the size is over budget and sampling is off.
        """
        group = self.group
        total = count_connection_sets(group, size)
        if total <= self.config.budget:
            masks, method = _enumerate_masks(group, size), Method.EXHAUSTIVE
        elif self.sampling:
            logger.warning(
                "%s size %d: %d sets exceed the budget of %d; sampling %d",
                group.name,
                size,
                total,
                self.config.budget,
                self.config.samples,
            )
            masks = _sample_masks(group, size, self.config.samples, self._rng)
            method = Method.SAMPLED
        else:
            self.coverage[size] = (0, total)
            msg = (
                f"{group.name} size {size}: {total} sets exceed the budget of {self.config.budget}"
            )
            raise BudgetExceeded(msg, coverage=self.coverage)
        self.coverage[size] = (len(masks), total)

        reps = self._orbit_reduce(masks) if orbits and len(masks) else np.unique(masks)
        reps = _sort_by_incidence(group, reps)
        chosen = [m for m in reps.tolist() if not generating_only or _generates(group, m)]
        candidates = self.evaluate(chosen)
        logger.debug(
            "%s size %d: %d sets, %d representatives, %d evaluated",
            group.name,
            size,
            total,
            len(reps),
            len(candidates),
        )
        return _SizeScan(
            size=size,
            total=total,
            examined=len(masks),
            method=method,
            candidates=tuple(candidates),
        )

    def evaluate(self, masks: list[Mask]) -> list[_Candidate]:
        n = max(self.group.order, 1)
        step = max(1, BATCH_CELLS // (n * n))
        out: list[_Candidate] = []
        for lo in range(0, len(masks), step):
            chunk = np.array(masks[lo : lo + step], dtype=np.uint64)
            signatures = _walk_signatures(self.group, chunk)
            profiles = _class_profiles(self.group, chunk)
            for offset, (mask, sig, prof) in enumerate(
                zip(masks[lo : lo + step], signatures, profiles, strict=True)
            ):
                out.append(_Candidate(lo + offset, mask, sig, self.profile_of(prof)))
        return out

    def forms(self, masks: Sequence[Mask]) -> list[CanonicalForm]:
        group = self.group
        missing = [m for m in dict.fromkeys(masks) if (group, m) not in self.cache]
        if self.config.jobs > 1 and len(missing) > 1:
            if self._pool is None:
                self._pool = ProcessPoolExecutor(
                    max_workers=self.config.jobs,
                    initializer=_init_worker,
                    initargs=(self.group, current_stderr_level()),
                )
            chunk = max(1, len(missing) // (4 * self.config.jobs))
            for mask, form in zip(
                missing, self._pool.map(_worker_form, missing, chunksize=chunk), strict=True
            ):
                self.cache.get_or_compute((group, mask), lambda form=form: form)
        return [
            self.cache.get_or_compute((group, m), lambda m=m: _form_of(group, m)) for m in masks
        ]

    def isomorphism_classes(
        self, candidates: Sequence[_Candidate], *, mixed_profiles: bool
    ) -> list[tuple[CanonicalForm, list[_Candidate]]]:
        """Groups of two or more candidates with equal canonical forms.

        With ``mixed_profiles`` only groups holding different M-profiles are
        resolved and returned.
        """
        buckets: dict[bytes, list[_Candidate]] = {}
        for c in candidates:
            buckets.setdefault(c.signature, []).append(c)

        def wanted(members: Sequence[_Candidate]) -> bool:
            if len(members) < 2:
                return False
            return not mixed_profiles or len({c.profile for c in members}) > 1

        found: list[tuple[CanonicalForm, list[_Candidate]]] = []
        for bucket in buckets.values():
            if not wanted(bucket):
                continue
            by_form: dict[CanonicalForm, list[_Candidate]] = {}
            for c, form in zip(bucket, self.forms([c.mask for c in bucket]), strict=True):
                by_form.setdefault(form, []).append(c)
            found.extend((form, members) for form, members in by_form.items() if wanted(members))
        found.sort(key=lambda item: (item[1][0].index, item[1][1].index))
        return found

    def violation(
        self, a: _Candidate, b: _Candidate, nu: int, form: CanonicalForm
    ) -> BIViolation:
        pos = self.table.degree_set.index(nu)
        return BIViolation(
            s=ConnectionSet.from_mask(self.group, a.mask),
            t=ConnectionSet.from_mask(self.group, b.mask),
            degree=nu,
            m_s=a.profile[pos],
            m_t=b.profile[pos],
            canonical_form=form,
        )

    def violating_pairs(
        self, candidates: Sequence[_Candidate]
    ) -> Iterator[tuple[_Candidate, _Candidate, int, CanonicalForm]]:
        """``(S, T, nu, form)`` for every isomorphic pair differing at degree ``nu``."""
        for form, members in self.isomorphism_classes(candidates, mixed_profiles=True):
            for a, b in itertools.combinations(members, 2):
                for nu, ma, mb in zip(self.table.degree_set, a.profile, b.profile, strict=True):
                    if ma != mb:
                        yield a, b, nu, form

    def first_violation(self, candidates: Sequence[_Candidate]) -> BIViolation | None:
        best: tuple[int, int, BIViolation] | None = None
        for a, b, nu, form in self.violating_pairs(candidates):
            # degrees of one pair arrive in increasing order
            if best is None or (a.index, b.index) < best[:2]:
                best = (a.index, b.index, self.violation(a, b, nu, form))
        return None if best is None else best[2]


def _config(config: EngineConfig | None) -> EngineConfig:
    return config if config is not None else EngineConfig()


# ---------------------------------------------------------------------------
# BI checks
# ---------------------------------------------------------------------------


def _pair_forms(s: ConnectionSet, t: ConnectionSet) -> tuple[CanonicalForm, CanonicalForm]:
    return _form_of(s.group, s.mask), _form_of(t.group, t.mask)


def bi_check_pair(
    table: CharacterTable, s: ConnectionSet, t: ConnectionSet, *, multiset: bool = False
) -> PairReport:
    """Compare the M sets and the graphs of two connection sets."""
    _same_group(s, t)
    form_s, form_t = _pair_forms(s, t)
    ps, pt = m_profile(table, s, multiset=multiset), m_profile(table, t, multiset=multiset)
    degree = next((nu for nu, a, b in zip(table.degree_set, ps, pt, strict=True) if a != b), None)
    return PairReport(
        group=table.group.name,
        s=s,
        t=t,
        isomorphic=form_s == form_t,
        m_s=dict(zip(table.degree_set, ps, strict=True)),
        m_t=dict(zip(table.degree_set, pt, strict=True)),
        degree=degree,
        forms=(form_s, form_t),
    )


def bi_check_size(
    group: Group,
    table: CharacterTable,
    size: int,
    generating_only: bool = True,
    limit: int | None = None,
    *,
    config: EngineConfig | None = None,
    cache: CanonicalFormCache | None = None,
) -> SizeReport:
    """Every isomorphic pair of one size whose M sets differ, per degree.

    With orbit reduction the pairs are listed up to automorphisms of the
    group. ``limit`` caps each degree's list after ordering the pairs by
    enumeration position.
    """
    config = _config(config)
    with _Scanner(group, table, config, cache=cache) as scanner:
        scan = scanner.scan(size, generating_only=generating_only, orbits=config.orbits)
        pairs: dict[int, list[tuple[int, int, BIViolation]]] = {}
        for a, b, nu, form in scanner.violating_pairs(scan.candidates):
            pairs.setdefault(nu, []).append((a.index, b.index, scanner.violation(a, b, nu, form)))
    violations = {
        nu: tuple(v for _, _, v in sorted(found, key=lambda item: item[:2])[:limit])
        for nu, found in sorted(pairs.items())
    }
    return SizeReport(
        size=size,
        candidates=scan.total,
        representatives=len(scan.candidates),
        buckets=scan.buckets,
        violations=violations,
        method=scan.method,
    )


def bi_check_group(
    group: Group,
    table: CharacterTable,
    mode: BIMode = BIMode.REDUCED,
    *,
    config: EngineConfig | None = None,
    cache: CanonicalFormCache | None = None,
    sampling: bool = True,
) -> BIReport:
    """Search the sizes of ``mode`` in increasing order for a BI violation.

    Reduced mode covers generating sets of sizes ``ceil(|G|/2)-1 .. |G|-1``;
    full mode covers every inverse-closed set of every size. The first
    violation in (size, enumeration position) order is returned.

    Raises:
        BudgetExceeded: If a size is over budget and ``sampling`` is off.
    """
    config = _config(config)
    sizes = mode_sizes(group, mode)
    start = time.perf_counter()
    logger.info(
        "BI check of %s (%s mode), sizes %s..%s",
        group.name,
        mode.value,
        sizes[0] if sizes else "-",
        sizes[-1] if sizes else "-",
    )
    candidates = representatives = buckets = 0
    sampled = False
    violation: BIViolation | None = None
    covered: list[int] = []
    with _Scanner(group, table, config, cache=cache, sampling=sampling) as scanner:
        for size in sizes:
            scan = scanner.scan(
                size, generating_only=mode is BIMode.REDUCED, orbits=config.orbits
            )
            covered.append(size)
            candidates += scan.total
            representatives += len(scan.candidates)
            buckets += scan.buckets
            sampled = sampled or scan.method is Method.SAMPLED
            violation = scanner.first_violation(scan.candidates)
            if violation is not None:
                break
        coverage = dict(scanner.coverage)
    if sampled:
        method = Method.SAMPLED
    else:
        method = Method.EXHAUSTIVE_REDUCED if mode is BIMode.REDUCED else Method.EXHAUSTIVE
    report = BIReport(
        group=group.name,
        mode=mode,
        sizes=tuple(covered),
        candidates=candidates,
        representatives=representatives,
        buckets=buckets,
        method=method,
        violation=violation,
        coverage=coverage,
        seconds=time.perf_counter() - start,
    )
    logger.info(
        "BI check of %s: %s (%s, %d sets, %d representatives) in %.2fs",
        group.name,
        "pass" if violation is None else f"violation at degree {violation.degree}",
        method.value,
        candidates,
        representatives,
        report.seconds,
    )
    return report


def is_bi_graph(
    group: Group,
    table: CharacterTable,
    s: ConnectionSet,
    *,
    config: EngineConfig | None = None,
    cache: CanonicalFormCache | None = None,
) -> BIViolation | None:
    """First set whose graph is isomorphic to ``Cay(G, S)`` but whose M sets differ.

    Raises:
        BudgetExceeded: If the sets of size ``|S|`` are over budget.
    """
    config = _config(config)
    if s.group is not group:
        msg = f"connection set belongs to {s.group.name}, not {group.name}"
        raise InvalidConnectionSet(msg)
    with _Scanner(group, table, config, cache=cache, sampling=False) as scanner:
        scan = scanner.scan(len(s), generating_only=False, orbits=config.orbits)
        (target,) = scanner.evaluate([s.mask])
        target_form = scanner.forms([s.mask])[0]
        rivals = [
            c
            for c in scan.candidates
            if c.signature == target.signature and c.profile != target.profile
        ]
        for c, form in zip(rivals, scanner.forms([c.mask for c in rivals]), strict=True):
            if form != target_form:
                continue
            nu = next(
                nu
                for nu, a, b in zip(table.degree_set, target.profile, c.profile, strict=True)
                if a != b
            )
            return scanner.violation(target, c, nu, form)
    return None


# ---------------------------------------------------------------------------
# CI checks
# ---------------------------------------------------------------------------


def ci_check_pair(
    group: Group, auts: AutomorphismSet, s: ConnectionSet, t: ConnectionSet
) -> bool:
    """True if some automorphism maps ``S`` onto ``T``."""
    _same_group(s, t)
    if s.group is not group:
        msg = f"connection sets belong to {s.group.name}, not {group.name}"
        raise InvalidConnectionSet(msg)
    if len(s) != len(t):
        return False
    target = frozenset(t.members)
    return any(AutomorphismSet.apply(alpha, s.members) == target for alpha in auts)


def find_non_ci_witness(
    group: Group,
    table: CharacterTable | None = None,
    *,
    config: EngineConfig | None = None,
    cache: CanonicalFormCache | None = None,
) -> CIWitness | None:
    """Isomorphic Cayley graphs whose connection sets no automorphism relates.

    Sizes are scanned from the smallest. Within a size, distinct orbit
    representatives are never related by an automorphism, so the first two
    representatives sharing a canonical form are a witness. Returns None
    when every size completes without one.

    Raises:
        BudgetExceeded: If a size is over budget; coverage lists the sizes done.
    """
    config = _config(config)
    table = table if table is not None else character_table(group)
    auts = automorphism_group(group)
    with _Scanner(group, table, config, cache=cache, auts=auts, sampling=False) as scanner:
        for size in range(1, max(group.order - 1, 1)):
            scan = scanner.scan(size, generating_only=False, orbits=True)
            classes = scanner.isomorphism_classes(scan.candidates, mixed_profiles=False)
            if not classes:
                continue
            form, members = classes[0]
            s = ConnectionSet.from_mask(group, members[0].mask)
            t = ConnectionSet.from_mask(group, members[1].mask)
            if ci_check_pair(group, auts, s, t):
                msg = f"orbit representatives {s.members} and {t.members} are related"
                raise Inconsistent(msg)
            logger.info("CI witness for %s at size %d", group.name, size)
            return CIWitness(s=s, t=t, checked=len(auts), canonical_form=form)
    logger.info("No CI witness for %s", group.name)
    return None


# ---------------------------------------------------------------------------
# Non-BI witnesses
# ---------------------------------------------------------------------------


def _verified_violation(
    table: CharacterTable, s: ConnectionSet, t: ConnectionSet, multiset: bool
) -> BIViolation | None:
    nu = first_differing_degree(table, s, t, multiset=multiset)
    if nu is None:
        return None
    form_s, form_t = _pair_forms(s, t)
    if form_s != form_t:
        return None
    return BIViolation(
        s=s,
        t=t,
        degree=nu,
        m_s=char_sum_set(table, s, nu, multiset=multiset),
        m_t=char_sum_set(table, t, nu, multiset=multiset),
        canonical_form=form_s,
    )


def _pattern_witness(
    table: CharacterTable, *, real_only: bool, multiset: bool = False
) -> BIViolation | None:
    """``S = {h, h^-1}``, ``T = {k, k^-1}`` with ``h`` outside and ``k`` inside ``G'``."""
    group = table.group
    derived = set(derived_subgroup(group))
    orders = element_orders(group)
    linear = linear_characters(table)
    inside = sorted(derived - {0})
    for h in range(1, group.order):
        if h in derived:
            continue
        if real_only and not all(table.value(i, h).is_real() for i in linear):
            continue
        for k in inside:
            if orders[k] != orders[h]:
                continue
            s = connection_set(group, [h], close_inverse=True)
            t = connection_set(group, [k], close_inverse=True)
            found = _verified_violation(table, s, t, multiset)
            if found is not None:
                return found
    return None


def construct_non_bi_witness(
    group: Group,
    table: CharacterTable,
    *,
    config: EngineConfig | None = None,
    cache: CanonicalFormCache | None = None,
    search: bool = True,
) -> NonBIWitness | None:
    """Build a verified non-BI witness, or None.

    The pattern route pairs ``h`` outside the derived subgroup, with every
    linear character real on it, with ``k`` inside it of the same order.
    The relaxed route drops the reality condition. The search route runs a
    full-mode check from the smallest size.
    """
    config = _config(config)
    for route, real_only in ((WitnessRoute.PATTERN, True), (WitnessRoute.RELAXED_PATTERN, False)):
        found = _pattern_witness(table, real_only=real_only, multiset=config.multiset)
        if found is not None:
            logger.info("Non-BI witness for %s by the %s route", group.name, route.value)
            return NonBIWitness(violation=found, route=route)
    if not search:
        return None
    report = bi_check_group(group, table, BIMode.FULL, config=config, cache=cache)
    if report.violation is None:
        return None
    logger.info("Non-BI witness for %s by search", group.name)
    return NonBIWitness(violation=report.violation, route=WitnessRoute.SEARCH)


# ---------------------------------------------------------------------------
# Order profiles from spectra of the Frobenius groups
# ---------------------------------------------------------------------------

F20_ROWS = ((1, 1, 1), (1, -1, 1), (-1, 0, 1))
_HALF = Rational(1, 2)
F42_ROWS = (
    (1, 1, 1, 1),
    (-1, 1, -1, 1),
    (1, -_HALF, -_HALF, 1),
    (-1, -_HALF, _HALF, 1),
)
F42_SWAPPED_ROWS = (F42_ROWS[0], F42_ROWS[1], F42_ROWS[3], F42_ROWS[2])
F42_CASES = ("i-I", "i-II", "ii", "iii", "iv", "v", "vi")
_F42_SWAPPED_CASES = frozenset({"i-II", "vi"})

type RoleValue = int | Fraction | Cyclotomic


def _rational(value: RoleValue) -> Rational:
    q = value.to_rational() if isinstance(value, Cyclotomic) else Fraction(value)
    if q is None:
        msg = f"eigenvalue {value} is not rational"
        raise Inconsistent(msg)
    return Rational(q.numerator, q.denominator)


def _solve_counts(rows: Sequence[Sequence[object]], values: Sequence[RoleValue]) -> tuple[int, ...]:
    solution = Matrix(rows).LUsolve(Matrix([_rational(v) for v in values]))
    counts = []
    for v in solution:
        if not v.is_integer or v < 0:
            msg = f"values {[str(x) for x in values]} give the non-count solution {list(solution)}"
            raise Inconsistent(msg)
        counts.append(int(v))
    return tuple(counts)


def recover_order_profile_f20(
    mu1: RoleValue, mu2: RoleValue, mu3: RoleValue
) -> tuple[int, int, int]:
    """``(|S_2|, |S_4|, |S_5|)`` from the linear-character eigenvalues of F20.

    Raises:
        Inconsistent: If ``|S|`` is not positive or the solution is not a
            vector of counts.
    """
    if _rational(mu1) <= 0:
        msg = f"|S| = {mu1} is not positive"
        raise Inconsistent(msg)
    s2, s4, s5 = _solve_counts(F20_ROWS, (mu1, mu2, mu3))
    return s2, s4, s5


def recover_order_profile_f42(
    mu1: RoleValue,
    mu2: RoleValue,
    mu3: RoleValue,
    mu5: RoleValue,
    case: str = "i-I",
) -> tuple[int, int, int, int]:
    """``(|S_2|, |S_3|, |S_6|, |S_7|)`` from the linear-character eigenvalues of F42.

    In the cases ``i-II`` and ``vi`` the values of ``mu3`` and ``mu5`` are
    read with their roles exchanged and are solved against the matrix with
    the last two rows swapped.

    Raises:
        Inconsistent: If the solution is not a vector of counts.
    """
    if case not in F42_CASES:
        msg = f"unknown case {case!r}; expected one of {', '.join(F42_CASES)}"
        raise ValueError(msg)
    if case in _F42_SWAPPED_CASES:
        logger.warning("F42 profile recovery in case %s, which is not expected to occur", case)
        rows = F42_SWAPPED_ROWS
    else:
        rows = F42_ROWS
    s2, s3, s6, s7 = _solve_counts(rows, (mu1, mu2, mu3, mu5))
    return s2, s3, s6, s7


def transfer_matrix_f42() -> Matrix:
    """Map from a swapped-case profile to the direct-case profile."""
    return Matrix(F42_ROWS).inv() * Matrix(F42_SWAPPED_ROWS)


def f20_roles_from_spectrum(spectrum: Spectrum, size: int) -> tuple[int, int, int]:
    """``(mu_1, mu_2, mu_3)`` of an F20 graph read off its spectrum alone.

    ``mu_2`` has multiplicity 1 mod 4 and ``mu_3`` has 2 mod 4; a single
    eigenvalue with multiplicity 3 mod 4 plays both roles.

    Raises:
        StructureViolation: If the residues do not single out the roles.
    """
    by_residue: dict[int, list[float]] = {}
    for value, mult in spectrum:
        if abs(value - size) <= MATCH_TOLERANCE:
            continue
        by_residue.setdefault(mult % 4, []).append(value)
    ones, twos, threes = (by_residue.get(r, []) for r in (1, 2, 3))
    picked: list[float] = []
    if len(threes) == 1 and not ones and not twos:
        picked = threes * 2
    elif len(ones) == 1 and len(twos) == 1 and not threes:
        picked = [ones[0], twos[0]]
    if not picked:
        msg = f"spectrum residues {by_residue} do not identify the F20 roles"
        raise StructureViolation(msg)
    roles = [round(v) for v in picked]
    if any(abs(v - r) > MATCH_TOLERANCE for v, r in zip(picked, roles, strict=True)):
        msg = f"F20 linear eigenvalues {picked} are not integers"
        raise StructureViolation(msg)
    return size, roles[0], roles[1]


# ---------------------------------------------------------------------------
# Orchestrator
# ---------------------------------------------------------------------------


class BIEngine:
    """BI and CI checks of one group.

    The character table, the automorphism group and the canonical forms of
    Cayley graphs are computed on first use and shared by all checks.
    """

    def __init__(
        self,
        group: Group,
        config: EngineConfig | None = None,
        table: CharacterTable | None = None,
    ) -> None:
        self.group = group
        self.config = _config(config)
        self._table = table
        self.cache = CanonicalFormCache()

    @property
    def table(self) -> CharacterTable:
        if self._table is None:
            self._table = character_table(self.group)
        return self._table

    @property
    def automorphisms(self) -> AutomorphismSet:
        return automorphism_group(self.group)

    def with_config(self, **changes: object) -> BIEngine:
        """A copy with some configuration fields replaced, sharing the caches."""
        engine = BIEngine(self.group, replace(self.config, **changes), self._table)
        engine.cache = self.cache
        return engine

    def char_sum_set(self, s: ConnectionSet, nu: int) -> CharSumSet:
        return char_sum_set(self.table, s, nu, multiset=self.config.multiset)

    def m_profiles_equal(self, s: ConnectionSet, t: ConnectionSet) -> bool:
        return m_profiles_equal(self.table, s, t, multiset=self.config.multiset)

    def compare_pair(self, s: ConnectionSet, t: ConnectionSet) -> PairReport:
        return bi_check_pair(self.table, s, t, multiset=self.config.multiset)

    def check_size(
        self, size: int, *, generating_only: bool = True, limit: int | None = None
    ) -> SizeReport:
        return bi_check_size(
            self.group,
            self.table,
            size,
            generating_only,
            limit,
            config=self.config,
            cache=self.cache,
        )

    def check_group(self, mode: BIMode = BIMode.REDUCED, *, sampling: bool = True) -> BIReport:
        return bi_check_group(
            self.group, self.table, mode, config=self.config, cache=self.cache, sampling=sampling
        )

    def is_bi_graph(self, s: ConnectionSet) -> BIViolation | None:
        return is_bi_graph(self.group, self.table, s, config=self.config, cache=self.cache)

    def ci_related(self, s: ConnectionSet, t: ConnectionSet) -> bool:
        return ci_check_pair(self.group, self.automorphisms, s, t)

    def ci_witness(self) -> CIWitness | None:
        return find_non_ci_witness(self.group, self.table, config=self.config, cache=self.cache)

    def non_bi_witness(self, *, search: bool = True) -> NonBIWitness | None:
        return construct_non_bi_witness(
            self.group, self.table, config=self.config, cache=self.cache, search=search
        )

    def spectrum(self, s: ConnectionSet, *, babai: bool = True) -> SpectrumReport:
        return spectrum_report(self.table, s, babai=babai)

    def classify(
        self, label: str, bi_expected: str, bi_reproduced: str | None = None
    ) -> ClassifyRow:
        """Decide BI for the group, by witness construction or exhaustive check.

        Groups up to order ``FULL_MODE_LIMIT`` are checked in full mode,
        larger ones in reduced mode. ``bi_reproduced``, the catalog's
        erratum if any, is copied into the row.
        """
        start = time.perf_counter()
        witness = self.non_bi_witness(search=False)
        if witness is not None:
            row = ClassifyRow(
                label=label,
                name=self.group.name,
                order=self.group.order,
                bi_expected=bi_expected,
                bi_computed="N",
                method=Method.WITNESS,
                seconds=time.perf_counter() - start,
                witness=witness.to_dict(),
                bi_reproduced=bi_reproduced,
            )
        else:
            mode = BIMode.FULL if self.group.order <= FULL_MODE_LIMIT else BIMode.REDUCED
            report = self.check_group(mode)
            violation = report.violation
            row = ClassifyRow(
                label=label,
                name=self.group.name,
                order=self.group.order,
                bi_expected=bi_expected,
                bi_computed="Y" if violation is None else "N",
                method=report.method if violation is None else Method.WITNESS,
                seconds=time.perf_counter() - start,
                complete=report.complete,
                witness=None
                if violation is None
                else NonBIWitness(violation, WitnessRoute.SEARCH).to_dict(),
                bi_reproduced=bi_reproduced,
            )
        logger.info(
            "%s %s: BI %s (expected %s) by %s in %.2fs",
            label,
            self.group.name,
            row.bi_computed,
            bi_expected,
            row.method.value,
            row.seconds,
        )
        return row
