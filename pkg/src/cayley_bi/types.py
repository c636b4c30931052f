"""Domain types for cayley-bi: exceptions, enums and report records."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from cayley_bi.cyclotomic import Cyclotomic
    from cayley_bi.iso import CanonicalForm
    from cayley_bi.spectra import ConnectionSet

__all__ = [
    "BIMode",
    "BIReport",
    "BIViolation",
    "BabaiCheck",
    "BadTwist",
    "BudgetExceeded",
    "CIWitness",
    "CayleyBIError",
    "CharSumSet",
    "ClassifyRow",
    "ClosureTooLarge",
    "ClusterAmbiguity",
    "ConductorMismatch",
    "FormatError",
    "HealthCheck",
    "Inconsistent",
    "InvalidConnectionSet",
    "InvalidGroup",
    "InvalidPermutation",
    "Method",
    "NoSuchDegree",
    "NoSuitablePrime",
    "NonBIWitness",
    "PairReport",
    "SizeReport",
    "SpectrumReport",
    "StructureTag",
    "StructureViolation",
    "TooLarge",
    "UnknownLabel",
    "WitnessRoute",
]


# ---------------------------------------------------------------------------
# Exceptions
# ---------------------------------------------------------------------------


class CayleyBIError(Exception):
    """Base class for every failure raised by cayley-bi."""


class ClosureTooLarge(CayleyBIError):
    """A group construction exceeded the supported order."""


class InvalidPermutation(CayleyBIError):
    """A generator is not a permutation of 0..degree-1."""


class InvalidGroup(CayleyBIError):
    """A multiplication table violates a group axiom."""


class BadTwist(CayleyBIError):
    """The twist r of a cyclic semidirect product is not admissible."""


class ConductorMismatch(CayleyBIError):
    """Cyclotomic operands live in fields of different conductor."""


class NoSuitablePrime(CayleyBIError):
    """No prime usable for the modular character table computation."""


class ClusterAmbiguity(CayleyBIError):
    """Float eigenvalue clusters are too close to separate reliably."""


class StructureViolation(CayleyBIError):
    """A spectrum contradicts the structure predicted for its group."""


class TooLarge(CayleyBIError):
    """An input exceeds the size an exhaustive routine accepts."""


class NoSuchDegree(CayleyBIError):
    """The requested character degree does not occur in the table."""


class Inconsistent(CayleyBIError):
    """A linear system produced a non-integral or negative solution."""


class InvalidConnectionSet(CayleyBIError):
    """A connection set contains the identity or is not inverse-closed."""


class UnknownLabel(CayleyBIError):
    """A catalog label or group reference could not be resolved."""


class FormatError(CayleyBIError):
    """A group spec, connection-set or report file is malformed."""


class BudgetExceeded(CayleyBIError):
    """An enumeration ran out of budget before reaching a verdict.

    Attributes:
        coverage: Map of connection-set size to ``(examined, total)``.
        partial: Optional partial report assembled before the budget ran out.
    """

    def __init__(
        self,
        message: str,
        coverage: dict[int, tuple[int, int]] | None = None,
        partial: dict[str, Any] | None = None,
    ) -> None:
        super().__init__(message)
        self.coverage: dict[int, tuple[int, int]] = dict(coverage or {})
        self.partial = partial


# ---------------------------------------------------------------------------
# Enums
# ---------------------------------------------------------------------------


class BIMode(Enum):
    """Which connection sets a whole-group BI check enumerates."""

    REDUCED = "reduced"
    """Generating sets of size ceil(|G|/2)-1 .. |G|-1 only."""
    FULL = "full"
    """Every inverse-closed subset of every size."""


class Method(Enum):
    """How a verdict was reached."""

    EXHAUSTIVE = "exhaustive"
    EXHAUSTIVE_REDUCED = "exhaustive-reduced"
    WITNESS = "witness"
    SAMPLED = "sampled"


class WitnessRoute(Enum):
    """Which construction produced a non-BI witness."""

    PATTERN = "pattern"
    RELAXED_PATTERN = "relaxed-pattern"
    SEARCH = "search"


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HealthCheck:
    """Result of a single health check."""

    passed: bool
    message: str
    required: bool = field(default=True)


def _render_values(values: tuple[Cyclotomic, ...]) -> list[str]:
    return [v.render() for v in values]


@dataclass(frozen=True)
class CharSumSet:
    """The set M_nu^S of character sums over S for characters of degree nu.

    Values are deduplicated and sorted by their complex float value so that
    equal sets compare equal as tuples. With ``multiset`` the duplicates are
    kept.
    """

    degree: int
    values: tuple[Cyclotomic, ...]
    multiset: bool = False

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-friendly dict."""
        return {
            "degree": self.degree,
            "values": _render_values(self.values),
            "display": [str(v) for v in self.values],
            "multiset": self.multiset,
        }


@dataclass(frozen=True)
class StructureTag:
    """Spectrum classification for the order-20 and order-42 Frobenius groups."""

    family: str
    """``"F20"`` or ``"F42"``."""
    kind: str
    """Type label, e.g. ``"type1"``."""
    mu: dict[str, str]
    """Predicted linear-character eigenvalues by role (``"mu2"``, ...)."""
    multiplicities: dict[str, int]
    """Observed multiplicity of each role's eigenvalue."""
    residues: dict[str, int]
    """Multiplicity residue modulo the nonlinear degree."""

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-friendly dict."""
        return {
            "family": self.family,
            "type": self.kind,
            "mu": dict(self.mu),
            "multiplicities": dict(self.multiplicities),
            "residues": dict(self.residues),
        }


def _set_dict(s: ConnectionSet) -> dict[str, Any]:
    return {"members": list(s.members), "words": list(s.words())}


@dataclass(frozen=True)
class BIViolation:
    """Two connection sets with isomorphic graphs but different M_nu sets."""

    s: ConnectionSet
    t: ConnectionSet
    degree: int
    m_s: CharSumSet
    m_t: CharSumSet
    canonical_form: CanonicalForm

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-friendly dict."""
        return {
            "S": _set_dict(self.s),
            "T": _set_dict(self.t),
            "degree": self.degree,
            "M_S": self.m_s.to_dict(),
            "M_T": self.m_t.to_dict(),
            "canonical_form": self.canonical_form.hex,
        }


@dataclass(frozen=True)
class NonBIWitness:
    """A verified non-BI witness together with the route that produced it."""

    violation: BIViolation
    route: WitnessRoute

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-friendly dict."""
        d = self.violation.to_dict()
        d["route"] = self.route.value
        return d


@dataclass(frozen=True)
class CIWitness:
    """Isomorphic Cayley graphs whose connection sets no automorphism relates."""

    s: ConnectionSet
    t: ConnectionSet
    checked: int
    """Number of automorphisms scanned (all of Aut(G))."""
    canonical_form: CanonicalForm

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-friendly dict."""
        return {
            "S": _set_dict(self.s),
            "T": _set_dict(self.t),
            "automorphisms_checked": self.checked,
            "canonical_form": self.canonical_form.hex,
        }


@dataclass(frozen=True)
class SizeReport:
    """All violating pairs of one connection-set size, grouped by degree."""

    size: int
    candidates: int
    representatives: int
    buckets: int
    violations: dict[int, tuple[BIViolation, ...]]
    method: Method

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-friendly dict."""
        return {
            "size": self.size,
            "candidates": self.candidates,
            "representatives": self.representatives,
            "buckets": self.buckets,
            "method": self.method.value,
            "violations": {
                str(nu): [v.to_dict() for v in pairs]
                for nu, pairs in sorted(self.violations.items())
            },
        }


@dataclass(frozen=True)
class BIReport:
    """Outcome of a whole-group BI check."""

    group: str
    mode: BIMode
    sizes: tuple[int, ...]
    candidates: int
    representatives: int
    buckets: int
    method: Method
    violation: BIViolation | None = None
    coverage: dict[int, tuple[int, int]] = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        """True when no violation was found."""
        return self.violation is None

    @property
    def complete(self) -> bool:
        """True when the verdict rests on exhaustive enumeration."""
        return self.violation is not None or self.method is not Method.SAMPLED

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-friendly dict."""
        d: dict[str, Any] = {
            "group": self.group,
            "mode": self.mode.value,
            "sizes": list(self.sizes),
            "candidates": self.candidates,
            "representatives": self.representatives,
            "buckets": self.buckets,
            "method": self.method.value,
            "verdict": "pass" if self.passed else "violation",
            "coverage": {
                str(k): {"examined": v[0], "total": v[1]}
                for k, v in sorted(self.coverage.items())
            },
            "seconds": round(self.seconds, 3),
        }
        if self.violation is not None:
            d["witness"] = self.violation.to_dict()
        return d


@dataclass(frozen=True)
class BabaiCheck:
    """One power-sum identity between the spectrum and a character.

    ``left`` is read off the spectrum and ``right`` is the exact sum of
    ``chi(s_1 ... s_t)`` over all ``t``-tuples of the connection set.
    ``exact`` marks a linear character compared in rational arithmetic.
    """

    character: int
    degree: int
    t: int
    left: float
    right: Cyclotomic
    ok: bool
    exact: bool = False

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-friendly dict."""
        return {
            "character": self.character,
            "degree": self.degree,
            "t": self.t,
            "left": self.left,
            "right": self.right.render(),
            "ok": self.ok,
            "exact": self.exact,
        }


@dataclass(frozen=True)
class SpectrumReport:
    """Exact and float spectral data of one Cayley graph."""

    group: str
    members: tuple[int, ...]
    char_poly: tuple[int, ...]
    """Coefficients of ``det(xI - A)``, highest degree first."""
    eigs: tuple[tuple[float, int], ...]
    babai_m1: tuple[Cyclotomic, ...]
    """Exact ``sum chi(s)`` for each linear character, in table order."""
    m_sets: dict[int, CharSumSet]
    order_profile: dict[int, int]
    class_profile: tuple[int, ...]
    connected: bool
    structure_tag: StructureTag | None = None
    babai: tuple[BabaiCheck, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-friendly dict."""
        return {
            "group": self.group,
            "members": list(self.members),
            "char_poly": [str(c) for c in self.char_poly],
            "eigenvalues": [
                {"value": round(v, 10), "multiplicity": m} for v, m in self.eigs
            ],
            "babai_m1": [v.render() for v in self.babai_m1],
            "m_sets": {str(nu): m.to_dict() for nu, m in sorted(self.m_sets.items())},
            "order_profile": {str(k): v for k, v in sorted(self.order_profile.items())},
            "class_profile": list(self.class_profile),
            "connected": self.connected,
            "structure_tag": None
            if self.structure_tag is None
            else self.structure_tag.to_dict(),
            "babai": [b.to_dict() for b in self.babai],
        }


@dataclass(frozen=True)
class PairReport:
    """Side-by-side comparison of two connection sets of one group."""

    group: str
    s: ConnectionSet
    t: ConnectionSet
    isomorphic: bool
    m_s: dict[int, CharSumSet]
    m_t: dict[int, CharSumSet]
    degree: int | None
    """Smallest degree whose M sets differ, or None when all agree."""
    forms: tuple[CanonicalForm, CanonicalForm]

    @property
    def equal(self) -> bool:
        return self.degree is None

    @property
    def violation(self) -> bool:
        """True when the graphs are isomorphic but the M sets differ."""
        return self.isomorphic and not self.equal

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-friendly dict."""
        return {
            "group": self.group,
            "S": _set_dict(self.s),
            "T": _set_dict(self.t),
            "isomorphic": self.isomorphic,
            "equal": self.equal,
            "degree": self.degree,
            "M_S": {str(nu): m.to_dict() for nu, m in sorted(self.m_s.items())},
            "M_T": {str(nu): m.to_dict() for nu, m in sorted(self.m_t.items())},
            "canonical_forms": [f.hex for f in self.forms],
        }


@dataclass(frozen=True)
class ClassifyRow:
    """One catalog row of a classification run."""

    label: str
    name: str
    order: int
    bi_expected: str
    bi_computed: str
    method: Method
    seconds: float
    complete: bool = True
    witness: dict[str, Any] | None = None
    bi_reproduced: str | None = None

    @property
    def agrees(self) -> bool:
        return self.bi_expected == self.bi_computed

    @property
    def known_deviation(self) -> bool:
        """Differs from the published column exactly as the catalog records."""
        return not self.agrees and self.bi_computed == self.bi_reproduced

    def to_dict(self) -> dict[str, Any]:
        """Serialize to a JSON-friendly dict."""
        d: dict[str, Any] = {
            "label": self.label,
            "name": self.name,
            "order": self.order,
            "bi_expected": self.bi_expected,
            "bi_computed": self.bi_computed,
            "known_deviation": self.known_deviation,
            "method": self.method.value,
            "complete": self.complete,
            "seconds": round(self.seconds, 3),
        }
        if self.witness is not None:
            d["witness"] = self.witness
        return d
