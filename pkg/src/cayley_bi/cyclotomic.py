"""Exact arithmetic in cyclotomic fields.

A :class:`Cyclotomic` is an element of ``Q(zeta_e)`` stored in the power basis
``1, zeta_e, ..., zeta_e^(phi(e)-1)`` after reduction modulo the cyclotomic
polynomial ``Phi_e``. The reduction is delegated to sympy's algebraic number
type ``ANP`` over ``QQ``, so two values of the same conductor are equal
exactly when their coefficient vectors are.

Binary operators embed both operands into the lcm of their conductors. The
``cyc_*`` functions are strict and refuse mixed conductors.
"""

from __future__ import annotations

import functools
import math
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np
from sympy import cyclotomic_poly
from sympy.functions.combinatorial.numbers import mobius, totient
from sympy.polys.domains import QQ
from sympy.polys.polyclasses import ANP

from cayley_bi.types import ConductorMismatch, FormatError

__all__ = [
    "Cyclotomic",
    "align",
    "cyc_add",
    "cyc_conj",
    "cyc_from_rational",
    "cyc_is_real",
    "cyc_mul",
    "cyc_neg",
    "cyc_root",
    "cyc_sum",
    "cyc_to_float",
    "cyc_zero",
    "parse_cyclotomic",
]

type Rational = int | Fraction


@functools.cache
def _modulus(e: int) -> tuple[Any, ...]:
    """Coefficients of ``Phi_e`` over ``QQ``, highest degree first."""
    poly = cyclotomic_poly(e, polys=True)
    return tuple(QQ.convert(int(c)) for c in poly.all_coeffs())


@functools.cache
def _phi(e: int) -> int:
    return int(totient(e))


@functools.cache
def _ramanujan(e: int, k: int) -> int:
    """Trace of ``zeta_e^k`` over ``Q``."""
    g = math.gcd(e, k)
    return int(mobius(e // g)) * _phi(e) // _phi(e // g)


def _to_fraction(c: Any) -> Fraction:
    return Fraction(int(QQ.numer(c)), int(QQ.denom(c)))


def _reduce(e: int, low_to_high: Sequence[Rational]) -> ANP:
    mod = list(_modulus(e))
    fractions = (Fraction(c) for c in reversed(low_to_high))
    rep = [QQ(f.numerator, f.denominator) for f in fractions]
    return ANP(rep, mod, QQ) * ANP.one(mod, QQ)


@dataclass(frozen=True, eq=False)
class Cyclotomic:
    """An exact element of the cyclotomic field of conductor ``e``."""

    conductor: int
    value: ANP

    @classmethod
    def from_coeffs(cls, e: int, coeffs: Sequence[Rational]) -> Cyclotomic:
        """Build ``sum coeffs[k] * zeta_e^k`` for any coefficient length."""
        if e < 1:
            msg = f"conductor must be positive, got {e}"
            raise ValueError(msg)
        return cls(e, _reduce(e, list(coeffs) or [0]))

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        """Power-basis coordinates, lowest degree first, length ``phi(e)``."""
        high = [_to_fraction(c) for c in self.value.to_list()]
        low = list(reversed(high))
        low += [Fraction(0)] * (_phi(self.conductor) - len(low))
        return tuple(low)

    # -- field operations --------------------------------------------------

    def embed(self, e: int) -> Cyclotomic:
        """The same value in conductor ``e`` (a multiple of the current one)."""
        if e == self.conductor:
            return self
        if e % self.conductor:
            msg = f"cannot embed conductor {self.conductor} into {e}"
            raise ConductorMismatch(msg)
        step = e // self.conductor
        spread: list[Rational] = [0] * ((len(self.coeffs) - 1) * step + 1)
        for k, c in enumerate(self.coeffs):
            spread[k * step] = c
        return Cyclotomic.from_coeffs(e, spread)

    def conj(self) -> Cyclotomic:
        """Complex conjugate, the ring map ``zeta_e -> zeta_e^(e-1)``."""
        e = self.conductor
        out: list[Rational] = [0] * e
        for k, c in enumerate(self.coeffs):
            out[(e - k) % e] += c
        return Cyclotomic.from_coeffs(e, out)

    def galois(self, j: int) -> Cyclotomic:
        """Image under the field automorphism ``zeta_e -> zeta_e^j``."""
        e = self.conductor
        if math.gcd(j, e) != 1:
            msg = f"{j} is not a unit modulo {e}"
            raise ValueError(msg)
        out: list[Rational] = [0] * e
        for k, c in enumerate(self.coeffs):
            out[(j * k) % e] += c
        return Cyclotomic.from_coeffs(e, out)

    def is_real(self) -> bool:
        return self.conj() == self

    def is_zero(self) -> bool:
        return bool(self.value.is_zero)

    def to_rational(self) -> Fraction | None:
        """The value as a rational number, or None if it is irrational."""
        c = self.coeffs
        if any(c[1:]):
            return None
        return c[0]

    def to_complex(self) -> complex:
        """Evaluate at ``zeta_e = exp(2*pi*i/e)`` in double precision."""
        z = np.exp(2j * np.pi / self.conductor)
        high = [float(c) for c in reversed(self.coeffs)]
        return complex(np.polyval(high, z))

    def trace_normalized(self) -> Fraction:
        """Field trace divided by ``phi(e)``; independent of the conductor."""
        e = self.conductor
        total = sum(
            (c * _ramanujan(e, k) for k, c in enumerate(self.coeffs) if c),
            Fraction(0),
        )
        return total / _phi(e)

    def sort_key(self) -> tuple[float, float]:
        z = self.to_complex()
        return (round(z.real, 9), round(z.imag, 9))

    # -- rendering -----------------------------------------------------------

    def render(self) -> str:
        """Exact textual form ``(a0/b0, a1/b1, ...)@e``."""
        body = ", ".join(f"{c.numerator}/{c.denominator}" for c in self.coeffs)
        return f"({body})@{self.conductor}"

    def __str__(self) -> str:
        q = self.to_rational()
        if q is not None:
            return str(q)
        e = self.conductor
        for k in range(1, e):
            root = cyc_root(e, k)
            g = math.gcd(k, e)
            label = f"z{e // g}" + (f"^{k // g}" if k // g != 1 else "")
            if self == root:
                return label
            if self == -root:
                return f"-{label}"
        terms = [
            f"{c}" if k == 0 else f"{c}*z{e}" + (f"^{k}" if k > 1 else "")
            for k, c in enumerate(self.coeffs)
            if c
        ]
        return " + ".join(terms).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Cyclotomic({self.render()})"

    # -- operators -----------------------------------------------------------

    def _coerce(self, other: object) -> Cyclotomic | None:
        if isinstance(other, Cyclotomic):
            return other
        if isinstance(other, (int, Fraction)):
            return cyc_from_rational(other)
        return None

    def __eq__(self, other: object) -> bool:
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        a, b = align(self, y)
        return bool(a.value == b.value)

    def __hash__(self) -> int:
        return hash(self.trace_normalized())

    def __add__(self, other: object) -> Cyclotomic:
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return cyc_add(*align(self, y))

    __radd__ = __add__

    def __mul__(self, other: object) -> Cyclotomic:
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return cyc_mul(*align(self, y))

    __rmul__ = __mul__

    def __neg__(self) -> Cyclotomic:
        return cyc_neg(self)

    def __sub__(self, other: object) -> Cyclotomic:
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return self + (-y)

    def __rsub__(self, other: object) -> Cyclotomic:
        y = self._coerce(other)
        if y is None:
            return NotImplemented
        return y + (-self)

    def __pow__(self, k: int) -> Cyclotomic:
        if k < 0:
            msg = f"negative exponent {k} is not supported"
            raise ValueError(msg)
        return Cyclotomic(self.conductor, self.value.pow(k))


# ---------------------------------------------------------------------------
# Functional API
# ---------------------------------------------------------------------------


def cyc_root(e: int, k: int) -> Cyclotomic:
    """The exact value ``zeta_e^k``."""
    if e < 1:
        msg = f"conductor must be positive, got {e}"
        raise ValueError(msg)
    k %= e
    coeffs: list[Rational] = [0] * (k + 1)
    coeffs[k] = 1
    return Cyclotomic.from_coeffs(e, coeffs)


def cyc_from_rational(q: Rational, e: int = 1) -> Cyclotomic:
    return Cyclotomic.from_coeffs(e, [q])


def cyc_zero(e: int = 1) -> Cyclotomic:
    return Cyclotomic.from_coeffs(e, [0])


def _same_conductor(x: Cyclotomic, y: Cyclotomic) -> None:
    if x.conductor != y.conductor:
        msg = f"conductors differ: {x.conductor} and {y.conductor}"
        raise ConductorMismatch(msg)


def cyc_add(x: Cyclotomic, y: Cyclotomic) -> Cyclotomic:
    _same_conductor(x, y)
    return Cyclotomic(x.conductor, x.value + y.value)


def cyc_mul(x: Cyclotomic, y: Cyclotomic) -> Cyclotomic:
    _same_conductor(x, y)
    return Cyclotomic(x.conductor, x.value * y.value)


def cyc_neg(x: Cyclotomic) -> Cyclotomic:
    return Cyclotomic(x.conductor, -x.value)


def cyc_conj(x: Cyclotomic) -> Cyclotomic:
    return x.conj()


def cyc_is_real(x: Cyclotomic) -> bool:
    return x.is_real()


def cyc_to_float(x: Cyclotomic) -> complex:
    return x.to_complex()


def align(x: Cyclotomic, y: Cyclotomic) -> tuple[Cyclotomic, Cyclotomic]:
    """Embed both operands into the lcm of their conductors."""
    if x.conductor == y.conductor:
        return x, y
    e = math.lcm(x.conductor, y.conductor)
    return x.embed(e), y.embed(e)


def cyc_sum(values: Iterable[Cyclotomic], e: int = 1) -> Cyclotomic:
    total = cyc_zero(e)
    for v in values:
        total = total + v
    return total


_RENDERED = re.compile(r"^\s*\((?P<body>[^)]*)\)\s*@\s*(?P<e>\d+)\s*$")


def parse_cyclotomic(text: str) -> Cyclotomic:
    """Inverse of :meth:`Cyclotomic.render`. Plain rationals are accepted too.

    Raises:
        FormatError: If the text is neither form.
    """
    m = _RENDERED.match(text)
    try:
        if m is None:
            return cyc_from_rational(Fraction(text.strip()))
        e = int(m.group("e"))
        parts = [p for p in m.group("body").split(",") if p.strip()]
        return Cyclotomic.from_coeffs(e, [Fraction(p.strip()) for p in parts])
    except (ValueError, ZeroDivisionError) as exc:
        msg = f"not a cyclotomic value: {text!r}"
        raise FormatError(msg) from exc
