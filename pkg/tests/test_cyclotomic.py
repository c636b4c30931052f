"""Tests for cayley_bi.cyclotomic."""

from __future__ import annotations

import warnings
from fractions import Fraction

import pytest
from sympy.utilities.exceptions import SymPyDeprecationWarning

from cayley_bi.cyclotomic import (
    Cyclotomic,
    cyc_add,
    cyc_from_rational,
    cyc_root,
    cyc_sum,
    parse_cyclotomic,
)
from cayley_bi.types import ConductorMismatch, FormatError


class TestArithmetic:
    def test_i_squared(self) -> None:
        i = cyc_root(4, 1)
        assert i * i == -1
        assert i * i == cyc_from_rational(-1)

    def test_cube_roots_sum(self) -> None:
        assert cyc_root(3, 1) + cyc_root(3, 2) == -1
        assert cyc_sum(cyc_root(5, k) for k in range(5)) == 0

    def test_mixed_conductors_embed(self) -> None:
        assert cyc_root(6, 2) == cyc_root(3, 1)
        assert cyc_root(6, 1) * cyc_root(6, 1) == cyc_root(3, 1)
        assert cyc_root(4, 1) + cyc_root(3, 1) == cyc_root(3, 1) + cyc_root(4, 1)

    def test_strict_add_refuses_mixed_conductors(self) -> None:
        with pytest.raises(ConductorMismatch):
            cyc_add(cyc_root(3, 1), cyc_root(4, 1))

    def test_subtraction_with_rationals(self) -> None:
        z = cyc_root(5, 1)
        assert (z - 1) + 1 == z
        assert 1 - z == -(z - 1)

    def test_equal_values_hash_equal(self) -> None:
        assert hash(cyc_root(3, 1)) == hash(cyc_root(6, 2))
        assert hash(cyc_from_rational(2)) == hash(cyc_from_rational(2, 12))

    def test_fractional_coefficients(self) -> None:
        half = cyc_from_rational(Fraction(1, 2), 3)
        assert half + half == 1
        assert half.to_rational() == Fraction(1, 2)


class TestConjugation:
    def test_conj_of_i(self) -> None:
        assert cyc_root(4, 1).conj() == -cyc_root(4, 1)

    def test_real_parts(self) -> None:
        assert (cyc_root(5, 1) + cyc_root(5, 4)).is_real()
        assert not cyc_root(3, 1).is_real()

    def test_galois(self) -> None:
        assert cyc_root(7, 1).galois(3) == cyc_root(7, 3)
        with pytest.raises(ValueError, match="not a unit"):
            cyc_root(6, 1).galois(2)

    def test_to_complex(self) -> None:
        assert cyc_root(4, 1).to_complex() == pytest.approx(1j)
        assert cyc_root(3, 1).to_complex() == pytest.approx(complex(-0.5, 3**0.5 / 2))


class TestRendering:
    def test_roots_by_name(self) -> None:
        assert str(cyc_root(4, 1)) == "z4"
        assert str(-cyc_root(4, 1)) == "-z4"
        assert str(cyc_root(6, 2)) == "z3"
        assert str(cyc_from_rational(-3)) == "-3"

    def test_render_round_trip(self) -> None:
        value = cyc_root(12, 5) + cyc_from_rational(Fraction(2, 3))
        assert parse_cyclotomic(value.render()) == value

    def test_parse_plain_rational(self) -> None:
        assert parse_cyclotomic("-7/2") == Fraction(-7, 2)

    def test_parse_rejects_text(self) -> None:
        with pytest.raises(FormatError):
            parse_cyclotomic("zeta")

    def test_coeffs_length_is_phi(self) -> None:
        assert len(cyc_root(12, 1).coeffs) == 4
        assert Cyclotomic.from_coeffs(5, [0, 0, 0, 0, 1]).coeffs == (-1, -1, -1, -1)


class TestTrace:
    def test_primitive_root_of_unity(self) -> None:
        with warnings.catch_warnings():
            warnings.simplefilter("error", SymPyDeprecationWarning)
            assert cyc_root(91, 3).trace_normalized() == Fraction(1, 72)

    def test_rational(self) -> None:
        assert cyc_from_rational(Fraction(3, 2)).trace_normalized() == Fraction(3, 2)
