"""Tests for cayley_bi.characters."""

from __future__ import annotations

import pytest

from cayley_bi.catalog.golden import F20_TABLE, F42_TABLE
from cayley_bi.characters import (
    character_table,
    column_sum,
    dixon_prime,
    linear_characters,
    table_from_dict,
    table_to_dict,
    tables_match,
)
from cayley_bi.groups import Group, group_cyclic
from cayley_bi.types import FormatError, NoSuchDegree


class TestDixonPrime:
    def test_congruent_and_large_enough(self) -> None:
        assert dixon_prime(20, 20) == 41
        assert dixon_prime(42, 42) == 43

    def test_trivial_exponent(self) -> None:
        p = dixon_prime(1, 1)
        assert p * p > 4


class TestCharacterTable:
    def test_s3(self, s3: Group) -> None:
        table = character_table(s3)
        assert table.degrees == (1, 1, 2)
        assert table.rows[0] == (1, 1, 1)
        assert table.rows[2] == (2, -1, 0)

    def test_cyclic_is_all_linear(self) -> None:
        table = character_table(group_cyclic(5))
        assert table.degrees == (1,) * 5
        assert len(linear_characters(table)) == 5

    def test_degree_set(self, f20: Group) -> None:
        table = character_table(f20)
        assert table.degree_set == (1, 4)
        assert table.rows_of_degree(4) == (4,)
        assert len(linear_characters(table)) == 4

    def test_missing_degree(self, s3: Group) -> None:
        with pytest.raises(NoSuchDegree):
            character_table(s3).rows_of_degree(3)

    @pytest.mark.parametrize("fixture", ["s3", "d8", "q8", "f20", "f42"])
    def test_orthogonality(self, fixture: str, request: pytest.FixtureRequest) -> None:
        group: Group = request.getfixturevalue(fixture)
        character_table(group).check_orthogonality()

    def test_value_lookup(self, f20: Group) -> None:
        table = character_table(f20)
        for i in range(table.h):
            assert table.value(i, 0) == table.degrees[i]

    def test_rep_orders(self, f20: Group) -> None:
        table = character_table(f20)
        assert sorted(table.rep_orders) == [1, 2, 4, 4, 5]


class TestGoldenTables:
    def test_f20_matches(self, f20: Group) -> None:
        assert tables_match(character_table(f20), F20_TABLE)

    def test_f42_matches(self, f42: Group) -> None:
        assert tables_match(character_table(f42), F42_TABLE)

    def test_mismatch(self, f20: Group) -> None:
        assert not tables_match(character_table(f20), F42_TABLE)

    def test_d8_and_q8_share_a_table(self, d8: Group, q8: Group) -> None:
        assert tables_match(character_table(d8), character_table(q8))


class TestColumnSums:
    @pytest.mark.parametrize("fixture", ["s3", "d8", "f20", "f42"])
    def test_sums_over_non_identity(self, fixture: str, request: pytest.FixtureRequest) -> None:
        group: Group = request.getfixturevalue(fixture)
        table = character_table(group)
        assert column_sum(table, 0) == group.order - 1
        for i in range(1, table.h):
            assert column_sum(table, i) == -table.degrees[i]


class TestSerialization:
    def test_round_trip(self, f20: Group) -> None:
        table = character_table(f20)
        again = table_from_dict(f20, table_to_dict(table))
        assert again.rows == table.rows
        assert again.degrees == table.degrees

    def test_reordered_columns(self, s3: Group) -> None:
        table = character_table(s3)
        data = table_to_dict(table)
        data["classes"] = data["classes"][::-1]
        data["rows"] = [row[::-1] for row in data["rows"]]
        assert table_from_dict(s3, data).rows == table.rows

    def test_wrong_group(self, s3: Group, d8: Group) -> None:
        with pytest.raises(FormatError):
            table_from_dict(d8, table_to_dict(character_table(s3)))

    def test_malformed(self, s3: Group) -> None:
        with pytest.raises(FormatError):
            table_from_dict(s3, {"classes": [{"rep": 0}], "rows": "x"})
