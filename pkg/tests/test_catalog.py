"""Tests for cayley_bi.catalog."""

from __future__ import annotations

import pytest

from cayley_bi.catalog import CATALOG_REGISTRY, catalog_list, get_entry, get_group, golden_set
from cayley_bi.characters import character_table, column_sum, tables_match
from cayley_bi.engine import construct_non_bi_witness
from cayley_bi.groups import check_group_axioms, element_orders, is_abelian
from cayley_bi.types import UnknownLabel, WitnessRoute

LABELED = [label for label in CATALOG_REGISTRY if label.startswith("[")]
SMALL = [e.label for e in catalog_list(max_order=16) if e.label.startswith("[")]


class TestRegistry:
    @pytest.mark.parametrize("label", LABELED)
    def test_order_matches_label(self, label: str) -> None:
        entry = get_entry(label)
        group = entry.build()
        check_group_axioms(group)
        assert group.order == entry.order
        assert group.name == entry.name

    @pytest.mark.parametrize("label", LABELED)
    def test_labeled_groups_are_non_abelian(self, label: str) -> None:
        assert not is_abelian(get_group(label))

    def test_expected_values(self) -> None:
        for entry in catalog_list():
            assert entry.bi_expected in {"Y", "N"}
            assert entry.ci_expected in {"Y", "N", "-"}

    def test_max_order(self) -> None:
        entries = catalog_list(max_order=12)
        assert [e.name for e in entries][:3] == ["S3", "D8", "Q8"]
        assert all(e.order <= 12 for e in entries)
        assert "F20" not in {e.name for e in entries}

    def test_build_is_cached(self) -> None:
        assert get_group("[20,3]") is get_group("F20")

    def test_to_dict(self) -> None:
        d = get_entry("F20").to_dict()
        assert d["label"] == "[20,3]"
        assert d["order"] == 20
        assert d["golden_table"] is True
        assert d["golden_sets"] == []
        assert d["bi_reproduced"] is None
        assert d["note"] == ""

    def test_only_c3xq8_carries_an_erratum(self) -> None:
        errata = [e.label for e in CATALOG_REGISTRY.values() if e.bi_reproduced is not None]
        assert errata == ["[24,11]"]
        entry = get_entry("C3xQ8")
        assert (entry.bi_expected, entry.bi_reproduced) == ("N", "Y")
        assert "4096" in entry.note


class TestLookup:
    @pytest.mark.parametrize("key", ["[20,3]", "20,3", "20-3", "[20, 3]", "F20", "f20"])
    def test_label_and_name_forms(self, key: str) -> None:
        assert get_entry(key).label == "[20,3]"

    def test_unknown(self) -> None:
        with pytest.raises(UnknownLabel, match="Unknown group"):
            get_entry("[20,99]")


class TestGoldenData:
    def test_golden_tables_match(self) -> None:
        for entry in catalog_list():
            if entry.golden_table is not None:
                assert tables_match(character_table(entry.build()), entry.golden_table)

    def test_golden_sets(self) -> None:
        group = get_group("[24,3]")
        orders = element_orders(group)
        s, t = golden_set("[24,3]", "S"), golden_set("[24,3]", "T")
        assert len(s) == len(t) == 6
        assert {orders[x] for x in s} == {3}
        assert {orders[x] for x in t} == {6}

    def test_no_golden_set(self) -> None:
        with pytest.raises(UnknownLabel):
            golden_set("F20", "S")


class TestCharacterTables:
    @pytest.mark.parametrize("label", SMALL)
    def test_small_groups(self, label: str) -> None:
        table = character_table(get_group(label))
        table.check_orthogonality()
        assert column_sum(table, 0) == table.group.order - 1

    @pytest.mark.slow
    @pytest.mark.parametrize("label", LABELED)
    def test_every_group(self, label: str) -> None:
        table = character_table(get_group(label))
        table.check_orthogonality()
        for i in range(1, table.h):
            assert column_sum(table, i) == -table.degrees[i]


class TestNonBIWitnesses:
    @pytest.mark.parametrize("name", ["D8", "C3xS3", "C2xA4", "He3", "C9:C3"])
    def test_pattern_routes(self, name: str) -> None:
        group = get_group(name)
        witness = construct_non_bi_witness(group, character_table(group), search=False)
        assert witness is not None
        assert witness.route in {WitnessRoute.PATTERN, WitnessRoute.RELAXED_PATTERN}
        assert witness.violation.m_s != witness.violation.m_t

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["C4xS3", "C2xC2xS3"])
    def test_search_route(self, name: str) -> None:
        group = get_group(name)
        table = character_table(group)
        assert construct_non_bi_witness(group, table, search=False) is None
        witness = construct_non_bi_witness(group, table)
        assert witness is not None
        assert witness.route is WitnessRoute.SEARCH

    @pytest.mark.parametrize("name", ["S3", "Q8", "D10"])
    def test_bi_groups_have_no_pattern(self, name: str) -> None:
        group = get_group(name)
        assert construct_non_bi_witness(group, character_table(group), search=False) is None
