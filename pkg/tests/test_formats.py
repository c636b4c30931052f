"""Tests for cayley_bi.formats."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from cayley_bi.characters import character_table, table_to_dict
from cayley_bi.formats import (
    dump_connection_set,
    evaluate_word,
    load_character_table,
    load_connection_set,
    load_group_spec,
    load_witness,
    normalize_label,
    parse_connection_set,
    parse_group_spec,
    parse_permutation,
    read_json,
    resolve_group,
    write_json,
)
from cayley_bi.groups import Group, conjugacy_classes
from cayley_bi.spectra import connection_set
from cayley_bi.types import (
    BadTwist,
    FormatError,
    InvalidConnectionSet,
    UnknownLabel,
)


class TestLabels:
    @pytest.mark.parametrize("text", ["20,3", "20-3", "[20,3]", " [ 20 , 3 ] "])
    def test_normalize(self, text: str) -> None:
        assert normalize_label(text) == "[20,3]"

    def test_names_pass_through(self) -> None:
        assert normalize_label("  SL(2,3) ") == "SL(2,3)"


class TestPermutations:
    def test_cycles(self) -> None:
        assert parse_permutation(4, "(0 1 2)") == (1, 2, 0, 3)
        assert parse_permutation(4, "(0 1)(2 3)") == (1, 0, 3, 2)
        assert parse_permutation(3, "") == (0, 1, 2)

    @pytest.mark.parametrize("text", ["(0 1)(1 2)", "(0 5)", "(0 x)", "0 1"])
    def test_rejects(self, text: str) -> None:
        with pytest.raises(FormatError):
            parse_permutation(4, text)


class TestGroupSpecs:
    def test_sdp_with_comment(self) -> None:
        group = parse_group_spec("sdp 5 4 3   # F20\n", name="F20")
        assert group.order == 20
        assert group.name == "F20"

    def test_perm_over_lines(self) -> None:
        group = parse_group_spec("perm 4\n(0 1 2 3)\n# transposition\n(0 1)\n")
        assert group.order == 24

    def test_direct_product_of_ids(self) -> None:
        group = parse_group_spec("dp C2 D8")
        assert group.order == 16
        assert len(conjugacy_classes(group)) == 10

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "   # only a comment",
            "sdp 5 4",
            "cyclic x",
            "bogus 3",
            "cyclic 4\ncyclic 5",
            "perm 3",
        ],
    )
    def test_malformed(self, text: str) -> None:
        with pytest.raises(FormatError):
            parse_group_spec(text)

    def test_constructor_errors_propagate(self) -> None:
        with pytest.raises(BadTwist):
            parse_group_spec("sdp 7 2 2")

    def test_load_names_group_after_file(self, tmp_path: Path) -> None:
        path = tmp_path / "F21.group"
        path.write_text("sdp 7 3 2\n", encoding="utf-8")
        group = load_group_spec(path)
        assert group.name == "F21"
        assert group.order == 21

    def test_resolve_ids(self) -> None:
        assert resolve_group("C7").order == 7
        assert resolve_group("D10").order == 10
        assert resolve_group("Q8").order == 8
        assert resolve_group("Dic3").order == 12
        assert resolve_group("[20,3]").name == "F20"

    def test_resolve_unknown(self) -> None:
        with pytest.raises(UnknownLabel):
            resolve_group("X99")


class TestConnectionSets:
    def test_words(self, f20: Group) -> None:
        assert evaluate_word(f20, "1") == 0
        assert evaluate_word(f20, "a") == 1
        assert evaluate_word(f20, "a^2*b") == 7
        assert evaluate_word(f20, "b^-1") == 15
        assert evaluate_word(f20, "#12") == 12

    @pytest.mark.parametrize("word", ["c", "a^", "a**b", "#x"])
    def test_bad_words(self, f20: Group, word: str) -> None:
        with pytest.raises(FormatError):
            evaluate_word(f20, word)

    def test_mixed_tokens(self, f20: Group) -> None:
        s = parse_connection_set(f20, "a, a^-1  # rotation\nb 15\n")
        assert s.members == (1, 4, 5, 15)

    def test_close_inverse(self, f20: Group) -> None:
        assert parse_connection_set(f20, "a b", close_inverse=True).members == (1, 4, 5, 15)

    def test_not_inverse_closed(self, f20: Group) -> None:
        with pytest.raises(InvalidConnectionSet):
            parse_connection_set(f20, "a b")

    def test_dump_reads_back(self, tmp_path: Path, f20: Group) -> None:
        s = connection_set(f20, [1, 4, 5, 15])
        path = tmp_path / "s.txt"
        path.write_text(dump_connection_set(s), encoding="utf-8")
        assert load_connection_set(path, f20) == s


class TestJson:
    def test_write_creates_parents(self, tmp_path: Path) -> None:
        path = tmp_path / "out" / "report.json"
        write_json(path, {"group": "S3", "rows": []})
        assert read_json(path) == {"group": "S3", "rows": []}

    def test_invalid_json(self, tmp_path: Path) -> None:
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(FormatError, match="not valid JSON"):
            read_json(path)

    def test_not_an_object(self, tmp_path: Path) -> None:
        path = tmp_path / "list.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(FormatError, match="JSON object"):
            read_json(path)

    def test_character_table(self, tmp_path: Path, s3: Group) -> None:
        table = character_table(s3)
        path = tmp_path / "s3.json"
        write_json(path, table_to_dict(table))
        assert load_character_table(path, s3).rows == table.rows


class TestWitnessFiles:
    def _witness(self, s: list[int], t: list[int]) -> dict[str, object]:
        return {"S": {"members": s}, "T": {"members": t}, "degree": 1}

    def test_bare_witness(self, tmp_path: Path, d8: Group) -> None:
        path = tmp_path / "w.json"
        path.write_text(json.dumps(self._witness([4], [2])), encoding="utf-8")
        s, t = load_witness(path, d8)
        assert (s.members, t.members) == ((4,), (2,))

    def test_inside_report(self, tmp_path: Path, d8: Group) -> None:
        path = tmp_path / "report.json"
        write_json(path, {"group": "D8", "witness": self._witness([4], [2])})
        assert load_witness(path, d8)[1].members == (2,)

    def test_inside_classification_rows(self, tmp_path: Path, d8: Group) -> None:
        path = tmp_path / "classify.json"
        write_json(path, {"rows": [{"label": "[6,1]"}, {"witness": self._witness([5], [2])}]})
        assert load_witness(path, d8)[0].members == (5,)

    def test_missing(self, tmp_path: Path, d8: Group) -> None:
        path = tmp_path / "none.json"
        write_json(path, {"group": "D8"})
        with pytest.raises(FormatError, match="no witness"):
            load_witness(path, d8)

    def test_wrong_group(self, tmp_path: Path, s3: Group) -> None:
        path = tmp_path / "w.json"
        write_json(path, self._witness([1], [2]))
        with pytest.raises(FormatError, match="does not fit"):
            load_witness(path, s3)
