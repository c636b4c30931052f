"""Tests for cayley_bi.cli."""

from __future__ import annotations

import json
from pathlib import Path
from unittest.mock import patch

import pytest
from click.testing import CliRunner, Result

from cayley_bi.cli import main

_CLI = "cayley_bi.cli"


def _run(*args: str, env: dict[str, str] | None = None) -> Result:
    runner = CliRunner()
    return runner.invoke(main, list(args), env=env)


def _json(result: Result) -> dict[str, object]:
    data: dict[str, object] = json.loads(result.stdout)
    return data


class TestMainGroup:
    def test_help(self) -> None:
        result = _run("--help")
        assert result.exit_code == 0
        assert "cayley-bi" in result.output

    def test_version(self) -> None:
        result = _run("--version")
        assert result.exit_code == 0
        assert "0.1.0" in result.output

    def test_rejects_zero_budget(self) -> None:
        result = _run("--budget", "0", "catalog")
        assert result.exit_code == 2

    def test_unknown_group(self) -> None:
        result = _run("group", "info", "[20,99]")
        assert result.exit_code == 1
        assert "Unknown group" in result.output


class TestCatalogCommands:
    def test_catalog_table(self) -> None:
        result = _run("catalog")
        assert result.exit_code == 0
        assert "[20,3]" in result.output
        assert "F20" in result.output

    def test_catalog_json(self) -> None:
        result = _run("catalog", "--max-order", "8", "--json")
        assert result.exit_code == 0
        labels = [e["label"] for e in _json(result)["entries"]]  # type: ignore[attr-defined]
        assert labels[:3] == ["[6,1]", "[8,3]", "[8,4]"]

    def test_group_info(self) -> None:
        result = _run("group", "info", "F20")
        assert result.exit_code == 0
        assert "order:    20" in result.output
        assert "degrees:  1, 1, 1, 1, 4" in result.output
        assert "expected: BI Y, CI N" in result.output
        assert "reproduced" not in result.output

    def test_group_info_shows_erratum(self) -> None:
        result = _run("group", "info", "C3xQ8")
        assert result.exit_code == 0
        assert "expected: BI N, CI N" in result.output
        assert "reproduced: BI Y" in result.output

    def test_group_info_from_spec_file(self, tmp_path: Path) -> None:
        recipe = tmp_path / "F21.group"
        recipe.write_text("sdp 7 3 2\n", encoding="utf-8")
        result = _run("group", "info", str(recipe))
        assert result.exit_code == 0
        assert "order:    21" in result.output
        assert "expected" not in result.output

    def test_chartable_text(self) -> None:
        result = _run("chartable", "S3")
        assert result.exit_code == 0
        assert "column sums over G*: 5, -1, -2" in result.output

    def test_chartable_json(self) -> None:
        result = _run("chartable", "F20", "--json")
        assert result.exit_code == 0
        data = _json(result)
        assert len(data["rows"]) == 5  # type: ignore[arg-type]
        assert len(data["classes"]) == 5  # type: ignore[arg-type]


class TestSpectrumCommand:
    def test_f20_generating_set(self, tmp_path: Path) -> None:
        path = tmp_path / "s.txt"
        path.write_text("a\nb\n", encoding="utf-8")
        result = _run("spectrum", "F20", "--set", str(path), "--close-inverse")
        assert result.exit_code == 0
        assert "structure: F20 type1" in result.output
        assert "checks agree" in result.output

    def test_json(self, tmp_path: Path) -> None:
        path = tmp_path / "s.txt"
        path.write_text("a, a^4, b, b^3\n", encoding="utf-8")
        result = _run("spectrum", "F20", "--set", str(path), "--no-babai", "--json")
        assert result.exit_code == 0
        assert _json(result)["members"] == [1, 4, 5, 15]

    def test_not_inverse_closed(self, tmp_path: Path) -> None:
        path = tmp_path / "s.txt"
        path.write_text("a b\n", encoding="utf-8")
        result = _run("spectrum", "F20", "--set", str(path))
        assert result.exit_code == 1
        assert "inverse-closed" in result.output


class TestBIPair:
    def test_golden_sextets(self) -> None:
        result = _run("bi", "pair", "[24,3]", "--s", "golden:S", "--t", "golden:T")
        assert result.exit_code == 0
        assert "isomorphic: true" in result.output
        assert "M_2^S = {-6, 3}" in result.output
        assert "M_2^T = {-3, 6}" in result.output
        assert "BI violation" in result.output

    def test_needs_both_sets(self) -> None:
        result = _run("bi", "pair", "D8", "--s", "golden:S")
        assert result.exit_code == 2
        assert "--witness" in result.output

    def test_golden_needs_catalog_group(self, tmp_path: Path) -> None:
        recipe = tmp_path / "S3.group"
        recipe.write_text("sdp 3 2 2\n", encoding="utf-8")
        result = _run("bi", "pair", str(recipe), "--s", "golden:S", "--t", "golden:T")
        assert result.exit_code == 2

    def test_witness_round_trip(self, tmp_path: Path) -> None:
        found = _run("nonbi", "witness", "D8", "--json")
        assert found.exit_code == 0
        data = _json(found)
        assert data["found"] is True
        assert data["witness"]["route"] in {"pattern", "relaxed-pattern"}  # type: ignore[index]
        path = tmp_path / "witness.json"
        path.write_text(found.stdout, encoding="utf-8")

        result = _run("bi", "pair", "D8", "--witness", str(path))
        assert result.exit_code == 0
        assert "BI violation" in result.output


class TestBISize:
    def test_all_pairs(self) -> None:
        result = _run("bi", "size", "D8", "1", "--all", "--no-orbits", "--json")
        assert result.exit_code == 0
        data = _json(result)
        assert data["candidates"] == 5
        assert sorted(data["violations"]) == ["1", "2"]  # type: ignore[arg-type]

    def test_text_limit(self) -> None:
        result = _run("bi", "size", "D8", "1", "--all", "--no-orbits", "--limit", "1")
        assert result.exit_code == 0
        assert "degree 1: 1 violating pairs" in result.output

    def test_sampled_size_exits_partial(self) -> None:
        result = _run("--budget", "1", "bi", "size", "S3", "2")
        assert result.exit_code == 2
        assert "sampled" in result.output


class TestBIGroup:
    def test_pass(self) -> None:
        result = _run("bi", "group", "S3", "--json")
        assert result.exit_code == 0
        assert _json(result)["verdict"] == "pass"

    def test_violation_text(self) -> None:
        result = _run("bi", "group", "D8", "--mode", "full")
        assert result.exit_code == 0
        assert "violation" in result.output
        assert "degree " in result.output

    def test_budget_option_samples(self) -> None:
        result = _run("--budget", "1", "bi", "group", "S3", "--json")
        assert result.exit_code == 2
        assert _json(result)["method"] == "sampled"

    def test_budget_from_env(self) -> None:
        result = _run("bi", "group", "S3", "--json", env={"CAYLEY_BI_BUDGET": "1"})
        assert result.exit_code == 2
        assert _json(result)["method"] == "sampled"

    def test_no_sampling_reports_partial(self) -> None:
        result = _run("--budget", "1", "bi", "group", "S3", "--no-sampling")
        assert result.exit_code == 2
        data = _json(result)
        assert data["partial"] is True
        assert data["coverage"] == {"2": {"examined": 0, "total": 4}}
        assert "Budget exhausted" in result.stderr


class TestWitnessCommands:
    def test_ci_witness_d8(self) -> None:
        result = _run("ci", "witness", "D8")
        assert result.exit_code == 0
        assert "non-CI witness" in result.output
        assert "automorphisms checked" in result.output

    def test_ci_witness_none(self) -> None:
        result = _run("ci", "witness", "S3", "--json")
        assert result.exit_code == 0
        assert _json(result) == {"group": "S3", "found": False, "witness": None}

    def test_nonbi_text(self) -> None:
        result = _run("nonbi", "witness", "D8")
        assert result.exit_code == 0
        assert "non-BI witness (" in result.output
        assert "M_1^S = " in result.output

    def test_nonbi_none(self) -> None:
        result = _run("nonbi", "witness", "Q8", "--no-search")
        assert result.exit_code == 0
        assert "no non-BI witness found" in result.output


class TestClassify:
    def test_selected_labels(self, tmp_path: Path) -> None:
        out = tmp_path / "report.json"
        result = _run("classify", "--label", "S3", "--label", "D8", "--out", str(out))
        assert result.exit_code == 0
        assert "MISMATCH" not in result.output
        report = json.loads(out.read_text(encoding="utf-8"))
        assert [row["label"] for row in report["rows"]] == ["[6,1]", "[8,3]"]
        assert report["seed"] == 0

    def test_skips_abelian_groups(self) -> None:
        result = _run("classify", "--label", "C6", "--label", "S3")
        assert result.exit_code == 0
        assert "[6,1]" in result.output
        assert "C6 " not in result.output

    @pytest.mark.slow
    def test_full_catalog_agrees(self, tmp_path: Path) -> None:
        out = tmp_path / "report.json"
        result = _run("classify", "--max-order", "30", "--out", str(out))
        assert result.exit_code in {0, 2}
        assert "MISMATCH" not in result.output
        assert "Known deviation [24,11]" in result.output
        rows = json.loads(out.read_text(encoding="utf-8"))["rows"]
        deviations = [row["label"] for row in rows if row["known_deviation"]]
        assert deviations == ["[24,11]"]
        for row in rows:
            if row["known_deviation"]:
                assert row["bi_computed"] == "Y"
            elif row["bi_expected"] == "N":
                assert row["method"] == "witness", row["label"]
            elif row["order"] <= 22:
                assert row["method"] == "exhaustive", row["label"]

    def test_recorded_deviation_does_not_fail(self) -> None:
        from cayley_bi.catalog import CATALOG_REGISTRY, CatalogEntry

        erratum = CatalogEntry("[6,1]", "S3", "sdp 3 2 2", "N", "Y", "Y", "checked by hand")
        with patch.dict(CATALOG_REGISTRY, {"[6,1]": erratum}):
            result = _run("classify", "--label", "[6,1]")
        assert result.exit_code == 0
        assert "KNOWN-DEVIATION" in result.output
        assert "MISMATCH" not in result.output
        assert "Known deviation [6,1]: checked by hand" in result.output

    def test_mismatch_exits_one(self) -> None:
        from cayley_bi.catalog import CATALOG_REGISTRY, CatalogEntry

        flipped = CatalogEntry("[6,1]", "S3", "sdp 3 2 2", "N", "Y")
        with patch.dict(CATALOG_REGISTRY, {"[6,1]": flipped}):
            result = _run("classify", "--label", "[6,1]")
        assert result.exit_code == 1
        assert "MISMATCH" in result.output


class TestDoctorCommand:
    def test_all_required_pass(self) -> None:
        result = _run("doctor")
        assert result.exit_code == 0
        assert "✓ Python" in result.output
        assert "✓ numpy" in result.output
        assert "✓ Golden table [20,3] F20: reproduces" in result.output
        assert "✓ Log directory" in result.output

    def test_golden_mismatch_fails(self) -> None:
        with patch(f"{_CLI}.tables_match", return_value=False):
            result = _run("doctor")
        assert result.exit_code == 1
        assert "✗ Golden table [42,1] F42: does not match" in result.output

    def test_unwritable_log_dir_is_optional(
        self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        blocker = tmp_path / "file"
        blocker.write_text("x", encoding="utf-8")
        monkeypatch.setattr("cayley_bi.logging_config.log_dir", lambda: blocker / "logs")
        with patch(f"{_CLI}._configure_logging"):
            result = _run("doctor")
        assert result.exit_code == 0
        assert "○ Log directory" in result.output
