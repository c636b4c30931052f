"""Click CLI for cayley-bi."""

from __future__ import annotations

import importlib.metadata
import json
import logging
import sys
from pathlib import Path
from typing import Any, cast

import click

from cayley_bi import __version__
from cayley_bi.catalog import CatalogEntry, catalog_list, get_entry, golden_set
from cayley_bi.characters import character_table, column_sum, table_to_dict, tables_match
from cayley_bi.engine import DEFAULT_BUDGET, BIEngine, EngineConfig
from cayley_bi.formats import load_connection_set, load_group_spec, load_witness, write_json
from cayley_bi.groups import Group, conjugacy_classes, element_orders, exponent, is_abelian
from cayley_bi.spectra import ConnectionSet
from cayley_bi.types import (
    BIMode,
    BudgetExceeded,
    CayleyBIError,
    CIWitness,
    ClassifyRow,
    HealthCheck,
    Method,
    NonBIWitness,
)

logger = logging.getLogger(__name__)

EXIT_PARTIAL = 2

_PASS = "✓"
_FAIL = "✗"
_OPTIONAL = "○"


def _configure_logging(verbose: bool) -> None:
    from cayley_bi.logging_config import configure_logging

    configure_logging(stderr_level="DEBUG" if verbose else "WARNING")


def _get_config(ctx: click.Context) -> EngineConfig:
    """Retrieve the EngineConfig from the Click context."""
    obj = cast("dict[str, EngineConfig]", ctx.ensure_object(dict))  # pyright: ignore[reportUnknownMemberType]
    return obj["config"]


def _emit(data: dict[str, Any]) -> None:
    click.echo(json.dumps(data, indent=2, ensure_ascii=False))


# ---------------------------------------------------------------------------
# Argument resolution
# ---------------------------------------------------------------------------


def _resolve(ref: str) -> tuple[Group, CatalogEntry | None]:
    """A group from a catalog label or name, or from a group spec file."""
    path = Path(ref)
    if path.is_file():
        return load_group_spec(path), None
    entry = get_entry(ref)
    return entry.build(), entry


def _load_set(
    ref: str, group: Group, entry: CatalogEntry | None, *, close_inverse: bool
) -> ConnectionSet:
    """A connection set from a file or a ``golden:S`` / ``golden:T`` reference."""
    if ref.startswith("golden:"):
        if entry is None:
            msg = f"golden sets need a catalog group, not {group.name}"
            raise click.BadParameter(msg)
        return golden_set(entry.label, ref.removeprefix("golden:"))
    return load_connection_set(Path(ref), group, close_inverse=close_inverse)


def _engine(ctx: click.Context, group: Group, **changes: object) -> BIEngine:
    engine = BIEngine(group, _get_config(ctx))
    return engine.with_config(**changes) if changes else engine


def _label(group: Group, entry: CatalogEntry | None) -> str:
    return entry.label if entry is not None else group.name


class _DomainErrors:
    """Turn domain errors into ClickException and budget exhaustion into exit 2."""

    def __enter__(self) -> None:
        return None

    def __exit__(self, exc_type: object, exc: BaseException | None, tb: object) -> bool:
        if isinstance(exc, BudgetExceeded):
            click.echo(f"Budget exhausted: {exc}", err=True)
            partial: dict[str, Any] = {"partial": True, "error": str(exc)}
            partial["coverage"] = {
                str(size): {"examined": done, "total": total}
                for size, (done, total) in sorted(exc.coverage.items())
            }
            if exc.partial is not None:
                partial["report"] = exc.partial
            _emit(partial)
            raise SystemExit(EXIT_PARTIAL)
        if isinstance(exc, CayleyBIError):
            raise click.ClickException(str(exc)) from exc
        return False


# ---------------------------------------------------------------------------
# Root group
# ---------------------------------------------------------------------------


@click.group()
@click.version_option(__version__, prog_name="cayley-bi")
@click.option("--verbose", "-v", is_flag=True, help="Enable debug logging.")
@click.option(
    "--budget",
    default=DEFAULT_BUDGET,
    show_default=True,
    envvar="CAYLEY_BI_BUDGET",
    type=click.IntRange(min=1),
    help="Most connection sets enumerated exhaustively per size.",
)
@click.option(
    "--jobs",
    default=1,
    show_default=True,
    envvar="CAYLEY_BI_JOBS",
    type=click.IntRange(min=1),
    help="Worker processes for canonical forms.",
)
@click.option(
    "--seed",
    default=0,
    show_default=True,
    envvar="CAYLEY_BI_SEED",
    type=int,
    help="Seed of the sampling fallback.",
)
@click.pass_context
def main(ctx: click.Context, verbose: bool, budget: int, jobs: int, seed: int) -> None:
    """cayley-bi: BI and CI checks for Cayley graphs of small groups."""
    _configure_logging(verbose)
    ctx.ensure_object(dict)
    ctx.obj["config"] = EngineConfig(budget=budget, jobs=jobs, seed=seed)


# ---------------------------------------------------------------------------
# doctor
# ---------------------------------------------------------------------------


def _dependency_checks() -> list[HealthCheck]:
    checks: list[HealthCheck] = []
    for package in ("numpy", "sympy", "networkx", "click"):
        try:
            version = importlib.metadata.version(package)
        except importlib.metadata.PackageNotFoundError:
            checks.append(HealthCheck(False, f"{package}: not installed"))
        else:
            checks.append(HealthCheck(True, f"{package} {version}"))
    return checks


def _golden_checks() -> list[HealthCheck]:
    checks: list[HealthCheck] = []
    for entry in catalog_list():
        golden = entry.golden_table
        if golden is None:
            continue
        try:
            table = character_table(entry.build())
            ok = tables_match(table, golden)
        except CayleyBIError as e:
            checks.append(HealthCheck(False, f"Golden table {entry.label}: {e}"))
            continue
        state = "reproduces" if ok else "does not match"
        checks.append(HealthCheck(ok, f"Golden table {entry.label} {entry.name}: {state}"))
    return checks


@main.command()
def doctor() -> None:
    """Check the installation and the embedded reference data."""
    from cayley_bi.logging_config import log_dir

    passed = 0
    failed = 0
    lines: list[str] = []

    def _check(symbol: str, message: str, *, required: bool = True) -> None:
        nonlocal passed, failed
        lines.append(f"{symbol} {message}")
        if symbol == _PASS:
            passed += 1
        elif symbol == _FAIL and required:
            failed += 1

    v = sys.version_info
    if v >= (3, 13):
        _check(_PASS, f"Python {v.major}.{v.minor}.{v.micro}")
    else:
        _check(_FAIL, f"Python {v.major}.{v.minor}.{v.micro} (requires 3.13+)")

    for check in _dependency_checks() + _golden_checks():
        symbol = _PASS if check.passed else _FAIL
        _check(symbol, check.message, required=check.required)

    directory = log_dir()
    try:
        directory.mkdir(parents=True, exist_ok=True)
        probe = directory / ".doctor_test"
        probe.write_text("ok")
        probe.unlink()
        _check(_PASS, f"Log directory: {directory}")
    except OSError as e:
        _check(
            _OPTIONAL,
            f"Log directory: {directory} ({e}), set CAYLEY_BI_LOG_DIR",
            required=False,
        )

    click.echo("=" * 40)
    for line in lines:
        click.echo(line)
    click.echo("=" * 40)
    click.echo(f"{passed} passed, {failed} failed")

    if failed > 0:
        raise SystemExit(1)


# ---------------------------------------------------------------------------
# catalog / group / chartable
# ---------------------------------------------------------------------------


@main.command("catalog")
@click.option("--max-order", type=int, default=None, help="Only groups up to this order.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON.")
def catalog_cmd(max_order: int | None, as_json: bool) -> None:
    """List the catalog groups with their published BI and CI status."""
    entries = catalog_list(max_order)
    if as_json:
        _emit({"entries": [e.to_dict() for e in entries]})
        return
    click.echo(f"{'label':<10} {'name':<14} {'order':>5}  BI  CI  recipe")
    for e in entries:
        recipe = e.recipe.splitlines()[0]
        click.echo(
            f"{e.label:<10} {e.name:<14} {e.order:>5}  "
            f"{e.bi_expected:<3} {e.ci_expected:<3} {recipe}"
        )


@main.group("group")
def group_cmd() -> None:
    """Inspect groups."""


@group_cmd.command("info")
@click.argument("ref")
def group_info(ref: str) -> None:
    """Order, classes and character degrees of a group."""
    with _DomainErrors():
        group, entry = _resolve(ref)
        partition = conjugacy_classes(group)
        orders = element_orders(group)
        table = character_table(group)
    click.echo(f"{_label(group, entry)} {group.name}")
    click.echo(f"  order:    {group.order}")
    click.echo(f"  abelian:  {'yes' if is_abelian(group) else 'no'}")
    click.echo(f"  exponent: {exponent(group)}")
    click.echo(f"  classes:  {len(partition)}")
    click.echo(f"  sizes:    {', '.join(map(str, partition.sizes))}")
    click.echo(f"  orders:   {', '.join(str(orders[r]) for r in partition.reps)}")
    click.echo(f"  degrees:  {', '.join(map(str, table.degrees))}")
    if entry is not None:
        click.echo(f"  expected: BI {entry.bi_expected}, CI {entry.ci_expected}")
        if entry.bi_reproduced is not None:
            click.echo(f"  reproduced: BI {entry.bi_reproduced} ({entry.note})")


@main.command()
@click.argument("ref")
@click.option(
    "--json", "as_json", is_flag=True, help="Emit JSON (reads back with load_character_table)."
)
def chartable(ref: str, as_json: bool) -> None:
    """Exact character table of a group."""
    with _DomainErrors():
        group, _ = _resolve(ref)
        table = character_table(group)
        table.check_orthogonality()
        sums = [column_sum(table, i) for i in range(table.h)]
    if as_json:
        _emit(table_to_dict(table))
        return
    data = table_to_dict(table)
    cells = [[str(c["size"]) for c in data["classes"]], [str(c["order"]) for c in data["classes"]]]
    cells += data["display"]
    width = max(len(cell) for row in cells for cell in row) + 1
    heads = ["size", "order"] + [f"chi{i}" for i in range(table.h)]
    for head, row in zip(heads, cells, strict=True):
        click.echo(f"{head:>6} " + "".join(cell.rjust(width) for cell in row))
    click.echo(f"column sums over G*: {', '.join(str(v) for v in sums)}")


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------


@main.command()
@click.argument("ref")
@click.option(
    "--set", "set_ref", required=True, help="Connection-set file, or golden:S / golden:T."
)
@click.option("--close-inverse", is_flag=True, help="Add missing inverses instead of failing.")
@click.option("--no-babai", is_flag=True, help="Skip the power-sum cross-check.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON.")
@click.pass_context
def spectrum(
    ctx: click.Context, ref: str, set_ref: str, close_inverse: bool, no_babai: bool, as_json: bool
) -> None:
    """Spectrum, character sums and structure tag of Cay(G, S)."""
    with _DomainErrors():
        group, entry = _resolve(ref)
        s = _load_set(set_ref, group, entry, close_inverse=close_inverse)
        report = _engine(ctx, group).spectrum(s, babai=not no_babai)
    if as_json:
        _emit(report.to_dict())
        return
    click.echo(f"{report.group}, |S| = {len(report.members)}, connected: {report.connected}")
    click.echo("spectrum: " + ", ".join(f"{value:g}^{mult}" for value, mult in report.eigs))
    for nu, m in report.m_sets.items():
        click.echo(f"M_{nu} = {{{', '.join(map(str, m.values))}}}")
    click.echo("orders:   " + ", ".join(f"|S_{k}| = {c}" for k, c in report.order_profile.items()))
    if report.structure_tag is not None:
        tag = report.structure_tag
        click.echo(f"structure: {tag.family} {tag.kind}")
    failures = [b for b in report.babai if not b.ok]
    if report.babai:
        click.echo(f"babai: {len(report.babai) - len(failures)}/{len(report.babai)} checks agree")
    if failures:
        raise SystemExit(1)


# ---------------------------------------------------------------------------
# bi
# ---------------------------------------------------------------------------


@main.group()
def bi() -> None:
    """BI checks: pairs, single sizes and whole groups."""


@bi.command("pair")
@click.argument("ref")
@click.option("--s", "s_ref", default=None, help="First set: file or golden:S.")
@click.option("--t", "t_ref", default=None, help="Second set: file or golden:T.")
@click.option(
    "--witness",
    "witness_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="Take S and T from a JSON report instead.",
)
@click.option("--close-inverse", is_flag=True, help="Add missing inverses instead of failing.")
@click.option("--multiset", is_flag=True, help="Compare M sets with multiplicities.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON.")
@click.pass_context
def bi_pair(
    ctx: click.Context,
    ref: str,
    s_ref: str | None,
    t_ref: str | None,
    witness_path: Path | None,
    close_inverse: bool,
    multiset: bool,
    as_json: bool,
) -> None:
    """Compare the M sets and the graphs of two connection sets."""
    if witness_path is None and (s_ref is None or t_ref is None):
        msg = "give --s and --t, or --witness"
        raise click.UsageError(msg)
    with _DomainErrors():
        group, entry = _resolve(ref)
        if witness_path is not None:
            s, t = load_witness(witness_path, group)
        else:
            s = _load_set(cast("str", s_ref), group, entry, close_inverse=close_inverse)
            t = _load_set(cast("str", t_ref), group, entry, close_inverse=close_inverse)
        report = _engine(ctx, group, multiset=multiset).compare_pair(s, t)
    if as_json:
        _emit(report.to_dict())
        return
    click.echo(f"isomorphic: {str(report.isomorphic).lower()}")
    click.echo(f"equal:      {str(report.equal).lower()}")
    if report.degree is not None:
        nu = report.degree
        click.echo(f"M_{nu}^S = {{{', '.join(map(str, report.m_s[nu].values))}}}")
        click.echo(f"M_{nu}^T = {{{', '.join(map(str, report.m_t[nu].values))}}}")
    if report.violation:
        click.echo("BI violation")


@bi.command("size")
@click.argument("ref")
@click.argument("size", type=click.IntRange(min=0))
@click.option("--all", "all_sets", is_flag=True, help="Include non-generating sets.")
@click.option("--limit", type=click.IntRange(min=1), default=None, help="Pairs listed per degree.")
@click.option("--no-orbits", is_flag=True, help="Enumerate every set, not one per orbit.")
@click.option("--multiset", is_flag=True, help="Compare M sets with multiplicities.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON.")
@click.pass_context
def bi_size(
    ctx: click.Context,
    ref: str,
    size: int,
    all_sets: bool,
    limit: int | None,
    no_orbits: bool,
    multiset: bool,
    as_json: bool,
) -> None:
    """All isomorphic pairs of one size whose M sets differ."""
    with _DomainErrors():
        group, _ = _resolve(ref)
        engine = _engine(ctx, group, orbits=not no_orbits, multiset=multiset)
        report = engine.check_size(size, generating_only=not all_sets, limit=limit)
    if as_json:
        _emit(report.to_dict())
    else:
        click.echo(
            f"size {report.size}: {report.candidates} sets, {report.representatives} "
            f"representatives, {report.buckets} buckets ({report.method.value})"
        )
        for nu, found in report.violations.items():
            click.echo(f"  degree {nu}: {len(found)} violating pairs")
            for v in found:
                click.echo(f"    S = {list(v.s.members)}  T = {list(v.t.members)}")
        if not report.violations:
            click.echo("  no violations")
    if report.method is Method.SAMPLED:
        raise SystemExit(EXIT_PARTIAL)


@bi.command("group")
@click.argument("ref")
@click.option(
    "--mode",
    type=click.Choice([m.value for m in BIMode]),
    default=BIMode.REDUCED.value,
    show_default=True,
    help="reduced: generating sets of the upper half sizes; full: every set.",
)
@click.option("--no-orbits", is_flag=True, help="Enumerate every set, not one per orbit.")
@click.option("--multiset", is_flag=True, help="Compare M sets with multiplicities.")
@click.option("--no-sampling", is_flag=True, help="Fail instead of sampling over budget.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON.")
@click.pass_context
def bi_group(
    ctx: click.Context,
    ref: str,
    mode: str,
    no_orbits: bool,
    multiset: bool,
    no_sampling: bool,
    as_json: bool,
) -> None:
    """Search a whole group for a BI violation."""
    with _DomainErrors():
        group, entry = _resolve(ref)
        engine = _engine(ctx, group, orbits=not no_orbits, multiset=multiset)
        report = engine.check_group(BIMode(mode), sampling=not no_sampling)
    if as_json:
        _emit(report.to_dict())
    else:
        verdict = "pass" if report.passed else "violation"
        click.echo(f"{_label(group, entry)} {group.name}: {verdict} ({report.method.value})")
        click.echo(
            f"  sizes {', '.join(map(str, report.sizes)) or '-'}; {report.candidates} sets, "
            f"{report.representatives} representatives, {report.seconds:.2f}s"
        )
        if report.violation is not None:
            v = report.violation
            click.echo(f"  degree {v.degree}: S = {list(v.s.members)}  T = {list(v.t.members)}")
    if not report.complete:
        raise SystemExit(EXIT_PARTIAL)


# ---------------------------------------------------------------------------
# ci / nonbi
# ---------------------------------------------------------------------------


def _witness_json(group: Group, witness: CIWitness | NonBIWitness | None) -> dict[str, Any]:
    return {
        "group": group.name,
        "found": witness is not None,
        "witness": None if witness is None else witness.to_dict(),
    }


@main.group()
def ci() -> None:
    """CI witness search."""


@ci.command("witness")
@click.argument("ref")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON.")
@click.pass_context
def ci_witness(ctx: click.Context, ref: str, as_json: bool) -> None:
    """Two isomorphic Cayley graphs whose sets no automorphism relates."""
    with _DomainErrors():
        group, entry = _resolve(ref)
        witness = _engine(ctx, group).ci_witness()
    if as_json:
        _emit(_witness_json(group, witness))
        return
    if witness is None:
        click.echo(f"{_label(group, entry)} {group.name}: no non-CI witness found")
        return
    click.echo(f"{_label(group, entry)} {group.name}: non-CI witness")
    click.echo(f"  S = {list(witness.s.members)}")
    click.echo(f"  T = {list(witness.t.members)}")
    click.echo(f"  {witness.checked} automorphisms checked")


@main.group()
def nonbi() -> None:
    """Non-BI witness construction."""


@nonbi.command("witness")
@click.argument("ref")
@click.option("--no-search", is_flag=True, help="Only try the pattern constructions.")
@click.option("--json", "as_json", is_flag=True, help="Emit JSON.")
@click.pass_context
def nonbi_witness(ctx: click.Context, ref: str, no_search: bool, as_json: bool) -> None:
    """Isomorphic Cayley graphs with different M sets."""
    with _DomainErrors():
        group, entry = _resolve(ref)
        witness = _engine(ctx, group).non_bi_witness(search=not no_search)
    if as_json:
        _emit(_witness_json(group, witness))
        return
    if witness is None:
        click.echo(f"{_label(group, entry)} {group.name}: no non-BI witness found")
        return
    v = witness.violation
    click.echo(f"{_label(group, entry)} {group.name}: non-BI witness ({witness.route.value})")
    click.echo(f"  S = {list(v.s.members)}  ({', '.join(v.s.words())})")
    click.echo(f"  T = {list(v.t.members)}  ({', '.join(v.t.words())})")
    click.echo(f"  M_{v.degree}^S = {{{', '.join(map(str, v.m_s.values))}}}")
    click.echo(f"  M_{v.degree}^T = {{{', '.join(map(str, v.m_t.values))}}}")


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------


def _print_row(row: ClassifyRow) -> None:
    flag = "" if row.agrees else "  KNOWN-DEVIATION" if row.known_deviation else "  MISMATCH"
    partial = "" if row.complete else "  (sampled)"
    click.echo(
        f"{row.label:<10} {row.name:<14} {row.order:>5}  "
        f"{row.bi_expected:<3} {row.bi_computed:<3} "
        f"{row.method.value:<19} {row.seconds:>8.2f}s{partial}{flag}"
    )


@main.command()
@click.option("--max-order", type=int, default=30, show_default=True, help="Largest group order.")
@click.option(
    "--out",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the JSON report here.",
)
@click.option("--label", "labels", multiple=True, help="Only these catalog entries.")
@click.pass_context
def classify(ctx: click.Context, max_order: int, out: Path | None, labels: tuple[str, ...]) -> None:
    """Decide BI for every catalog group and compare with the published column."""
    config = _get_config(ctx)
    with _DomainErrors():
        entries = [get_entry(key) for key in labels] if labels else catalog_list(max_order)
        entries = [e for e in entries if e.order <= max_order and not is_abelian(e.build())]
    click.echo(f"{'label':<10} {'name':<14} {'order':>5}  BI  got method              time")
    rows: list[ClassifyRow] = []
    for entry in entries:
        with _DomainErrors():
            row = BIEngine(entry.build(), config).classify(
                entry.label, entry.bi_expected, entry.bi_reproduced
            )
        rows.append(row)
        _print_row(row)
    report = {
        "version": __version__,
        "budget": config.budget,
        "seed": config.seed,
        "rows": [row.to_dict() for row in rows],
    }
    if out is not None:
        write_json(out, report)
        click.echo(f"Report: {out}")
    for row in rows:
        if row.known_deviation:
            click.echo(f"Known deviation {row.label}: {get_entry(row.label).note}")
    mismatches = [row.label for row in rows if not (row.agrees or row.known_deviation)]
    if mismatches:
        logger.warning("BI column differs on %s", ", ".join(mismatches))
        raise SystemExit(1)
    if not all(row.complete for row in rows):
        raise SystemExit(EXIT_PARTIAL)
