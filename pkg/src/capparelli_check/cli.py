"""CLI entry point for capparelli-check.

Commands:
    verify     check registry cases and print reports
    enumerate  list a family or product side at one weight
    bijection  audit a staircase bijection at one weight
    table      refined count table as CSV
    lemmas     run the lemma suite
    series     print a series builder's output as JSON
"""

from __future__ import annotations

import json
import logging
import sys
from collections import Counter
from pathlib import Path

import click

from . import __version__
from .combinatorics import (
    PRODUCT_SIDES,
    UnboundedFamilyError,
    UnknownFamilyError,
    count_table,
    enumerate_family,
    enumerate_product_side,
    get_family,
    product_side_stats,
    series_of_family,
)
from .config import Config
from .formats import audit_json, listing_json, listing_text, reports_json, reports_text, series_json, table_csv
from .identities import UnknownCaseError, exit_code, registry, verify_all
from .qfactory import ProductId, QuadId, SumId, constant_term_lhs, lemma_suite, product_rhs, quad_sum, sum_rhs
from .series import Bounds, SeriesError, TruncatedSeries
from .staircase import AUDIT_VARIANTS, bijection_audit

EXIT_USAGE = 64

_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


class _CheckGroup(click.Group):
    """Usage errors exit with 64 rather than click's default 2."""

    def make_context(self, *args, **kwargs):
        try:
            return super().make_context(*args, **kwargs)
        except click.UsageError as exc:
            exc.exit_code = EXIT_USAGE
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            exc.exit_code = EXIT_USAGE
            raise


def _load_config(config_path: Path | None) -> Config:
    """Load config or exit with a friendly message."""
    try:
        return Config.load_or_default(config_path)
    except FileNotFoundError as exc:
        click.echo(f"Error: {exc}", err=True)
        sys.exit(EXIT_USAGE)
    except ValueError as exc:
        click.echo(f"Error: Invalid config: {exc}", err=True)
        sys.exit(EXIT_USAGE)


@click.group(cls=_CheckGroup)
@click.version_option(version=__version__, prog_name="capparelli-check")
@click.option(
    "--config", "config_path",
    type=click.Path(dir_okay=False, path_type=Path),
    help="YAML config file (default: capparelli.yaml in the project root).",
)
@click.option(
    "--log-level",
    type=click.Choice(_LOG_LEVELS, case_sensitive=False),
    help="Logging level for stderr (default: from config).",
)
@click.pass_context
def cli(ctx: click.Context, config_path: Path | None, log_level: str | None) -> None:
    """Exact verification of Capparelli-type partition identities."""
    config = _load_config(config_path)
    logging.basicConfig(
        level=(log_level or config.log_level).upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = config


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--case", "case_ids", multiple=True, help="Case id; repeat for several.")
@click.option("--all", "run_all", is_flag=True, help="Verify every registered case.")
@click.option("--profile", "profile_name", help="Bounds profile: quick, standard, deep or one from the config.")
@click.option("--max-q", type=click.IntRange(min=0), help="Override every weight bound.")
@click.option("--max-d", type=click.IntRange(min=0), help="Override every d-bound.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
@click.option("--workers", type=click.IntRange(min=1), help="Parallel worker processes (default: from config).")
@click.option("--timings", is_flag=True, help="Include wall times in the output.")
@click.option("--list", "list_cases", is_flag=True, help="List case ids and exit.")
@click.pass_obj
def verify(
    config: Config,
    case_ids: tuple[str, ...],
    run_all: bool,
    profile_name: str | None,
    max_q: int | None,
    max_d: int | None,
    fmt: str,
    workers: int | None,
    timings: bool,
    list_cases: bool,
) -> None:
    """Verify identity cases at the chosen bounds.

    \b
    Examples:
        capparelli-check verify --case ct --max-q 30
        capparelli-check verify --all --profile quick --format json
    Exit codes: 0 all pass, 1 any fail, 2 blocked (none failing), 64 usage error.
    """
    if list_cases:
        for case in registry():
            click.echo(f"{case.id:<18} {case.kind.value:<16} {case.description}")
        return
    if not case_ids and not run_all:
        raise click.UsageError("Provide --case ID or --all.")
    if case_ids and run_all:
        raise click.UsageError("--case and --all are mutually exclusive.")

    try:
        profile = config.profile(profile_name).with_bounds(max_q, max_d)
        ids = None if run_all else list(dict.fromkeys(case_ids))
        reports = verify_all(profile, workers or config.workers, ids)
    except (UnknownCaseError, ValueError) as exc:
        raise click.UsageError(str(exc)) from None

    output = reports_json(reports, timings) if fmt == "json" else reports_text(reports, timings)
    click.echo(output.rstrip("\n"))
    sys.exit(exit_code(reports))


# ---------------------------------------------------------------------------
# enumerate
# ---------------------------------------------------------------------------


def _require_budget(family_id: str, max_d: int | None) -> None:
    if family_id in PRODUCT_SIDES:
        return
    spec = get_family(family_id)
    if not spec.finite and max_d is None:
        raise click.UsageError(
            f"family {family_id} has infinitely many objects of each weight "
            "(non-overlined 0_u parts cost nothing); pass --max-d K to bound the non-overlined parts."
        )


@cli.command("enumerate")
@click.option("--family", "family_id", required=True, help="Family or product side id.")
@click.option("--n", "n", type=click.IntRange(min=0), required=True, help="Weight.")
@click.option("--max-d", type=click.IntRange(min=0), help="Largest number of non-overlined parts.")
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
def enumerate_cmd(family_id: str, n: int, max_d: int | None, fmt: str) -> None:
    """List every object of weight N in a deterministic order.

    \b
    Examples:
        capparelli-check enumerate --family cor1 --n 13
        capparelli-check enumerate --family cbar --n 4 --max-d 2
    """
    try:
        _require_budget(family_id, max_d)
        if family_id in PRODUCT_SIDES:
            objects = enumerate_product_side(family_id, n)
            stats = [tuple(product_side_stats(family_id, lam)) for lam in objects]
            colored = False
        else:
            spec = get_family(family_id)
            objects = enumerate_family(spec, n, max_d)
            stats = [tuple(spec.stats(lam)) for lam in objects]
            colored = spec.colored
    except (UnknownFamilyError, UnboundedFamilyError) as exc:
        raise click.UsageError(str(exc)) from None

    poly = Counter((i, j, k) for k, i, j in stats)
    if fmt == "json":
        click.echo(listing_json(family_id, n, objects, stats, poly, colored), nl=False)
    else:
        click.echo(listing_text(objects, poly, colored), nl=False)


# ---------------------------------------------------------------------------
# bijection
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--variant", type=click.Choice(list(AUDIT_VARIANTS)), required=True)
@click.option("--n", "n", type=click.IntRange(min=0), required=True, help="Weight.")
@click.option("--max-d", type=click.IntRange(min=0), default=0, show_default=True, help="Largest d-exponent.")
def bijection(variant: str, n: int, max_d: int) -> None:
    """Audit a staircase bijection at weight N and print the report as JSON."""
    report = bijection_audit(variant, n, max_d)
    click.echo(audit_json(report))
    sys.exit(0 if report.passed else 1)


# ---------------------------------------------------------------------------
# table
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--family", "family_id", required=True, help="Family or product side id.")
@click.option("--max-n", type=click.IntRange(min=0), required=True)
@click.option("--max-d", type=click.IntRange(min=0), help="Largest number of non-overlined parts.")
@click.option("--format", "fmt", type=click.Choice(["csv"]), default="csv", show_default=True)
def table(family_id: str, max_n: int, max_d: int | None, fmt: str) -> None:
    """Refined counts (n, k, i, j) for every weight up to MAX_N."""
    try:
        _require_budget(family_id, max_d)
        counts = count_table(family_id, max_n, max_d)
    except (UnknownFamilyError, UnboundedFamilyError) as exc:
        raise click.UsageError(str(exc)) from None
    click.echo(table_csv(counts), nl=False)


# ---------------------------------------------------------------------------
# lemmas
# ---------------------------------------------------------------------------


@cli.command()
@click.option("--max-q", type=click.IntRange(min=0), default=40, show_default=True, help="Triple-product bound.")
@click.option("--series-bound", type=click.IntRange(min=0), default=30, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True)
def lemmas(max_q: int, series_bound: int, fmt: str) -> None:
    """Run the lemma suite."""
    results = lemma_suite(q_bound=max_q, series_bound=series_bound)
    if fmt == "json":
        click.echo(json.dumps([r.to_json() for r in results], indent=2))
    else:
        for r in results:
            click.echo(f"{'pass' if r.passed else 'FAIL'}  {r.name} {r.params}")
        click.echo(f"{sum(r.passed for r in results)}/{len(results)} passed")
    sys.exit(0 if all(r.passed for r in results) else 1)


# ---------------------------------------------------------------------------
# series
# ---------------------------------------------------------------------------


def _build_series(builder: str, q: int, d: int | None) -> TruncatedSeries:
    kind, _, rest = builder.partition(":")
    name, _, case = rest.partition(":")
    bounds = Bounds(q=q, d=d)
    match kind:
        case "product":
            return product_rhs(ProductId(name), bounds)
        case "sum":
            return sum_rhs(SumId(name), bounds)
        case "quad":
            return quad_sum(QuadId(name), bounds, int(case) if case else None)
        case "ct":
            return constant_term_lhs(q, name or "taylor")
        case "family":
            return series_of_family(name, q, d)
    raise ValueError(f"unknown builder kind {kind!r} (known: product, sum, quad, ct, family)")


@cli.command()
@click.option("--builder", required=True, help="product:ID, sum:ID, quad:ID[:CASE], ct:ROUTE or family:ID.")
@click.option("--max-q", type=click.IntRange(min=0), default=10, show_default=True)
@click.option("--max-d", type=click.IntRange(min=0), help="d-bound (default: none).")
def series(builder: str, max_q: int, max_d: int | None) -> None:
    """Print a builder's truncated series as JSON.

    \b
    Example:
        capparelli-check series --builder product:aag --max-q 10
    """
    try:
        result = _build_series(builder, max_q, max_d)
    except (UnknownFamilyError, UnboundedFamilyError, SeriesError, ValueError) as exc:
        raise click.UsageError(str(exc)) from None
    click.echo(series_json(result))
