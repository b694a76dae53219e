"""Command-line entry point.

Exit codes: 0 success, 1 domain error (JSON on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from .config import Settings, load_settings, parse_extensions, parse_fractions
from .errors import DoeImpactError, EmptyAfterFilter
from .expertise import compute_matrix
from .history import IngestConfig, ingest_repository, load_alias_map
from .links.fetch import FixturePageFetcher, HttpPageFetcher
from .links.matching import aggregate_copy_stats, reports_to_csv
from .links.pipeline import MiningOutcome, mine_corpus, mine_fixtures
from .report import (
    dumps,
    manifest_for,
    repo_identity,
    simulate_report,
    summary_csv,
    summary_row,
    truck_factor_report,
    write_text,
)
from .scenario import LANGUAGE_COPY_RATES, run_sweep
from .stats import quartile_summary
from .truck_factor import ExpertThresholds, compute_truck_factor, identify_experts

logger = logging.getLogger("doeimpact")


class UsageError(Exception):
    pass


def _fractions_arg(text: str) -> tuple[float, ...]:
    try:
        values = parse_fractions(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    if not values:
        raise argparse.ArgumentTypeError("at least one fraction is required")
    return values


def _unit_float(text: str) -> float:
    value = float(text)
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"{value} is outside [0, 1]")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key-value config file; flags override it")
    common.add_argument("--seed", type=int, help="master seed for every random draw")
    common.add_argument("--jobs", type=int, help="repositories processed in parallel")
    common.add_argument("--out-dir", dest="out_dir", help="directory for report files")
    common.add_argument("--format", choices=("json", "csv"), help="format printed to stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    repo = argparse.ArgumentParser(add_help=False)
    repo.add_argument("--repo", action="append", required=True, help="local git repository (repeatable)")
    repo.add_argument("--branch", help="analysed branch (default HEAD)")
    repo.add_argument("--extensions", help="comma-separated allow-list, or '*' for all")
    repo.add_argument("--follow-renames", dest="follow_renames", action="store_true", default=None)
    repo.add_argument("--first-parent", dest="first_parent", action="store_true", default=None)
    repo.add_argument("--floor-days", dest="floor_days", action="store_true", default=None)
    repo.add_argument("--alias-file", type=Path, help="'alias canonical' identity pairs")

    tf = argparse.ArgumentParser(add_help=False)
    tf.add_argument("--normalized-min", dest="normalized_min", type=float)
    tf.add_argument("--absolute-min", dest="absolute_min", type=float)
    tf.add_argument("--coverage", type=float)

    parser = argparse.ArgumentParser(prog="doeimpact", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("analyze", parents=[common, repo], help="write ledger and DOE matrix (JSON + CSV)")
    sub.add_parser("truck-factor", parents=[common, repo, tf], help="DOE-based Truck Factor report")

    sim = sub.add_parser("simulate", parents=[common, repo, tf], help="GenAI copy-rate impact sweep")
    sim.add_argument("--fractions", type=_fractions_arg)
    sim.add_argument("--copy-rate", dest="copy_rate", type=_unit_float)
    sim.add_argument("--language-rates", dest="language_rates", action="store_true", default=None,
                     help="use per-language copy rates instead of the uniform one")
    sim.add_argument("--out", type=Path, help="report path (single repository only)")

    mine = sub.add_parser("mine", parents=[common], help="exact-match copy statistics for shared links")
    source = mine.add_mutually_exclusive_group(required=True)
    source.add_argument("--fixtures", type=Path, help="directory of recorded file-link pairs")
    source.add_argument("--corpus", type=Path, help="git repository, or directory of repositories, to scan")
    mine.add_argument("--pages", type=Path, help="recorded share pages for --corpus (default: fetch live)")
    mine.add_argument("--strict", dest="trim_whitespace", action="store_false", default=None,
                      help="compare lines byte-for-byte without trimming")
    mine.add_argument("--parallelism", type=int)

    st = sub.add_parser("stats", parents=[common], help="quartile summary of a CSV column")
    st.add_argument("--csv", type=Path, required=True)
    st.add_argument("--column", required=True)
    return parser


def _settings(args: argparse.Namespace) -> Settings:
    overrides = {k: v for k, v in vars(args).items() if v is not None}
    if "extensions" in overrides:
        overrides["extensions"] = parse_extensions(overrides["extensions"])
    try:
        return load_settings(args.config, overrides)
    except (OSError, ValueError) as exc:
        raise UsageError(f"bad configuration: {exc}") from exc


def _ingest_config(settings: Settings, alias_file: Path | None) -> IngestConfig:
    return IngestConfig(
        branch=settings.branch,
        extensions=settings.extensions,
        follow_renames=settings.follow_renames,
        first_parent=settings.first_parent,
        alias_map=load_alias_map(alias_file) if alias_file else {},
    )


def _thresholds(settings: Settings) -> ExpertThresholds:
    try:
        return ExpertThresholds(settings.normalized_min, settings.absolute_min)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _repo_out_dir(settings: Settings, repo: str, many: bool) -> Path:
    base = Path(settings.out_dir)
    return base / Path(repo).resolve().name if many else base


# -- per-repository workers (module level so they pickle for --jobs) --------------


def _analyze_one(repo: str, settings: Settings, alias_file: Path | None, many: bool) -> dict[str, Any]:
    ledger = ingest_repository(repo, _ingest_config(settings, alias_file))
    matrix = compute_matrix(ledger, settings.floor_days)
    manifest = manifest_for(
        "analyze", settings, {"repository": repo_identity(repo, settings.branch)}, ledger.reference_ts
    ).to_dict()
    out = _repo_out_dir(settings, repo, many)
    write_text(out / "ledger.json", dumps({"manifest": manifest, **ledger.to_dict()}))
    write_text(out / "ledger.csv", ledger.to_csv())
    write_text(out / "matrix.json", dumps({"manifest": manifest, **matrix.to_dict()}))
    write_text(out / "matrix.csv", matrix.to_csv())
    return {"repository": repo, "pairs": len(ledger.pairs), "files": len(ledger.file_sizes), "out_dir": str(out)}


def _truck_factor_one(repo: str, settings: Settings, alias_file: Path | None, many: bool) -> dict[str, Any]:
    thresholds = _thresholds(settings)
    ledger = ingest_repository(repo, _ingest_config(settings, alias_file))
    matrix = compute_matrix(ledger, settings.floor_days)
    result = compute_truck_factor(identify_experts(matrix, thresholds), settings.coverage)
    manifest = manifest_for(
        "truck-factor", settings, {"repository": repo_identity(repo, settings.branch)}, ledger.reference_ts
    )
    report = truck_factor_report(manifest, result, thresholds, len(matrix.max_doe))
    write_text(_repo_out_dir(settings, repo, many) / "truck_factor.json", dumps(report))
    return report


def _simulate_one(repo: str, settings: Settings, alias_file: Path | None, many: bool, out: Path | None) -> dict[str, Any]:
    thresholds = _thresholds(settings)
    ledger = ingest_repository(repo, _ingest_config(settings, alias_file))
    baseline, scenarios = run_sweep(
        ledger,
        fractions=settings.fractions,
        copy_rate=settings.copy_rate,
        master_seed=settings.seed,
        thresholds=thresholds,
        coverage=settings.coverage,
        floor_days=settings.floor_days,
        language_rates=LANGUAGE_COPY_RATES if settings.language_rates else None,
    )
    extra = {
        "repository": repo_identity(repo, settings.branch),
        "scenario_seeds": {repr(s.config.impact_fraction): s.config.rng_seed for s in scenarios},
    }
    manifest = manifest_for("simulate", settings, extra, ledger.reference_ts)
    report = simulate_report(manifest, baseline, scenarios, len(ledger.file_sizes))
    write_text(out or _repo_out_dir(settings, repo, many) / "simulate.json", dumps(report))
    return report


def _for_each_repo(worker: Callable[[str], dict[str, Any]], repos: Sequence[str], jobs: int) -> list[dict[str, Any]]:
    if jobs > 1 and len(repos) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(worker, repos))
    return [worker(repo) for repo in repos]


def _print(data: Any, fmt: str, csv_text: str | None = None) -> None:
    if fmt == "csv" and csv_text is not None:
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(dumps(data))


# -- commands ----------------------------------------------------------------


def cmd_analyze(args: argparse.Namespace, settings: Settings) -> int:
    many = len(args.repo) > 1
    results = _for_each_repo(partial(_analyze_one, settings=settings, alias_file=args.alias_file, many=many), args.repo, settings.jobs)
    _print(results if many else results[0], "json")
    return 0


def cmd_truck_factor(args: argparse.Namespace, settings: Settings) -> int:
    _thresholds(settings)
    many = len(args.repo) > 1
    reports = _for_each_repo(partial(_truck_factor_one, settings=settings, alias_file=args.alias_file, many=many), args.repo, settings.jobs)
    rows = [(Path(r).resolve().name, {"TF": rep["tf"]}) for r, rep in zip(args.repo, reports)]
    _print(reports if many else reports[0], settings.format, summary_csv(rows))
    return 0


def cmd_simulate(args: argparse.Namespace, settings: Settings) -> int:
    _thresholds(settings)
    if not settings.fractions:
        raise UsageError("--fractions must list at least one value")
    many = len(args.repo) > 1
    if many and args.out:
        raise UsageError("--out accepts a single repository; use --out-dir for several")
    worker = partial(_simulate_one, settings=settings, alias_file=args.alias_file, many=many, out=args.out)
    reports = _for_each_repo(worker, args.repo, settings.jobs)
    rows = [(Path(r).resolve().name, rep["summary"]) for r, rep in zip(args.repo, reports)]
    if many or settings.format == "csv":
        write_text(Path(settings.out_dir) / "summary.csv", summary_csv(rows))
    _print(reports if many else reports[0], settings.format, summary_csv(rows))
    return 0


def _mining_summary(outcome: MiningOutcome, settings: Settings, source: dict[str, str]) -> dict[str, Any]:
    if not outcome.records:
        raise EmptyAfterFilter("no shared links found (zero records)")
    if outcome.all_disabled:
        raise EmptyAfterFilter(f"all {len(outcome.failures)} shared links are disabled")
    summary = aggregate_copy_stats(outcome.reports)
    manifest = manifest_for("mine", settings, {"source": source})
    return {
        "manifest": manifest.to_dict(),
        "records": len(outcome.records),
        "pairs_matched": len(outcome.reports),
        "pairs_retained": sum(r.retained for r in outcome.reports),
        "failures": outcome.failure_counts(),
        "copy_percentage": summary.to_dict(),
        "turns": quartile_summary(outcome.turns).to_dict() if outcome.turns else None,
    }


def cmd_mine(args: argparse.Namespace, settings: Settings) -> int:
    if args.fixtures is not None:
        if not args.fixtures.is_dir():
            raise UsageError(f"{args.fixtures} is not a directory")
        outcome = mine_fixtures(args.fixtures, trim=settings.trim_whitespace)
        source = {"fixtures": args.fixtures.resolve().name}
    else:
        if not args.corpus.is_dir():
            raise UsageError(f"{args.corpus} is not a directory")
        if args.pages is not None:
            fetcher: Any = FixturePageFetcher(args.pages)
        else:
            fetcher = HttpPageFetcher()
        outcome = mine_corpus(args.corpus, fetcher, settings.parallelism, settings.trim_whitespace, settings.extensions)
        source = {"corpus": args.corpus.resolve().name}
    out = Path(settings.out_dir)
    write_text(out / "matches.csv", reports_to_csv(outcome.reports))
    summary = _mining_summary(outcome, settings, source)
    write_text(out / "copy_stats.json", dumps(summary))
    _print(summary, "json")
    return 0


def cmd_stats(args: argparse.Namespace, settings: Settings) -> int:
    try:
        with args.csv.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or args.column not in reader.fieldnames:
                raise UsageError(f"column {args.column!r} not in {args.csv}")
            values = [float(row[args.column]) for row in reader if row[args.column].strip()]
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    _print(quartile_summary(values).to_dict(), "json")
    return 0


COMMANDS = {
    "analyze": cmd_analyze,
    "truck-factor": cmd_truck_factor,
    "simulate": cmd_simulate,
    "mine": cmd_mine,
    "stats": cmd_stats,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        settings = _settings(args)
        return COMMANDS[args.command](args, settings)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except DoeImpactError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
