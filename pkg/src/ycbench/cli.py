"""Single executable with subcommands wiring the pipeline end to end.

    collect    windowed mention counts for a roster (cache-first)
    score      combined scores + leaderboard for a batch
    baseline   pre-application mention-count submission
    evaluate   score a submission against the resolved truth
    analyze    concentration statistics over a mentions file

Exit codes: 0 success, 1 usage/config/validation error, 2 partial external
failure. Standard output carries human-readable tables; logs go to stderr.
Every run writes a manifest JSON alongside its outputs, last, so a manifest
always describes a complete output set.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path

from . import io as yio
from .analytics import concentration_report, histogram_bins, loglog_points
from .baseline import baseline_predict
from .evaluation import (
    EvaluationReport,
    ResolvedTruth,
    evaluate_submission,
    resolve_truth,
    validate_submission,
)
from .ingest import (
    DEFAULT_API_KEY_ENV,
    CollectionWindow,
    CollectorSettings,
    apply_exclusions,
    collect_mentions,
    load_blocklist,
    load_roster,
    load_traction,
)
from .models import (
    ConfigurationError,
    LoadError,
    ScoringConfig,
    config_fingerprint,
    validate_config,
)
from .scoring import BatchScores, score_batch

log = logging.getLogger("ycbench")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARTIAL = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the harness reserves 2 for partial
    # external failure, so remap.
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        raise SystemExit(self.exit_with(message))

    def exit_with(self, message: str) -> int:
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        return EXIT_USAGE


@dataclass
class RunManifest:
    command: str
    config_fingerprint: str | None
    input_paths: list[str]
    output_paths: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.started_at = datetime.now(timezone.utc)

    def write(self, path: Path) -> None:
        payload = {
            "command": self.command,
            "config_fingerprint": self.config_fingerprint,
            "input_paths": self.input_paths,
            "output_paths": self.output_paths,
            "started_at": yio.format_timestamp(self.started_at),
            "finished_at": yio.format_timestamp(datetime.now(timezone.utc)),
            "warnings": self.warnings,
        }
        yio.write_json(path, payload)


def _parse_window(text: str, label: str) -> CollectionWindow:
    try:
        start_text, _, end_text = text.partition("..")
        return CollectionWindow(
            label=label,
            start=date.fromisoformat(start_text),
            end=date.fromisoformat(end_text),
        )
    except ValueError as exc:
        raise LoadError(f"bad window {text!r} (expected START..END ISO dates): {exc}") from None


def _load_config(path: str | None) -> ScoringConfig:
    config = yio.read_config_file(path) if path else ScoringConfig()
    violations = validate_config(config)
    if violations:
        raise ConfigurationError(
            "invalid scoring config:\n  " + "\n  ".join(violations)
        )
    return config


def _roster_with_exclusions(roster_path: str, blocklist_path: str | None):
    roster = load_roster(roster_path)
    if blocklist_path:
        roster = apply_exclusions(roster, load_blocklist(blocklist_path))
    return roster


# -- subcommands -----------------------------------------------------------


def cmd_collect(args: argparse.Namespace) -> int:
    window = _parse_window(args.window, args.label)
    roster = _roster_with_exclusions(args.roster, args.blocklist)
    candidates = [r.domain for r in roster if not r.excluded]
    settings = CollectorSettings(
        cache_dir=Path(args.cache_dir),
        max_requests_per_second=args.rps,
        max_retries=args.max_retries,
        api_key_env_name=args.api_key_env,
        max_concurrency=args.concurrency,
    )
    manifest = RunManifest(
        command="collect",
        config_fingerprint=None,
        input_paths=[args.roster] + ([args.blocklist] if args.blocklist else []),
    )
    result = collect_mentions(candidates, window, settings)
    out = Path(args.out)
    yio.write_mentions_jsonl(out, result.records)
    manifest.output_paths.append(str(out))
    print(
        f"collected {len(result.records)}/{len(candidates)} domains "
        f"for window {window.start}..{window.end}"
    )
    if result.errors:
        errors_path = out.with_suffix(".errors.json")
        yio.write_json(errors_path, dict(sorted(result.errors.items())))
        manifest.output_paths.append(str(errors_path))
        manifest.warnings.append(
            f"partial_failure domains={len(result.errors)} see={errors_path}"
        )
        log.error("collection failed for %d domains; see %s", len(result.errors), errors_path)
    manifest.write(out.with_suffix(".manifest.json"))
    return EXIT_PARTIAL if result.errors else EXIT_OK


def cmd_score(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    roster = _roster_with_exclusions(args.roster, args.blocklist)
    observations = (
        load_traction(args.traction, roster, config) if args.traction else []
    )
    mentions = yio.read_mentions_jsonl(args.mentions)
    warnings: list[str] = []
    scores = score_batch(roster, observations, mentions, config, warning_sink=warnings)

    out = Path(args.out)
    yio.write_scores_jsonl(out, scores.scores)
    leaderboard = out.with_suffix(".leaderboard.csv")
    yio.write_leaderboard_csv(leaderboard, scores.scores)

    manifest = RunManifest(
        command="score",
        config_fingerprint=scores.config_fingerprint,
        input_paths=[
            p for p in (args.roster, args.traction, args.mentions, args.config, args.blocklist) if p
        ],
        output_paths=[str(out), str(leaderboard)],
        warnings=warnings,
    )
    manifest.write(out.with_suffix(".manifest.json"))

    print(f"scored {len(scores.scores)} startups (batch {scores.batch}, "
          f"config {scores.config_fingerprint})")
    print(f"{'rank':>4}  {'score':>10}  {'driver':9} domain")
    for rank, b in enumerate(scores.scores[:10], start=1):
        print(f"{rank:>4}  {b.pre_demo_day_score:>10.2f}  {b.driver.name:9} {b.domain}")
    return EXIT_OK


def cmd_baseline(args: argparse.Namespace) -> int:
    roster = _roster_with_exclusions(args.roster, args.blocklist)
    mentions = yio.read_mentions_jsonl(args.pre_mentions)
    submission = baseline_predict(mentions, roster, args.k)
    out = Path(args.out)
    yio.write_submission_json(out, submission)
    manifest = RunManifest(
        command="baseline",
        config_fingerprint=None,
        input_paths=[p for p in (args.pre_mentions, args.roster, args.blocklist) if p],
        output_paths=[str(out)],
    )
    manifest.write(out.with_suffix(".manifest.json"))
    print(f"baseline submission: top {args.k} of {len(mentions)} counted domains -> {out}")
    return EXIT_OK


def _truth_from_args(args: argparse.Namespace, roster_size: int | None) -> ResolvedTruth:
    if args.truth:
        data = json.loads(Path(args.truth).read_text(encoding="utf-8"))
        return ResolvedTruth(
            batch=str(data["batch"]),
            top_k_domains=tuple(str(d).lower() for d in data["top_k_domains"]),
            high_traction_domains=frozenset(
                str(d).lower() for d in data["high_traction_domains"]
            ),
            resolved_at=date.fromisoformat(str(data["resolved_at"])),
        )
    breakdowns = yio.read_scores_jsonl(args.scores)
    batch_scores = BatchScores(
        batch=args.batch or "?",
        scores=tuple(breakdowns),
        config_fingerprint="",
    )
    high_traction = set(yio.read_domain_lines(args.high_traction))
    resolved_at = (
        date.fromisoformat(args.resolved_at) if args.resolved_at else date.today()
    )
    return resolve_truth(
        batch_scores,
        high_traction,
        resolved_at=resolved_at,
        top_fraction=args.top_fraction,
        roster_size=roster_size,
        k=args.k,
    )


def _print_report(report: EvaluationReport, truth: ResolvedTruth, n: int) -> None:
    k = len(truth.top_k_domains)
    m = len(truth.high_traction_domains)
    hit_count = round(report.precision_at_k * k)
    print(f"{'metric':24} {'value':>10}   {'random':>8}")
    print(f"{'precision@' + str(k):24} {report.precision_at_k:>10.3f}   {k / n:>8.3f}")
    if report.recall_at_m is None:
        print(f"{'recall@m':24} {'n/a':>10}   {'':>8}")
    else:
        print(f"{'recall@' + str(m):24} {report.recall_at_m:>10.3f}   {k / n:>8.3f}")
    print(f"{'lift (exact, vs k/n)':24} {report.lift_exact:>9.2f}x   {'1.00x':>8}")
    print(f"{'lift (vs flat 10%)':24} {report.lift_rounded:>9.2f}x   {'1.00x':>8}")
    print(f"{'horizon':24} {report.horizon_days:>6} days")
    print(f"hits   ({hit_count:2}): {' '.join(sorted(report.hits))}")
    print(f"misses ({k - hit_count:2}): {' '.join(sorted(report.misses))}")


def cmd_evaluate(args: argparse.Namespace) -> int:
    if bool(args.truth) == bool(args.scores):
        raise ConfigurationError("exactly one of --truth or --scores is required")
    if args.scores and not args.high_traction:
        raise ConfigurationError("--scores requires --high-traction")

    roster = load_roster(args.roster) if args.roster else None
    roster_size = args.roster_size or (len(roster) if roster else None)
    if roster_size is None:
        raise ConfigurationError("need --roster or --roster-size for the random baseline")

    submission = yio.read_submission_json(args.submission)
    if roster is not None:
        if args.blocklist:
            roster = apply_exclusions(roster, load_blocklist(args.blocklist))
        problems = validate_submission(submission, roster)
        if problems:
            raise LoadError(
                f"{args.submission}: invalid submission:\n  " + "\n  ".join(problems)
            )

    truth = _truth_from_args(args, roster_size)
    report = evaluate_submission(submission, truth, roster_size)
    _print_report(report, truth, roster_size)

    if args.out:
        payload = {
            "predictor_name": submission.predictor_name,
            "batch": truth.batch,
            "k": len(truth.top_k_domains),
            "m": len(truth.high_traction_domains),
            "n": roster_size,
            "precision_at_k": report.precision_at_k,
            "recall_at_m": report.recall_at_m,
            "lift_exact": report.lift_exact,
            "lift_rounded": report.lift_rounded,
            "hits": sorted(report.hits),
            "misses": sorted(report.misses),
            "horizon_days": report.horizon_days,
        }
        out = Path(args.out)
        yio.write_json(out, payload)
        manifest = RunManifest(
            command="evaluate",
            config_fingerprint=None,
            input_paths=[
                p
                for p in (
                    args.submission, args.truth, args.scores,
                    args.high_traction, args.roster, args.blocklist,
                )
                if p
            ],
            output_paths=[str(out)],
        )
        manifest.write(out.with_suffix(".manifest.json"))
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    mentions = yio.read_mentions_jsonl(args.mentions)
    counts = [rec.count for rec in mentions]
    report = concentration_report(counts)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(
        command="analyze", config_fingerprint=None, input_paths=[args.mentions]
    )
    if report.gini is None:
        manifest.warnings.append("all_zero_counts: concentration not applicable")
        log.warning("all counts are zero; concentration statistics not applicable")

    payload = {
        "n_domains": len(counts),
        "total_mentions": int(sum(counts)),
        "gini": report.gini,
        "top_shares": {f"{f:g}": s for f, s in sorted(report.top_shares.items())},
        "powerlaw_slope": report.powerlaw_slope,
        "powerlaw_r2": report.powerlaw_r2,
        "lorenz_points": [list(p) for p in report.lorenz_points],
    }
    concentration = out_dir / "concentration.json"
    yio.write_json(concentration, payload)

    lorenz_csv = out_dir / "lorenz.csv"
    with lorenz_csv.open("w", encoding="utf-8", newline="") as fh:
        fh.write("population_fraction,mention_fraction\n")
        for x, y in report.lorenz_points:
            fh.write(f"{x!r},{y!r}\n")
    loglog_csv = out_dir / "loglog.csv"
    with loglog_csv.open("w", encoding="utf-8", newline="") as fh:
        fh.write("rank,count,log10_rank,log10_count\n")
        for rank, value, lr, lc in loglog_points(counts):
            fh.write(f"{rank},{value!r},{lr!r},{lc!r}\n")
    histogram_csv = out_dir / "histogram.csv"
    with histogram_csv.open("w", encoding="utf-8", newline="") as fh:
        fh.write("bin_low,bin_high,n_domains\n")
        for low, high, n in histogram_bins(counts):
            fh.write(f"{low!r},{high!r},{n}\n")

    manifest.output_paths = [
        str(concentration), str(lorenz_csv), str(loglog_csv), str(histogram_csv)
    ]
    manifest.write(out_dir / "manifest.json")

    gini_text = "n/a" if report.gini is None else f"{report.gini:.4f}"
    t10 = report.top_shares.get(0.10)
    t02 = report.top_shares.get(0.02)
    print(f"domains: {len(counts)}  total mentions: {int(sum(counts))}")
    print(f"gini: {gini_text}")
    if t10 is not None:
        print(f"top 10% share: {t10:.4f}")
    if t02 is not None:
        print(f"top 2% share: {t02:.4f}")
    if report.powerlaw_slope is not None:
        print(f"power-law slope: {report.powerlaw_slope:.3f} (r2 {report.powerlaw_r2:.4f})")
    return EXIT_OK


# -- argument wiring ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ycbench", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("collect", help="collect windowed mention counts")
    p.add_argument("--roster", required=True, help="roster CSV")
    p.add_argument("--window", required=True, help="START..END (ISO dates, inclusive)")
    p.add_argument("--out", required=True, help="mentions JSONL to write")
    p.add_argument("--blocklist", help="domain blocklist to exclude first")
    p.add_argument("--cache-dir", required=True, help="response cache directory")
    p.add_argument("--label", default="custom", help="window label (default custom)")
    p.add_argument("--api-key-env", default=DEFAULT_API_KEY_ENV,
                   help=f"env var holding the provider key (default {DEFAULT_API_KEY_ENV})")
    p.add_argument("--rps", type=float, default=5.0, help="max requests per second")
    p.add_argument("--max-retries", type=int, default=3)
    p.add_argument("--concurrency", type=int, default=1, help="max in-flight requests")
    p.set_defaults(func=cmd_collect)

    p = sub.add_parser("score", help="score a batch")
    p.add_argument("--roster", required=True)
    p.add_argument("--traction", help="traction JSONL (optional)")
    p.add_argument("--mentions", required=True, help="batch-window mentions JSONL")
    p.add_argument("--config", help="scoring config file (defaults shipped)")
    p.add_argument("--blocklist")
    p.add_argument("--out", required=True, help="scores JSONL to write")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("baseline", help="pre-application mention-count submission")
    p.add_argument("--pre-mentions", required=True, help="pre-window mentions JSONL")
    p.add_argument("--roster", required=True)
    p.add_argument("--blocklist")
    p.add_argument("--k", type=int, required=True, help="submission size")
    p.add_argument("--out", required=True, help="submission JSON to write")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("evaluate", help="evaluate a submission")
    p.add_argument("--submission", required=True, help="submission JSON")
    p.add_argument("--truth", help="resolved-truth JSON")
    p.add_argument("--scores", help="scores JSONL (resolve truth on the fly)")
    p.add_argument("--high-traction", help="high-traction domain list (with --scores)")
    p.add_argument("--k", type=int, help="override the top-K size (with --scores)")
    p.add_argument("--top-fraction", type=float, default=0.10)
    p.add_argument("--batch", help="batch tag for the report (with --scores)")
    p.add_argument("--resolved-at", help="resolution date (ISO, with --scores)")
    p.add_argument("--roster", help="roster CSV: sets N and validates the submission")
    p.add_argument("--roster-size", type=int, help="N without a roster file")
    p.add_argument("--blocklist")
    p.add_argument("--out", help="report JSON to write")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("analyze", help="concentration statistics for a mentions file")
    p.add_argument("--mentions", required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_analyze)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LoadError, ConfigurationError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
