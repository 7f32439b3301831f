"""Command-line entry point: analyze, generate, and validate subcommands.

Exit codes are part of the interface and stable:

    0  success
    1  fatal error (bad arguments, unreadable rules, I/O failure)
    2  no log files found in the logs directory
    3  validate found label mismatches
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from . import charts, report as reporting
from .classify import SessionAnalysis, analyze_session
from .events import parse_timestamp
from .ingest import LogDirectoryError, ingest_directory
from .rules import RuleFileError, RuleSet, load_ruleset
from .sessions import Session, filter_command_sessions, group_into_sessions
from .synth import CorpusPlanError, GroundTruth, default_plan, generate_corpus

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_NO_INPUT = 2
EXIT_MISMATCH = 3


@dataclass
class RunConfig:
    logs_dir: Path
    out_dir: Path
    rules_path: Path | None = None
    worker_count: int = 0  # 0: use logical CPU count
    csv_include_commands: bool = False
    pinned_timestamp: datetime | None = None
    summary_json: bool = False

    def resolved_workers(self) -> int:
        if self.worker_count > 0:
            return self.worker_count
        return os.cpu_count() or 1


@dataclass
class RunSummary:
    events_parsed: int
    lines_malformed: int
    files_read: int
    files_failed: int
    sessions_analyzed: int
    elapsed_seconds: float

    def as_dict(self) -> dict[str, object]:
        return {
            "events_parsed": self.events_parsed,
            "lines_malformed": self.lines_malformed,
            "files_read": self.files_read,
            "files_failed": self.files_failed,
            "sessions_analyzed": self.sessions_analyzed,
            "elapsed_seconds": round(self.elapsed_seconds, 3),
        }


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_FATAL


def _analyze_sessions(
    sessions: list[Session], ruleset: RuleSet, workers: int
) -> list[SessionAnalysis]:
    if workers > 1 and len(sessions) > 1:
        # Chunked so thread overhead stays negligible; chunk order is the
        # session order, so the output is identical for any worker count.
        chunk_size = max(1, len(sessions) // (workers * 4))
        chunks = [
            sessions[i : i + chunk_size] for i in range(0, len(sessions), chunk_size)
        ]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(
                lambda chunk: [analyze_session(s, ruleset) for s in chunk], chunks
            )
            return [analysis for part in parts for analysis in part]
    return [analyze_session(s, ruleset) for s in sessions]


def run_analyze(cfg: RunConfig) -> int:
    started = time.monotonic()
    if cfg.logs_dir.resolve() == cfg.out_dir.resolve():
        return _fail("logs directory and output directory must differ")

    try:
        ruleset = load_ruleset(cfg.rules_path)
    except RuleFileError as exc:
        return _fail(str(exc))

    workers = cfg.resolved_workers()
    try:
        events, stats = ingest_directory(cfg.logs_dir, workers=workers)
    except LogDirectoryError as exc:
        return _fail(str(exc))
    if stats.files_read == 0 and stats.files_failed == 0:
        print(f"no log files found in {cfg.logs_dir}", file=sys.stderr)
        return EXIT_NO_INPUT

    sessions = filter_command_sessions(group_into_sessions(events))
    analyses = _analyze_sessions(sessions, ruleset, workers)
    rep = reporting.build_report(analyses, stats, ruleset, generated_at=cfg.pinned_timestamp)
    commands_by_session = {s.session_id: [text for _, text in s.commands] for s in sessions}

    try:
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        reporting.emit_csv(
            rep,
            cfg.out_dir / "report.csv",
            include_commands=cfg.csv_include_commands,
            commands_by_session=commands_by_session,
        )
        reporting.emit_html(rep, cfg.out_dir / "report.html", commands_by_session)
        charts.emit_intent_chart(rep, cfg.out_dir / "intent_distribution.svg")
        charts.emit_skill_chart(rep, cfg.out_dir / "skill_distribution.svg")
    except OSError as exc:
        return _fail(f"cannot write report output: {exc}")

    summary = RunSummary(
        events_parsed=stats.events_parsed,
        lines_malformed=stats.lines_malformed,
        files_read=stats.files_read,
        files_failed=stats.files_failed,
        sessions_analyzed=len(rep.rows),
        elapsed_seconds=time.monotonic() - started,
    )
    if cfg.summary_json:
        print(json.dumps(summary.as_dict()))
    else:
        print(f"events parsed      {summary.events_parsed}")
        print(f"lines malformed    {summary.lines_malformed}")
        print(f"files read         {summary.files_read}")
        print(f"files failed       {summary.files_failed}")
        print(f"sessions analyzed  {summary.sessions_analyzed}")
        print(f"elapsed seconds    {summary.elapsed_seconds:.2f}")
        print(f"reports written to {cfg.out_dir}")
    return EXIT_OK


def run_generate(args: argparse.Namespace) -> int:
    try:
        plan = default_plan(
            seed=args.seed,
            total_events=args.events,
            file_count=args.files,
            malformed_rate=args.malformed_rate,
        )
        truth = generate_corpus(plan, args.out)
    except CorpusPlanError as exc:
        return _fail(str(exc))
    except OSError as exc:
        return _fail(f"cannot write corpus: {exc}")
    print(f"wrote {plan.total_events} lines across {plan.file_count} file(s) to {args.out}")
    print(f"valid lines        {truth.valid_lines}")
    print(f"malformed lines    {truth.malformed_lines}")
    print(f"labeled sessions   {len(truth.sessions)}")
    return EXIT_OK


def run_validate(args: argparse.Namespace) -> int:
    manifest_path = Path(args.manifest) if args.manifest else Path(args.logs) / "manifest.json"
    if not manifest_path.exists():
        return _fail(f"manifest not found: {manifest_path}")
    try:
        truth = GroundTruth.load(manifest_path)
    except (OSError, ValueError, KeyError) as exc:
        return _fail(f"cannot read manifest {manifest_path}: {exc}")
    try:
        ruleset = load_ruleset(args.rules)
    except RuleFileError as exc:
        return _fail(str(exc))
    try:
        events, _stats = ingest_directory(args.logs, workers=args.workers or os.cpu_count() or 1)
    except LogDirectoryError as exc:
        return _fail(str(exc))

    sessions = filter_command_sessions(group_into_sessions(events))
    intent_mismatches = 0
    skill_mismatches = 0
    unexpected = 0
    seen: set[str] = set()
    for session in sessions:
        analysis = analyze_session(session, ruleset)
        seen.add(session.session_id)
        expected = truth.sessions.get(session.session_id)
        if expected is None:
            unexpected += 1
            continue
        if analysis.intent != expected[0]:
            intent_mismatches += 1
        if analysis.skill.value != expected[1]:
            skill_mismatches += 1
    missing = sum(1 for sid in truth.sessions if sid not in seen)

    mismatches = intent_mismatches + skill_mismatches + unexpected
    print(f"sessions analyzed  {len(sessions)}")
    print(f"intent mismatches  {intent_mismatches}")
    print(f"skill mismatches   {skill_mismatches}")
    print(f"unexpected sessions {unexpected}")
    print(f"missing sessions   {missing}")
    print(f"{mismatches} mismatch{'es' if mismatches != 1 else ''}")
    return EXIT_OK if mismatches == 0 else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cowrie-triage",
        description="Classify Cowrie honeypot sessions and build reports",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the full pipeline over a logs directory")
    analyze.add_argument("--logs", default="logs", help="directory of cowrie*.json files (default: ./logs)")
    analyze.add_argument("--out", default="out", help="report output directory (default: ./out)")
    analyze.add_argument("--rules", default=None, help="rule file path (default: builtin dictionary)")
    analyze.add_argument("--workers", type=int, default=None, help="worker threads (default: logical CPUs)")
    analyze.add_argument(
        "--csv-include-commands",
        action="store_true",
        help="append a commands column to report.csv",
    )
    analyze.add_argument(
        "--pinned-timestamp",
        default=None,
        help="ISO-8601 instant to stamp reports with (for reproducible output)",
    )
    analyze.add_argument("--summary-json", action="store_true", help="print the run summary as JSON")

    generate = sub.add_parser("generate", help="write a seeded synthetic corpus plus manifest")
    generate.add_argument("--seed", type=int, default=42)
    generate.add_argument("--events", type=int, default=10_000, help="total physical lines to write")
    generate.add_argument("--files", type=int, default=1, help="number of cowrie-<k>.json files")
    generate.add_argument("--malformed-rate", type=float, default=0.0, dest="malformed_rate")
    generate.add_argument("--out", default="logs", help="corpus directory (default: ./logs)")

    validate = sub.add_parser("validate", help="check pipeline labels against a corpus manifest")
    validate.add_argument("--logs", default="logs")
    validate.add_argument("--manifest", default=None, help="default: <logs>/manifest.json")
    validate.add_argument("--rules", default=None)
    validate.add_argument("--workers", type=int, default=None)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "workers", None) is not None and args.workers < 1:
        return _fail("--workers must be a positive integer")
    if args.command == "analyze":
        pinned = None
        if args.pinned_timestamp:
            try:
                pinned = parse_timestamp(args.pinned_timestamp)
            except ValueError:
                return _fail(f"invalid --pinned-timestamp: {args.pinned_timestamp!r}")
        cfg = RunConfig(
            logs_dir=Path(args.logs),
            out_dir=Path(args.out),
            rules_path=Path(args.rules) if args.rules else None,
            worker_count=args.workers or 0,
            csv_include_commands=args.csv_include_commands,
            pinned_timestamp=pinned,
            summary_json=args.summary_json,
        )
        return run_analyze(cfg)
    if args.command == "generate":
        return run_generate(args)
    return run_validate(args)


if __name__ == "__main__":
    sys.exit(main())
