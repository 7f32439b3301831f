"""Shared builders and independent oracles for the test suite.

The oracles here (naive per-pattern scan, physical line counter) are kept
deliberately dumber than the production code paths they check.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone
from pathlib import Path

import pytest

from cowrie_triage.events import CowrieEvent, EventKind, LogFileRef
from cowrie_triage.rules import RuleSet
from cowrie_triage.sessions import Session, group_into_sessions

BASE_TIME = datetime(2025, 1, 5, 10, 0, 0, tzinfo=timezone.utc)


def write_log(directory: Path, name: str, lines: list[str]) -> Path:
    path = directory / name
    path.write_text("\n".join(lines) + "\n" if lines else "", encoding="utf-8")
    return path


def count_physical_lines(path: Path) -> int:
    """Independent line count: newline-separated, last line may lack one."""
    data = path.read_bytes()
    if not data:
        return 0
    return data.count(b"\n") + (0 if data.endswith(b"\n") else 1)


def make_ref(path: Path) -> LogFileRef:
    return LogFileRef(path=path, size_bytes=path.stat().st_size if path.exists() else 0)


def make_event(
    session: str = "a1b2c3d4",
    kind: EventKind = EventKind.COMMAND_INPUT,
    offset_s: float = 0.0,
    command: str | None = None,
    src_ip: str | None = "203.0.113.7",
    eventid: str | None = None,
    source_file: LogFileRef | None = None,
    line_no: int = 0,
) -> CowrieEvent:
    if kind is EventKind.COMMAND_INPUT and command is None:
        command = "uname -a"
    return CowrieEvent(
        kind=kind,
        eventid=eventid or (kind.value if kind is not EventKind.OTHER else "cowrie.custom"),
        timestamp=BASE_TIME + timedelta(seconds=offset_s),
        session=session,
        src_ip=src_ip,
        input=command if kind is EventKind.COMMAND_INPUT else None,
        source_file=source_file,
        line_no=line_no,
    )


def make_session(commands: list[tuple[float, str]], session_id: str = "s1") -> Session:
    """Build a Session through the real grouping path from command events."""
    events = [
        make_event(session=session_id, offset_s=offset, command=text, line_no=i + 1)
        for i, (offset, text) in enumerate(commands)
    ]
    return group_into_sessions(events)[session_id]


def naive_hits(command: str, ruleset: RuleSet) -> set[tuple[str, str]]:
    """Oracle: per-pattern substring scan, one hit per (category, pattern)."""
    return {
        (category.name, rule.pattern)
        for category in ruleset.categories
        for rule in category.keywords
        if rule.pattern in command
    }


def naive_scores(commands: list[str], ruleset: RuleSet) -> dict[str, int]:
    """Oracle scoring: weights summed over naive per-command hits."""
    totals = {category.name: 0 for category in ruleset.categories}
    for command in commands:
        for category in ruleset.categories:
            for rule in category.keywords:
                if rule.pattern in command:
                    totals[category.name] += rule.weight
    return totals


@pytest.fixture
def default_ruleset() -> RuleSet:
    from cowrie_triage.rules import load_ruleset

    return load_ruleset()
