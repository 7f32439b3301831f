"""Event-level domain types shared by the ingestion and session stages."""

from __future__ import annotations

import fnmatch
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

LOG_NAME_PATTERN = "cowrie*.json"


class EventKind(Enum):
    COMMAND_INPUT = "cowrie.command.input"
    LOGIN_SUCCESS = "cowrie.login.success"
    LOGIN_FAILED = "cowrie.login.failed"
    SESSION_CONNECT = "cowrie.session.connect"
    SESSION_CLOSED = "cowrie.session.closed"
    OTHER = "other"


_KIND_BY_EVENTID = {
    kind.value: kind for kind in EventKind if kind is not EventKind.OTHER
}


def kind_for_eventid(eventid: str) -> EventKind:
    """Map a raw Cowrie eventid to its kind; unrecognized ids become OTHER."""
    return _KIND_BY_EVENTID.get(eventid, EventKind.OTHER)


@dataclass(frozen=True, slots=True)
class LogFileRef:
    """A discovered log file. The file name must match ``cowrie*.json``."""

    path: Path
    size_bytes: int

    def __post_init__(self) -> None:
        if not fnmatch.fnmatchcase(self.path.name, LOG_NAME_PATTERN):
            raise ValueError(f"not a cowrie log file name: {self.path.name}")
        if self.size_bytes < 0:
            raise ValueError("size_bytes must be non-negative")


@dataclass(frozen=True, slots=True)
class CowrieEvent:
    """One parsed log line.

    Invariants are enforced by the parser: COMMAND_INPUT events carry a
    non-empty (after trimming) ``input``; ``session`` is non-empty for every
    kind except OTHER. ``source_file``/``line_no`` are None/0 only for events
    built programmatically (e.g. by the corpus generator) before being
    written to disk.
    """

    kind: EventKind
    eventid: str
    timestamp: datetime
    session: str
    src_ip: str | None = None
    input: str | None = None
    source_file: LogFileRef | None = None
    line_no: int = 0


@dataclass(frozen=True, slots=True)
class MalformedLine:
    """A physical line that could not be turned into a CowrieEvent."""

    source_file: LogFileRef | None
    line_no: int
    reason: str


@dataclass
class ParseStats:
    """Ingestion counters. Invariant: lines_total == events_parsed + lines_malformed."""

    files_read: int = 0
    lines_total: int = 0
    events_parsed: int = 0
    lines_malformed: int = 0
    files_failed: int = 0

    def merge(self, other: "ParseStats") -> None:
        self.files_read += other.files_read
        self.lines_total += other.lines_total
        self.events_parsed += other.events_parsed
        self.lines_malformed += other.lines_malformed
        self.files_failed += other.files_failed


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 timestamp to a UTC datetime.

    Accepts the trailing-Z form Cowrie writes (with or without fractional
    seconds) as well as explicit offsets; naive timestamps are taken as UTC.
    Raises ValueError on anything else.
    """
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        return dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    """Render a UTC datetime as compact ISO-8601 with a Z suffix."""
    return dt.isoformat().replace("+00:00", "Z")
