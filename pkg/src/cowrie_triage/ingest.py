"""Discovery and fault-tolerant parsing of Cowrie ndjson log files.

Bad lines never abort a run: every physical line either becomes a
CowrieEvent or is counted as malformed, so that
``events_parsed + lines_malformed == lines_total`` holds exactly for any
input. Files are read as bytes and decoded per line, so invalid UTF-8
poisons only the line it sits on.
"""

from __future__ import annotations

import fnmatch
import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .events import (
    LOG_NAME_PATTERN,
    CowrieEvent,
    EventKind,
    LogFileRef,
    MalformedLine,
    ParseStats,
    kind_for_eventid,
    parse_timestamp,
)


class LogDirectoryError(Exception):
    """The logs directory is missing or unreadable (fatal)."""


def discover_log_files(directory: Path | str) -> list[LogFileRef]:
    """Return the regular files in ``directory`` named ``cowrie*.json``.

    Non-recursive; results are sorted lexicographically by file name.
    Rotated files such as ``cowrie.json.2025-01-01`` do not match.
    """
    directory = Path(directory)
    if not directory.exists():
        raise LogDirectoryError(f"logs directory not found: {directory}")
    if not directory.is_dir():
        raise LogDirectoryError(f"not a directory: {directory}")
    try:
        entries = sorted(directory.iterdir(), key=lambda p: p.name)
    except OSError as exc:
        raise LogDirectoryError(f"cannot read logs directory {directory}: {exc}") from exc
    refs = []
    for entry in entries:
        if not fnmatch.fnmatchcase(entry.name, LOG_NAME_PATTERN) or not entry.is_file():
            continue
        try:
            size = entry.stat().st_size
        except OSError:
            # Vanished after listing; keep the ref and let the read fail softly.
            size = 0
        refs.append(LogFileRef(path=entry, size_bytes=size))
    return refs


def parse_event_line(
    text: str, source: LogFileRef | None, line_no: int
) -> CowrieEvent | MalformedLine:
    """Parse one log line into a CowrieEvent, or classify why it is malformed.

    A valid line is a JSON object carrying at least ``eventid``, ``timestamp``
    and ``session``. Extra keys are ignored (real Cowrie lines carry many).
    ``input`` is required, and must be non-empty after trimming, exactly when
    the eventid is ``cowrie.command.input``; ``session`` may be empty only for
    unrecognized event kinds.
    """

    def bad(reason: str) -> MalformedLine:
        return MalformedLine(source_file=source, line_no=line_no, reason=reason)

    try:
        obj = json.loads(text)
    except (json.JSONDecodeError, UnicodeDecodeError):
        return bad("invalid json")
    if not isinstance(obj, dict):
        return bad("not a json object")

    eventid = obj.get("eventid")
    raw_ts = obj.get("timestamp")
    session = obj.get("session")
    if not isinstance(eventid, str) or not eventid:
        return bad("missing eventid")
    if not isinstance(raw_ts, str):
        return bad("missing timestamp")
    if not isinstance(session, str):
        return bad("missing session")

    try:
        timestamp = parse_timestamp(raw_ts)
    except ValueError:
        return bad(f"unparseable timestamp: {raw_ts!r}")

    kind = kind_for_eventid(eventid)
    if kind is not EventKind.OTHER and not session:
        return bad("empty session id")

    command = None
    if kind is EventKind.COMMAND_INPUT:
        command = obj.get("input")
        if not isinstance(command, str) or not command.strip():
            return bad("command event without input")

    src_ip = obj.get("src_ip")
    if not isinstance(src_ip, str) or not src_ip:
        src_ip = None

    return CowrieEvent(
        kind=kind,
        eventid=eventid,
        timestamp=timestamp,
        session=session,
        src_ip=src_ip,
        input=command,
        source_file=source,
        line_no=line_no,
    )


def parse_log_file(ref: LogFileRef) -> tuple[list[CowrieEvent], ParseStats]:
    """Parse one file; an unreadable file yields no events and files_failed=1."""
    stats = ParseStats()
    try:
        data = ref.path.read_bytes()
    except OSError:
        stats.files_failed = 1
        return [], stats

    stats.files_read = 1
    events: list[CowrieEvent] = []
    raw_lines = data.split(b"\n")
    if raw_lines and raw_lines[-1] == b"":
        # Nothing after the final newline is not a line; a newline-free
        # trailing line still is.
        raw_lines.pop()

    append = events.append
    for line_no, raw in enumerate(raw_lines, start=1):
        stats.lines_total += 1
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError:
            stats.lines_malformed += 1
            continue
        parsed = parse_event_line(text, ref, line_no)
        if isinstance(parsed, MalformedLine):
            stats.lines_malformed += 1
        else:
            stats.events_parsed += 1
            append(parsed)
    return events, stats


def ingest_directory(
    directory: Path | str, workers: int = 1
) -> tuple[list[CowrieEvent], ParseStats]:
    """Discover and parse every matching file under ``directory``.

    Files may be parsed concurrently but the consolidated event list is
    always assembled in discovery (lexicographic) order, so the result is
    independent of ``workers``.
    """
    refs = discover_log_files(directory)
    if workers > 1 and len(refs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(parse_log_file, refs))
    else:
        results = [parse_log_file(ref) for ref in refs]

    events: list[CowrieEvent] = []
    total = ParseStats()
    for file_events, file_stats in results:
        events.extend(file_events)
        total.merge(file_stats)
    return events, total
