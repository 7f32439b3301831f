"""Grouping of the flat event stream into per-attacker sessions."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime

from .events import CowrieEvent, EventKind


@dataclass(frozen=True, slots=True)
class Session:
    """One attacker session, keyed by Cowrie's session id.

    ``commands`` holds (timestamp, command text) pairs in chronological
    order; ``first_seen``/``last_seen`` span every event of the id, not just
    commands. ``src_ip_changed`` flags the defensive anomaly of an id that
    carried more than one source address.
    """

    session_id: str
    src_ip: str | None
    first_seen: datetime
    last_seen: datetime
    commands: tuple[tuple[datetime, str], ...]
    total_event_count: int
    src_ip_changed: bool = False


def _event_order_key(event: CowrieEvent):
    # Canonical order: timestamp, then source position. Using this instead of
    # arrival order keeps the session map invariant under input permutation.
    ref = event.source_file
    return (event.timestamp, str(ref.path) if ref else "", event.line_no)


def group_into_sessions(events: list[CowrieEvent]) -> dict[str, Session]:
    """Group events by session id; events with an empty id are skipped."""
    buckets: dict[str, list[CowrieEvent]] = {}
    for event in events:
        if not event.session:
            continue
        bucket = buckets.get(event.session)
        if bucket is None:
            buckets[event.session] = [event]
        else:
            bucket.append(event)

    sessions: dict[str, Session] = {}
    for session_id, bucket in buckets.items():
        bucket.sort(key=_event_order_key)
        src_ip = None
        src_ip_changed = False
        commands: list[tuple[datetime, str]] = []
        for event in bucket:
            if event.src_ip:
                if src_ip is None:
                    src_ip = event.src_ip
                elif event.src_ip != src_ip:
                    src_ip_changed = True
            if event.kind is EventKind.COMMAND_INPUT:
                text = event.input
                # Parser guarantees non-blank input; skip defensively for
                # programmatically built events.
                if text and text.strip():
                    commands.append((event.timestamp, text))
        sessions[session_id] = Session(
            session_id=session_id,
            src_ip=src_ip,
            first_seen=bucket[0].timestamp,
            last_seen=bucket[-1].timestamp,
            commands=tuple(commands),
            total_event_count=len(bucket),
            src_ip_changed=src_ip_changed,
        )
    return sessions


def filter_command_sessions(sessions: dict[str, Session]) -> list[Session]:
    """The sessions that actually ran commands, ordered by (first_seen, id)."""
    selected = [s for s in sessions.values() if s.commands]
    selected.sort(key=lambda s: (s.first_seen, s.session_id))
    return selected


def session_duration(session: Session) -> float:
    """Wall-clock span of the session in seconds (0.0 for a single event)."""
    return (session.last_seen - session.first_seen).total_seconds()
