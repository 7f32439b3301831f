"""Corpus-level aggregation and the CSV / HTML emitters.

Everything written here is deterministic for a fixed report: row order is
the analysis order, distribution order is (count desc, label asc), and
``generated_at`` is injectable so golden outputs stay byte-stable. The CSV
dialect is RFC 4180 (CRLF rows, minimal quoting, doubled quotes); it is
written by hand so the stdlib csv module stays available as an independent
reader in tests.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone
from html import escape
from pathlib import Path

from .classify import ArtifactKind, SessionAnalysis, SkillLabel
from .events import ParseStats, format_timestamp
from .rules import RuleSet

_SKILL_ORDER = (SkillLabel.LOW, SkillLabel.MEDIUM, SkillLabel.HIGH)


@dataclass(frozen=True, slots=True)
class AnalysisReport:
    rows: tuple[SessionAnalysis, ...]
    intent_distribution: dict[str, int]
    skill_distribution: dict[SkillLabel, int]
    parse_stats: ParseStats
    generated_at: datetime
    ruleset_version: str
    score_categories: tuple[str, ...]


def build_report(
    analyses: list[SessionAnalysis],
    stats: ParseStats,
    ruleset: RuleSet,
    generated_at: datetime | None = None,
) -> AnalysisReport:
    """Aggregate ordered analyses into distributions; ordering is preserved."""
    intent_counts = Counter(a.intent for a in analyses)
    skill_counts = Counter(a.skill for a in analyses)
    return AnalysisReport(
        rows=tuple(analyses),
        intent_distribution=dict(
            sorted(intent_counts.items(), key=lambda kv: (-kv[1], kv[0]))
        ),
        skill_distribution={
            skill: skill_counts[skill] for skill in _SKILL_ORDER if skill_counts[skill]
        },
        parse_stats=stats,
        generated_at=generated_at or datetime.now(timezone.utc),
        ruleset_version=ruleset.version,
        score_categories=ruleset.category_names(),
    )


def csv_header(report: AnalysisReport, include_commands: bool = False) -> list[str]:
    header = [
        "session_id",
        "src_ip",
        "first_seen",
        "last_seen",
        "command_count",
        "intent",
        "skill",
    ]
    header.extend(f"score_{name}" for name in report.score_categories)
    header.extend(["urls", "ipv4s"])
    if include_commands:
        header.append("commands")
    return header


def csv_row(analysis: SessionAnalysis, commands: list[str] | None = None) -> list[str]:
    """The CSV field values for one analysis, all pre-rendered as text."""
    urls = ";".join(
        a.value for a in analysis.artifacts if a.kind is ArtifactKind.URL
    )
    ipv4s = ";".join(
        a.value for a in analysis.artifacts if a.kind is ArtifactKind.IPV4
    )
    row = [
        analysis.session_id,
        analysis.src_ip or "",
        format_timestamp(analysis.first_seen),
        format_timestamp(analysis.last_seen),
        str(analysis.command_count),
        analysis.intent,
        analysis.skill.value,
    ]
    row.extend(str(v) for v in analysis.scores.values)
    row.extend([urls, ipv4s])
    if commands is not None:
        row.append("\n".join(commands).replace("\n", "\\n"))
    return row


def _csv_field(value: str) -> str:
    if any(ch in value for ch in ',"\n\r'):
        return '"' + value.replace('"', '""') + '"'
    return value


def emit_csv(
    report: AnalysisReport,
    out_path: Path | str,
    include_commands: bool = False,
    commands_by_session: dict[str, list[str]] | None = None,
) -> int:
    """Write the per-session table; returns the number of data rows."""
    lines = [",".join(_csv_field(f) for f in csv_header(report, include_commands))]
    for analysis in report.rows:
        commands = None
        if include_commands:
            commands = (commands_by_session or {}).get(analysis.session_id, [])
        lines.append(",".join(_csv_field(f) for f in csv_row(analysis, commands)))
    Path(out_path).write_text("\r\n".join(lines) + "\r\n", encoding="utf-8", newline="")
    return len(report.rows)


_HTML_STYLE = """
body { font-family: sans-serif; margin: 1.5em; color: #222; }
h1 { font-size: 1.4em; } h2 { font-size: 1.1em; margin-top: 1.4em; }
table { border-collapse: collapse; margin-top: 0.5em; }
th, td { border: 1px solid #bbb; padding: 3px 8px; font-size: 0.85em; text-align: left; }
th { background: #eef2f7; }
td.num { text-align: right; font-variant-numeric: tabular-nums; }
.summary td { border: none; padding: 1px 12px 1px 0; }
""".strip()


def emit_html(
    report: AnalysisReport,
    out_path: Path | str,
    commands_by_session: dict[str, list[str]] | None = None,
) -> None:
    """Write a single self-contained HTML report; all row data is escaped."""
    parts: list[str] = []
    add = parts.append
    add("<!DOCTYPE html>")
    add('<html lang="en"><head><meta charset="utf-8">')
    add("<title>Cowrie session triage report</title>")
    add(f"<style>{_HTML_STYLE}</style></head><body>")
    add("<h1>Cowrie session triage report</h1>")

    stats = report.parse_stats
    add('<table class="summary" id="summary">')
    for label, value in (
        ("Total sessions", len(report.rows)),
        ("Events parsed", stats.events_parsed),
        ("Malformed lines", stats.lines_malformed),
        ("Files read", stats.files_read),
        ("Files failed", stats.files_failed),
        ("Ruleset version", report.ruleset_version),
        ("Generated at", format_timestamp(report.generated_at)),
    ):
        add(f"<tr><td>{escape(str(label))}</td><td>{escape(str(value))}</td></tr>")
    add("</table>")

    add("<h2>Intent distribution</h2>")
    add('<table id="intent-distribution"><tr><th>Intent</th><th>Sessions</th></tr>')
    for intent, count in report.intent_distribution.items():
        add(f'<tr><td>{escape(intent)}</td><td class="num">{count}</td></tr>')
    add("</table>")

    add("<h2>Skill distribution</h2>")
    add('<table id="skill-distribution"><tr><th>Skill</th><th>Sessions</th></tr>')
    for skill, count in report.skill_distribution.items():
        add(f'<tr><td>{escape(skill.display)}</td><td class="num">{count}</td></tr>')
    add("</table>")

    add("<h2>Sessions</h2>")
    add('<table id="sessions"><tr>')
    headers = [
        "Session",
        "Source IP",
        "First seen",
        "Last seen",
        "Commands",
        "Intent",
        "Skill",
        *[f"Score: {name}" for name in report.score_categories],
        "URLs",
        "IPv4s",
        "Command input",
    ]
    add("".join(f"<th>{escape(h)}</th>" for h in headers))
    add("</tr>")
    commands_by_session = commands_by_session or {}
    for analysis in report.rows:
        urls = [a.value for a in analysis.artifacts if a.kind is ArtifactKind.URL]
        ipv4s = [a.value for a in analysis.artifacts if a.kind is ArtifactKind.IPV4]
        commands = commands_by_session.get(analysis.session_id, [])
        cells = [
            escape(analysis.session_id),
            escape(analysis.src_ip or ""),
            escape(format_timestamp(analysis.first_seen)),
            escape(format_timestamp(analysis.last_seen)),
            f'<span class="num">{analysis.command_count}</span>',
            escape(analysis.intent),
            escape(analysis.skill.display),
            *[str(v) for v in analysis.scores.values],
            "<br>".join(escape(u) for u in urls),
            "<br>".join(escape(ip) for ip in ipv4s),
            "<br>".join(escape(c) for c in commands),
        ]
        add("<tr>" + "".join(f"<td>{cell}</td>" for cell in cells) + "</tr>")
    add("</table>")
    add("</body></html>")
    Path(out_path).write_text("\n".join(parts) + "\n", encoding="utf-8")
