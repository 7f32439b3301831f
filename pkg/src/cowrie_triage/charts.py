"""SVG chart rendering for the two summary figures.

Output must be byte-identical across runs and worker counts, so the
figures are drawn through the object-oriented matplotlib API (no pyplot
state) with a pinned ``svg.hashsalt``, text kept as real SVG text, and the
Date metadata stripped. Every bar and slice carries a ``label: value``
text element so the numbers can be read back out of the file.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

from .classify import SkillLabel
from .report import AnalysisReport

_SVG_RC = {
    "svg.hashsalt": "cowrie-triage",
    "svg.fonttype": "none",
    "font.family": "sans-serif",
    "font.size": 10.0,
}

_BAR_COLOR = "#4878a8"
_PIE_COLORS = {
    SkillLabel.LOW: "#8ab8d8",
    SkillLabel.MEDIUM: "#e0a048",
    SkillLabel.HIGH: "#c05850",
}


def percentage_tenths(count: int, total: int) -> str:
    """count/total as a percentage with one decimal, rounded half-up.

    Integer arithmetic throughout, so 2/3 is exactly "66.7" and ties like
    1/8 round up to "12.5" regardless of float representation.
    """
    if total <= 0:
        raise ValueError("total must be positive")
    tenths = (2000 * count + total) // (2 * total)
    return f"{tenths // 10}.{tenths % 10}"


def _save_svg(fig: Figure, out_path: Path | str) -> None:
    with matplotlib.rc_context(_SVG_RC):
        fig.savefig(str(out_path), format="svg", metadata={"Date": None})


def emit_intent_chart(report: AnalysisReport, out_path: Path | str) -> None:
    """Bar chart of sessions per intent, tallest first, labels alphabetical on ties."""
    items = sorted(report.intent_distribution.items(), key=lambda kv: (-kv[1], kv[0]))
    with matplotlib.rc_context(_SVG_RC):
        fig = Figure(figsize=(8.0, 4.5))
        ax = fig.subplots()
        if items:
            labels = [intent for intent, _ in items]
            counts = [count for _, count in items]
            positions = range(len(items))
            ax.bar(positions, counts, color=_BAR_COLOR)
            ax.set_xticks(list(positions))
            ax.set_xticklabels(labels, rotation=20, ha="right")
            for pos, (intent, count) in enumerate(items):
                ax.annotate(
                    f"{intent}: {count}",
                    (pos, count),
                    ha="center",
                    va="bottom",
                    fontsize=8,
                )
            ax.set_ylim(0, max(counts) * 1.15)
        else:
            ax.text(0.5, 0.5, "no sessions", ha="center", va="center")
            ax.set_xticks([])
            ax.set_yticks([])
        ax.set_ylabel("Sessions")
        ax.set_title("Session intent distribution")
        fig.subplots_adjust(bottom=0.25)
    _save_svg(fig, out_path)


def emit_skill_chart(report: AnalysisReport, out_path: Path | str) -> None:
    """Pie chart of skill levels in fixed Low, Medium, High order."""
    items = [
        (skill, count)
        for skill, count in report.skill_distribution.items()
        if count > 0
    ]
    total = sum(count for _, count in items)
    with matplotlib.rc_context(_SVG_RC):
        fig = Figure(figsize=(6.5, 5.0))
        ax = fig.subplots()
        if items:
            labels = [
                f"{skill.display}: {percentage_tenths(count, total)}%"
                for skill, count in items
            ]
            ax.pie(
                [count for _, count in items],
                labels=labels,
                colors=[_PIE_COLORS[skill] for skill, _ in items],
                startangle=90,
                counterclock=False,
                wedgeprops={"linewidth": 1.0, "edgecolor": "white"},
            )
        else:
            ax.text(0.5, 0.5, "no sessions", ha="center", va="center")
        ax.set_aspect("equal")
        ax.set_title("Skill level distribution")
    _save_svg(fig, out_path)
