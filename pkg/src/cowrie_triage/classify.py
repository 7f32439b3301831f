"""Per-session verdicts: primary intent, skill estimate, artifact extraction.

The intent decision is an ordered rule table, evaluated top to bottom:

    1. any MalwareDeployment hit        -> that category's intent label
    2. at most two commands             -> ShallowProbe
    3. every category scored zero       -> Unknown
    4. otherwise                        -> highest-scoring category,
                                           ties broken by rule-file order

Rule 1 outranks rule 2 on purpose: a one-command wget session is a
deployment, not a probe. Skill thresholds below are heuristics and are
deliberately kept as plain module constants so deployments can tune them.
"""

from __future__ import annotations

import re
import statistics
from dataclasses import dataclass
from datetime import datetime
from enum import Enum

from .matching import score_commands
from .rules import RuleSet, ScoreVector
from .sessions import Session

INTENT_SHALLOW_PROBE = "ShallowProbe"
INTENT_UNKNOWN = "Unknown"

# Category names the heuristics key on; custom rule files that omit them
# simply never trigger the corresponding clause.
MALWARE_CATEGORY = "MalwareDeployment"
DEFENSE_EVASION_CATEGORY = "DefenseEvasion"

# Skill thresholds: sub-2s median pacing separates scripted bursts from a
# human at a keyboard; five-plus commands at human pace reads as a manual
# operator, as does any attempt to cover tracks.
HIGH_SKILL_MIN_COMMANDS = 5
SLOW_GAP_SECONDS = 2.0
MEDIUM_SKILL_MIN_COMMANDS = 3
DOWNLOAD_KEYWORDS = ("wget", "curl", "tftp", "ftpget", "scp")
EXECUTE_KEYWORD = "chmod +x"
EXECUTE_PREFIX = "./"


class SkillLabel(Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"

    @property
    def display(self) -> str:
        return _SKILL_DISPLAY[self]


_SKILL_DISPLAY = {
    SkillLabel.LOW: "Low (Script Kiddie)",
    SkillLabel.MEDIUM: "Medium (Automated Script)",
    SkillLabel.HIGH: "High (Manual Operator)",
}


class ArtifactKind(Enum):
    URL = "url"
    IPV4 = "ipv4"


@dataclass(frozen=True, slots=True)
class Artifact:
    kind: ArtifactKind
    value: str
    source_command_index: int


@dataclass(frozen=True, slots=True)
class SessionAnalysis:
    session_id: str
    src_ip: str | None
    first_seen: datetime
    last_seen: datetime
    command_count: int
    scores: ScoreVector
    intent: str
    skill: SkillLabel
    artifacts: tuple[Artifact, ...]


def classify_intent(session: Session, scores: ScoreVector, ruleset: RuleSet) -> str:
    """Primary intent of a session under the ordered decision rules."""
    for category in ruleset.categories:
        if category.name == MALWARE_CATEGORY and scores.get(category.name) >= 1:
            return category.intent_label
    if len(session.commands) <= 2:
        return INTENT_SHALLOW_PROBE
    if scores.total() == 0:
        return INTENT_UNKNOWN
    best = max(zip(scores.values, ruleset.categories), key=lambda pair: pair[0])
    return best[1].intent_label


def _median_gap_seconds(session: Session) -> float | None:
    if len(session.commands) < 2:
        return None
    stamps = [ts for ts, _ in session.commands]
    gaps = [
        (later - earlier).total_seconds()
        for earlier, later in zip(stamps, stamps[1:])
    ]
    return statistics.median(gaps)


def estimate_skill(session: Session, scores: ScoreVector) -> SkillLabel:
    """Skill tier from command volume, pacing, and evasion/deployment signals."""
    count = len(session.commands)
    median_gap = _median_gap_seconds(session)
    if scores.get(DEFENSE_EVASION_CATEGORY) >= 1:
        return SkillLabel.HIGH
    if count >= HIGH_SKILL_MIN_COMMANDS and median_gap is not None and median_gap >= SLOW_GAP_SECONDS:
        return SkillLabel.HIGH
    if count >= MEDIUM_SKILL_MIN_COMMANDS and median_gap is not None and median_gap < SLOW_GAP_SECONDS:
        return SkillLabel.MEDIUM
    texts = [text for _, text in session.commands]
    downloads = any(kw in text for text in texts for kw in DOWNLOAD_KEYWORDS)
    executes = any(
        EXECUTE_KEYWORD in text or text.lstrip().startswith(EXECUTE_PREFIX) for text in texts
    )
    if downloads and executes:
        return SkillLabel.MEDIUM
    return SkillLabel.LOW


# A URL runs from its scheme to the first whitespace, quote, backtick or
# semicolon; an IPv4 literal must not sit inside a longer dotted run.
_URL_RE = re.compile(r"(?:https?|t?ftp)://[^\s\"'`;]*")
_IPV4_RE = re.compile(r"(?<![0-9.])(?:\d{1,3}\.){3}\d{1,3}(?![0-9.])")


def _valid_ipv4(text: str) -> bool:
    return all(int(octet) <= 255 for octet in text.split("."))


def extract_artifacts(commands: list[str]) -> list[Artifact]:
    """URLs and IPv4 literals, in command order then left to right."""
    artifacts: list[Artifact] = []
    for index, command in enumerate(commands):
        found: list[tuple[int, Artifact]] = []
        for match in _URL_RE.finditer(command):
            found.append(
                (match.start(), Artifact(ArtifactKind.URL, match.group(), index))
            )
        for match in _IPV4_RE.finditer(command):
            if _valid_ipv4(match.group()):
                found.append(
                    (match.start(), Artifact(ArtifactKind.IPV4, match.group(), index))
                )
        found.sort(key=lambda pair: pair[0])
        artifacts.extend(artifact for _, artifact in found)
    return artifacts


def analyze_session(session: Session, ruleset: RuleSet) -> SessionAnalysis:
    """Full verdict for one command-bearing session; pure in (session, ruleset)."""
    if not session.commands:
        raise ValueError(f"session {session.session_id} has no commands")
    texts = [text for _, text in session.commands]
    scores = score_commands(texts, ruleset)
    return SessionAnalysis(
        session_id=session.session_id,
        src_ip=session.src_ip,
        first_seen=session.first_seen,
        last_seen=session.last_seen,
        command_count=len(session.commands),
        scores=scores,
        intent=classify_intent(session, scores, ruleset),
        skill=estimate_skill(session, scores),
        artifacts=tuple(extract_artifacts(texts)),
    )
