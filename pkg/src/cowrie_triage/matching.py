"""Multi-pattern keyword matching and per-session scoring.

The production matcher is an Aho-Corasick automaton built once per rule
set, so a command is scanned in a single pass regardless of how many
keywords the dictionary holds. Its contract is exactly case-sensitive
literal substring search: the test suite holds it to a naive per-pattern
scan on every command it sees.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache
from typing import Iterable

from .rules import RuleSet, ScoreVector


class KeywordMatcher:
    """Aho-Corasick automaton over the distinct patterns of a rule set.

    Matching yields pattern ids; each id fans out to every
    (category, pattern, weight) slot that declares the pattern, so the same
    literal may feed several categories. A pattern is counted at most once
    per command per category, which keeps scores additive over command
    lists and immune to repetition padding within one command.
    """

    def __init__(self, ruleset: RuleSet) -> None:
        self._ruleset = ruleset
        patterns: list[str] = []
        pattern_ids: dict[str, int] = {}
        # (category index, weight) targets per pattern id, in category order.
        targets: list[list[tuple[int, int]]] = []
        # (category name, pattern) hit labels in rule-declaration order, with
        # the pattern id each corresponds to.
        hit_order: list[tuple[int, str, str]] = []
        for cat_index, category in enumerate(ruleset.categories):
            for rule in category.keywords:
                pid = pattern_ids.get(rule.pattern)
                if pid is None:
                    pid = len(patterns)
                    pattern_ids[rule.pattern] = pid
                    patterns.append(rule.pattern)
                    targets.append([])
                targets[pid].append((cat_index, rule.weight))
                hit_order.append((pid, category.name, rule.pattern))
        self._targets = targets
        self._hit_order = hit_order
        self._category_names = ruleset.category_names()
        self._build_automaton(patterns)

    def _build_automaton(self, patterns: list[str]) -> None:
        # goto is a list of char->state dicts; state 0 is the root.
        goto: list[dict[str, int]] = [{}]
        fail: list[int] = [0]
        out: list[list[int]] = [[]]
        for pid, pattern in enumerate(patterns):
            state = 0
            for ch in pattern:
                nxt = goto[state].get(ch)
                if nxt is None:
                    goto.append({})
                    fail.append(0)
                    out.append([])
                    nxt = len(goto) - 1
                    goto[state][ch] = nxt
                state = nxt
            out[state].append(pid)

        # BFS failure links; outputs of the failure target are folded into
        # each state so one lookup per character reports every suffix match.
        queue = deque(goto[0].values())
        while queue:
            state = queue.popleft()
            for ch, child in goto[state].items():
                queue.append(child)
                f = fail[state]
                while f and ch not in goto[f]:
                    f = fail[f]
                link = goto[f].get(ch, 0)
                fail[child] = link if link != child else 0
                if out[fail[child]]:
                    out[child].extend(out[fail[child]])
        self._goto = goto
        self._fail = fail
        self._out = out

    def matched_pattern_ids(self, command: str) -> set[int]:
        """Ids of every distinct pattern occurring as a substring of command."""
        goto = self._goto
        fail = self._fail
        out = self._out
        state = 0
        hits: set[int] = set()
        for ch in command:
            nxt = goto[state].get(ch)
            while nxt is None and state:
                state = fail[state]
                nxt = goto[state].get(ch)
            state = nxt if nxt is not None else 0
            if out[state]:
                hits.update(out[state])
        return hits

    def match(self, command: str) -> list[tuple[str, str]]:
        """(category name, pattern) hits for one command, in rule order."""
        hits = self.matched_pattern_ids(command)
        if not hits:
            return []
        return [(name, pattern) for pid, name, pattern in self._hit_order if pid in hits]

    def score(self, commands: Iterable[str]) -> ScoreVector:
        """Sum keyword weights per category over a command list."""
        totals = [0] * len(self._category_names)
        targets = self._targets
        for command in commands:
            for pid in self.matched_pattern_ids(command):
                for cat_index, weight in targets[pid]:
                    totals[cat_index] += weight
        return ScoreVector(categories=self._category_names, values=tuple(totals))


@lru_cache(maxsize=8)
def _matcher_for(ruleset: RuleSet) -> KeywordMatcher:
    return KeywordMatcher(ruleset)


def match_keywords(command: str, ruleset: RuleSet) -> list[tuple[str, str]]:
    """Hits for one command under a rule set; one hit per (category, pattern)."""
    return _matcher_for(ruleset).match(command)


def score_commands(commands: Iterable[str], ruleset: RuleSet) -> ScoreVector:
    """ScoreVector for a command list; the empty list scores all zeros."""
    return _matcher_for(ruleset).score(commands)
