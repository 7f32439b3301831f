"""The keyword rule set: ordered TTP categories of weighted literal patterns.

Category order matters (it is the tie-break priority for intent
classification), so rule files are ordered JSON arrays and the loader
rejects anything it does not understand rather than guessing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path


class RuleFileError(Exception):
    """A rule file failed schema validation (fatal)."""


@dataclass(frozen=True, slots=True)
class KeywordRule:
    pattern: str
    weight: int = 1


@dataclass(frozen=True, slots=True)
class Category:
    name: str
    intent_label: str
    keywords: tuple[KeywordRule, ...]


@dataclass(frozen=True, slots=True)
class RuleSet:
    version: str
    categories: tuple[Category, ...]

    def category_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self.categories)


@dataclass(frozen=True, slots=True)
class ScoreVector:
    """Per-category scores, aligned to the rule set's category order."""

    categories: tuple[str, ...]
    values: tuple[int, ...]

    def get(self, name: str) -> int:
        """Score for a category name; 0 if the rule set has no such category."""
        try:
            return self.values[self.categories.index(name)]
        except ValueError:
            return 0

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.categories, self.values))

    def total(self) -> int:
        return sum(self.values)

    def __add__(self, other: "ScoreVector") -> "ScoreVector":
        if self.categories != other.categories:
            raise ValueError("cannot add score vectors from different rule sets")
        return ScoreVector(
            categories=self.categories,
            values=tuple(a + b for a, b in zip(self.values, other.values)),
        )


def _check_keys(obj: dict, allowed: set[str], required: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise RuleFileError(f"{where}: unknown key(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise RuleFileError(f"{where}: missing key(s) {sorted(missing)}")


def _parse_keyword(obj: object, where: str) -> KeywordRule:
    if not isinstance(obj, dict):
        raise RuleFileError(f"{where}: keyword must be an object")
    _check_keys(obj, {"pattern", "weight"}, {"pattern"}, where)
    pattern = obj["pattern"]
    if not isinstance(pattern, str) or not pattern:
        raise RuleFileError(f"{where}: pattern must be a non-empty string")
    weight = obj.get("weight", 1)
    if not isinstance(weight, int) or isinstance(weight, bool) or weight < 1:
        raise RuleFileError(f"{where}: weight must be an integer >= 1")
    return KeywordRule(pattern=pattern, weight=weight)


def _parse_category(obj: object, where: str) -> Category:
    if not isinstance(obj, dict):
        raise RuleFileError(f"{where}: category must be an object")
    _check_keys(obj, {"name", "intent_label", "keywords"}, {"name", "intent_label", "keywords"}, where)
    name = obj["name"]
    intent_label = obj["intent_label"]
    keywords = obj["keywords"]
    if not isinstance(name, str) or not name:
        raise RuleFileError(f"{where}: name must be a non-empty string")
    if not isinstance(intent_label, str) or not intent_label:
        raise RuleFileError(f"{where}: intent_label must be a non-empty string")
    if not isinstance(keywords, list) or not keywords:
        raise RuleFileError(f"{where}: keywords must be a non-empty array")
    parsed = tuple(
        _parse_keyword(kw, f"{where}.keywords[{i}]") for i, kw in enumerate(keywords)
    )
    patterns = [kw.pattern for kw in parsed]
    if len(set(patterns)) != len(patterns):
        raise RuleFileError(f"{where}: duplicate keyword pattern")
    return Category(name=name, intent_label=intent_label, keywords=parsed)


def parse_ruleset(obj: object, origin: str = "ruleset") -> RuleSet:
    """Validate a decoded rule document and build a RuleSet."""
    if not isinstance(obj, dict):
        raise RuleFileError(f"{origin}: document must be a JSON object")
    _check_keys(obj, {"version", "categories"}, {"version", "categories"}, origin)
    version = obj["version"]
    if not isinstance(version, str):
        raise RuleFileError(f"{origin}: version must be a string")
    raw_categories = obj["categories"]
    if not isinstance(raw_categories, list) or not raw_categories:
        raise RuleFileError(f"{origin}: categories must be a non-empty array")
    categories = tuple(
        _parse_category(cat, f"{origin}.categories[{i}]")
        for i, cat in enumerate(raw_categories)
    )
    names = [c.name for c in categories]
    if len(set(names)) != len(names):
        raise RuleFileError(f"{origin}: duplicate category name")
    return RuleSet(version=version, categories=categories)


def load_ruleset(path: Path | str | None = None) -> RuleSet:
    """Load a rule file, or the shipped default dictionary when path is None."""
    if path is None:
        text = resources.files(__package__).joinpath("data/default_rules.json").read_text("utf-8")
        return parse_ruleset(json.loads(text), origin="builtin rules")
    path = Path(path)
    try:
        text = path.read_text("utf-8")
    except OSError as exc:
        raise RuleFileError(f"cannot read rule file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RuleFileError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_ruleset(doc, origin=str(path))
