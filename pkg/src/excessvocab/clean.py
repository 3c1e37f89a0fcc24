"""Rule-driven removal of non-abstract contamination and notice detection.

Rules live in a TSV file and are applied in file order, each at most once per
document. The rule set is immutable after loading; ``clean_text`` is pure and
safe for concurrent use.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import RuleFileError
from .ingest import Document, RejectReason


class Action(Enum):
    STRIP_MATCH = "STRIP_MATCH"
    STRIP_TO_END = "STRIP_TO_END"
    STRIP_TO_START = "STRIP_TO_START"
    DROP_DOCUMENT = "DROP_DOCUMENT"


class Anchor(Enum):
    ANYWHERE = "ANYWHERE"
    PREFIX = "PREFIX"
    SUFFIX = "SUFFIX"


@dataclass(frozen=True)
class CleaningRule:
    id: str
    pattern: str
    action: Action
    anchor: Anchor

    def __post_init__(self):
        try:
            compiled = re.compile(self.pattern)
        except re.error as exc:
            raise RuleFileError(self.id, 0, f"invalid pattern: {exc}") from exc
        object.__setattr__(self, "_regex", compiled)

    @property
    def regex(self) -> re.Pattern:
        return self._regex  # type: ignore[attr-defined]

    def find(self, text: str) -> re.Match | None:
        if self.anchor is Anchor.PREFIX:
            return self.regex.match(text)
        if self.anchor is Anchor.SUFFIX:
            for m in self.regex.finditer(text):
                if m.end() == len(text):
                    return m
            return None
        return self.regex.search(text)


@dataclass(frozen=True)
class CleanOutcome:
    text: str
    applied: tuple[str, ...]
    dropped: bool = False


def load_rules(path: str | Path | None = None) -> tuple[CleaningRule, ...]:
    """Load an ordered rule set from TSV: ``id<TAB>anchor<TAB>action<TAB>pattern``.

    Lines starting with ``#`` and blank lines are ignored. File order is the
    application order. With no path, loads the starter set shipped with the
    package.
    """
    if path is None:
        text = resources.files("excessvocab.data").joinpath("cleaning_rules.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    rules: list[CleaningRule] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t", 3)
        if len(parts) != 4:
            raise RuleFileError(None, lineno, "expected 4 tab-separated columns (id, anchor, action, pattern)")
        rule_id, anchor_s, action_s, pattern = parts
        if rule_id in seen:
            raise RuleFileError(rule_id, lineno, "duplicate rule id")
        seen.add(rule_id)
        try:
            anchor = Anchor(anchor_s.strip().upper())
            action = Action(action_s.strip().upper())
        except ValueError as exc:
            raise RuleFileError(rule_id, lineno, str(exc)) from exc
        try:
            rules.append(CleaningRule(id=rule_id, pattern=pattern, action=action, anchor=anchor))
        except RuleFileError as exc:
            raise RuleFileError(rule_id, lineno, f"invalid pattern {pattern!r}") from exc
    return tuple(rules)


def clean_text(text: str, rules: Sequence[CleaningRule]) -> CleanOutcome:
    """Apply every rule in order, each at most once; never lengthens the text.

    A DROP_DOCUMENT match stops processing. If any rule fired, the surviving
    text is stripped of leading/trailing whitespace left behind by the cuts.
    """
    applied: list[str] = []
    for rule in rules:
        m = rule.find(text)
        if m is None:
            continue
        applied.append(rule.id)
        if rule.action is Action.DROP_DOCUMENT:
            return CleanOutcome(text=text, applied=tuple(applied), dropped=True)
        if rule.action is Action.STRIP_MATCH:
            text = text[: m.start()] + text[m.end():]
        elif rule.action is Action.STRIP_TO_END:
            text = text[: m.start()]
        elif rule.action is Action.STRIP_TO_START:
            text = text[m.end():]
    if applied:
        text = text.strip()
    return CleanOutcome(text=text, applied=tuple(applied), dropped=False)


_DEFAULT_NOTICE_PATTERNS: tuple[re.Pattern, ...] | None = None


def load_notice_patterns(path: str | Path | None = None) -> tuple[re.Pattern, ...]:
    """Compile the notice-title patterns (one regex per line, # comments)."""
    if path is None:
        text = resources.files("excessvocab.data").joinpath("notice_patterns.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    patterns = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        patterns.append(re.compile(line, re.IGNORECASE))
    return tuple(patterns)


def is_correction_notice(title: str, patterns: Iterable[re.Pattern] | None = None) -> bool:
    """True iff the title is an erratum/corrigendum/correction/retraction notice."""
    global _DEFAULT_NOTICE_PATTERNS
    if patterns is None:
        if _DEFAULT_NOTICE_PATTERNS is None:
            _DEFAULT_NOTICE_PATTERNS = load_notice_patterns()
        patterns = _DEFAULT_NOTICE_PATTERNS
    return any(p.search(title) for p in patterns)


class CleaningSession:
    """Streams documents through notice removal, rules, and the length re-check.

    Tracks the counts reported by the cleaning report JSON:
    documents_modified, documents_dropped, per_rule_counts.
    """

    def __init__(self, rules: Sequence[CleaningRule], min_chars: int = 250,
                 notice_patterns: Iterable[re.Pattern] | None = None):
        self.rules = tuple(rules)
        self.min_chars = min_chars
        self.notice_patterns = tuple(notice_patterns) if notice_patterns is not None else None
        self.documents_seen = 0
        self.documents_modified = 0
        self.documents_dropped = 0
        self.per_rule_counts: dict[str, int] = {}
        self.drop_reasons: dict[str, int] = {}

    def process(self, doc: Document) -> Document | None:
        """Cleaned document, or None if it was dropped."""
        self.documents_seen += 1
        if doc.title and is_correction_notice(doc.title, self.notice_patterns):
            self._drop("correction_notice")
            return None
        outcome = clean_text(doc.text, self.rules)
        for rule_id in outcome.applied:
            self.per_rule_counts[rule_id] = self.per_rule_counts.get(rule_id, 0) + 1
        if outcome.dropped:
            self._drop("rule_drop")
            return None
        if outcome.applied:
            if len(outcome.text) < self.min_chars:
                self._drop(RejectReason.CLEANED_TOO_SHORT.value)
                return None
            self.documents_modified += 1
            return doc.with_text(outcome.text)
        return doc

    def _drop(self, reason: str) -> None:
        self.documents_dropped += 1
        self.drop_reasons[reason] = self.drop_reasons.get(reason, 0) + 1

    def report(self) -> dict:
        return {
            "documents_seen": self.documents_seen,
            "documents_modified": self.documents_modified,
            "documents_dropped": self.documents_dropped,
            "drop_reasons": dict(sorted(self.drop_reasons.items())),
            "per_rule_counts": dict(sorted(self.per_rule_counts.items())),
        }
