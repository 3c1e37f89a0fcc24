"""Per-word excess statistics against counterfactual frequency baselines.

For a target year Y, a word's observed frequency p is compared with the
counterfactual expectation q extrapolated from years Y-3 and Y-2 (never Y-1,
which may already be affected by the intervention under study). The excess
gap is delta = p - q and the excess ratio is r = p / q; both are conservative
because q is clamped to be at least the Y-2 frequency.
"""

from __future__ import annotations

import csv
import io
import math
import re
from dataclasses import dataclass, replace
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .count import OccurrenceMatrix, is_eligible_word
from .errors import ExcessVocabError, MissingYearsError, WordUnknownError


def smoothed_frequency(a: int, b: int) -> float:
    """Document-containment fraction (a+1)/(b+1), avoiding division by zero."""
    if a < 0 or b < 0:
        raise ExcessVocabError(f"counts must be non-negative, got a={a}, b={b}")
    if a > b:
        raise ExcessVocabError(f"containing-document count {a} exceeds total {b}")
    return (a + 1) / (b + 1)


def counterfactual(p_minus3: float, p_minus2: float) -> float:
    """Linear extrapolation two years forward with the slope clamped at zero.

    q = p_-2 + 2 * max(p_-2 - p_-3, 0), capped at 1.0, so q is always at least
    the year-before-last frequency: declining trends are never extrapolated.
    """
    return min(1.0, p_minus2 + 2.0 * max(p_minus2 - p_minus3, 0.0))


class ExcessVia(Enum):
    GAP = "GAP"
    RATIO = "RATIO"
    BOTH = "BOTH"
    NONE = "NONE"


@dataclass(frozen=True)
class ExcessThresholds:
    """Classification thresholds for excess words.

    The ratio criterion is a line in log10(r) vs log10(p) space through
    (p=1, r=1) with slope -log10(2)/4, i.e. the threshold ratio is 2 at
    p = 1e-4 and decays to 1 at p = 1. Eligibility requires frequency above
    ``eligibility_min_freq`` in both the target year and the year before.
    """

    delta_min: float = 0.01
    ratio_line_slope: float = -math.log10(2.0) / 4.0
    ratio_line_intercept: float = 0.0
    eligibility_min_freq: float = 1e-4

    def __post_init__(self):
        if self.delta_min <= 0:
            raise ExcessVocabError("delta_min must be positive")
        if self.eligibility_min_freq <= 0:
            raise ExcessVocabError("eligibility_min_freq must be positive")

    def log_ratio_threshold(self, p: float) -> float:
        return self.ratio_line_intercept + self.ratio_line_slope * math.log10(p)

    def ratio_threshold(self, p: float) -> float:
        return 10.0 ** self.log_ratio_threshold(p)


DEFAULT_THRESHOLDS = ExcessThresholds()


@dataclass(frozen=True)
class WordYearStats:
    """Excess statistics of one word in one target year."""

    word: str
    year: int
    p: float
    q: float
    delta: float
    ratio: float
    excess: bool
    excess_via: ExcessVia
    eligible: bool = True
    label: str | None = None
    pos: str | None = None
    lemma: str | None = None


def is_excess(stats: WordYearStats, thresholds: ExcessThresholds = DEFAULT_THRESHOLDS,
              ) -> tuple[bool, ExcessVia]:
    """Classify a word already known to pass eligibility."""
    via_gap = stats.delta > thresholds.delta_min
    via_ratio = math.log10(stats.ratio) > thresholds.log_ratio_threshold(stats.p)
    if via_gap and via_ratio:
        return True, ExcessVia.BOTH
    if via_gap:
        return True, ExcessVia.GAP
    if via_ratio:
        return True, ExcessVia.RATIO
    return False, ExcessVia.NONE


def _require_years(matrix: OccurrenceMatrix, needed: Sequence[int]) -> list[int]:
    missing = [y for y in needed if y not in matrix.years]
    if missing:
        raise MissingYearsError(needed, matrix.years)
    return [matrix.year_column(y) for y in needed]


def _frequencies(counts: np.ndarray, totals: np.ndarray, smoothing: bool) -> np.ndarray:
    if smoothing:
        return (counts + 1.0) / (totals + 1.0)
    return counts / totals


def word_year_stats(
    matrix: OccurrenceMatrix,
    word: str,
    target_year: int,
    thresholds: ExcessThresholds = DEFAULT_THRESHOLDS,
    smoothing: bool = True,
) -> WordYearStats:
    """Full excess statistics for one word.

    The matrix must cover years Y-3 .. Y. Extrapolation uses Y-3 and Y-2 only;
    Y-1 enters only the eligibility check.
    """
    if word not in matrix.index:
        raise WordUnknownError(word)
    cols = _require_years(matrix, [target_year - 3, target_year - 2, target_year - 1, target_year])
    row = matrix.counts[matrix.index[word]]
    p3, p2, p1, p = (
        float(_frequencies(row[c], matrix.totals[c], smoothing)) for c in cols
    )
    q = counterfactual(p3, p2)
    delta = p - q
    if q > 0:
        ratio = p / q
    else:  # only reachable with smoothing disabled
        ratio = math.inf if p > 0 else math.nan
    eligible = p > thresholds.eligibility_min_freq and p1 > thresholds.eligibility_min_freq
    stats = WordYearStats(
        word=word, year=target_year, p=p, q=q, delta=delta, ratio=ratio,
        excess=False, excess_via=ExcessVia.NONE, eligible=eligible,
    )
    if eligible:
        excess, via = is_excess(stats, thresholds)
        stats = replace(stats, excess=excess, excess_via=via)
    return stats


def eligible_words(
    matrix: OccurrenceMatrix,
    target_year: int,
    thresholds: ExcessThresholds = DEFAULT_THRESHOLDS,
    letters_only: bool = True,
    smoothing: bool = True,
) -> list[str]:
    """Words with frequency above the eligibility floor in years Y and Y-1.

    With ``letters_only``, rows that are not 4+ letter a-z words (present in
    pre-filter matrices) are excluded first.
    """
    mask = _analysis_mask(matrix, target_year, thresholds, letters_only, smoothing)
    return [matrix.words[i] for i in np.flatnonzero(mask)]


def _letters_mask(words: Sequence[str]) -> np.ndarray:
    return np.fromiter((is_eligible_word(w) for w in words), dtype=bool, count=len(words))


def _analysis_mask(matrix, target_year, thresholds, letters_only, smoothing) -> np.ndarray:
    c_y = matrix.year_column(target_year)
    c_y1 = matrix.year_column(target_year - 1)
    p = _frequencies(matrix.counts[:, c_y], matrix.totals[c_y], smoothing)
    p1 = _frequencies(matrix.counts[:, c_y1], matrix.totals[c_y1], smoothing)
    mask = (p > thresholds.eligibility_min_freq) & (p1 > thresholds.eligibility_min_freq)
    if letters_only:
        mask &= _letters_mask(matrix.words)
    return mask


def excess_words(
    matrix: OccurrenceMatrix,
    target_year: int,
    thresholds: ExcessThresholds = DEFAULT_THRESHOLDS,
    annotations: "AnnotationTable | None" = None,
    lemmatizer: "Lemmatizer | None" = None,
    letters_only: bool = True,
    smoothing: bool = True,
) -> list[WordYearStats]:
    """Classify every eligible word for the target year.

    Returns stats for all eligible words (excess or not), sorted by ratio
    descending (ties broken by word). The result is independent of word
    iteration order.
    """
    _require_years(matrix, [target_year - 3, target_year - 2, target_year - 1, target_year])
    mask = _analysis_mask(matrix, target_year, thresholds, letters_only, smoothing)
    idx = np.flatnonzero(mask)
    cols = [matrix.year_column(target_year + k) for k in (-3, -2, 0)]
    p3 = _frequencies(matrix.counts[idx, cols[0]], matrix.totals[cols[0]], smoothing)
    p2 = _frequencies(matrix.counts[idx, cols[1]], matrix.totals[cols[1]], smoothing)
    p = _frequencies(matrix.counts[idx, cols[2]], matrix.totals[cols[2]], smoothing)
    q = np.minimum(1.0, p2 + 2.0 * np.maximum(p2 - p3, 0.0))
    delta = p - q
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(q > 0, p / q, np.where(p > 0, np.inf, np.nan))
        via_gap = delta > thresholds.delta_min
        log_thresh = (thresholds.ratio_line_intercept
                      + thresholds.ratio_line_slope * np.log10(p))
        via_ratio = np.log10(ratio) > log_thresh

    results: list[WordYearStats] = []
    for k, i in enumerate(idx):
        word = matrix.words[i]
        gap_f, ratio_f = bool(via_gap[k]), bool(via_ratio[k])
        via = (ExcessVia.BOTH if gap_f and ratio_f
               else ExcessVia.GAP if gap_f
               else ExcessVia.RATIO if ratio_f
               else ExcessVia.NONE)
        label = pos = None
        if annotations is not None:
            label = annotations.label(word)
            pos = annotations.pos(word)
        results.append(WordYearStats(
            word=word, year=target_year,
            p=float(p[k]), q=float(q[k]), delta=float(delta[k]), ratio=float(ratio[k]),
            excess=gap_f or ratio_f, excess_via=via, eligible=True,
            label=label, pos=pos,
            lemma=lemmatizer(word) if lemmatizer is not None else None,
        ))
    results.sort(key=lambda s: (-s.ratio, s.word))
    return results


def representative_word(
    stats: Iterable[WordYearStats],
    p_min: float = 0.0015,
    r_min: float = 3.0,
) -> str | None:
    """The excess word with the highest ratio among those with p > p_min, r > r_min.

    Ties go to the lexicographically smaller word; None when nothing qualifies.
    """
    best: WordYearStats | None = None
    for s in stats:
        if not s.excess or s.p <= p_min or s.ratio <= r_min:
            continue
        if best is None or (s.ratio, ) > (best.ratio, ) or (s.ratio == best.ratio and s.word < best.word):
            best = s
    return best.word if best else None


# ---------------------------------------------------------------------------
# Annotations
# ---------------------------------------------------------------------------

_LABELS = ("content", "style", "ambiguous")
_POS = ("noun", "verb", "adjective", "adverb", "other")
_POS_ALIASES = {"adj": "adjective", "adv": "adverb", "n": "noun", "v": "verb"}


class AnnotationTable:
    """Manual content/style and part-of-speech annotations, keyed by word.

    Unknown words are absent, never defaulted.
    """

    def __init__(self, labels: Mapping[str, str], pos: Mapping[str, str]):
        self._labels = dict(labels)
        self._pos = dict(pos)

    def __len__(self) -> int:
        return len(self._labels)

    def __contains__(self, word: str) -> bool:
        return word in self._labels

    def label(self, word: str) -> str | None:
        return self._labels.get(word)

    def pos(self, word: str) -> str | None:
        return self._pos.get(word)

    @classmethod
    def load(cls, source: str | Path | IO[str]) -> "AnnotationTable":
        """Read a ``word,label,pos`` CSV (header row optional)."""
        if isinstance(source, (str, Path)):
            text = Path(source).read_text(encoding="utf-8")
        else:
            text = source.read()
        labels: dict[str, str] = {}
        pos_map: dict[str, str] = {}
        reader = csv.reader(io.StringIO(text))
        for rowno, row in enumerate(reader, 1):
            if not row or not row[0].strip():
                continue
            cells = [c.strip().lower() for c in row]
            if rowno == 1 and cells[0] == "word":
                continue
            if len(cells) < 2:
                raise ExcessVocabError(f"annotations row {rowno}: expected word,label[,pos]")
            word, label = cells[0], cells[1]
            if label not in _LABELS:
                raise ExcessVocabError(
                    f"annotations row {rowno}: label {label!r} not one of {_LABELS}")
            labels[word] = label
            if len(cells) >= 3 and cells[2]:
                raw = _POS_ALIASES.get(cells[2], cells[2])
                pos_map[word] = raw if raw in _POS else "other"
        return cls(labels, pos_map)


# ---------------------------------------------------------------------------
# Lemmatization
# ---------------------------------------------------------------------------

_VOWELS = set("aeiou")
_WORD_AZ = re.compile(r"^[a-z]+$")


def _has_vowel(s: str) -> bool:
    return any(ch in _VOWELS for ch in s)


def _measure(stem: str) -> int:
    """Porter-style count of vowel-consonant sequences."""
    m = 0
    prev_vowel = False
    for ch in stem:
        is_vowel = ch in _VOWELS
        if prev_vowel and not is_vowel:
            m += 1
        prev_vowel = is_vowel
    return m


def _ends_cvc(stem: str) -> bool:
    if len(stem) < 3:
        return False
    c1, v, c2 = stem[-3], stem[-2], stem[-1]
    return (c1 not in _VOWELS and v in _VOWELS
            and c2 not in _VOWELS and c2 not in "wxy")


class Lemmatizer:
    """Deterministic suffix-rule lemmatizer with override and spelling tables.

    Each step applies spelling normalization (British -> US), then the
    override table, then one suffix rule; steps repeat until a fixed point,
    which makes the mapping idempotent for any table contents. When a
    ``known_words`` set is supplied (e.g. the corpus vocabulary), stem repair
    after -ing/-ed stripping prefers forms that actually occur.
    """

    def __init__(
        self,
        overrides: Mapping[str, str] | None = None,
        spelling: Mapping[str, str] | None = None,
        known_words: Iterable[str] | None = None,
    ):
        self.overrides = dict(overrides) if overrides is not None else load_lemma_overrides()
        self.spelling = dict(spelling) if spelling is not None else load_spelling_map()
        self.known = frozenset(known_words) if known_words is not None else None

    def __call__(self, word: str) -> str:
        seen: set[str] = set()
        while word not in seen:
            seen.add(word)
            word = self._step(word)
        return word

    def _step(self, word: str) -> str:
        word = self.spelling.get(word, word)
        word = self.overrides.get(word, word)
        if not _WORD_AZ.match(word):
            return word
        return self._suffix_pass(word)

    def _suffix_pass(self, w: str) -> str:
        if w.endswith("ies") and len(w) >= 5:
            return w[:-3] + "y"
        if w.endswith("sses"):
            return w[:-2]
        if w.endswith("es") and w[:-2].endswith(("zz", "x", "ch", "sh")):
            return w[:-2]
        if w.endswith("s") and len(w) >= 4 and not w.endswith(("ss", "us", "is", "ias", "aos")):
            return w[:-1]
        if w.endswith("ing") and len(w) >= 6 and _has_vowel(w[:-3]):
            return self._repair_stem(w[:-3])
        if w.endswith("ied") and len(w) >= 5:
            return w[:-3] + "y"
        if w.endswith("ed") and not w.endswith("eed") and len(w) >= 5 and _has_vowel(w[:-2]):
            return self._repair_stem(w[:-2])
        return w

    def _repair_stem(self, stem: str) -> str:
        doubled = (len(stem) >= 2 and stem[-1] == stem[-2]
                   and stem[-1] not in _VOWELS)
        if self.known is not None:
            if stem in self.known:
                return stem
            if stem + "e" in self.known:
                return stem + "e"
            if doubled and stem[:-1] in self.known:
                return stem[:-1]
        if len(stem) >= 4 and stem.endswith(("at", "bl", "iz", "yz")):
            return stem + "e"
        if doubled and stem[-1] not in "ls":
            return stem[:-1]
        # vowel+s stems ("showcas", "rais") take -se so that -s/-ed/-ing
        # inflection families land on one lemma and survive the plural pass
        if len(stem) >= 4 and stem[-1] == "s" and stem[-2] in _VOWELS:
            return stem + "e"
        if stem.endswith(("v", "u", "c")):
            return stem + "e"
        if _ends_cvc(stem) and _measure(stem) == 1:
            return stem + "e"
        return stem


def load_lemma_overrides(path: str | Path | None = None) -> dict[str, str]:
    """Two-column CSV ``word,lemma``; defaults to the shipped table."""
    return _load_two_column_csv(path, "lemma_overrides.csv")


def load_spelling_map(path: str | Path | None = None) -> dict[str, str]:
    """Two-column CSV ``british,american``; defaults to the shipped table."""
    return _load_two_column_csv(path, "british_american.csv")


def _load_two_column_csv(path: str | Path | None, default_name: str) -> dict[str, str]:
    if path is None:
        text = resources.files("excessvocab.data").joinpath(default_name).read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    table: dict[str, str] = {}
    for row in csv.reader(io.StringIO(text)):
        if not row or row[0].lstrip().startswith("#") or not row[0].strip():
            continue
        if len(row) < 2:
            raise ExcessVocabError(f"expected 2 columns in {default_name}, got {row!r}")
        table[row[0].strip().lower()] = row[1].strip().lower()
    return table


def lemmatize(word: str, lemma_overrides: Mapping[str, str] | None = None,
              spelling_map: Mapping[str, str] | None = None) -> str:
    """One-shot lemmatization with the shipped tables (see ``Lemmatizer``)."""
    return Lemmatizer(overrides=lemma_overrides, spelling=spelling_map)(word)


def unique_lemma_count(
    stats: Iterable[WordYearStats],
    lemmatizer: Lemmatizer | None = None,
    by_label: bool = False,
):
    """Number of distinct lemmas among the excess words of a stats list.

    With ``by_label`` returns a dict keyed by annotation label (words without
    a label fall under "unannotated").
    """
    lem = lemmatizer if lemmatizer is not None else Lemmatizer()
    if not by_label:
        return len({(s.lemma if s.lemma is not None else lem(s.word))
                    for s in stats if s.excess})
    buckets: dict[str, set[str]] = {}
    for s in stats:
        if not s.excess:
            continue
        lemma = s.lemma if s.lemma is not None else lem(s.word)
        buckets.setdefault(s.label or "unannotated", set()).add(lemma)
    return {label: len(lemmas) for label, lemmas in sorted(buckets.items())}


# ---------------------------------------------------------------------------
# Stats CSV
# ---------------------------------------------------------------------------

STATS_HEADER = ["word", "year", "p", "q", "delta", "ratio", "excess",
                "excess_via", "label", "pos", "lemma"]


def write_stats_csv(stats: Iterable[WordYearStats], target: str | Path | IO[str]) -> None:
    own = isinstance(target, (str, Path))
    handle = open(target, "w", encoding="utf-8", newline="") if own else target
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(STATS_HEADER)
        for s in stats:
            writer.writerow([
                s.word, s.year, repr(s.p), repr(s.q), repr(s.delta), repr(s.ratio),
                "true" if s.excess else "false", s.excess_via.value,
                s.label or "", s.pos or "", s.lemma or "",
            ])
    finally:
        if own:
            handle.close()


def read_stats_csv(source: str | Path | IO[str]) -> list[WordYearStats]:
    own = isinstance(source, (str, Path))
    handle = open(source, "r", encoding="utf-8", newline="") if own else source
    try:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or header[:8] != STATS_HEADER[:8]:
            raise ExcessVocabError("not a stats CSV (unexpected header)")
        out = []
        for row in reader:
            if not row:
                continue
            out.append(WordYearStats(
                word=row[0], year=int(row[1]), p=float(row[2]), q=float(row[3]),
                delta=float(row[4]), ratio=float(row[5]), excess=row[6] == "true",
                excess_via=ExcessVia(row[7]),
                label=row[8] or None, pos=row[9] or None, lemma=row[10] or None,
            ))
        return out
    finally:
        if own:
            handle.close()
