"""Marker-set frequency gaps: lower bounds on intervention prevalence.

For a word set G, the set-level gap Delta = P - Q compares the observed
fraction of documents containing at least one word of G with the expectation
extrapolated from earlier years (same projection as per-word statistics).
Documents processed without acquiring any marker word contribute nothing, so
Delta is a lower bound on the processed fraction.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .count import FrequencyProfile, containment_counts
from .errors import ExcessVocabError, SetsOverlapError
from .excess import counterfactual, smoothed_frequency
from .ingest import Document


class MarkerKind(Enum):
    RARE = "RARE"
    COMMON = "COMMON"
    CUSTOM = "CUSTOM"


@dataclass(frozen=True)
class MarkerSet:
    name: str
    words: frozenset[str]
    kind: MarkerKind = MarkerKind.CUSTOM

    def __post_init__(self):
        if not self.words:
            raise ExcessVocabError(f"marker set {self.name!r} must be non-empty")


def load_marker_set(path: str | Path | IO[str], name: str | None = None,
                    kind: MarkerKind = MarkerKind.CUSTOM) -> MarkerSet:
    """Read a marker-set file: one word per line, ``#`` comments."""
    if isinstance(path, (str, Path)):
        text = Path(path).read_text(encoding="utf-8")
        name = name or Path(path).stem
    else:
        text = path.read()
        name = name or "markers"
    words = set()
    for line in text.splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            words.add(line)
    return MarkerSet(name=name, words=frozenset(words), kind=kind)


def default_common_set() -> MarkerSet:
    """The shipped default set of common style markers."""
    text = resources.files("excessvocab.data").joinpath("markers_common.txt").read_text("utf-8")
    words = frozenset(w.strip() for w in text.splitlines()
                      if w.strip() and not w.startswith("#"))
    return MarkerSet(name="common", words=words, kind=MarkerKind.COMMON)


@dataclass(frozen=True)
class GapResult:
    year: int
    P: float
    Q: float
    delta: float
    n_docs: int


def gap(containment: Mapping[int, tuple[int, int]], target_year: int,
        smoothing: bool = True) -> GapResult:
    """Set-level gap for the target year from per-year containment counts.

    Requires counts for years Y-3, Y-2 and Y. Fractions are smoothed as
    (a+1)/(b+1); Q uses the same clamped projection as per-word statistics.
    Negative deltas are reported as-is, never clamped.
    """
    needed = (target_year - 3, target_year - 2, target_year)
    missing = [y for y in needed if y not in containment]
    if missing:
        raise ExcessVocabError(f"containment counts missing for year(s) {missing}")

    def fraction(year: int) -> float:
        a, b = containment[year]
        if smoothing:
            return smoothed_frequency(a, b)
        return a / b

    p3, p2, p = fraction(target_year - 3), fraction(target_year - 2), fraction(target_year)
    q = counterfactual(p3, p2)
    return GapResult(year=target_year, P=p, Q=q, delta=p - q,
                     n_docs=containment[target_year][1])


def measure_gap(corpus: Iterable[Document], words: Iterable[str], target_year: int,
                years: Sequence[int] | None = None) -> GapResult:
    """Containment pass plus gap computation in one call."""
    if years is None:
        years = (target_year - 3, target_year - 2, target_year)
    counts = containment_counts(corpus, words, years=years)
    return gap(counts, target_year)


# ---------------------------------------------------------------------------
# Rare-set threshold sweep
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepPoint:
    threshold: float
    n_words: int
    P: float
    Q: float
    delta: float


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]
    best: SweepPoint | None

    def best_threshold(self) -> float | None:
        return self.best.threshold if self.best else None


def rare_sweep(
    profile: FrequencyProfile,
    candidates: Mapping[str, float],
    target_year: int,
    thresholds: Sequence[float] | None = None,
    smoothing: bool = True,
) -> SweepResult:
    """Gap of the candidate subset {w : p_w < T} for every threshold T.

    ``profile`` must come from ``min_marker_frequency_profile`` over the same
    candidate->frequency map (frequencies taken in the target year), covering
    years Y-3, Y-2 and Y. A document contains a word of the subset iff the
    minimum frequency among its contained candidates is below T, so the whole
    curve costs one corpus pass. Thresholds selecting no word are skipped.
    """
    if not candidates:
        raise ExcessVocabError("candidate set must be non-empty")
    needed = (target_year - 3, target_year - 2, target_year)
    missing = [y for y in needed if y not in profile.totals]
    if missing:
        raise ExcessVocabError(f"profile missing year(s) {missing}")
    freqs = np.sort(np.asarray(list(candidates.values()), dtype=np.float64))
    if thresholds is None:
        # every distinct subset occurs at a candidate frequency; add one point
        # above the maximum so the full set is swept too
        uniq = np.unique(freqs)
        thresholds = list(uniq) + [float(uniq[-1]) * (1.0 + 1e-9)]
    points: list[SweepPoint] = []
    for t in thresholds:
        n_words = int(np.searchsorted(freqs, t, side="left"))
        if n_words == 0:
            continue
        fractions = {}
        for year in needed:
            a = profile.count_below(year, t)
            b = profile.total(year)
            fractions[year] = smoothed_frequency(a, b) if smoothing else a / b
        q = counterfactual(fractions[target_year - 3], fractions[target_year - 2])
        p = fractions[target_year]
        points.append(SweepPoint(threshold=float(t), n_words=n_words,
                                 P=p, Q=q, delta=p - q))
    best = max(points, key=lambda pt: pt.delta, default=None)
    return SweepResult(points=tuple(points), best=best)


def greedy_delta_set(
    corpus: Iterable[Document],
    candidate_words: Iterable[str],
    target_year: int,
    max_words: int = 10,
    smoothing: bool = True,
) -> tuple[MarkerSet, list[tuple[str, float]]]:
    """Greedy gap-maximizing marker set (optional; off by default in the CLI).

    Starting empty, repeatedly adds the candidate that most increases the
    set-level gap for the target year, stopping at ``max_words`` or when no
    candidate improves it. Returns the set and the (word, gap) growth history.
    Ties go to the lexicographically smaller word for determinism.
    """
    from .count import tokenize

    candidates = sorted(set(candidate_words))
    if not candidates:
        raise ExcessVocabError("candidate set must be non-empty")
    years = (target_year - 3, target_year - 2, target_year)
    membership: dict[int, np.ndarray] = {}
    totals: dict[int, int] = {}
    docs_by_year: dict[int, list[frozenset[str]]] = {y: [] for y in years}
    for doc in corpus:
        if doc.year in docs_by_year:
            docs_by_year[doc.year].append(tokenize(doc.text))
    cand_index = {w: i for i, w in enumerate(candidates)}
    for y in years:
        token_sets = docs_by_year[y]
        totals[y] = len(token_sets)
        marks = np.zeros((len(candidates), len(token_sets)), dtype=bool)
        for j, tokens in enumerate(token_sets):
            for w in tokens.intersection(cand_index):
                marks[cand_index[w], j] = True
        membership[y] = marks

    def delta_of(cover: dict[int, np.ndarray]) -> float:
        counts = {y: (int(cover[y].sum()), totals[y]) for y in years}
        return gap(counts, target_year, smoothing=smoothing).delta

    chosen: list[str] = []
    history: list[tuple[str, float]] = []
    cover = {y: np.zeros(totals[y], dtype=bool) for y in years}
    best_delta = -math.inf
    while len(chosen) < max_words:
        best_word = None
        best_word_delta = best_delta
        for w in candidates:  # sorted, so ties keep the smaller word
            if w in chosen:
                continue
            i = cand_index[w]
            trial = {y: cover[y] | membership[y][i] for y in years}
            d = delta_of(trial)
            if d > best_word_delta:
                best_word_delta = d
                best_word = w
        if best_word is None:
            break
        chosen.append(best_word)
        i = cand_index[best_word]
        cover = {y: cover[y] | membership[y][i] for y in years}
        best_delta = best_word_delta
        history.append((best_word, best_delta))
    if not chosen:
        raise ExcessVocabError("no candidate improves the gap over the empty set")
    return (MarkerSet(name="greedy", words=frozenset(chosen), kind=MarkerKind.COMMON),
            history)


def combined_estimate(
    delta_rare: float,
    delta_common: float,
    rare_words: Iterable[str] | None = None,
    common_words: Iterable[str] | None = None,
) -> float:
    """Mean of the rare-set and common-set gaps.

    The two sets must be disjoint for the estimates to be independent; when
    both are supplied, overlap raises SETS_OVERLAP.
    """
    if rare_words is not None and common_words is not None:
        overlap = frozenset(rare_words) & frozenset(common_words)
        if overlap:
            raise SetsOverlapError(overlap)
    return (delta_rare + delta_common) / 2.0


# ---------------------------------------------------------------------------
# Subgroup analysis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubgroupSpec:
    """A named, metadata-only predicate over documents.

    Predicate forms: {"country": v}, {"journal": v}, {"journal_in": [v, ...]},
    {"field": v}, {"extra": {"key": k, "value": v}}, and {"all": [p1, p2, ...]}
    for intersections.
    """

    name: str
    predicate: Mapping

    def matches(self, doc: Document) -> bool:
        return _eval_predicate(self.predicate, doc)


def _eval_predicate(pred: Mapping, doc: Document) -> bool:
    if len(pred) != 1:
        raise ExcessVocabError(f"predicate must have exactly one operator: {pred!r}")
    op, value = next(iter(pred.items()))
    if op == "country":
        return doc.country == value
    if op == "journal":
        return doc.journal == value
    if op == "journal_in":
        return doc.journal in set(value)
    if op == "field":
        return value in doc.fields
    if op == "extra":
        return doc.extra.get(value["key"]) == value["value"]
    if op == "all":
        return all(_eval_predicate(p, doc) for p in value)
    raise ExcessVocabError(f"unknown predicate operator {op!r}")


def load_subgroup_specs(source: str | Path | IO[str]) -> tuple[SubgroupSpec, ...]:
    """JSON list of {"name": ..., "predicate": {...}}."""
    if isinstance(source, (str, Path)):
        data = json.loads(Path(source).read_text(encoding="utf-8"))
    else:
        data = json.load(source)
    return tuple(SubgroupSpec(name=item["name"], predicate=item["predicate"])
                 for item in data)


@dataclass(frozen=True)
class SubgroupGap:
    name: str
    delta_rare: float
    delta_common: float
    delta: float
    n_per_year: Mapping[int, int]


@dataclass(frozen=True)
class SubgroupTable:
    rows: tuple[SubgroupGap, ...]
    excluded: Mapping[str, str]  # subgroup name -> ineligibility reason


def subgroup_gaps(
    corpus: Iterable[Document],
    specs: Sequence[SubgroupSpec],
    rare_set: MarkerSet,
    common_set: MarkerSet,
    target_year: int,
    min_docs_per_year: int = 300,
    eligibility_years: Sequence[int] | None = None,
) -> SubgroupTable:
    """Rare/common/combined gaps per subgroup, with globally fixed marker sets.

    Marker sets are never re-derived per subgroup. Subgroups lacking
    ``min_docs_per_year`` documents in any eligibility year (default: the six
    years preceding the target year) are excluded with a reason.
    """
    if eligibility_years is None:
        eligibility_years = range(target_year - 6, target_year)
    rare_words = rare_set.words
    common_words = common_set.words
    totals: list[dict[int, int]] = [dict() for _ in specs]
    in_rare: list[dict[int, int]] = [dict() for _ in specs]
    in_common: list[dict[int, int]] = [dict() for _ in specs]
    from .count import tokenize

    for doc in corpus:
        tokens = None
        for i, spec in enumerate(specs):
            if not spec.matches(doc):
                continue
            if tokens is None:
                tokens = tokenize(doc.text)
            y = doc.year
            totals[i][y] = totals[i].get(y, 0) + 1
            if not rare_words.isdisjoint(tokens):
                in_rare[i][y] = in_rare[i].get(y, 0) + 1
            if not common_words.isdisjoint(tokens):
                in_common[i][y] = in_common[i].get(y, 0) + 1

    rows: list[SubgroupGap] = []
    excluded: dict[str, str] = {}
    needed = (target_year - 3, target_year - 2, target_year)
    for i, spec in enumerate(specs):
        short = [y for y in eligibility_years
                 if totals[i].get(y, 0) < min_docs_per_year]
        if short:
            counts = ", ".join(f"{y}: {totals[i].get(y, 0)}" for y in short)
            excluded[spec.name] = (
                f"fewer than {min_docs_per_year} documents in year(s) {counts}")
            continue
        contain_rare = {y: (in_rare[i].get(y, 0), totals[i].get(y, 0)) for y in needed}
        contain_common = {y: (in_common[i].get(y, 0), totals[i].get(y, 0)) for y in needed}
        g_rare = gap(contain_rare, target_year)
        g_common = gap(contain_common, target_year)
        rows.append(SubgroupGap(
            name=spec.name,
            delta_rare=g_rare.delta,
            delta_common=g_common.delta,
            delta=(g_rare.delta + g_common.delta) / 2.0,
            n_per_year={y: totals[i].get(y, 0) for y in sorted(totals[i])},
        ))
    return SubgroupTable(rows=tuple(rows), excluded=excluded)


def write_gaps_csv(table: SubgroupTable, target: str | Path | IO[str],
                   years: Sequence[int] | None = None) -> None:
    """gaps.csv: subgroup, delta_rare, delta_common, delta, then per-year n."""
    own = isinstance(target, (str, Path))
    handle = open(target, "w", encoding="utf-8", newline="") if own else target
    try:
        all_years = years
        if all_years is None:
            seen: set[int] = set()
            for row in table.rows:
                seen.update(row.n_per_year)
            all_years = sorted(seen)
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["subgroup", "delta_rare", "delta_common", "delta",
                         *[f"n_{y}" for y in all_years]])
        for row in table.rows:
            writer.writerow([
                row.name, repr(row.delta_rare), repr(row.delta_common), repr(row.delta),
                *[str(row.n_per_year.get(y, 0)) for y in all_years],
            ])
    finally:
        if own:
            handle.close()


# ---------------------------------------------------------------------------
# Local gaps over 2D embeddings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EmbeddedPoint:
    """A document's precomputed 2D coordinates plus marker-set membership."""

    id: str
    year: int
    x: float
    y: float
    in_rare: bool
    in_common: bool

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ExcessVocabError(f"point {self.id}: coordinates must be finite")


@dataclass(frozen=True)
class LocalDelta:
    id: str
    x: float
    y: float
    delta: float
    delta_rare: float
    delta_common: float


@dataclass(frozen=True)
class LocalDeltaResult:
    rows: tuple[LocalDelta, ...]
    errors: tuple[tuple[str, str], ...]  # (point id, reason)


def local_delta(
    points: Sequence[EmbeddedPoint],
    reference_year: int,
    target_year: int,
    k: int = 100,
) -> LocalDeltaResult:
    """Per-point gap between the k nearest target-year and reference-year neighbors.

    For each point, the fraction of its k nearest target-year neighbors
    containing a marker is compared with the same fraction over its k nearest
    reference-year neighbors; rare and common differences are averaged. This
    local variant uses the plain between-year difference, not extrapolation.
    Points cannot be ranked when either year has fewer than k points; those
    are reported as errors, not raised.
    """
    if k < 1:
        raise ExcessVocabError("k must be >= 1")
    ref = [p for p in points if p.year == reference_year]
    tgt = [p for p in points if p.year == target_year]
    errors: list[tuple[str, str]] = []
    if len(ref) < k or len(tgt) < k:
        reason = (f"needs {k} neighbors but reference year {reference_year} has "
                  f"{len(ref)} point(s) and target year {target_year} has {len(tgt)}")
        return LocalDeltaResult(rows=(), errors=tuple((p.id, reason) for p in points))

    def membership(group: list[EmbeddedPoint]) -> tuple[cKDTree, np.ndarray, np.ndarray]:
        xy = np.array([[p.x, p.y] for p in group], dtype=np.float64)
        rare = np.array([p.in_rare for p in group], dtype=np.float64)
        common = np.array([p.in_common for p in group], dtype=np.float64)
        return cKDTree(xy), rare, common

    ref_tree, ref_rare, ref_common = membership(ref)
    tgt_tree, tgt_rare, tgt_common = membership(tgt)
    queries = np.array([[p.x, p.y] for p in points], dtype=np.float64)
    _, ref_idx = ref_tree.query(queries, k=k)
    _, tgt_idx = tgt_tree.query(queries, k=k)
    ref_idx = np.atleast_2d(ref_idx)
    tgt_idx = np.atleast_2d(tgt_idx)

    rows = []
    for i, p in enumerate(points):
        d_rare = float(tgt_rare[tgt_idx[i]].mean() - ref_rare[ref_idx[i]].mean())
        d_common = float(tgt_common[tgt_idx[i]].mean() - ref_common[ref_idx[i]].mean())
        rows.append(LocalDelta(
            id=p.id, x=p.x, y=p.y,
            delta=(d_rare + d_common) / 2.0,
            delta_rare=d_rare, delta_common=d_common,
        ))
    return LocalDeltaResult(rows=tuple(rows), errors=tuple(errors))


def read_points_csv(source: str | Path | IO[str]) -> list[EmbeddedPoint]:
    """Points CSV: id,year,x,y,in_rare,in_common (booleans as 0/1)."""
    own = isinstance(source, (str, Path))
    handle = open(source, "r", encoding="utf-8", newline="") if own else source
    try:
        reader = csv.reader(handle)
        header = next(reader, None)
        expected = ["id", "year", "x", "y", "in_rare", "in_common"]
        if header != expected:
            raise ExcessVocabError(f"points CSV must have header {','.join(expected)}")
        return [
            EmbeddedPoint(id=row[0], year=int(row[1]), x=float(row[2]), y=float(row[3]),
                          in_rare=row[4] == "1", in_common=row[5] == "1")
            for row in reader if row
        ]
    finally:
        if own:
            handle.close()


def write_local_delta_csv(result: LocalDeltaResult, target: str | Path | IO[str]) -> None:
    own = isinstance(target, (str, Path))
    handle = open(target, "w", encoding="utf-8", newline="") if own else target
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["id", "x", "y", "delta"])
        for row in result.rows:
            writer.writerow([row.id, repr(row.x), repr(row.y), repr(row.delta)])
    finally:
        if own:
            handle.close()


def write_sweep_csv(result: SweepResult, target: str | Path | IO[str]) -> None:
    """sweep.csv: threshold, n_words, P, Q, delta."""
    own = isinstance(target, (str, Path))
    handle = open(target, "w", encoding="utf-8", newline="") if own else target
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["threshold", "n_words", "P", "Q", "delta"])
        for pt in result.points:
            writer.writerow([repr(pt.threshold), pt.n_words, repr(pt.P),
                             repr(pt.Q), repr(pt.delta)])
    finally:
        if own:
            handle.close()
