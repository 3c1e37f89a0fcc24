"""Binary word-occurrence counting over document corpora.

The central artifact is the word x year matrix of document counts: for each
word and year, the number of documents in that year containing the word at
least once, plus per-year document totals. Counting is order-independent and
shardable: partial matrices over disjoint document shards form a commutative
monoid under ``merge`` with the zero matrix as identity.
"""

from __future__ import annotations

import csv
import gzip
import io
import multiprocessing
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import EmptyCorpusError, ExcessVocabError, MatrixFormatError
from .ingest import Document

_WORD_RE = re.compile(r"\w+", re.UNICODE)
_ELIGIBLE_RE = re.compile(r"^[a-z]{4,}$")


def tokenize(text: str) -> frozenset[str]:
    """Lowercased binary token set: split at non-word boundaries, duplicates collapsed.

    Tokens with digits, non-ASCII letters, or fewer than four characters are
    produced here; the vocabulary filter excludes them later.
    """
    return frozenset(_WORD_RE.findall(text.lower()))


def is_eligible_word(word: str) -> bool:
    """At least four characters, composed only of the 26 letters a-z."""
    return _ELIGIBLE_RE.match(word) is not None


@dataclass(frozen=True)
class Vocabulary:
    """Deterministic (lexicographic) word -> row-index mapping."""

    words: tuple[str, ...]
    index: Mapping[str, int] = field(repr=False, compare=False, default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.index is None:
            object.__setattr__(self, "index", {w: i for i, w in enumerate(self.words)})

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.index


def build_vocabulary(
    corpus: Iterable[Document],
    min_df: float = 1e-6,
    letters_only: bool = True,
) -> Vocabulary:
    """First-pass vocabulary: tokens with document frequency >= ``min_df`` fraction.

    With ``letters_only`` (the analysis default) only words of >= 4 letters a-z
    are kept; otherwise all tokens of >= 2 characters are kept, matching the
    layout of pre-filter matrices.
    """
    df: dict[str, int] = {}
    n_docs = 0
    for doc in corpus:
        n_docs += 1
        for token in tokenize(doc.text):
            df[token] = df.get(token, 0) + 1
    if n_docs == 0:
        raise EmptyCorpusError("cannot build a vocabulary from an empty corpus")
    threshold = min_df * n_docs
    if letters_only:
        keep = (w for w, c in df.items() if c >= threshold and is_eligible_word(w))
    else:
        keep = (w for w, c in df.items() if c >= threshold and len(w) >= 2)
    return Vocabulary(words=tuple(sorted(keep)))


@dataclass
class OccurrenceMatrix:
    """Per-word, per-year document counts plus per-year totals."""

    years: tuple[int, ...]
    words: tuple[str, ...]
    counts: np.ndarray  # shape (n_words, n_years), non-negative ints
    totals: np.ndarray  # shape (n_years,)

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        self.totals = np.asarray(self.totals, dtype=np.int64)
        if self.counts.shape != (len(self.words), len(self.years)):
            raise MatrixFormatError(
                "SHAPE_MISMATCH",
                f"counts shape {self.counts.shape} does not match "
                f"{len(self.words)} words x {len(self.years)} years",
            )
        if self.totals.shape != (len(self.years),):
            raise MatrixFormatError("SHAPE_MISMATCH", "totals length does not match years")
        self._index: dict[str, int] | None = None
        self._year_index = {y: j for j, y in enumerate(self.years)}

    @property
    def index(self) -> dict[str, int]:
        if self._index is None:
            self._index = {w: i for i, w in enumerate(self.words)}
        return self._index

    def year_column(self, year: int) -> int:
        try:
            return self._year_index[year]
        except KeyError:
            raise KeyError(f"year {year} not covered by matrix ({self.years[0]}..{self.years[-1]})")

    def row(self, word: str) -> np.ndarray:
        return self.counts[self.index[word]]

    @classmethod
    def zero(cls, years: Sequence[int], words: Sequence[str]) -> "OccurrenceMatrix":
        return cls(
            years=tuple(years), words=tuple(words),
            counts=np.zeros((len(words), len(years)), dtype=np.int64),
            totals=np.zeros(len(years), dtype=np.int64),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, OccurrenceMatrix):
            return NotImplemented
        return (
            self.years == other.years
            and self.words == other.words
            and np.array_equal(self.counts, other.counts)
            and np.array_equal(self.totals, other.totals)
        )


def _resolve_years(corpus: Iterable[Document], years: Sequence[int] | None):
    """Materialize the corpus when the year range must be inferred from it."""
    if years is not None:
        return tuple(years), corpus
    docs = list(corpus)
    if not docs:
        raise EmptyCorpusError("no documents")
    lo = min(d.year for d in docs)
    hi = max(d.year for d in docs)
    return tuple(range(lo, hi + 1)), docs


def count_occurrences(
    corpus: Iterable[Document],
    vocab: Vocabulary,
    years: Sequence[int] | None = None,
    strict: bool = True,
    tally=None,
    workers: int = 1,
) -> OccurrenceMatrix:
    """Count, per word and year, the documents containing the word at least once.

    ``years`` defaults to the contiguous range spanned by the corpus (the
    corpus is materialized in that case; pass explicit years to stream).
    A document with a year outside the range raises in strict mode and is
    tallied otherwise. Shards are counted independently when ``workers > 1``
    and merged; the result is identical to a sequential count.
    """
    year_tuple, corpus = _resolve_years(corpus, years)
    if workers > 1:
        return _count_parallel(corpus, vocab, year_tuple, strict, tally, workers)
    year_index = {y: j for j, y in enumerate(year_tuple)}
    counts = np.zeros((len(vocab), len(year_tuple)), dtype=np.int64)
    totals = np.zeros(len(year_tuple), dtype=np.int64)
    index = vocab.index
    for doc in corpus:
        j = year_index.get(doc.year)
        if j is None:
            if strict:
                raise ExcessVocabError(
                    f"document {doc.id}: year {doc.year} outside matrix range")
            if tally is not None:
                tally.add("year_out_of_matrix_range")
            continue
        totals[j] += 1
        for token in tokenize(doc.text):
            i = index.get(token)
            if i is not None:
                counts[i, j] += 1
    return OccurrenceMatrix(years=year_tuple, words=vocab.words, counts=counts, totals=totals)


# -- parallel counting -------------------------------------------------------

_WORKER_STATE: dict = {}


def _init_count_worker(vocab: Vocabulary, years: tuple[int, ...]) -> None:
    _WORKER_STATE["vocab"] = vocab
    _WORKER_STATE["years"] = years


def _count_shard(docs: list[Document]) -> tuple[np.ndarray, np.ndarray, int]:
    vocab: Vocabulary = _WORKER_STATE["vocab"]
    years: tuple[int, ...] = _WORKER_STATE["years"]
    partial = count_occurrences(docs, vocab, years=years, strict=False)
    skipped = len(docs) - int(partial.totals.sum())
    return partial.counts, partial.totals, skipped


def _chunked(corpus: Iterable[Document], size: int) -> Iterator[list[Document]]:
    chunk: list[Document] = []
    for doc in corpus:
        chunk.append(doc)
        if len(chunk) >= size:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def _count_parallel(corpus, vocab, years, strict, tally, workers, chunk_size=2000):
    counts = np.zeros((len(vocab), len(years)), dtype=np.int64)
    totals = np.zeros(len(years), dtype=np.int64)
    skipped = 0
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(workers, initializer=_init_count_worker, initargs=(vocab, years)) as pool:
        for c, t, s in pool.imap_unordered(_count_shard, _chunked(corpus, chunk_size)):
            counts += c
            totals += t
            skipped += s
    if skipped and strict:
        raise ExcessVocabError(f"{skipped} document(s) with years outside matrix range")
    if skipped and tally is not None:
        tally.add("year_out_of_matrix_range", skipped)
    return OccurrenceMatrix(years=years, words=vocab.words, counts=counts, totals=totals)


def merge(a: OccurrenceMatrix, b: OccurrenceMatrix) -> OccurrenceMatrix:
    """Element-wise sum of two shard matrices sharing vocabulary and years."""
    if a.years != b.years:
        raise ExcessVocabError("cannot merge matrices with different year ranges")
    if a.words != b.words:
        raise ExcessVocabError("cannot merge matrices with different vocabularies")
    return OccurrenceMatrix(
        years=a.years, words=a.words,
        counts=a.counts + b.counts, totals=a.totals + b.totals,
    )


# -- set containment ---------------------------------------------------------

def containment_counts(
    corpus: Iterable[Document],
    word_set: Iterable[str],
    years: Sequence[int] | None = None,
) -> dict[int, tuple[int, int]]:
    """Per year: (documents containing >= 1 word of the set, total documents).

    This is a union quantity; it requires a document pass and is not derivable
    from the occurrence matrix.
    """
    words = frozenset(word_set)
    if not words:
        raise ExcessVocabError("word set must be non-empty")
    year_tuple, corpus = _resolve_years(corpus, years)
    contained = {y: 0 for y in year_tuple}
    totals = {y: 0 for y in year_tuple}
    for doc in corpus:
        if doc.year not in totals:
            continue
        totals[doc.year] += 1
        if not words.isdisjoint(tokenize(doc.text)):
            contained[doc.year] += 1
    return {y: (contained[y], totals[y]) for y in year_tuple}


@dataclass
class FrequencyProfile:
    """Per-year sorted multisets of each document's minimum candidate frequency.

    ``count_below(year, t)`` answers "how many documents in ``year`` contain at
    least one candidate word with frequency < t" in O(log n), which makes a
    whole threshold sweep a single corpus pass.
    """

    years: tuple[int, ...]
    minima: dict[int, np.ndarray]
    totals: dict[int, int]

    def count_below(self, year: int, threshold: float) -> int:
        arr = self.minima[year]
        return int(np.searchsorted(arr, threshold, side="left"))

    def total(self, year: int) -> int:
        return self.totals[year]


def min_marker_frequency_profile(
    corpus: Iterable[Document],
    candidates: Mapping[str, float],
    years: Sequence[int] | None = None,
) -> FrequencyProfile:
    """For each document, the minimum frequency among contained candidate words.

    Documents containing no candidate word contribute nothing. Frequencies must
    lie in (0, 1].
    """
    if not candidates:
        raise ExcessVocabError("candidate set must be non-empty")
    for w, p in candidates.items():
        if not (0.0 < p <= 1.0):
            raise ExcessVocabError(f"candidate {w!r}: frequency {p} outside (0, 1]")
    year_tuple, corpus = _resolve_years(corpus, years)
    keys = frozenset(candidates)
    minima: dict[int, list[float]] = {y: [] for y in year_tuple}
    totals = {y: 0 for y in year_tuple}
    for doc in corpus:
        if doc.year not in totals:
            continue
        totals[doc.year] += 1
        present = keys.intersection(tokenize(doc.text))
        if present:
            minima[doc.year].append(min(candidates[w] for w in present))
    arrays = {y: np.sort(np.asarray(v, dtype=np.float64)) for y, v in minima.items()}
    return FrequencyProfile(years=year_tuple, minima=arrays, totals=totals)


# -- matrix (de)serialization -------------------------------------------------

TOTALS_LABELS = ("total", "totals")


def write_matrix(matrix: OccurrenceMatrix, target: str | Path | IO[bytes]) -> None:
    """Write the matrix as gzip-compressed CSV.

    Header row carries the years; one row per word; the final row is labeled
    ``total`` and carries the per-year document totals. The gzip mtime is
    zeroed so identical matrices serialize to identical bytes.
    """
    own = isinstance(target, (str, Path))
    raw: IO[bytes] = open(target, "wb") if own else target  # type: ignore[arg-type]
    try:
        with gzip.GzipFile(fileobj=raw, mode="wb", mtime=0, filename="") as gz:
            text = io.TextIOWrapper(gz, encoding="utf-8", newline="")
            writer = csv.writer(text, lineterminator="\n")
            writer.writerow(["word", *[str(y) for y in matrix.years]])
            for i, word in enumerate(matrix.words):
                writer.writerow([word, *[str(int(c)) for c in matrix.counts[i]]])
            writer.writerow(["total", *[str(int(t)) for t in matrix.totals]])
            text.flush()
            text.detach()
    finally:
        if own:
            raw.close()


def read_matrix(source: str | Path | IO[bytes]) -> OccurrenceMatrix:
    """Read a matrix written by ``write_matrix`` (or a compatible CSV/CSV.gz).

    The first header cell is ignored (any label, possibly empty); remaining
    header cells must be integer years. The final row must be labeled
    ``total``/``totals`` and carries per-year totals.
    """
    own = isinstance(source, (str, Path))
    raw: IO[bytes] = open(source, "rb") if own else source  # type: ignore[arg-type]
    try:
        head = raw.read(2)
        raw.seek(0)
        stream = gzip.open(raw, "rb") if head == b"\x1f\x8b" else raw
        text = io.TextIOWrapper(stream, encoding="utf-8", newline="")
        reader = csv.reader(text)
        try:
            header = next(reader)
        except StopIteration:
            raise MatrixFormatError("EMPTY_FILE", "matrix CSV has no header row")
        try:
            years = tuple(int(y) for y in header[1:])
        except ValueError:
            raise MatrixFormatError("BAD_HEADER", f"non-integer year in header: {header[1:]}")
        if not years:
            raise MatrixFormatError("BAD_HEADER", "header row carries no years")
        n_cols = len(years)
        words: list[str] = []
        rows: list[list[int]] = []
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != n_cols + 1:
                raise MatrixFormatError(
                    "SHAPE_MISMATCH", f"row {lineno}: expected {n_cols + 1} cells, got {len(row)}")
            try:
                values = [int(c) for c in row[1:]]
            except ValueError:
                raise MatrixFormatError("NON_INTEGER_CELL", f"row {lineno}: non-integer count")
            words.append(row[0])
            rows.append(values)
        if not words or words[-1].lower() not in TOTALS_LABELS:
            raise MatrixFormatError("MISSING_TOTALS", "final row labeled 'total' is required")
        totals = np.asarray(rows.pop(), dtype=np.int64)
        words.pop()
        counts = (np.asarray(rows, dtype=np.int64) if rows
                  else np.zeros((0, n_cols), dtype=np.int64))
        return OccurrenceMatrix(years=years, words=tuple(words), counts=counts, totals=totals)
    finally:
        if own:
            raw.close()
