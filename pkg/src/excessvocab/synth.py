"""Synthetic longitudinal corpora with known ground truth.

Documents are bags of tokens with no grammar; that is sufficient because the
whole pipeline is binary-containment-based. Base words appear independently
per document with a per-year trajectory probability; a style intervention is
modeled as marker-word insertion into a known fraction of target-year
documents. Everything is a pure function of (spec, seed).
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .count import OccurrenceMatrix
from .errors import (EmptyCorpusError, ExcessVocabError,
                     MarkerPoolExhaustedError, SizeCapError)
from .ingest import Document

ORACLE_SIZE_CAP = 10_000

_FILLER_ALPHABET = "abcdefghijklmnopqrstuvwxyz"
_FILLER_RE = re.compile(r"^zz[a-z]{4}$")


def filler_word(i: int) -> str:
    """Deterministic letter-only filler token #i (prefix ``zz``)."""
    s = ""
    for _ in range(4):
        s = _FILLER_ALPHABET[i % 26] + s
        i //= 26
    return "zz" + s


Trajectory = Mapping[int, float] | float


@dataclass(frozen=True)
class SyntheticSpec:
    """Generative description of a synthetic corpus.

    ``base_vocab`` maps each word to a trajectory: either a constant
    containment probability or a year -> probability mapping (missing years
    mean 0). ``doc_length`` is a uniform token-count range; filler tokens
    (``zz`` prefix) pad documents to the sampled length.
    """

    years: tuple[int, int]
    docs_per_year: int
    base_vocab: tuple[tuple[str, Trajectory], ...]
    doc_length: tuple[int, int] = (20, 40)
    seed: int = 0
    filler_vocab_size: int = 2000
    metadata: Mapping[str, object] | None = None

    def __post_init__(self):
        if self.years[0] > self.years[1]:
            raise ExcessVocabError("years lo must be <= hi")
        if self.docs_per_year < 1:
            raise ExcessVocabError("docs_per_year must be >= 1")
        if self.doc_length[0] < 0 or self.doc_length[0] > self.doc_length[1]:
            raise ExcessVocabError("doc_length must be a non-negative (min, max) range")
        for word, traj in self.base_vocab:
            if _FILLER_RE.match(word):
                raise ExcessVocabError(f"base word {word!r} collides with the filler pool")
            for p in ([traj] if isinstance(traj, (int, float)) else traj.values()):
                if not (0.0 <= float(p) <= 1.0):
                    raise ExcessVocabError(f"word {word!r}: probability {p} outside [0, 1]")

    def probability(self, word_index: int, year: int) -> float:
        traj = self.base_vocab[word_index][1]
        if isinstance(traj, (int, float)):
            return float(traj)
        return float(traj.get(year, 0.0))

    @classmethod
    def from_json(cls, source: str | Path | IO[str]) -> "SyntheticSpec":
        if isinstance(source, (str, Path)):
            obj = json.loads(Path(source).read_text(encoding="utf-8"))
        else:
            obj = json.load(source)
        base = []
        for word, traj in obj["base_vocab"]:
            if isinstance(traj, dict):
                traj = {int(y): float(p) for y, p in traj.items()}
            base.append((word, traj))
        return cls(
            years=tuple(obj["years"]),
            docs_per_year=int(obj["docs_per_year"]),
            base_vocab=tuple(base),
            doc_length=tuple(obj.get("doc_length", (20, 40))),
            seed=int(obj.get("seed", 0)),
            filler_vocab_size=int(obj.get("filler_vocab_size", 2000)),
            metadata=obj.get("metadata"),
        )


def generate_corpus(spec: SyntheticSpec, seed: int | None = None) -> list[Document]:
    """Deterministic corpus for (spec, seed); per-year seeds allow parallel use.

    Each document's token set includes base word w independently with w's
    trajectory probability for the document's year.
    """
    base_seed = spec.seed if seed is None else seed
    docs: list[Document] = []
    metadata = spec.metadata or {}
    journal = metadata.get("journal")
    country = metadata.get("country")
    fields = frozenset(metadata.get("fields", ()))
    extra = {str(k): str(v) for k, v in metadata.get("extra", {}).items()}
    pool = [filler_word(i) for i in range(spec.filler_vocab_size)]
    base_words = [w for w, _ in spec.base_vocab]
    lo, hi = spec.years
    for year in range(lo, hi + 1):
        rng = np.random.default_rng([base_seed, year])
        n = spec.docs_per_year
        included: list[list[str]] = [[] for _ in range(n)]
        for wi, word in enumerate(base_words):
            p = spec.probability(wi, year)
            if p <= 0.0:
                continue
            for i in np.flatnonzero(rng.random(n) < p):
                included[i].append(word)
        lengths = rng.integers(spec.doc_length[0], spec.doc_length[1] + 1, n)
        fill_counts = np.maximum(lengths - np.array([len(t) for t in included]), 0)
        filler_idx = rng.integers(0, spec.filler_vocab_size, int(fill_counts.sum())).tolist()
        offsets = np.concatenate(([0], np.cumsum(fill_counts)))
        for i in range(n):
            tokens = included[i] + [pool[j] for j in filler_idx[offsets[i]:offsets[i + 1]]]
            docs.append(Document(
                id=f"S{year}-{i:06d}", year=year, title="",
                text=" ".join(tokens),
                journal=journal, country=country, fields=fields, extra=dict(extra),
            ))
    return docs


@dataclass(frozen=True)
class InjectionSpec:
    """A style intervention: marker insertion into a fraction of one year.

    With ``guarantee_novel`` every injected document receives at least one
    marker absent from its baseline text. ``censor_probability`` models
    authors removing all suggested markers: such documents count as processed
    in the ground truth but their text is unchanged, which demonstrates why
    the measured gap is only a lower bound.
    """

    target_year: int
    fraction: float
    marker_pool: tuple[str, ...]
    words_per_doc: int = 1
    guarantee_novel: bool = True
    censor_probability: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.fraction <= 1.0):
            raise ExcessVocabError("fraction must lie in [0, 1]")
        if not self.marker_pool:
            raise ExcessVocabError("marker pool must be non-empty")
        if self.words_per_doc < 1:
            raise ExcessVocabError("words_per_doc must be >= 1")
        if self.words_per_doc > len(self.marker_pool):
            raise ExcessVocabError("words_per_doc exceeds marker pool size")
        if not (0.0 <= self.censor_probability <= 1.0):
            raise ExcessVocabError("censor_probability must lie in [0, 1]")


_TOKEN_RE = re.compile(r"\w+")


def inject_markers(
    corpus: Sequence[Document],
    injection: InjectionSpec,
    seed: int = 0,
) -> tuple[list[Document], frozenset[str]]:
    """Insert markers into round(fraction * n_year) target-year documents.

    Documents are chosen uniformly without replacement (seeded). Returns the
    modified corpus and the ground-truth set of processed document ids
    (censored documents included: they were processed but show no markers).
    """
    target_positions = [i for i, d in enumerate(corpus) if d.year == injection.target_year]
    if not target_positions:
        raise ExcessVocabError(f"target year {injection.target_year} not present in corpus")
    n_year = len(target_positions)
    n_inject = int(np.floor(injection.fraction * n_year + 0.5))
    rng = np.random.default_rng(seed)
    chosen = rng.choice(n_year, size=n_inject, replace=False) if n_inject else np.array([], dtype=int)
    new_docs = list(corpus)
    truth: set[str] = set()
    pool = injection.marker_pool
    pool_set = frozenset(pool)
    for pos in sorted(chosen.tolist()):
        doc = corpus[target_positions[pos]]
        truth.add(doc.id)
        if injection.censor_probability > 0.0 and rng.random() < injection.censor_probability:
            continue
        picked = [pool[j] for j in rng.choice(len(pool), size=injection.words_per_doc,
                                              replace=False)]
        if injection.guarantee_novel:
            tokens = frozenset(_TOKEN_RE.findall(doc.text.lower()))
            if all(w in tokens for w in picked):
                novel = sorted(pool_set - tokens)
                if not novel:
                    raise MarkerPoolExhaustedError(
                        f"document {doc.id} already contains every marker in the pool")
                picked[0] = novel[int(rng.integers(len(novel)))]
        new_docs[target_positions[pos]] = doc.with_text(doc.text + " " + " ".join(picked))
    return new_docs, frozenset(truth)


def write_truth_csv(corpus: Iterable[Document], truth: frozenset[str],
                    target: str | Path | IO[str]) -> None:
    """truth.csv: id, injected (0/1) for every document in corpus order."""
    own = isinstance(target, (str, Path))
    handle = open(target, "w", encoding="utf-8", newline="") if own else target
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["id", "injected"])
        for doc in corpus:
            writer.writerow([doc.id, "1" if doc.id in truth else "0"])
    finally:
        if own:
            handle.close()


def oracle_counts(
    corpus: Sequence[Document],
    words: Sequence[str],
    years: Sequence[int] | None = None,
) -> OccurrenceMatrix:
    """Naive quadratic reference count, for tests only (no sharding, no vocabulary pass).

    Refuses corpora above ``ORACLE_SIZE_CAP`` documents.
    """
    docs = list(corpus)
    if len(docs) > ORACLE_SIZE_CAP:
        raise SizeCapError(
            f"oracle_counts is capped at {ORACLE_SIZE_CAP} documents, got {len(docs)}")
    if years is None:
        if not docs:
            raise EmptyCorpusError("no documents")
        years = range(min(d.year for d in docs), max(d.year for d in docs) + 1)
    year_list = list(years)
    counts = [[0] * len(year_list) for _ in words]
    totals = [0] * len(year_list)
    for doc in docs:
        if doc.year not in year_list:
            continue
        j = year_list.index(doc.year)
        totals[j] += 1
        tokens = set(re.findall(r"\w+", doc.text.lower()))
        for i, word in enumerate(words):
            if word in tokens:
                counts[i][j] += 1
    return OccurrenceMatrix(
        years=tuple(year_list), words=tuple(words),
        counts=np.array(counts, dtype=np.int64).reshape(len(words), len(year_list)),
        totals=np.array(totals, dtype=np.int64),
    )
