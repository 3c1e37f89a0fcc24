"""Excess-word detection on a synthetic corpus with a known intervention.

Builds three years of documents with stable word frequencies, injects marker
words into 15% of the final year, and shows how counterfactual extrapolation
flags exactly those markers as excess vocabulary.

Run: python demos/01_excess_words.py
"""

from excessvocab import (ExcessThresholds, SyntheticSpec, build_vocabulary,
                         count_occurrences, counterfactual, excess_words,
                         generate_corpus, inject_markers, word_year_stats)
from excessvocab.synth import InjectionSpec

MARKERS = ("delvemark", "underscoremark", "showcasemark")
STABLE = ("patient", "cells", "treatment", "analysis")


def main():
    spec = SyntheticSpec(
        years=(2021, 2024),
        docs_per_year=20_000,
        base_vocab=tuple((w, 0.30) for w in STABLE) + tuple((w, 0.003) for w in MARKERS),
        doc_length=(15, 25),
        seed=2024,
    )
    corpus = generate_corpus(spec)
    corpus, truth = inject_markers(
        corpus,
        InjectionSpec(target_year=2024, fraction=0.15, marker_pool=MARKERS,
                      words_per_doc=1),
        seed=7,
    )
    print(f"corpus: {len(corpus)} documents, {len(truth)} secretly intervention-processed")

    vocab = build_vocabulary(corpus, min_df=1e-5)
    matrix = count_occurrences(corpus, vocab)
    print(f"matrix: {len(matrix.words)} words x {len(matrix.years)} years")

    # The counterfactual is a clamped linear extrapolation of the two
    # pre-intervention years: declining words are never extrapolated down.
    stats = word_year_stats(matrix, MARKERS[0], 2024)
    print(f"\n{MARKERS[0]}: p2021={stats.q:.5f} extrapolates from "
          f"q = {counterfactual(0.003, 0.003):.5f} while observed p = {stats.p:.5f}")

    all_stats = excess_words(matrix, 2024, ExcessThresholds())
    flagged = [s for s in all_stats if s.excess]
    print(f"\n{len(all_stats)} eligible words, {len(flagged)} flagged as excess:")
    print(f"{'word':>16} {'p':>9} {'q':>9} {'delta':>9} {'ratio':>7}  via")
    for s in flagged:
        print(f"{s.word:>16} {s.p:9.5f} {s.q:9.5f} {s.delta:9.5f} {s.ratio:7.2f}  {s.excess_via.value}")

    stable_flagged = [s.word for s in flagged if s.word in STABLE]
    print(f"\nstable background words wrongly flagged: {stable_flagged or 'none'}")


if __name__ == "__main__":
    main()
