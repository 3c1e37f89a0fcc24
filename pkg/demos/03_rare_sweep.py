"""The rare-set frequency-threshold sweep.

Groups candidate marker words by target-year frequency p < T and traces the
set-level gap Delta as a function of T. One corpus pass (the per-document
minimum-candidate-frequency profile) yields the entire curve; the maximizing
threshold defines the rare marker set.

Run: python demos/03_rare_sweep.py
"""

import numpy as np

from excessvocab import (SyntheticSpec, generate_corpus, inject_markers,
                         min_marker_frequency_profile, rare_sweep)
from excessvocab.synth import InjectionSpec

# candidates span two orders of magnitude in frequency
RARE = tuple(f"whisper{c}" for c in "abcdefgh")     # ~0.2% each, intervention-preferred
COMMON = tuple(f"shout{c}" for c in "ab")           # ~8% each, noisy background


def main():
    base = tuple((w, 0.002) for w in RARE) + tuple((w, 0.08) for w in COMMON)
    spec = SyntheticSpec(years=(2021, 2024), docs_per_year=30_000,
                         base_vocab=base, doc_length=(12, 20), seed=5)
    corpus = generate_corpus(spec)
    corpus, _ = inject_markers(
        corpus, InjectionSpec(target_year=2024, fraction=0.12, marker_pool=RARE,
                              words_per_doc=2), seed=6)

    # target-year frequencies of every candidate (as the analysis would see them)
    from excessvocab import build_vocabulary, count_occurrences
    vocab = build_vocabulary(corpus, min_df=1e-5)
    matrix = count_occurrences(corpus, vocab)
    col = matrix.year_column(2024)
    freq = {w: (int(matrix.counts[matrix.index[w], col]) + 1) / (int(matrix.totals[col]) + 1)
            for w in RARE + COMMON}

    profile = min_marker_frequency_profile(corpus, freq, years=(2021, 2022, 2024))
    result = rare_sweep(profile, freq, 2024,
                        thresholds=np.geomspace(5e-4, 0.5, 12).tolist())

    print(f"{'T':>10} {'n_words':>8} {'P':>8} {'Q':>8} {'delta':>8}")
    for pt in result.points:
        marker = " <- best" if result.best is pt else ""
        print(f"{pt.threshold:10.4f} {pt.n_words:8d} {pt.P:8.4f} {pt.Q:8.4f} "
              f"{pt.delta:8.4f}{marker}")
    print(f"\nbest threshold T={result.best.threshold:.4f} selects "
          f"{result.best.n_words} words with Delta={result.best.delta:.4f}")
    print("small thresholds miss markers; large ones dilute the set with noisy "
          "common words whose baseline swamps the signal.")


if __name__ == "__main__":
    main()
