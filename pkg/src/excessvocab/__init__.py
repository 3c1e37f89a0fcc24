"""Excess-vocabulary analysis for longitudinal text corpora.

Detects abrupt vocabulary shifts by comparing observed word frequencies with
counterfactual baselines extrapolated from earlier years, and turns sets of
excess marker words into lower bounds on the prevalence of a writing-style
intervention.
"""

from .clean import (CleaningRule, CleaningSession, CleanOutcome, clean_text,
                    is_correction_notice, load_rules)
from .count import (FrequencyProfile, OccurrenceMatrix, Vocabulary,
                    build_vocabulary, containment_counts, count_occurrences,
                    merge, min_marker_frequency_profile, read_matrix,
                    tokenize, write_matrix)
from .excess import (AnnotationTable, ExcessThresholds, ExcessVia, Lemmatizer,
                     WordYearStats, counterfactual, eligible_words,
                     excess_words, is_excess, lemmatize, representative_word,
                     smoothed_frequency, unique_lemma_count, word_year_stats)
from .ingest import (Document, FieldRule, FilterCriteria, RejectReason,
                     SkipTally, assign_fields, filter_document, parse_jsonl,
                     parse_pubmed_xml, write_jsonl)
from .markergap import (EmbeddedPoint, GapResult, MarkerKind, MarkerSet,
                        SubgroupSpec, SweepResult, combined_estimate, gap,
                        local_delta, measure_gap, rare_sweep, subgroup_gaps)
from .synth import (InjectionSpec, SyntheticSpec, generate_corpus,
                    inject_markers, oracle_counts)

__version__ = "0.1.0"

__all__ = [
    "AnnotationTable", "CleanOutcome", "CleaningRule", "CleaningSession",
    "Document", "EmbeddedPoint", "ExcessThresholds", "ExcessVia", "FieldRule",
    "FilterCriteria", "FrequencyProfile", "GapResult", "InjectionSpec",
    "Lemmatizer", "MarkerKind", "MarkerSet", "OccurrenceMatrix", "RejectReason",
    "SkipTally", "SubgroupSpec", "SweepResult", "SyntheticSpec", "Vocabulary",
    "WordYearStats", "assign_fields", "build_vocabulary", "clean_text",
    "combined_estimate", "containment_counts", "count_occurrences",
    "counterfactual", "eligible_words", "excess_words", "filter_document",
    "gap", "generate_corpus", "inject_markers", "is_correction_notice",
    "is_excess", "lemmatize", "load_rules", "local_delta", "measure_gap",
    "merge", "min_marker_frequency_profile", "oracle_counts", "parse_jsonl",
    "parse_pubmed_xml", "rare_sweep", "read_matrix", "representative_word",
    "smoothed_frequency", "subgroup_gaps", "tokenize", "unique_lemma_count",
    "word_year_stats", "write_jsonl", "write_matrix",
]
