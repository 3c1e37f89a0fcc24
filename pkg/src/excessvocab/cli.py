"""Composable command-line pipeline over file artifacts.

Each subcommand reads the artifacts of earlier stages and writes its own, so
pipelines are resumable and every stage can be tested in isolation. Exit
codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import shutil
import sys
from pathlib import Path

from . import clean as clean_mod
from . import count as count_mod
from . import excess as excess_mod
from . import ingest as ingest_mod
from . import markergap as gap_mod
from . import synth as synth_mod
from .errors import ExcessVocabError

CONFIG_ENV = "EXCESSVOCAB_CONFIG"


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        raise UsageError(message)


def _require_artifact(path: str | None, what: str, produced_by: str) -> Path:
    if not path:
        raise UsageError(f"missing required {what}")
    p = Path(path)
    if not p.exists():
        raise DataError(
            f"missing {what} {p}; produce it with `excessvocab {produced_by}`")
    return p


def _parse_year_range(value: str) -> tuple[int, int]:
    try:
        lo, hi = value.split(":")
        return int(lo), int(hi)
    except ValueError:
        raise UsageError(f"expected a year range LO:HI, got {value!r}")


class Options:
    """Resolved options: CLI flag > config file > built-in default."""

    def __init__(self, args: argparse.Namespace, defaults: dict):
        self.defaults = defaults
        config_path = args.config or os.environ.get(CONFIG_ENV)
        self.config: dict = {}
        if config_path:
            p = Path(config_path)
            if not p.exists():
                raise DataError(f"config file {p} does not exist")
            self.config = json.loads(p.read_text(encoding="utf-8"))
        self.args = vars(args)

    def get(self, key: str):
        value = self.args.get(key)
        if value is not None:
            return value
        if key in self.config:
            return self.config[key]
        return self.defaults.get(key)

    def effective(self) -> dict:
        merged = dict(self.defaults)
        merged.update({k: v for k, v in self.config.items() if k in self.defaults})
        merged.update({k: v for k, v in self.args.items()
                       if k in self.defaults and v is not None})
        return {k: merged[k] for k in sorted(merged)}

    def dump_if_requested(self) -> None:
        path = self.args.get("dump_config")
        if path:
            Path(path).write_text(
                json.dumps(self.effective(), indent=2, sort_keys=True) + "\n",
                encoding="utf-8")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file (or set $" + CONFIG_ENV + ")")
    parser.add_argument("--dump-config", dest="dump_config",
                        help="write the resolved effective options as JSON and continue")


def build_parser() -> _Parser:
    parser = _Parser(prog="excessvocab",
                     description="Excess-vocabulary analysis pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="XML/JSONL to filtered canonical JSONL")
    _add_common(p)
    p.add_argument("--in", dest="input", help="input .xml[.gz] or .jsonl[.gz]")
    p.add_argument("--out", help="output canonical JSONL (.jsonl[.gz])")
    p.add_argument("--report", help="skip/reject tally JSON")
    p.add_argument("--format", choices=["xml", "jsonl"], help="override format detection")
    p.add_argument("--min-chars", dest="min_chars", type=int)
    p.add_argument("--max-chars", dest="max_chars", type=int)
    p.add_argument("--language")
    p.add_argument("--years", help="inclusive year range LO:HI")
    p.add_argument("--field-rules", dest="field_rules", help="field-rule TSV (default: shipped)")
    p.add_argument("--country-table", dest="country_table", help="country alias TSV (default: shipped)")
    p.add_argument("--lenient", action="store_true", default=None,
                   help="skip malformed JSONL lines instead of failing")

    p = sub.add_parser("clean", help="apply contamination rules and drop notices")
    _add_common(p)
    p.add_argument("--in", dest="input")
    p.add_argument("--out")
    p.add_argument("--rules", help="cleaning-rule TSV (default: shipped starter set)")
    p.add_argument("--notice-patterns", dest="notice_patterns")
    p.add_argument("--min-chars", dest="min_chars", type=int)
    p.add_argument("--report", help="cleaning report JSON")

    p = sub.add_parser("count", help="build the word x year occurrence matrix")
    _add_common(p)
    p.add_argument("--in", dest="input")
    p.add_argument("--out", help="matrix CSV (.csv.gz)")
    p.add_argument("--min-df", dest="min_df", type=float)
    p.add_argument("--all-tokens", dest="all_tokens", action="store_true", default=None,
                   help="keep all tokens instead of 4+ letter words")
    p.add_argument("--years", help="matrix year range LO:HI (default: span of the corpus)")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("excess", help="per-word excess statistics for a target year")
    _add_common(p)
    p.add_argument("--matrix")
    p.add_argument("--year", type=int)
    p.add_argument("--out", help="stats CSV")
    p.add_argument("--annotations", help="word,label,pos CSV")
    p.add_argument("--lemma-overrides", dest="lemma_overrides")
    p.add_argument("--spelling", help="british,american CSV")
    p.add_argument("--delta-min", dest="delta_min", type=float)
    p.add_argument("--eligibility-min-freq", dest="eligibility_min_freq", type=float)
    p.add_argument("--ratio-slope", dest="ratio_slope", type=float)
    p.add_argument("--ratio-intercept", dest="ratio_intercept", type=float)

    p = sub.add_parser("gap", help="marker-set frequency gap for a target year")
    _add_common(p)
    p.add_argument("--in", dest="input")
    p.add_argument("--markers", help="marker-set file (one word per line)")
    p.add_argument("--year", type=int)
    p.add_argument("--out", help="gap JSON")

    p = sub.add_parser("sweep", help="rare-set threshold sweep")
    _add_common(p)
    p.add_argument("--in", dest="input")
    p.add_argument("--stats", help="stats CSV from `excess`")
    p.add_argument("--year", type=int)
    p.add_argument("--out", help="sweep CSV")
    p.add_argument("--label", help="restrict candidates to this annotation label (default: style)")
    p.add_argument("--thresholds", help="comma-separated threshold list (default: automatic)")
    p.add_argument("--emit-set", dest="emit_set",
                   help="write the gap-maximizing word subset to this file")

    p = sub.add_parser("subgroups", help="marker gaps per metadata subgroup")
    _add_common(p)
    p.add_argument("--in", dest="input")
    p.add_argument("--specs", help="subgroup spec JSON")
    p.add_argument("--rare", help="rare marker-set file")
    p.add_argument("--common", help="common marker-set file (default: shipped)")
    p.add_argument("--year", type=int)
    p.add_argument("--out", help="gaps CSV")
    p.add_argument("--min-docs", dest="min_docs", type=int)
    p.add_argument("--eligibility-years", dest="eligibility_years", help="LO:HI")
    p.add_argument("--report", help="JSON report incl. excluded subgroups")

    p = sub.add_parser("local-delta", help="k-NN local gaps over 2D embedded points")
    _add_common(p)
    p.add_argument("--points", help="points CSV: id,year,x,y,in_rare,in_common")
    p.add_argument("--k", type=int)
    p.add_argument("--reference-year", dest="reference_year", type=int)
    p.add_argument("--target-year", dest="target_year", type=int)
    p.add_argument("--out", help="local delta CSV")
    p.add_argument("--errors-out", dest="errors_out", help="per-point error CSV")

    p = sub.add_parser("synth", help="generate a synthetic corpus with ground truth")
    _add_common(p)
    p.add_argument("--spec", help="synthetic spec JSON")
    p.add_argument("--out", help="corpus JSONL")
    p.add_argument("--truth", help="ground-truth CSV (id,injected)")
    p.add_argument("--seed", type=int, help="override the seed from the spec file")

    p = sub.add_parser("report", help="bundle figure-data CSVs")
    _add_common(p)
    p.add_argument("--matrix")
    p.add_argument("--annotations")
    p.add_argument("--year", type=int, help="target year for stats/scatter data")
    p.add_argument("--years", help="year range LO:HI for the stacked-bars census")
    p.add_argument("--words", help="comma-separated words for the time-series CSV")
    p.add_argument("--sweep", help="existing sweep.csv to bundle")
    p.add_argument("--gaps", help="existing gaps.csv to bundle")
    p.add_argument("--out", help="output directory")

    return parser


DEFAULTS: dict[str, dict] = {
    "ingest": {"input": None, "out": None, "report": None,
               "min_chars": 250, "max_chars": 4000, "language": "eng",
               "years": "2010:2024", "lenient": False, "format": None,
               "field_rules": None, "country_table": None},
    "clean": {"input": None, "out": None, "report": None,
              "rules": None, "notice_patterns": None, "min_chars": 250},
    "count": {"input": None, "out": None,
              "min_df": 1e-6, "all_tokens": False, "years": None, "workers": 1},
    "excess": {"matrix": None, "year": None, "out": None,
               "annotations": None, "lemma_overrides": None, "spelling": None,
               "delta_min": 0.01, "eligibility_min_freq": 1e-4,
               "ratio_slope": None, "ratio_intercept": 0.0},
    "gap": {"input": None, "markers": None, "year": None, "out": None},
    "sweep": {"input": None, "stats": None, "year": None, "out": None,
              "label": "style", "thresholds": None, "emit_set": None},
    "subgroups": {"input": None, "specs": None, "rare": None, "common": None,
                  "year": None, "out": None, "report": None,
                  "min_docs": 300, "eligibility_years": None},
    "local-delta": {"points": None, "k": 100, "reference_year": None,
                    "target_year": None, "out": None, "errors_out": None},
    "synth": {"spec": None, "out": None, "truth": None, "seed": None},
    "report": {"matrix": None, "year": None, "years": None, "out": None,
               "words": None, "annotations": None, "sweep": None, "gaps": None},
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        opts = Options(args, DEFAULTS.get(args.command, {}))
        opts.dump_if_requested()
        handler = _HANDLERS[args.command]
        return handler(args, opts)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, ExcessVocabError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _load_docs(path: Path, lenient: bool = False,
               tally: ingest_mod.SkipTally | None = None):
    return ingest_mod.parse_jsonl(path, strict=not lenient, tally=tally)


def cmd_ingest(args, opts: Options) -> int:
    in_path = _require_artifact(opts.get("input"), "input file", "synth (or supply raw data)")
    out = opts.get("out") or opts.config.get("out")
    if not out:
        raise UsageError("--out is required")
    fmt = opts.get("format")
    if fmt is None:
        name = in_path.name.removesuffix(".gz")
        fmt = "xml" if name.endswith(".xml") else "jsonl"
    criteria = ingest_mod.FilterCriteria(
        min_chars=opts.get("min_chars"), max_chars=opts.get("max_chars"),
        language=opts.get("language"),
        year_range=_parse_year_range(opts.get("years")),
    )
    tally = ingest_mod.SkipTally()
    field_rules = ingest_mod.load_field_rules(opts.get("field_rules"))
    country_table = ingest_mod.load_country_table(opts.get("country_table"))
    if fmt == "xml":
        docs = ingest_mod.parse_pubmed_xml(in_path, tally=tally,
                                           field_rules=field_rules,
                                           country_table=country_table)
    else:
        docs = _load_docs(in_path, lenient=bool(opts.get("lenient")), tally=tally)
    accepted = 0
    rejected: dict[str, int] = {}
    read = 0

    def _filtered():
        nonlocal accepted, read
        for doc in docs:
            read += 1
            reason = ingest_mod.filter_document(doc, criteria)
            if reason is None:
                accepted += 1
                yield doc
            else:
                rejected[reason.value] = rejected.get(reason.value, 0) + 1

    ingest_mod.write_jsonl(_filtered(), out)
    report = {"read": read, "accepted": accepted, "rejected": rejected,
              "skipped": tally.counts}
    if opts.get("report") or args.report:
        Path(args.report or opts.get("report")).write_text(
            json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"ingest: read={read} accepted={accepted} "
          f"rejected={sum(rejected.values())} skipped={tally.total}")
    return 0


def cmd_clean(args, opts: Options) -> int:
    in_path = _require_artifact(opts.get("input"), "document JSONL", "ingest")
    out = opts.get("out") or args.out
    if not out:
        raise UsageError("--out is required")
    rules = clean_mod.load_rules(opts.get("rules"))
    patterns = (clean_mod.load_notice_patterns(opts.get("notice_patterns"))
                if opts.get("notice_patterns") else None)
    session = clean_mod.CleaningSession(rules, min_chars=opts.get("min_chars"),
                                        notice_patterns=patterns)

    def _cleaned():
        for doc in _load_docs(in_path):
            kept = session.process(doc)
            if kept is not None:
                yield kept

    ingest_mod.write_jsonl(_cleaned(), out)
    report = session.report()
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                                     encoding="utf-8")
    print(f"clean: seen={report['documents_seen']} "
          f"modified={report['documents_modified']} dropped={report['documents_dropped']}")
    return 0


def cmd_count(args, opts: Options) -> int:
    in_path = _require_artifact(opts.get("input"), "document JSONL", "ingest or clean")
    out = opts.get("out") or args.out
    if not out:
        raise UsageError("--out is required")
    years = opts.get("years")
    year_range = None if years is None else _parse_year_range(years)

    # two streaming passes: vocabulary (tracking the year span), then counting
    bounds: list[int | None] = [None, None]

    def _tracking():
        for doc in _load_docs(in_path):
            if bounds[0] is None or doc.year < bounds[0]:
                bounds[0] = doc.year
            if bounds[1] is None or doc.year > bounds[1]:
                bounds[1] = doc.year
            yield doc

    try:
        vocab = count_mod.build_vocabulary(_tracking(), min_df=opts.get("min_df"),
                                           letters_only=not opts.get("all_tokens"))
    except ExcessVocabError:
        raise DataError("no documents")
    if year_range is None:
        year_range = (bounds[0], bounds[1])
    matrix = count_mod.count_occurrences(
        _load_docs(in_path), vocab,
        years=range(year_range[0], year_range[1] + 1),
        strict=False, workers=opts.get("workers"),
    )
    count_mod.write_matrix(matrix, out)
    print(f"count: {len(matrix.words)} words x {len(matrix.years)} years, "
          f"{int(matrix.totals.sum())} documents -> {out}")
    return 0


def _thresholds_from_opts(opts: Options) -> excess_mod.ExcessThresholds:
    kwargs = {}
    if opts.get("delta_min") is not None:
        kwargs["delta_min"] = opts.get("delta_min")
    if opts.get("eligibility_min_freq") is not None:
        kwargs["eligibility_min_freq"] = opts.get("eligibility_min_freq")
    if opts.get("ratio_slope") is not None:
        kwargs["ratio_line_slope"] = opts.get("ratio_slope")
    if opts.get("ratio_intercept") is not None:
        kwargs["ratio_line_intercept"] = opts.get("ratio_intercept")
    return excess_mod.ExcessThresholds(**kwargs)


def cmd_excess(args, opts: Options) -> int:
    matrix_path = _require_artifact(opts.get("matrix"), "occurrence matrix", "count")
    year = opts.get("year")
    if year is None:
        raise UsageError("--year is required")
    out = opts.get("out") or args.out
    if not out:
        raise UsageError("--out is required")
    matrix = count_mod.read_matrix(matrix_path)
    annotations = None
    if opts.get("annotations"):
        annotations = excess_mod.AnnotationTable.load(
            _require_artifact(opts.get("annotations"), "annotation CSV", "annotate manually"))
    lemmatizer = excess_mod.Lemmatizer(
        overrides=excess_mod.load_lemma_overrides(opts.get("lemma_overrides"))
        if opts.get("lemma_overrides") else None,
        spelling=excess_mod.load_spelling_map(opts.get("spelling"))
        if opts.get("spelling") else None,
        known_words=(w for w in matrix.words if count_mod.is_eligible_word(w)),
    )
    stats = excess_mod.excess_words(matrix, int(year), _thresholds_from_opts(opts),
                                    annotations=annotations, lemmatizer=lemmatizer)
    excess_mod.write_stats_csv(stats, out)
    n_excess = sum(1 for s in stats if s.excess)
    lemmas = excess_mod.unique_lemma_count(stats, lemmatizer)
    print(f"excess: year={year} eligible={len(stats)} excess={n_excess} "
          f"unique_lemmas={lemmas} -> {out}")
    return 0


def cmd_gap(args, opts: Options) -> int:
    in_path = _require_artifact(opts.get("input"), "document JSONL", "ingest or synth")
    markers_path = _require_artifact(opts.get("markers"), "marker-set file", "sweep --emit-set")
    year = opts.get("year")
    if year is None:
        raise UsageError("--year is required")
    marker_set = gap_mod.load_marker_set(markers_path)
    result = gap_mod.measure_gap(_load_docs(in_path), marker_set.words, int(year))
    payload = {"year": result.year, "P": result.P, "Q": result.Q,
               "delta": result.delta, "n_docs": result.n_docs,
               "markers": marker_set.name, "n_markers": len(marker_set.words)}
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if opts.get("out") or args.out:
        Path(args.out or opts.get("out")).write_text(text, encoding="utf-8")
    print(f"gap: year={year} delta={result.delta:.6f} "
          f"(P={result.P:.6f}, Q={result.Q:.6f}, n={result.n_docs})")
    return 0


def cmd_sweep(args, opts: Options) -> int:
    in_path = _require_artifact(opts.get("input"), "document JSONL", "ingest or synth")
    stats_path = _require_artifact(opts.get("stats"), "stats CSV", "excess")
    year = opts.get("year")
    if year is None:
        raise UsageError("--year is required")
    year = int(year)
    out = opts.get("out") or args.out
    if not out:
        raise UsageError("--out is required")
    label = opts.get("label")
    stats = excess_mod.read_stats_csv(stats_path)
    candidates = {s.word: s.p for s in stats
                  if s.excess and s.year == year and (label in (None, "any") or s.label == label)}
    if not candidates:
        raise DataError(
            f"no excess candidate words with label {label!r} for year {year} in {stats_path}")
    profile = count_mod.min_marker_frequency_profile(
        _load_docs(in_path), candidates, years=(year - 3, year - 2, year))
    thresholds = None
    if opts.get("thresholds"):
        thresholds = [float(t) for t in str(opts.get("thresholds")).split(",")]
    result = gap_mod.rare_sweep(profile, candidates, year, thresholds=thresholds)
    gap_mod.write_sweep_csv(result, out)
    if result.best is None:
        raise DataError("sweep produced no points (all thresholds below candidate frequencies)")
    if opts.get("emit_set"):
        chosen = sorted(w for w, p in candidates.items() if p < result.best.threshold)
        Path(opts.get("emit_set")).write_text(
            "".join(w + "\n" for w in chosen), encoding="utf-8")
    print(f"sweep: best T={result.best.threshold:g} n_words={result.best.n_words} "
          f"delta={result.best.delta:.6f} -> {out}")
    return 0


def cmd_subgroups(args, opts: Options) -> int:
    in_path = _require_artifact(opts.get("input"), "document JSONL", "ingest")
    specs_path = _require_artifact(opts.get("specs"), "subgroup spec JSON", "write one by hand")
    rare_path = _require_artifact(opts.get("rare"), "rare marker-set file", "sweep --emit-set")
    year = opts.get("year")
    if year is None:
        raise UsageError("--year is required")
    out = opts.get("out") or args.out
    if not out:
        raise UsageError("--out is required")
    specs = gap_mod.load_subgroup_specs(specs_path)
    rare = gap_mod.load_marker_set(rare_path, kind=gap_mod.MarkerKind.RARE)
    if opts.get("common"):
        common = gap_mod.load_marker_set(opts.get("common"), kind=gap_mod.MarkerKind.COMMON)
    else:
        common = gap_mod.default_common_set()
    elig = opts.get("eligibility_years")
    elig_years = None
    if elig:
        lo, hi = _parse_year_range(elig)
        elig_years = range(lo, hi + 1)
    table = gap_mod.subgroup_gaps(
        _load_docs(in_path), specs, rare, common, int(year),
        min_docs_per_year=opts.get("min_docs"), eligibility_years=elig_years)
    gap_mod.write_gaps_csv(table, out)
    if args.report:
        Path(args.report).write_text(
            json.dumps({"excluded": dict(table.excluded)}, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
    for name, reason in table.excluded.items():
        print(f"subgroups: excluded {name}: {reason}")
    print(f"subgroups: {len(table.rows)} eligible, {len(table.excluded)} excluded -> {out}")
    return 0


def cmd_local_delta(args, opts: Options) -> int:
    points_path = _require_artifact(opts.get("points"), "points CSV", "embed externally")
    ref = opts.get("reference_year")
    tgt = opts.get("target_year")
    if ref is None or tgt is None:
        raise UsageError("--reference-year and --target-year are required")
    out = opts.get("out") or args.out
    if not out:
        raise UsageError("--out is required")
    points = gap_mod.read_points_csv(points_path)
    result = gap_mod.local_delta(points, int(ref), int(tgt), k=opts.get("k"))
    gap_mod.write_local_delta_csv(result, out)
    if opts.get("errors_out") and result.errors:
        with open(opts.get("errors_out"), "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["id", "reason"])
            writer.writerows(result.errors)
    print(f"local-delta: {len(result.rows)} points, {len(result.errors)} errors -> {out}")
    return 0


def cmd_synth(args, opts: Options) -> int:
    spec_path = _require_artifact(opts.get("spec"), "synthetic spec JSON", "write one by hand")
    out = opts.get("out") or args.out
    if not out:
        raise UsageError("--out is required")
    raw = json.loads(Path(spec_path).read_text(encoding="utf-8"))
    spec = synth_mod.SyntheticSpec.from_json(spec_path)
    seed = opts.get("seed")
    corpus = synth_mod.generate_corpus(spec, seed=None if seed is None else int(seed))
    truth: frozenset[str] = frozenset()
    if "injection" in raw:
        inj = raw["injection"]
        injection = synth_mod.InjectionSpec(
            target_year=int(inj["target_year"]),
            fraction=float(inj["fraction"]),
            marker_pool=tuple(inj["marker_pool"]),
            words_per_doc=int(inj.get("words_per_doc", 1)),
            guarantee_novel=bool(inj.get("guarantee_novel", True)),
            censor_probability=float(inj.get("censor_probability", 0.0)),
        )
        corpus, truth = synth_mod.inject_markers(
            corpus, injection, seed=int(inj.get("seed", spec.seed)))
    ingest_mod.write_jsonl(corpus, out)
    if opts.get("truth") or args.truth:
        synth_mod.write_truth_csv(corpus, truth, args.truth or opts.get("truth"))
    print(f"synth: {len(corpus)} documents ({len(truth)} injected) -> {out}")
    return 0


def cmd_report(args, opts: Options) -> int:
    matrix_path = _require_artifact(opts.get("matrix"), "occurrence matrix", "count")
    year = opts.get("year")
    if year is None:
        raise UsageError("--year is required")
    year = int(year)
    out_dir = opts.get("out") or args.out
    if not out_dir:
        raise UsageError("--out directory is required")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    matrix = count_mod.read_matrix(matrix_path)
    annotations = (excess_mod.AnnotationTable.load(opts.get("annotations"))
                   if opts.get("annotations") else None)
    lemmatizer = excess_mod.Lemmatizer(
        known_words=(w for w in matrix.words if count_mod.is_eligible_word(w)))
    thresholds = excess_mod.DEFAULT_THRESHOLDS

    stats = excess_mod.excess_words(matrix, year, thresholds,
                                    annotations=annotations, lemmatizer=lemmatizer)
    excess_mod.write_stats_csv(stats, out / "stats.csv")

    years_opt = opts.get("years")
    if years_opt:
        lo, hi = _parse_year_range(years_opt)
    else:
        lo, hi = matrix.years[0] + 3, year
    _write_stacked_bars(matrix, range(lo, hi + 1), thresholds, annotations,
                        out / "stacked_bars.csv")

    words_opt = opts.get("words")
    words = ([w.strip() for w in str(words_opt).split(",") if w.strip()]
             if words_opt else [s.word for s in stats[:5]])
    _write_timeseries(matrix, words, year, out / "timeseries.csv")

    for key, name, producer in (("sweep", "sweep.csv", "sweep"),
                                ("gaps", "gaps.csv", "subgroups")):
        src = opts.get(key)
        if src:
            shutil.copyfile(_require_artifact(src, name, producer), out / name)
    print(f"report: wrote figure data to {out}")
    return 0


def _write_stacked_bars(matrix, years, thresholds, annotations, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["year", "content", "style", "ambiguous", "unannotated",
                         "representative_word"])
        for y in years:
            try:
                stats = excess_mod.excess_words(matrix, y, thresholds,
                                                annotations=annotations)
            except ExcessVocabError:
                continue  # years whose extrapolation window the matrix lacks
            buckets = {"content": 0, "style": 0, "ambiguous": 0, "unannotated": 0}
            for s in stats:
                if s.excess:
                    buckets[s.label or "unannotated"] += 1
            rep = excess_mod.representative_word(stats) or ""
            writer.writerow([y, buckets["content"], buckets["style"],
                             buckets["ambiguous"], buckets["unannotated"], rep])


def _write_timeseries(matrix, words, target_year, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["word", "year", "p", "cf"])
        for word in words:
            if word not in matrix.index:
                continue
            row = matrix.row(word)
            p_by_year = {y: (int(row[j]) + 1) / (int(matrix.totals[j]) + 1)
                         for j, y in enumerate(matrix.years)}
            cf: dict[int, float] = {}
            y3, y2 = target_year - 3, target_year - 2
            if y3 in p_by_year and y2 in p_by_year:
                slope = max(p_by_year[y2] - p_by_year[y3], 0.0)
                cf = {y3: p_by_year[y3], y2: p_by_year[y2],
                      target_year - 1: min(1.0, p_by_year[y2] + slope),
                      target_year: min(1.0, p_by_year[y2] + 2 * slope)}
            for y in matrix.years:
                writer.writerow([word, y, repr(p_by_year[y]),
                                 repr(cf[y]) if y in cf else ""])


_HANDLERS = {
    "ingest": cmd_ingest,
    "clean": cmd_clean,
    "count": cmd_count,
    "excess": cmd_excess,
    "gap": cmd_gap,
    "sweep": cmd_sweep,
    "subgroups": cmd_subgroups,
    "local-delta": cmd_local_delta,
    "synth": cmd_synth,
    "report": cmd_report,
}


if __name__ == "__main__":
    sys.exit(main())
