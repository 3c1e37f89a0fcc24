"""Optional full-scale validation against the complete PubMed baseline.

Desk-scale tests cover everything that can be verified without the raw
~15M-abstract corpus. This script documents and orchestrates the remaining
full-scale checks: it runs the whole pipeline over the bulk XML files and
prints the computed values next to the published reference values for the
2024 analysis (rare/common/combined marker gaps and selected subgroup gaps).

Requirements:
  * the bulk MEDLINE baseline files (*.xml.gz) in --xml-dir
    (https://pubmed.ncbi.nlm.nih.gov/download/ - bulk files only)
  * tens of GB of scratch space in --work
  * several hours of CPU time; use --workers

Usage:
    python scripts/full_scale_validation.py --xml-dir /data/baseline \
        --work /scratch/excessvocab --workers 8 \
        [--annotations published_data/annotations.csv]

Reference values this script prints comparisons for (2024 analysis,
extrapolated from 2021/2022):
    rare-set sweep:  best threshold T=0.02, 291 words, gap 0.136
    common set:      gap 0.134 (shipped 10-word set)
    combined:        0.135
    subgroups:       Sensors journal 0.25; computation x China 0.41
"""

import argparse
import json
import subprocess
import sys
from pathlib import Path

REFERENCE = {
    "rare_best_threshold": 0.02,
    "rare_n_words": 291,
    "delta_rare": 0.136,
    "delta_common": 0.134,
    "delta_combined": 0.135,
    "subgroup_sensors": 0.25,
    "subgroup_computation_china": 0.41,
}

SUBGROUP_SPECS = [
    {"name": "journal: Sensors",
     "predicate": {"journal": "Sensors (Basel, Switzerland)"}},
    {"name": "computation x China",
     "predicate": {"all": [{"field": "computation"}, {"country": "China"}]}},
]


def run(cmd: list[str]) -> None:
    print("+", " ".join(cmd), flush=True)
    subprocess.run(cmd, check=True)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--xml-dir", required=True, type=Path,
                        help="directory of bulk MEDLINE *.xml.gz files")
    parser.add_argument("--work", required=True, type=Path,
                        help="scratch directory for intermediate artifacts")
    parser.add_argument("--workers", type=int, default=8)
    parser.add_argument("--annotations", type=Path, default=None,
                        help="word,label,pos CSV (style labels drive the rare sweep)")
    parser.add_argument("--resume", action="store_true",
                        help="skip stages whose artifacts already exist")
    args = parser.parse_args()

    work = args.work
    work.mkdir(parents=True, exist_ok=True)
    docs = work / "docs.jsonl.gz"
    cleaned = work / "cleaned.jsonl.gz"
    matrix = work / "matrix.csv.gz"
    stats = work / "stats_2024.csv"
    sweep_csv = work / "sweep.csv"
    rare_set = work / "rare.txt"
    gaps = work / "gaps.csv"
    specs = work / "subgroups.json"

    xml_files = sorted(args.xml_dir.glob("*.xml.gz"))
    if not xml_files:
        print(f"no *.xml.gz files under {args.xml_dir}", file=sys.stderr)
        return 2

    # 1. ingest every bulk file into one filtered JSONL (resumable per-file
    #    sharding left to the caller; a single pass is shown for clarity)
    if not (args.resume and docs.exists()):
        shard_paths = []
        for i, xml in enumerate(xml_files):
            shard = work / f"shard_{i:04d}.jsonl.gz"
            shard_paths.append(shard)
            if args.resume and shard.exists():
                continue
            run(["excessvocab", "ingest", "--in", str(xml), "--out", str(shard)])
        with open(docs, "wb") as sink:
            for shard in shard_paths:
                sink.write(shard.read_bytes())

    # 2. clean + drop notices (re-applies the min-length check)
    if not (args.resume and cleaned.exists()):
        run(["excessvocab", "clean", "--in", str(docs), "--out", str(cleaned),
             "--report", str(work / "clean_report.json")])

    # 3. count into the word x year matrix
    if not (args.resume and matrix.exists()):
        run(["excessvocab", "count", "--in", str(cleaned), "--out", str(matrix),
             "--years", "2010:2024", "--workers", str(args.workers)])

    # 4. per-word stats for 2024
    cmd = ["excessvocab", "excess", "--matrix", str(matrix), "--year", "2024",
           "--out", str(stats)]
    if args.annotations:
        cmd += ["--annotations", str(args.annotations)]
    run(cmd)

    # 5. rare-set sweep over 2024 excess style words (needs annotations)
    if args.annotations:
        run(["excessvocab", "sweep", "--in", str(cleaned), "--stats", str(stats),
             "--year", "2024", "--out", str(sweep_csv), "--emit-set", str(rare_set)])
    else:
        print("note: no --annotations given; skipping the style-word sweep "
              "(the rare set cannot be derived without style labels)")
        return 0

    # 6. subgroup gaps with the globally fixed marker sets
    specs.write_text(json.dumps(SUBGROUP_SPECS, indent=2), encoding="utf-8")
    run(["excessvocab", "subgroups", "--in", str(cleaned), "--specs", str(specs),
         "--rare", str(rare_set), "--year", "2024", "--out", str(gaps)])

    # 7. gaps for the rare and common sets over the whole corpus
    run(["excessvocab", "gap", "--in", str(cleaned), "--markers", str(rare_set),
         "--year", "2024", "--out", str(work / "gap_rare.json")])
    common_file = work / "common.txt"
    from importlib import resources
    common_file.write_text(
        resources.files("excessvocab.data").joinpath("markers_common.txt").read_text("utf-8"),
        encoding="utf-8")
    run(["excessvocab", "gap", "--in", str(cleaned), "--markers", str(common_file),
         "--year", "2024", "--out", str(work / "gap_common.json")])

    delta_rare = json.loads((work / "gap_rare.json").read_text())["delta"]
    delta_common = json.loads((work / "gap_common.json").read_text())["delta"]
    print("\n=== full-scale comparison (computed vs reference) ===")
    print(f"delta_rare:     {delta_rare:.3f}  vs  {REFERENCE['delta_rare']}")
    print(f"delta_common:   {delta_common:.3f}  vs  {REFERENCE['delta_common']}")
    print(f"delta_combined: {(delta_rare + delta_common) / 2:.3f}  vs  "
          f"{REFERENCE['delta_combined']}")
    print(f"subgroup gaps written to {gaps}; reference: "
          f"Sensors {REFERENCE['subgroup_sensors']}, "
          f"computation x China {REFERENCE['subgroup_computation_china']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
