"""Fetch the published word-occurrence matrix (and annotations) for the
desk-scale reproduction tests.

The acceptance suite's reproduction criteria run against a published
362,442 x 15 per-word yearly abstract-count matrix (csv.gz; one row per word,
year columns 2010-2024, final row = total abstracts per year) and optionally
a word,label,pos annotation CSV. This environment does not hardcode a source
URL; pass one explicitly or via environment variables:

    python scripts/fetch_published_data.py \
        --matrix-url  https://.../word_occurrences.csv.gz \
        --annotations-url https://.../annotations.csv   # optional

    EXCESSVOCAB_MATRIX_URL=...  EXCESSVOCAB_ANNOTATIONS_URL=... \
        python scripts/fetch_published_data.py

Files land in published_data/ (override with --dest or
EXCESSVOCAB_PUBLISHED_DIR), where tests/test_acceptance.py picks them up.
"""

import argparse
import os
import sys
import urllib.request
from pathlib import Path

DEFAULT_DEST = Path(__file__).resolve().parent.parent / "published_data"


def fetch(url: str, dest: Path) -> None:
    print(f"downloading {url} -> {dest}")
    dest.parent.mkdir(parents=True, exist_ok=True)
    with urllib.request.urlopen(url) as response, open(dest, "wb") as sink:
        while True:
            chunk = response.read(1 << 20)
            if not chunk:
                break
            sink.write(chunk)
    print(f"  wrote {dest.stat().st_size / 1e6:.1f} MB")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--matrix-url", default=os.environ.get("EXCESSVOCAB_MATRIX_URL"))
    parser.add_argument("--annotations-url",
                        default=os.environ.get("EXCESSVOCAB_ANNOTATIONS_URL"))
    parser.add_argument("--dest", type=Path,
                        default=Path(os.environ.get("EXCESSVOCAB_PUBLISHED_DIR",
                                                    DEFAULT_DEST)))
    args = parser.parse_args()
    if not args.matrix_url:
        print("no --matrix-url (or $EXCESSVOCAB_MATRIX_URL) given; nothing to do",
              file=sys.stderr)
        return 1
    fetch(args.matrix_url, args.dest / "word_occurrences.csv.gz")
    if args.annotations_url:
        fetch(args.annotations_url, args.dest / "annotations.csv")
    print("done; re-run `pytest tests/test_acceptance.py` to exercise the "
          "reproduction criteria")
    return 0


if __name__ == "__main__":
    sys.exit(main())
