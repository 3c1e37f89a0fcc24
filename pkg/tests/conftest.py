import numpy as np
import pytest
from hypothesis import settings

from excessvocab.count import OccurrenceMatrix

settings.register_profile("suite", deadline=None)
settings.load_profile("suite")

ACCEPTANCE_PREFIXES = {}


def make_matrix(years, rows, totals):
    """rows: {word: [counts per year]}."""
    words = tuple(sorted(rows))
    counts = np.array([rows[w] for w in words], dtype=np.int64)
    return OccurrenceMatrix(years=tuple(years), words=words,
                            counts=counts.reshape(len(words), len(years)),
                            totals=np.array(totals, dtype=np.int64))


@pytest.fixture
def tiny_matrix():
    # flat word, rising word, declining word across 2018-2024
    years = range(2018, 2025)
    totals = [1000] * 7
    return make_matrix(
        years,
        {
            "flatword": [100] * 7,
            "risingword": [10, 20, 40, 80, 160, 320, 640],
            "fallingword": [640, 320, 160, 80, 40, 20, 10],
        },
        totals,
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    stats = terminalreporter.stats
    lines = {}
    for outcome in ("passed", "failed", "error", "skipped"):
        for report in stats.get(outcome, ()):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            if not name.startswith("test_p"):
                continue
            criterion = name.split("_")[1].upper()
            word = {"passed": "PASS", "failed": "FAIL", "error": "FAIL",
                    "skipped": "SKIP"}[outcome]
            prev = lines.get(criterion)
            if prev == "FAIL":
                continue
            if prev == "PASS" and word == "SKIP":
                continue
            lines[criterion] = word if prev != "FAIL" else "FAIL"
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for criterion in sorted(lines):
            terminalreporter.write_line(f"{criterion}: {lines[criterion]}")
