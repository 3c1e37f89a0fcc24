"""Ingestion filters and contamination cleaning.

Feeds a handful of raw records through the inclusion filters, the ordered
cleaning rules, and the notice detector, printing what happens to each.

Run: python demos/06_cleaning_and_ingest.py
"""

from excessvocab import (CleaningSession, Document, FilterCriteria,
                         filter_document, load_rules)

BODY = ("We enrolled 412 participants in a randomized crossover design and "
        "measured plasma response at six time points. The primary endpoint "
        "improved significantly under the intervention arm, with effects "
        "persisting at follow-up. Secondary endpoints were unchanged. ")

RAW = [
    Document(id="1", year=2020, title="A fine study",
             text=BODY + "Copyright © 2020 Elsevier Inc. All rights reserved."),
    Document(id="2", year=2020, title="Another fine study",
             text="How to cite this article: Smith J. J Res 2020;1:10-12. " + BODY),
    Document(id="3", year=2020, title="Erratum: dosage table in Table 2",
             text=BODY),
    Document(id="4", year=2020, title="Too terse", text="Short abstract."),
    Document(id="5", year=2005, title="Too old", text=BODY),
    Document(id="6", year=2020, title="Clean already", text=BODY),
]


def main():
    criteria = FilterCriteria()
    session = CleaningSession(load_rules(), min_chars=criteria.min_chars)

    print("ingestion filter decisions:")
    survivors = []
    for doc in RAW:
        reason = filter_document(doc, criteria)
        print(f"  doc {doc.id} ({doc.title!r}): {reason.value if reason else 'accept'}")
        if reason is None:
            survivors.append(doc)

    print("\ncleaning outcomes:")
    for doc in survivors:
        cleaned = session.process(doc)
        if cleaned is None:
            print(f"  doc {doc.id}: dropped")
        elif cleaned.text != doc.text:
            print(f"  doc {doc.id}: stripped {len(doc.text) - len(cleaned.text)} chars "
                  f"-> ...{cleaned.text[-40:]!r}")
        else:
            print(f"  doc {doc.id}: unchanged")

    print("\ncleaning report:")
    for key, value in session.report().items():
        print(f"  {key}: {value}")


if __name__ == "__main__":
    main()
