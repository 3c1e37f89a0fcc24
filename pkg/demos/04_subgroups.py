"""Subgroup gaps with globally fixed marker sets.

Three synthetic "countries" publish side by side; only one adopts the
intervention. Gaps per subgroup use the same rare and common marker sets
everywhere (never re-derived per subgroup), and subgroups without enough
documents in every eligibility year are excluded with a reason.

Run: python demos/04_subgroups.py
"""

from excessvocab import (MarkerKind, MarkerSet, SubgroupSpec, SyntheticSpec,
                         generate_corpus, inject_markers, subgroup_gaps)
from excessvocab.synth import InjectionSpec

RARE = ("rareone", "raretwo", "rarethree")
COMMON = ("commonone", "commontwo", "commonthree")


def country(name, seed, docs_per_year, adopt_fraction=0.0):
    base = tuple((w, 0.002) for w in RARE + COMMON)
    corpus = generate_corpus(SyntheticSpec(
        years=(2018, 2024), docs_per_year=docs_per_year, base_vocab=base,
        doc_length=(10, 16), seed=seed, metadata={"country": name}))
    if adopt_fraction:
        corpus, _ = inject_markers(corpus, InjectionSpec(
            target_year=2024, fraction=adopt_fraction, marker_pool=RARE), seed=seed)
        corpus, _ = inject_markers(corpus, InjectionSpec(
            target_year=2024, fraction=adopt_fraction, marker_pool=COMMON), seed=seed + 1)
    return corpus


def main():
    corpus = (country("Adoptia", seed=1, docs_per_year=8000, adopt_fraction=0.3)
              + country("Steadyland", seed=2, docs_per_year=8000)
              + country("Tinystan", seed=3, docs_per_year=120))
    specs = [SubgroupSpec("Adoptia", {"country": "Adoptia"}),
             SubgroupSpec("Steadyland", {"country": "Steadyland"}),
             SubgroupSpec("Tinystan", {"country": "Tinystan"}),
             SubgroupSpec("Adoptia-or-bust", {"all": [{"country": "Adoptia"},
                                                      {"field": "sensors"}]})]
    table = subgroup_gaps(
        corpus, specs,
        rare_set=MarkerSet("rare", frozenset(RARE), MarkerKind.RARE),
        common_set=MarkerSet("common", frozenset(COMMON), MarkerKind.COMMON),
        target_year=2024)

    print(f"{'subgroup':>12} {'d_rare':>8} {'d_common':>9} {'delta':>8} {'n_2024':>7}")
    for row in table.rows:
        print(f"{row.name:>12} {row.delta_rare:8.4f} {row.delta_common:9.4f} "
              f"{row.delta:8.4f} {row.n_per_year.get(2024, 0):7d}")
    print("\nexcluded subgroups:")
    for name, reason in table.excluded.items():
        print(f"  {name}: {reason}")


if __name__ == "__main__":
    main()
