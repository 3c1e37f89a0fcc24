import io
import math

import numpy as np
import pytest

from excessvocab.count import (build_vocabulary, containment_counts,
                               count_occurrences, min_marker_frequency_profile)
from excessvocab.errors import ExcessVocabError, SetsOverlapError
from excessvocab.excess import word_year_stats
from excessvocab.ingest import Document
from excessvocab.markergap import (EmbeddedPoint, MarkerKind, MarkerSet,
                                   SubgroupSpec, combined_estimate,
                                   default_common_set, gap, greedy_delta_set,
                                   load_marker_set, local_delta, measure_gap,
                                   rare_sweep, subgroup_gaps)
from excessvocab.synth import SyntheticSpec, generate_corpus, inject_markers


def doc(i, year, text):
    return Document(id=str(i), year=year, text=text)


class TestGap:
    def test_singleton_delta_equals_word_delta(self):
        rng = np.random.default_rng(7)
        docs = []
        for year in (2021, 2022, 2024):
            rate = {"2021": 0.1, "2022": 0.15, "2024": 0.4}[str(year)]
            for i in range(400):
                text = "markerword filler" if rng.random() < rate else "filler only"
                docs.append(doc(f"{year}-{i}", year, text))
        vocab = build_vocabulary(docs, min_df=0.0)
        matrix = count_occurrences(docs, vocab, years=range(2021, 2025), strict=False)
        word_delta = word_year_stats(matrix, "markerword", 2024).delta
        set_delta = measure_gap(docs, {"markerword"}, 2024).delta
        assert set_delta == word_delta

    def test_absent_words_zero_delta(self):
        docs = [doc(f"{y}-{i}", y, "plain text") for y in (2021, 2022, 2024)
                for i in range(50)]
        result = measure_gap(docs, {"neverseen"}, 2024)
        assert result.P == result.Q == pytest.approx(1 / 51)
        assert result.delta == 0.0

    def test_missing_year_rejected(self):
        with pytest.raises(ExcessVocabError, match="missing"):
            gap({2024: (1, 10), 2022: (1, 10)}, 2024)

    def test_negative_delta_reported(self):
        containment = {2021: (500, 1000), 2022: (500, 1000), 2024: (100, 1000)}
        result = gap(containment, 2024)
        assert result.delta < 0


class TestMarkerSets:
    def test_load_and_kind(self, tmp_path):
        path = tmp_path / "markers.txt"
        path.write_text("# comment\nAlpha\nbeta\n\n", encoding="utf-8")
        ms = load_marker_set(path, kind=MarkerKind.RARE)
        assert ms.words == {"alpha", "beta"}
        assert ms.kind is MarkerKind.RARE

    def test_default_common_set(self):
        ms = default_common_set()
        assert ms.words == {"across", "additionally", "comprehensive", "crucial",
                            "enhancing", "exhibited", "insights", "notably",
                            "particularly", "within"}

    def test_empty_rejected(self):
        with pytest.raises(ExcessVocabError):
            MarkerSet(name="empty", words=frozenset())


class TestCombinedEstimate:
    def test_mean(self):
        assert combined_estimate(0.136, 0.134) == pytest.approx(0.135)

    def test_equal_inputs(self):
        assert combined_estimate(0.2, 0.2) == 0.2

    def test_overlap_rejected(self):
        with pytest.raises(SetsOverlapError, match="SETS_OVERLAP"):
            combined_estimate(0.1, 0.1, rare_words={"shared", "alpha"},
                              common_words={"shared", "beta"})

    def test_disjoint_accepted(self):
        assert combined_estimate(0.1, 0.3, rare_words={"alpha"},
                                 common_words={"beta"}) == pytest.approx(0.2)


class TestRareSweep:
    def _corpus_and_candidates(self):
        rng = np.random.default_rng(11)
        candidates = {"rarea": 0.004, "rareb": 0.015, "rarec": 0.05}
        rates = {2021: 0.05, 2022: 0.05, 2024: 0.2}
        docs = []
        for year, rate in rates.items():
            for i in range(500):
                words = [w for w in candidates if rng.random() < rate]
                docs.append(doc(f"{year}-{i}", year, " ".join(words) or "plainfiller"))
        return docs, candidates

    def test_matches_direct_gap_per_threshold(self):
        docs, candidates = self._corpus_and_candidates()
        years = (2021, 2022, 2024)
        profile = min_marker_frequency_profile(docs, candidates, years=years)
        thresholds = [0.001, 0.01, 0.02, 0.1]
        result = rare_sweep(profile, candidates, 2024, thresholds=thresholds)
        expected_points = []
        for t in thresholds:
            subset = {w for w, p in candidates.items() if p < t}
            if not subset:
                continue
            direct = gap(containment_counts(docs, subset, years=years), 2024)
            expected_points.append((t, len(subset), direct.P, direct.Q, direct.delta))
        got = [(pt.threshold, pt.n_words, pt.P, pt.Q, pt.delta) for pt in result.points]
        assert got == expected_points

    def test_threshold_below_all_candidates_skipped(self):
        docs, candidates = self._corpus_and_candidates()
        profile = min_marker_frequency_profile(docs, candidates,
                                               years=(2021, 2022, 2024))
        result = rare_sweep(profile, candidates, 2024, thresholds=[1e-9])
        assert result.points == ()
        assert result.best is None

    def test_auto_thresholds_cover_all_subsets(self):
        docs, candidates = self._corpus_and_candidates()
        profile = min_marker_frequency_profile(docs, candidates,
                                               years=(2021, 2022, 2024))
        result = rare_sweep(profile, candidates, 2024)
        assert {pt.n_words for pt in result.points} == {1, 2, 3}

    def test_containment_monotone_in_threshold(self):
        docs, candidates = self._corpus_and_candidates()
        profile = min_marker_frequency_profile(docs, candidates,
                                               years=(2021, 2022, 2024))
        result = rare_sweep(profile, candidates, 2024)
        ps = [pt.P for pt in result.points]
        assert ps == sorted(ps)


class TestContainmentMonotonicity:
    def test_adding_a_word_never_decreases_containment(self):
        rng = np.random.default_rng(23)
        pool = [f"word{c}" for c in "abcdef"]
        docs = [doc(i, 2020, " ".join(w for w in pool if rng.random() < 0.2)
                    or "nothing")
                for i in range(300)]
        grown = set()
        last = 0
        for w in pool:
            grown.add(w)
            count = containment_counts(docs, grown, years=(2020,))[2020][0]
            assert count >= last
            last = count


class TestGreedyDeltaSet:
    def _corpus(self):
        # redundant pair always co-occurs; loner covers different documents
        rng = np.random.default_rng(31)
        docs = []
        for year, (rate_pair, rate_lone) in {2021: (0.05, 0.05), 2022: (0.05, 0.05),
                                             2024: (0.25, 0.25)}.items():
            for i in range(800):
                words = []
                if rng.random() < rate_pair:
                    words += ["pairone", "pairtwo"]
                if rng.random() < rate_lone:
                    words.append("lonerword")
                docs.append(doc(f"{year}-{i}", year, " ".join(words) or "plainfiller"))
        return docs

    def test_prefers_complementary_words(self):
        docs = self._corpus()
        marker_set, history = greedy_delta_set(
            docs, ["pairone", "pairtwo", "lonerword"], 2024, max_words=2)
        assert "lonerword" in marker_set.words
        assert len(marker_set.words & {"pairone", "pairtwo"}) == 1
        deltas = [d for _, d in history]
        assert deltas == sorted(deltas)

    def test_beats_every_singleton(self):
        docs = self._corpus()
        candidates = ["pairone", "pairtwo", "lonerword"]
        marker_set, history = greedy_delta_set(docs, candidates, 2024)
        best_single = max(measure_gap(docs, {w}, 2024).delta for w in candidates)
        assert history[-1][1] >= best_single


def _subgroup_corpus(f=0.3, docs_per_year=3000, seed=5):
    base = tuple((w, 0.01) for w in ("basea", "baseb", "basec"))
    rare_pool = ("rmarkerone", "rmarkertwo", "rmarkerthree")
    common_pool = ("cmarkerone", "cmarkertwo", "cmarkerthree")
    spec_a = SyntheticSpec(years=(2018, 2024), docs_per_year=docs_per_year,
                           base_vocab=base, seed=seed, metadata={"country": "Aland"})
    spec_b = SyntheticSpec(years=(2018, 2024), docs_per_year=docs_per_year,
                           base_vocab=base, seed=seed + 1, metadata={"country": "Bland"})
    corpus_a = generate_corpus(spec_a)
    from excessvocab.synth import InjectionSpec
    corpus_a, _ = inject_markers(
        corpus_a, InjectionSpec(target_year=2024, fraction=f, marker_pool=rare_pool),
        seed=seed + 10)
    corpus_a, _ = inject_markers(
        corpus_a, InjectionSpec(target_year=2024, fraction=f, marker_pool=common_pool),
        seed=seed + 20)
    corpus = corpus_a + generate_corpus(spec_b)
    rare = MarkerSet("rare", frozenset(rare_pool), MarkerKind.RARE)
    common = MarkerSet("common", frozenset(common_pool), MarkerKind.COMMON)
    return corpus, rare, common


class TestSubgroups:
    def test_injected_subgroup_detected(self):
        corpus, rare, common = _subgroup_corpus()
        specs = [SubgroupSpec("Aland", {"country": "Aland"}),
                 SubgroupSpec("Bland", {"country": "Bland"})]
        table = subgroup_gaps(corpus, specs, rare, common, 2024)
        by_name = {row.name: row for row in table.rows}
        assert by_name["Aland"].delta == pytest.approx(0.3, abs=0.04)
        assert by_name["Bland"].delta == pytest.approx(0.0, abs=0.02)
        assert not table.excluded

    def test_eligibility_exclusion_with_reason(self):
        corpus, rare, common = _subgroup_corpus(docs_per_year=400)
        small = []
        for years, n in (((2018, 2018), 400), ((2019, 2019), 299), ((2020, 2024), 400)):
            small.extend(generate_corpus(SyntheticSpec(
                years=years, docs_per_year=n, base_vocab=(("basea", 0.01),),
                seed=99, metadata={"country": "Cland"})))
        specs = [SubgroupSpec("Aland", {"country": "Aland"}),
                 SubgroupSpec("Cland", {"country": "Cland"})]
        table = subgroup_gaps(corpus + small, specs, rare, common, 2024)
        assert [row.name for row in table.rows] == ["Aland"]
        assert "Cland" in table.excluded
        assert "2019" in table.excluded["Cland"]
        assert "299" in table.excluded["Cland"]

    def test_spec_order_irrelevant(self):
        corpus, rare, common = _subgroup_corpus(docs_per_year=600)
        specs = [SubgroupSpec("Aland", {"country": "Aland"}),
                 SubgroupSpec("Bland", {"country": "Bland"})]
        t1 = subgroup_gaps(corpus, specs, rare, common, 2024)
        t2 = subgroup_gaps(corpus, list(reversed(specs)), rare, common, 2024)
        assert {r.name: r for r in t1.rows} == {r.name: r for r in t2.rows}

    def test_predicate_conjunction(self):
        corpus, rare, common = _subgroup_corpus(docs_per_year=600)
        specs = [SubgroupSpec("A-and-missing-field",
                              {"all": [{"country": "Aland"}, {"field": "sensors"}]})]
        table = subgroup_gaps(corpus, specs, rare, common, 2024)
        assert table.rows == ()
        assert "A-and-missing-field" in table.excluded

    def test_extra_key_predicate(self):
        docs = [Document(id=str(i), year=2020, text="x", extra={"gender_first": "female"})
                for i in range(3)]
        spec = SubgroupSpec("f", {"extra": {"key": "gender_first", "value": "female"}})
        assert all(spec.matches(d) for d in docs)
        assert not spec.matches(Document(id="9", year=2020, text="x"))


def _cluster_points(k=100, n_per_cluster=400, seed=3):
    rng = np.random.default_rng(seed)
    points = []
    idx = 0
    for cx, marked_fraction in ((0.0, 0.5), (100.0, 0.0)):
        for year in (2022, 2024):
            for _ in range(n_per_cluster):
                x = cx + rng.normal(0, 1.0)
                y = rng.normal(0, 1.0)
                marked = (year == 2024) and (rng.random() < marked_fraction)
                points.append(EmbeddedPoint(
                    id=f"p{idx}", year=year, x=float(x), y=float(y),
                    in_rare=marked, in_common=marked))
                idx += 1
    return points


class TestLocalDelta:
    def test_identical_membership_gives_zero(self):
        rng = np.random.default_rng(1)
        points = []
        for i in range(300):
            x, y = rng.normal(size=2)
            for year in (2022, 2024):
                points.append(EmbeddedPoint(id=f"{year}-{i}", year=year,
                                            x=float(x), y=float(y),
                                            in_rare=i % 3 == 0, in_common=i % 5 == 0))
        result = local_delta(points, 2022, 2024, k=50)
        assert result.errors == ()
        assert all(r.delta == 0.0 for r in result.rows)

    def test_injected_cluster_detected(self):
        points = _cluster_points()
        result = local_delta(points, 2022, 2024, k=100)
        inside = [r.delta for r, p in zip(result.rows, points) if p.x < 50.0]
        outside = [r.delta for r, p in zip(result.rows, points) if p.x >= 50.0]
        assert np.mean(inside) == pytest.approx(0.5, abs=0.1)
        assert np.mean(outside) == pytest.approx(0.0, abs=0.05)

    def test_k_larger_than_year_population(self):
        points = _cluster_points(n_per_cluster=20)
        result = local_delta(points, 2022, 2024, k=100)
        assert result.rows == ()
        assert len(result.errors) == len(points)
        assert "100" in result.errors[0][1]

    def test_rigid_motion_invariance(self):
        points = _cluster_points(n_per_cluster=150)
        theta = 0.7
        c, s = math.cos(theta), math.sin(theta)
        moved = [EmbeddedPoint(id=p.id, year=p.year,
                               x=c * p.x - s * p.y + 12.0,
                               y=s * p.x + c * p.y - 4.0,
                               in_rare=p.in_rare, in_common=p.in_common)
                 for p in points]
        r1 = local_delta(points, 2022, 2024, k=40)
        r2 = local_delta(moved, 2022, 2024, k=40)
        assert [r.delta for r in r1.rows] == [r.delta for r in r2.rows]
