import gzip
import io
import re

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from excessvocab.count import (OccurrenceMatrix, Vocabulary, build_vocabulary,
                               containment_counts, count_occurrences,
                               is_eligible_word, merge,
                               min_marker_frequency_profile, read_matrix,
                               tokenize, write_matrix)
from excessvocab.errors import (EmptyCorpusError, ExcessVocabError,
                                MatrixFormatError)
from excessvocab.ingest import Document


def doc(i, year, text):
    return Document(id=str(i), year=year, text=text)


def naive_token_set(text):
    # independent oracle tokenization
    return set(re.findall(r"\w+", text.lower()))


class TestTokenize:
    def test_binary_and_lowercase(self):
        assert tokenize("Mask and masks") == {"mask", "and", "masks"}

    def test_digit_token_produced_but_ineligible(self):
        tokens = tokenize("CO2 levels")
        assert "co2" in tokens
        assert not is_eligible_word("co2")

    def test_empty(self):
        assert tokenize("") == frozenset()

    def test_inflections_stay_distinct(self):
        tokens = tokenize("Mask and masks")
        assert "mask" in tokens and "masks" in tokens


class TestBuildVocabulary:
    def test_single_doc(self):
        vocab = build_vocabulary([doc(1, 2020, "alpha beta beta")], min_df=0.0)
        assert vocab.words == ("alpha", "beta")

    def test_min_df_threshold(self):
        docs = [doc(1, 2020, "alpha gamma"), doc(2, 2020, "alpha"),
                doc(3, 2020, "alpha"), doc(4, 2020, "alpha")]
        vocab = build_vocabulary(docs, min_df=0.5)
        assert "gamma" not in vocab
        assert "alpha" in vocab

    def test_letter_filter(self):
        docs = [doc(1, 2020, "abc abcd co2 word_x cafés plainword")]
        vocab = build_vocabulary(docs, min_df=0.0)
        assert vocab.words == ("abcd", "plainword")

    def test_all_tokens_mode(self):
        docs = [doc(1, 2020, "co2 ab c plainword")]
        vocab = build_vocabulary(docs, min_df=0.0, letters_only=False)
        assert vocab.words == ("ab", "co2", "plainword")

    def test_empty_corpus(self):
        with pytest.raises(EmptyCorpusError):
            build_vocabulary([], min_df=0.0)


class TestCountOccurrences:
    def test_derived_example(self):
        docs = [doc(1, 2020, "alpha beta"), doc(2, 2020, "alpha alpha"),
                doc(3, 2021, "beta")]
        vocab = build_vocabulary(docs, min_df=0.0)
        m = count_occurrences(docs, vocab)
        assert m.years == (2020, 2021)
        assert m.counts[m.index["alpha"]].tolist() == [2, 0]
        assert m.counts[m.index["beta"]].tolist() == [1, 1]
        assert m.totals.tolist() == [2, 1]

    def test_empty_year_in_range(self):
        docs = [doc(1, 2021, "alpha"), doc(2, 2023, "alpha")]
        vocab = build_vocabulary(docs, min_df=0.0)
        m = count_occurrences(docs, vocab)
        assert m.years == (2021, 2022, 2023)
        assert m.totals.tolist() == [1, 0, 1]
        assert m.counts[:, 1].tolist() == [0]

    def test_out_of_range_strict_raises(self):
        docs = [doc(1, 2020, "alpha")]
        vocab = Vocabulary(words=("alpha",))
        with pytest.raises(ExcessVocabError, match="outside matrix range"):
            count_occurrences(docs, vocab, years=[2021])

    def test_out_of_range_lenient_tallies(self):
        from excessvocab.ingest import SkipTally
        tally = SkipTally()
        docs = [doc(1, 2020, "alpha"), doc(2, 2021, "alpha")]
        vocab = Vocabulary(words=("alpha",))
        m = count_occurrences(docs, vocab, years=[2021], strict=False, tally=tally)
        assert m.totals.tolist() == [1]
        assert tally.counts == {"year_out_of_matrix_range": 1}

    def test_order_independence(self):
        docs = [doc(i, 2020 + i % 3, f"w{i % 5} shared") for i in range(30)]
        vocab = build_vocabulary(docs, min_df=0.0, letters_only=False)
        m1 = count_occurrences(docs, vocab)
        m2 = count_occurrences(list(reversed(docs)), vocab)
        assert m1 == m2

    def test_binarity(self):
        vocab = Vocabulary(words=("dupe",))
        once = count_occurrences([doc(1, 2020, "dupe")], vocab, years=[2020])
        many = count_occurrences([doc(1, 2020, "dupe dupe dupe")], vocab, years=[2020])
        assert once == many

    def test_parallel_equals_sequential(self):
        docs = [doc(i, 2019 + (i % 4), f"alpha w{i % 7} beta{i % 3}") for i in range(200)]
        vocab = build_vocabulary(docs, min_df=0.0, letters_only=False)
        seq = count_occurrences(docs, vocab)
        par = count_occurrences(docs, vocab, years=seq.years, workers=2)
        assert seq == par


class TestMerge:
    def test_identity(self):
        docs = [doc(1, 2020, "alpha")]
        vocab = build_vocabulary(docs, min_df=0.0)
        m = count_occurrences(docs, vocab)
        zero = OccurrenceMatrix.zero(m.years, m.words)
        assert merge(m, zero) == m

    def test_commutativity(self):
        docs_a = [doc(1, 2020, "alpha"), doc(2, 2021, "beta alpha")]
        docs_b = [doc(3, 2020, "beta"), doc(4, 2021, "alpha")]
        vocab = Vocabulary(words=("alpha", "beta"))
        years = [2020, 2021]
        a = count_occurrences(docs_a, vocab, years=years)
        b = count_occurrences(docs_b, vocab, years=years)
        assert merge(a, b) == merge(b, a)

    def test_sharded_equals_sequential(self):
        docs = [doc(i, 2020 + i % 2, f"alpha word{i % 11}") for i in range(1000)]
        vocab = build_vocabulary(docs, min_df=0.0, letters_only=False)
        years = [2020, 2021]
        whole = count_occurrences(docs, vocab, years=years)
        shards = [docs[i::4] for i in range(4)]
        combined = OccurrenceMatrix.zero(tuple(years), vocab.words)
        for shard in shards:
            combined = merge(combined, count_occurrences(shard, vocab, years=years))
        assert combined == whole

    def test_mismatched_vocab_rejected(self):
        a = OccurrenceMatrix.zero((2020,), ("alpha",))
        b = OccurrenceMatrix.zero((2020,), ("beta",))
        with pytest.raises(ExcessVocabError, match="vocabular"):
            merge(a, b)

    def test_mismatched_years_rejected(self):
        a = OccurrenceMatrix.zero((2020,), ("alpha",))
        b = OccurrenceMatrix.zero((2021,), ("alpha",))
        with pytest.raises(ExcessVocabError, match="year"):
            merge(a, b)


class TestContainment:
    def test_derived_example(self):
        docs = [doc(1, 2020, "alpha beta"), doc(2, 2020, "gamma")]
        assert containment_counts(docs, {"alpha", "beta"}) == {2020: (1, 2)}

    def test_singleton_equals_matrix_count(self):
        docs = [doc(i, 2020, t) for i, t in enumerate(
            ["alpha beta", "beta", "alpha", "gamma", "alpha alpha"])]
        vocab = build_vocabulary(docs, min_df=0.0)
        m = count_occurrences(docs, vocab)
        cc = containment_counts(docs, {"alpha"})
        assert cc[2020][0] == m.counts[m.index["alpha"], 0]

    def test_disjoint_support_sums(self):
        docs = [doc(1, 2020, "alpha"), doc(2, 2020, "beta"), doc(3, 2020, "gamma")]
        union = containment_counts(docs, {"alpha", "beta"})[2020][0]
        singles = (containment_counts(docs, {"alpha"})[2020][0]
                   + containment_counts(docs, {"beta"})[2020][0])
        assert union == singles == 2

    def test_union_bounds(self):
        docs = [doc(i, 2020, text) for i, text in enumerate(
            ["alpha beta gamma", "alpha", "beta gamma", "delta", "alpha beta"])]
        words = {"alpha", "beta"}
        vocab = build_vocabulary(docs, min_df=0.0)
        m = count_occurrences(docs, vocab)
        union = containment_counts(docs, words)[2020][0]
        per_word = [int(m.counts[m.index[w], 0]) for w in words]
        assert max(per_word) <= union <= min(sum(per_word), int(m.totals[0]))

    def test_empty_set_rejected(self):
        with pytest.raises(ExcessVocabError):
            containment_counts([doc(1, 2020, "x")], set())


class TestFrequencyProfile:
    def test_min_semantics(self):
        candidates = {"rare": 0.005, "common": 0.03}
        docs = [doc(1, 2020, "rare common filler")]
        profile = min_marker_frequency_profile(docs, candidates)
        assert profile.minima[2020].tolist() == [0.005]
        assert profile.count_below(2020, 0.01) == 1
        # the common word alone would not count toward T=0.01
        profile2 = min_marker_frequency_profile([doc(1, 2020, "common only")], candidates)
        assert profile2.count_below(2020, 0.01) == 0
        assert profile2.count_below(2020, 0.05) == 1

    def test_no_candidates_contributes_nothing(self):
        profile = min_marker_frequency_profile([doc(1, 2020, "nothing here")],
                                               {"rare": 0.005})
        assert profile.minima[2020].size == 0
        assert profile.total(2020) == 1

    def test_strictly_below_threshold(self):
        profile = min_marker_frequency_profile([doc(1, 2020, "word")], {"word": 0.02})
        assert profile.count_below(2020, 0.02) == 0
        assert profile.count_below(2020, 0.020001) == 1

    def test_invalid_frequency_rejected(self):
        with pytest.raises(ExcessVocabError):
            min_marker_frequency_profile([doc(1, 2020, "x")], {"x": 0.0})

    @settings(max_examples=25)
    @given(st.data())
    def test_sweep_reconstruction_matches_naive_scan(self, data):
        rng_words = [f"cand{i}" for i in range(6)]
        freqs = {w: data.draw(st.floats(min_value=1e-4, max_value=0.5), label=w)
                 for w in rng_words}
        docs = []
        for i in range(60):
            year = 2020 + (i % 2)
            members = data.draw(st.frozensets(st.sampled_from(rng_words), max_size=4),
                                label=f"doc{i}")
            docs.append(doc(i, year, " ".join(sorted(members)) or "fillertext"))
        profile = min_marker_frequency_profile(docs, freqs)
        for t in [5e-5, 1e-3, 0.01, 0.3, 0.9]:
            subset = {w for w, p in freqs.items() if p < t}
            for year in (2020, 2021):
                naive = sum(
                    1 for d in docs
                    if d.year == year and subset & naive_token_set(d.text))
                assert profile.count_below(year, t) == naive


class TestMatrixIO:
    def _matrix(self):
        return OccurrenceMatrix(
            years=(2010, 2011), words=("alpha", "beta"),
            counts=np.array([[1, 2], [3, 4]], dtype=np.int64),
            totals=np.array([10, 20], dtype=np.int64))

    def test_round_trip_bit_exact(self, tmp_path):
        m = self._matrix()
        path = tmp_path / "m.csv.gz"
        write_matrix(m, path)
        m2 = read_matrix(path)
        assert m2 == m
        path2 = tmp_path / "m2.csv.gz"
        write_matrix(m2, path2)
        assert path.read_bytes() == path2.read_bytes()

    def test_missing_totals(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("word,2010\nalpha,1\n", encoding="utf-8")
        with pytest.raises(MatrixFormatError) as exc:
            read_matrix(path)
        assert exc.value.code == "MISSING_TOTALS"

    def test_non_integer_cell(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("word,2010\nalpha,1.5\ntotal,10\n", encoding="utf-8")
        with pytest.raises(MatrixFormatError) as exc:
            read_matrix(path)
        assert exc.value.code == "NON_INTEGER_CELL"

    def test_shape_mismatch(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("word,2010,2011\nalpha,1\ntotal,10,20\n", encoding="utf-8")
        with pytest.raises(MatrixFormatError) as exc:
            read_matrix(path)
        assert exc.value.code == "SHAPE_MISMATCH"

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("word,c2010\nalpha,1\ntotal,10\n", encoding="utf-8")
        with pytest.raises(MatrixFormatError) as exc:
            read_matrix(path)
        assert exc.value.code == "BAD_HEADER"

    def test_reads_plain_csv_and_empty_index_header(self, tmp_path):
        path = tmp_path / "published_style.csv"
        path.write_text(",2010,2011\nalpha,1,2\ntotal,10,20\n", encoding="utf-8")
        m = read_matrix(path)
        assert m.years == (2010, 2011)
        assert m.words == ("alpha",)

    def test_reads_uncompressed_stream(self):
        m = self._matrix()
        buf = io.BytesIO()
        write_matrix(m, buf)
        raw = gzip.decompress(buf.getvalue())
        assert read_matrix(io.BytesIO(raw)) == m


matrices = st.integers(min_value=1, max_value=4).flatmap(
    lambda n_years: st.integers(min_value=0, max_value=5).flatmap(
        lambda n_words: st.builds(
            OccurrenceMatrix,
            years=st.just(tuple(range(2010, 2010 + n_years))),
            words=st.just(tuple(f"w{chr(97 + i)}word" for i in range(n_words))),
            counts=st.lists(
                st.lists(st.integers(min_value=0, max_value=1000),
                         min_size=n_years, max_size=n_years),
                min_size=n_words, max_size=n_words,
            ).map(lambda rows: np.array(rows, dtype=np.int64).reshape(n_words, n_years)),
            totals=st.lists(st.integers(min_value=0, max_value=10_000),
                            min_size=n_years, max_size=n_years).map(
                                lambda t: np.array(t, dtype=np.int64)),
        )))


@given(matrices)
def test_matrix_round_trip_property(m):
    buf = io.BytesIO()
    write_matrix(m, buf)
    buf.seek(0)
    assert read_matrix(buf) == m
