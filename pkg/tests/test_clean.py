import pytest
from hypothesis import given
from hypothesis import strategies as st

from excessvocab.clean import (Action, Anchor, CleaningRule, CleaningSession,
                               clean_text, is_correction_notice, load_rules)
from excessvocab.errors import RuleFileError
from excessvocab.ingest import Document

STARTER = load_rules()


class TestLoadRules:
    def test_valid_file_keeps_order(self, tmp_path):
        path = tmp_path / "rules.tsv"
        path.write_text(
            "r1\tSUFFIX\tSTRIP_TO_END\tfoo.*$\n"
            "# a comment\n"
            "r2\tPREFIX\tSTRIP_TO_START\tbar\n"
            "r3\tANYWHERE\tDROP_DOCUMENT\tbaz\n",
            encoding="utf-8")
        rules = load_rules(path)
        assert [r.id for r in rules] == ["r1", "r2", "r3"]
        assert rules[1].anchor is Anchor.PREFIX

    def test_invalid_pattern_names_rule(self, tmp_path):
        path = tmp_path / "rules.tsv"
        path.write_text("r1\tANYWHERE\tSTRIP_MATCH\tok\n"
                        "r2\tANYWHERE\tSTRIP_MATCH\t([\n", encoding="utf-8")
        with pytest.raises(RuleFileError, match=r"rule r2: invalid pattern"):
            load_rules(path)

    def test_empty_file_is_identity(self, tmp_path):
        path = tmp_path / "rules.tsv"
        path.write_text("", encoding="utf-8")
        rules = load_rules(path)
        assert rules == ()
        assert clean_text("anything at all", rules).text == "anything at all"

    def test_duplicate_id_rejected(self, tmp_path):
        path = tmp_path / "rules.tsv"
        path.write_text("r1\tANYWHERE\tSTRIP_MATCH\ta\nr1\tANYWHERE\tSTRIP_MATCH\tb\n",
                        encoding="utf-8")
        with pytest.raises(RuleFileError, match="duplicate"):
            load_rules(path)

    def test_starter_set_loads(self):
        assert len(STARTER) >= 20


class TestCleanText:
    def test_copyright_tail_stripped(self):
        text = ("We measured the effect and report the results. "
                "Copyright © 2022 Elsevier Inc. All rights reserved.")
        outcome = clean_text(text, STARTER)
        assert outcome.text == "We measured the effect and report the results."
        assert "copyright_tail" in outcome.applied
        assert not outcome.dropped

    def test_how_to_cite_prefix_stripped(self):
        text = ("How to cite this article: Smith J, Doe A. Gene expression in mice. "
                "J Gene Res 2020;12:34-56. We studied the effect of X on Y in a cohort.")
        outcome = clean_text(text, STARTER)
        assert outcome.text == "We studied the effect of X on Y in a cohort."
        assert "how_to_cite_head" in outcome.applied

    def test_how_to_cite_tail_stripped(self):
        text = ("We studied the effect of X on Y in a cohort. "
                "How to cite this article: Smith J. J Gene Res 2020;12:34-56.")
        outcome = clean_text(text, STARTER)
        assert outcome.text == "We studied the effect of X on Y in a cohort."

    def test_communicated_by_prefix(self):
        text = "Communicated by: A. Famous Editor. The enzyme catalyzes a key reaction."
        outcome = clean_text(text, STARTER)
        assert outcome.text == "The enzyme catalyzes a key reaction."

    def test_no_match_is_identity(self):
        text = "A perfectly ordinary abstract about proteins."
        outcome = clean_text(text, STARTER)
        assert outcome.text == text
        assert outcome.applied == ()

    def test_drop_document(self):
        outcome = clean_text("This article has been withdrawn at the request of the authors.",
                             STARTER)
        assert outcome.dropped
        assert outcome.applied == ("withdrawn_notice",)

    def test_each_rule_applies_at_most_once(self):
        rule = CleaningRule(id="x", pattern="aa", action=Action.STRIP_MATCH,
                            anchor=Anchor.ANYWHERE)
        outcome = clean_text("aa aa aa", [rule])
        assert outcome.text == "aa aa"
        assert outcome.applied == ("x",)

    def test_strip_match_anywhere(self):
        text = "Start (ABSTRACT TRUNCATED AT 250 WORDS)"
        outcome = clean_text(text, STARTER)
        assert outcome.text == "Start"

    @given(st.text(max_size=300))
    def test_never_lengthens(self, text):
        assert len(clean_text(text, STARTER).text) <= len(text)

    @given(st.text(max_size=300))
    def test_idempotent_on_starter_rules(self, text):
        once = clean_text(text, STARTER)
        twice = clean_text(once.text, STARTER)
        assert twice.text == once.text

    def test_idempotent_on_contaminated_corpus(self):
        corpus = [
            "Results were good. Copyright © 2021 Wiley. All rights reserved.",
            "Body text here. How to cite this article: A B. J X 2019;1:1-2.",
            "Communicated by: An Editor. Real content follows here.",
            "Trial registration: NCT01234567.",
            "Plain abstract, nothing to strip.",
        ]
        for text in corpus:
            once = clean_text(text, STARTER).text
            assert clean_text(once, STARTER).text == once


NOTICE_SAMPLE = [
    # (title, is_notice) - hand-labeled
    ("Erratum: Gene expression in hippocampal neurons", True),
    ("Erratum to: A clinical trial of X", True),
    ("Errata: corrections to volume 12", True),
    ("Corrigendum: Protein folding revisited", True),
    ("Corrigendum to 'Machine learning in oncology'", True),
    ("Correction: Deep sequencing of tumor samples", True),
    ("Correction to: Lancet 2020 paper", True),
    ("Corrections to our previous article", True),
    ("Author Correction: Microbiome diversity in mice", True),
    ("Publisher Correction: Spectral imaging of cells", True),
    ("Retraction: Stem cell reprogramming by acid bath", True),
    ("Retraction of: Vaccine effects on autism rates", True),
    ("Retraction notice to 'Nanoparticle toxicity'", True),
    ("Retraction Note: Signaling in cancer cells", True),
    ("Retracted: Effects of compound Z in rats", True),
    ("RETRACTED ARTICLE: Cold fusion in biological systems", True),
    ("Statement of Retraction: Clinical outcomes of Y", True),
    ("Notice of retraction of two articles", True),
    ("Notice of duplicate publication: case report", True),
    ("WITHDRAWN: Efficacy of treatment X", True),
    ("Withdrawn: duplicate submission", True),
    ("Expression of Concern: Figure irregularities", True),
    ("[Retracted article] Antibody specificity claims", True),
    ("(Retracted Paper) Growth factor signaling", True),
    ("Correction in press: dosage table", True),
    # negatives
    ("Correcting for batch effects in RNA-seq", False),
    ("Correction factors for estimating energy expenditure", False),
    ("Error analysis of sequencing pipelines", False),
    ("Retraction forces during cell migration", False),
    ("Retractable claws in felids: an anatomical study", False),
    ("Corrective exercise for lower back pain", False),
    ("Gene expression in hippocampal neurons", False),
    ("A correction-based algorithm for motion artifacts", False),
    ("Erratic sleep patterns in adolescents", False),
    ("Self-correction in human motor control", False),
    ("The correction of myopia with laser surgery", False),
    ("Withdrawal symptoms in opioid dependence", False),
    ("Drug withdrawal syndromes: a review", False),
    ("Concerns about reproducibility in psychology", False),
    ("Expressions of emotional concern in nursing care", False),
    ("Publisher trends in open access", False),
    ("Authorship correction practices in journals: a survey", False),
    ("Statement of the problem: water scarcity", False),
    ("Notice detection in legal documents with NLP", False),
    ("Correctness proofs for distributed algorithms", False),
    ("Measurement error models in epidemiology", False),
    ("On corrigenda culture in scholarly publishing", False),
    ("Mask use and respiratory outcomes", False),
    ("Duplicate publication rates in biomedical journals", False),
    ("Retrospective cohort study of stroke patients", False),
]


class TestIsCorrectionNotice:
    def test_erratum(self):
        assert is_correction_notice("Erratum: Gene expression in…")

    def test_non_notice_with_notice_like_word(self):
        assert not is_correction_notice("Correcting for batch effects in RNA-seq")

    def test_empty_title(self):
        assert not is_correction_notice("")

    def test_hand_labeled_sample(self):
        mistakes = [(title, expected) for title, expected in NOTICE_SAMPLE
                    if is_correction_notice(title) != expected]
        assert not mistakes, f"misclassified: {mistakes}"


class TestCleaningSession:
    def _doc(self, text, title="A title", doc_id="1"):
        return Document(id=doc_id, year=2020, title=title, text=text)

    def test_notice_dropped(self):
        session = CleaningSession(STARTER)
        doc = self._doc("x" * 300, title="Erratum: bad figure")
        assert session.process(doc) is None
        assert session.documents_dropped == 1

    def test_cleaned_too_short_dropped(self):
        session = CleaningSession(STARTER, min_chars=250)
        body = "Short body." + " Copyright © 2020 Elsevier." + "x" * 240
        doc = self._doc(body)
        assert session.process(doc) is None
        assert session.drop_reasons == {"CLEANED_TOO_SHORT": 1}

    def test_report_counts(self):
        session = CleaningSession(STARTER, min_chars=10)
        docs = [
            self._doc("Fine text that stays intact pretty much forever."),
            self._doc("Stripped ending here. Copyright © 2021 Wiley. All rights reserved."),
            self._doc("x" * 300, title="Retraction: bogus data"),
        ]
        kept = [session.process(d) for d in docs]
        report = session.report()
        assert report["documents_seen"] == 3
        assert report["documents_modified"] == 1
        assert report["documents_dropped"] == 1
        assert kept[0] is not None and kept[0].text == docs[0].text
        assert report["per_rule_counts"].get("copyright_tail") == 1
