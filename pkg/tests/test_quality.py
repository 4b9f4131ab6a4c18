import random

import pytest

from sammrc.errors import TooShort
from sammrc.generator import load_resources
from sammrc.quality import (
    jaccard,
    lexical_similarity,
    naturality,
    quality_report,
    scan_corpus,
)
from sammrc.types import SamCategory, SamEntry, VerbForm


class TestLexicalSimilarity:
    def test_identical_paragraphs(self):
        assert lexical_similarity(["the same text here"] * 3, sample_pairs=20) == 1.0

    def test_disjoint_vocabularies(self):
        paragraphs = ["alpha beta gamma", "delta epsilon zeta"]
        assert lexical_similarity(paragraphs, sample_pairs=20) == 0.0

    def test_symmetry_and_order_invariance(self):
        a = set("one two three".split())
        b = set("three two one four".split())
        assert jaccard(a, b) == jaccard(b, a) == 3 / 4
        assert lexical_similarity(["alpha beta gamma", "gamma beta alpha"], 10) == 1.0

    def test_needs_two_paragraphs(self):
        with pytest.raises(ValueError):
            lexical_similarity(["only one"])


class TestNaturality:
    def test_full_content_overlap(self):
        paragraph = "Naomi Daniel scored a goal. Amanda Collins scored a goal."
        result = naturality([paragraph])
        assert result.indices["content_overlap"] < 1.0  # names differ
        shared = "The keeper made a save. The keeper made a save."
        assert naturality([shared]).indices["content_overlap"] == 1.0

    def test_zero_overlap_no_pronouns(self):
        paragraph = "Rain fell heavily. Children giggled outside."
        result = naturality([paragraph])
        assert result.indices["content_overlap"] == 0.0
        assert result.indices["argument_overlap"] == 0.0

    def test_pronoun_counts_as_argument_link(self):
        paragraph = "Then Naomi Daniel scored. Later she celebrated wildly."
        assert naturality([paragraph]).indices["argument_overlap"] == 1.0

    def test_single_sentence_rejected(self):
        with pytest.raises(TooShort):
            naturality(["Just one sentence."])

    def test_score_in_unit_interval(self, small_set):
        result = naturality([t.baseline.context for t in small_set.triples])
        assert 0.0 <= result.score <= 1.0

    def test_generated_at_least_shuffled_on_pronoun_index(self, small_set):
        """Shuffle oracle: scrambling sentence order must not improve the
        pronoun-antecedent index."""
        from sammrc.textutil import split_sentences

        paragraphs = [t.baseline.context for t in small_set.triples]
        rng = random.Random(0)
        shuffled = []
        for p in paragraphs:
            sentences = split_sentences(p)
            rng.shuffle(sentences)
            shuffled.append(" ".join(sentences))
        generated = naturality(paragraphs).indices["pronoun_antecedent"]
        scrambled = naturality(shuffled).indices["pronoun_antecedent"]
        assert generated >= scrambled


def entries(*surfaces):
    return [
        SamEntry(category=SamCategory.ADVERBIAL_MODIFICATION, surface=s, verb_form=VerbForm.PAST)
        for s in surfaces
    ]


class TestScanCorpus:
    def test_expression_counted(self):
        result = scan_corpus(["She almost scored a goal."], entries("almost"))
        assert result.frac_any == 1.0

    def test_empty_lexicon(self):
        result = scan_corpus(["Any passage at all."], [])
        assert (result.frac_any, result.frac_near) == (0.0, 0.0)

    def test_multiword_expression_token_matching(self):
        result = scan_corpus(["They all but sealed the win."], entries("all but"))
        assert result.frac_any == 1.0
        miss = scan_corpus(["All manner of things, but not that."], entries("all but"))
        assert miss.frac_any == 0.0

    def test_case_insensitive(self):
        assert scan_corpus(["Almost there."], entries("almost")).frac_any == 1.0

    def test_window_proximity(self):
        passage = "She almost scored. " + "x " * 60 + "The answer is here."
        answers = [[(passage.index("here"), passage.index("here") + 4)]]
        near = scan_corpus([passage], entries("almost"), answers, window=1000)
        far = scan_corpus([passage], entries("almost"), answers, window=10)
        assert near.frac_near == 1.0
        assert far.frac_near == 0.0

    def test_monotone_in_window(self):
        passage = "They almost won. The final answer arrived."
        answers = [[(passage.index("answer"), passage.index("answer") + 6)]]
        fractions = [
            scan_corpus([passage], entries("almost"), answers, window=w).frac_near
            for w in (0, 5, 10, 20, 40)
        ]
        assert fractions == sorted(fractions)

    def test_interventions_always_contain_expression(self, small_set, resources):
        passages = [t.intervention.context for t in small_set.triples]
        result = scan_corpus(passages, resources.lexicon.entries)
        assert result.frac_any == 1.0

    def test_interventions_near_baseline_answer_span(self, small_set, resources):
        """The insertion lands in the sentence that carried the baseline
        answer, so it sits close to that answer's position."""
        passages, answers = [], []
        for t in small_set.triples:
            passages.append(t.intervention.context)
            answers.append([(t.baseline.answer_start, t.baseline.answer_start + len(t.baseline.answer))])
        result = scan_corpus(passages, resources.lexicon.entries, answers, window=150)
        assert result.frac_near >= 0.9

    def test_negative_window_rejected(self):
        with pytest.raises(ValueError):
            scan_corpus(["x"], [], window=-1)


class TestQualityReport:
    def test_report_fields(self, small_set):
        report = quality_report(
            [t.baseline.context for t in small_set.triples], sample_pairs=50, seed=1
        )
        assert 0 <= report.lexical_similarity <= 1
        assert 0 <= report.naturality <= 1
        assert report.n == len(small_set.triples)
        assert set(report.indices) == {"content_overlap", "argument_overlap", "pronoun_antecedent"}
