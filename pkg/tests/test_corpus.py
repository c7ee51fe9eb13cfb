"""Word lists, splits, and viseme distributions."""

import pytest

import visemelab as vl
from visemelab.corpus import SplitSpec, split_sample_count
from visemelab.errors import ConflictError, EmptyInputError, ParseError
from visemelab.visemes import Language, VisemeClass


def write(tmp_path, text):
    path = tmp_path / "words.txt"
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadWordList:
    def test_single_line(self, tmp_path):
        words = vl.load_word_list(write(tmp_path, "ABOUT 1000\n"), Language.ENGLISH)
        assert words.entries == (("ABOUT", 1000),)

    def test_bundled_sizes(self, bundled):
        _, _, word_lists = bundled
        assert len(word_lists[Language.ENGLISH]) == 500
        assert len(word_lists[Language.MANDARIN]) == 1000

    def test_duplicate_word_rejected(self, tmp_path):
        with pytest.raises(ConflictError):
            vl.load_word_list(write(tmp_path, "A 1\nA 2\n"), Language.ENGLISH)

    def test_nonpositive_count_rejected(self, tmp_path):
        with pytest.raises(ParseError):
            vl.load_word_list(write(tmp_path, "A 0\n"), Language.ENGLISH)

    def test_file_order_preserved(self, tmp_path):
        words = vl.load_word_list(write(tmp_path, "B 1\nA 2\n"), Language.ENGLISH)
        assert [w for w, _ in words.entries] == ["B", "A"]


class TestSplits:
    def test_identity_at_full_fraction(self, corpora):
        corpus = corpora[Language.ENGLISH]
        assert vl.split_corpus(corpus, SplitSpec(1.0)) == corpus

    def test_floor_with_minimum_one(self):
        assert split_sample_count(4, 0.25) == 1
        assert split_sample_count(1, 0.25) == 1
        assert split_sample_count(7, 0.5) == 3

    def test_nonstandard_fraction_needs_override(self):
        with pytest.raises(ValueError):
            SplitSpec(0.3)
        SplitSpec(0.3, allow_any=True)

    def test_split_total_matches_oracle(self, corpora):
        corpus = corpora[Language.ENGLISH]
        for fraction in (0.25, 0.5, 0.75, 1.0):
            split = vl.split_corpus(corpus, SplitSpec(fraction))
            oracle = sum(max(1, int(e.sample_count * fraction)) for e in corpus.entries)
            assert split.total_samples() == oracle

    def test_word_set_unchanged(self, corpora):
        corpus = corpora[Language.MANDARIN]
        split = vl.split_corpus(corpus, SplitSpec(0.25))
        assert [e.word for e in split.entries] == [e.word for e in corpus.entries]

    def test_monotone_in_fraction(self, corpora):
        corpus = corpora[Language.ENGLISH]
        totals = [
            vl.split_corpus(corpus, SplitSpec(f)).total_samples()
            for f in (0.25, 0.5, 0.75, 1.0)
        ]
        assert totals == sorted(totals)


class TestDistribution:
    def test_counts_weighted_by_samples(self, tables, bundled):
        _, lexicons, _ = bundled
        words = vl.WordList(Language.ENGLISH, (("PEOPLE", 10),))
        corpus = vl.build_labeled_corpus(words, lexicons[Language.ENGLISH], tables)
        dist = vl.viseme_distribution(corpus)
        # PEOPLE = p i p @ t: p twice per occurrence
        assert dist.counts["p"] == 20
        assert dist.counts["i"] == 10

    def test_empty_corpus_rejected(self):
        corpus = vl.LabeledCorpus(Language.ENGLISH, ())
        with pytest.raises(EmptyInputError):
            vl.viseme_distribution(corpus)

    def test_conservation(self, corpora):
        for corpus in corpora.values():
            dist = vl.viseme_distribution(corpus)
            expected = sum(len(e.visemes) * e.sample_count for e in corpus.entries)
            assert dist.total == expected
            assert sum(dist.class_totals.values()) == expected

    def test_common_dominates_unique_classes(self, corpora):
        for corpus in corpora.values():
            dist = vl.viseme_distribution(corpus)
            common = dist.class_totals[VisemeClass.COMMON]
            assert common > dist.class_totals[VisemeClass.ENGLISH_ONLY]
            assert common > dist.class_totals[VisemeClass.MANDARIN_ONLY]

    def test_sorted_items_descending(self, corpora):
        dist = vl.viseme_distribution(corpora[Language.ENGLISH])
        counts = [c for _, c in dist.sorted_items()]
        assert counts == sorted(counts, reverse=True)


class TestBuildCorpus:
    def test_empty_word_list(self, tables, bundled):
        _, lexicons, _ = bundled
        corpus = vl.build_labeled_corpus(
            vl.WordList(Language.ENGLISH, ()), lexicons[Language.ENGLISH], tables
        )
        assert len(corpus) == 0

    def test_single_word_composition(self, tables, bundled):
        _, lexicons, _ = bundled
        words = vl.WordList(Language.ENGLISH, (("THINK", 3),))
        corpus = vl.build_labeled_corpus(words, lexicons[Language.ENGLISH], tables)
        entry = corpus.entries[0]
        assert entry.phonemes == ("θ", "ɪ", "ŋ", "k")
        assert [v.rendered for v in entry.visemes] == ["T_E", "i", "k", "k"]
        assert entry.sample_count == 3
