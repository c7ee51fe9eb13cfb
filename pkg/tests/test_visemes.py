"""Transliteration engine and viseme taxonomy."""

from pathlib import Path

import pytest

import visemelab as vl
from visemelab.errors import (
    ConflictError,
    MissingEntryError,
    ParseError,
    UnknownVisemeError,
    UnmappedPhonemeError,
)
from visemelab.visemes import MERGED, Language, VisemeClass, normalize_word

GOLDEN = Path(__file__).parent / "golden" / "sample_sequences.txt"


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadMappingTables:
    def test_empty_file_gives_empty_maps(self, tmp_path):
        tables = vl.load_mapping_tables(write(tmp_path, "t.txt", "# only comments\n\n"))
        assert tables.english == {} and tables.mandarin == {}

    def test_row_maps_phoneme_for_one_language_only(self, tmp_path):
        tables = vl.load_mapping_tables(write(tmp_path, "t.txt", "en θ T\n"))
        assert tables.english == {"θ": "T"}
        assert "θ" not in tables.mandarin

    def test_duplicate_phoneme_conflicts(self, tmp_path):
        path = write(tmp_path, "t.txt", "en a A\nen a B\n")
        with pytest.raises(ConflictError):
            vl.load_mapping_tables(path)

    def test_malformed_row_reports_line_number(self, tmp_path):
        path = write(tmp_path, "t.txt", "en a A\nen broken\n")
        with pytest.raises(ParseError) as err:
            vl.load_mapping_tables(path)
        assert err.value.line_no == 2

    def test_bundled_tables_parse(self, tables):
        assert len(tables.english) == 44
        assert len(tables.mandarin) == 36


class TestClassifyViseme:
    def test_shared_symbol_is_common_and_bare(self, tables):
        label = vl.classify_viseme("p", tables)
        assert label.category is VisemeClass.COMMON
        assert label.rendered == "p"

    def test_english_only_symbol_gets_suffix(self, tables):
        assert vl.classify_viseme("T", tables).rendered == "T_E"
        assert vl.classify_viseme("O", tables).rendered == "O_E"

    def test_mandarin_only_symbol_gets_suffix(self, tables):
        assert vl.classify_viseme("y", tables).rendered == "y_M"
        assert vl.classify_viseme("R", tables).rendered == "R_M"

    def test_unknown_symbol_rejected(self, tables):
        with pytest.raises(UnknownVisemeError):
            vl.classify_viseme("zz", tables)

    def test_set_difference_oracle(self, tables):
        # Recompute class membership from the raw file, independently of the
        # loader, and compare against classify_viseme.
        en_targets, cmn_targets = set(), set()
        for line in open("src/visemelab/data/tables.txt", encoding="utf-8"):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            lang, _, viseme = line.split()
            (en_targets if lang == "en" else cmn_targets).add(viseme)
        for base in en_targets | cmn_targets:
            expected = (
                VisemeClass.COMMON if base in en_targets and base in cmn_targets
                else VisemeClass.ENGLISH_ONLY if base in en_targets
                else VisemeClass.MANDARIN_ONLY
            )
            assert vl.classify_viseme(base, tables).category is expected


class TestTransliterate:
    def test_lookup_identity(self, tmp_path, tables):
        lex = vl.load_lexicon(write(tmp_path, "l.txt", "HELLO p a\n"), Language.ENGLISH)
        assert vl.transliterate("hello", Language.ENGLISH, lex) == ("p", "a")

    def test_bundled_about(self, bundled):
        _, lexicons, _ = bundled
        assert vl.transliterate("ABOUT", Language.ENGLISH, lexicons[Language.ENGLISH]) == (
            "ə", "b", "aʊ", "t",
        )

    def test_missing_word_is_hard_error(self, bundled):
        _, lexicons, _ = bundled
        with pytest.raises(MissingEntryError):
            vl.transliterate("XYZZY", Language.ENGLISH, lexicons[Language.ENGLISH])

    def test_pinyin_tone_digits_and_v_spelling_normalize(self, bundled):
        _, lexicons, _ = bundled
        lex = lexicons[Language.MANDARIN]
        base = vl.transliterate("BEIJING", Language.MANDARIN, lex)
        assert vl.transliterate("bei3jing1", Language.MANDARIN, lex) == base
        assert vl.transliterate("nvren", Language.MANDARIN, lex) == vl.transliterate(
            "NÜREN", Language.MANDARIN, lex
        )

    def test_tone_diacritics_strip_but_umlaut_survives(self):
        assert normalize_word("běi jīng", Language.MANDARIN) == "BEI JING"
        assert normalize_word("lǜ", Language.MANDARIN) == "LÜ"


class TestPhonemesToVisemes:
    def test_empty_sequence(self, tables):
        assert vl.phonemes_to_visemes((), Language.ENGLISH, tables) == ()

    def test_length_preserved_with_repeats(self, tables):
        out = vl.phonemes_to_visemes(("p", "b", "æ"), Language.ENGLISH, tables)
        assert [v.rendered for v in out] == ["p", "p", "a"]

    def test_unmapped_phoneme_names_language(self, tables):
        with pytest.raises(UnmappedPhonemeError, match="cmn"):
            vl.phonemes_to_visemes(("θ",), Language.MANDARIN, tables)

    def test_golden_sample_sequences(self, bundled):
        tables, lexicons, _ = bundled
        for line in GOLDEN.read_text(encoding="utf-8").splitlines():
            lang_tag, rest = line.split(" ", 1)
            word, phonemes, visemes = (part.strip() for part in rest.split("|"))
            lang = Language.parse(lang_tag)
            got_ph = vl.transliterate(word, lang, lexicons[lang])
            got_vis = vl.phonemes_to_visemes(got_ph, lang, tables)
            assert " ".join(got_ph) == phonemes
            assert " ".join(v.rendered for v in got_vis) == visemes

    def test_determinism(self, bundled):
        tables, lexicons, _ = bundled
        a = vl.phonemes_to_visemes(("s", "t", "ɹ"), Language.ENGLISH, tables)
        b = vl.phonemes_to_visemes(("s", "t", "ɹ"), Language.ENGLISH, tables)
        assert a == b


class TestInventory:
    def test_symmetric_tables_are_all_common(self, tmp_path):
        tables = vl.load_mapping_tables(
            write(tmp_path, "t.txt", "en a A\nen b B\ncmn x A\ncmn y B\n")
        )
        merged = vl.build_inventory(tables, MERGED)
        mono = vl.build_inventory(tables, Language.ENGLISH)
        assert merged.rendered == mono.rendered == ("A", "B")

    def test_disjoint_tables_sum(self, tmp_path):
        tables = vl.load_mapping_tables(
            write(tmp_path, "t.txt", "en a A\nen b B\ncmn x X\ncmn y Y\n")
        )
        en = vl.build_inventory(tables, Language.ENGLISH)
        cmn = vl.build_inventory(tables, Language.MANDARIN)
        merged = vl.build_inventory(tables, MERGED)
        assert len(merged) == len(en) + len(cmn)

    def test_bundled_inventory_sizes(self, tables):
        # Golden numbers counted from the bundled tables by the pre-build
        # diff script; the merged size must be the class-count sum.
        en = vl.build_inventory(tables, Language.ENGLISH)
        cmn = vl.build_inventory(tables, Language.MANDARIN)
        merged = vl.build_inventory(tables, MERGED)
        assert (len(en), len(cmn), len(merged)) == (16, 16, 18)
        by_class = {
            c: len(merged.indices_of_class(c))
            for c in VisemeClass
        }
        assert by_class[VisemeClass.COMMON] == 14
        assert by_class[VisemeClass.ENGLISH_ONLY] == 2
        assert by_class[VisemeClass.MANDARIN_ONLY] == 2
        assert sum(by_class.values()) == len(merged)

    def test_mono_excludes_other_language_unique(self, tables):
        en = vl.build_inventory(tables, Language.ENGLISH)
        assert "y_M" not in en.rendered and "R_M" not in en.rendered
        cmn = vl.build_inventory(tables, Language.MANDARIN)
        assert "T_E" not in cmn.rendered and "O_E" not in cmn.rendered

    def test_nomenclature_partition(self, merged_inventory):
        seen_bases = set()
        for label in merged_inventory.labels:
            assert label.base not in seen_bases
            seen_bases.add(label.base)
            if label.category is VisemeClass.COMMON:
                assert label.rendered == label.base
            elif label.category is VisemeClass.ENGLISH_ONLY:
                assert label.rendered.endswith("_E")
            else:
                assert label.rendered.endswith("_M")

    def test_order_is_lexicographic_and_stable(self, merged_inventory):
        rendered = merged_inventory.rendered
        assert list(rendered) == sorted(rendered)

    def test_full_coverage_of_bundled_word_lists(self, bundled):
        tables, lexicons, word_lists = bundled
        for lang in (Language.ENGLISH, Language.MANDARIN):
            for word, _ in word_lists[lang].entries:
                phonemes = vl.transliterate(word, lang, lexicons[lang])
                visemes = vl.phonemes_to_visemes(phonemes, lang, tables)
                assert len(visemes) == len(phonemes) > 0
