import pytest

import visemelab as vl


@pytest.fixture(scope="session")
def bundled():
    tables, lexicons, word_lists = vl.load_bundled()
    return tables, lexicons, word_lists


@pytest.fixture(scope="session")
def tables(bundled):
    return bundled[0]


@pytest.fixture(scope="session")
def corpora(bundled):
    tables, lexicons, word_lists = bundled
    return {
        lang: vl.build_labeled_corpus(word_lists[lang], lexicons[lang], tables)
        for lang in (vl.Language.ENGLISH, vl.Language.MANDARIN)
    }


@pytest.fixture(scope="session")
def merged_inventory(tables):
    return vl.build_inventory(tables, vl.MERGED)


def make_tiny_table(tmp_path, text):
    path = tmp_path / "tables.txt"
    path.write_text(text, encoding="utf-8")
    return path
