"""Viseme taxonomy and transliteration.

Words are looked up in frozen per-language lexicons (word -> IPA phonemes),
phonemes are mapped to viseme symbols through bundled per-language tables,
and each viseme symbol is classified by which languages' tables contain it:
present in both -> common, rendered bare; present in one -> unique, rendered
with an ``_E`` or ``_M`` suffix.

All operations are pure over the loaded tables and safe for concurrent use.
"""

import enum
import hashlib
import unicodedata
from dataclasses import dataclass, field

from .errors import (
    ConflictError,
    MissingEntryError,
    ParseError,
    UnknownVisemeError,
    UnmappedPhonemeError,
)


class Language(enum.Enum):
    """The two supported languages, tagged as in the bundled data files."""

    ENGLISH = "en"
    MANDARIN = "cmn"

    @classmethod
    def parse(cls, text: str) -> "Language":
        aliases = {
            "en": cls.ENGLISH,
            "english": cls.ENGLISH,
            "cmn": cls.MANDARIN,
            "zh": cls.MANDARIN,
            "mandarin": cls.MANDARIN,
        }
        try:
            return aliases[text.strip().lower()]
        except KeyError:
            raise ValueError(f"unknown language tag {text!r} (expected 'en' or 'cmn')") from None


#: Inventory scope covering both languages at once.
MERGED = "merged"


class VisemeClass(enum.Enum):
    COMMON = "common"
    ENGLISH_ONLY = "english_only"
    MANDARIN_ONLY = "mandarin_only"


_SUFFIX = {
    VisemeClass.COMMON: "",
    VisemeClass.ENGLISH_ONLY: "_E",
    VisemeClass.MANDARIN_ONLY: "_M",
}


@dataclass(frozen=True, order=True)
class VisemeLabel:
    """A viseme symbol plus its language-class tag."""

    base: str
    category: VisemeClass = field(compare=False)

    @property
    def rendered(self) -> str:
        return self.base + _SUFFIX[self.category]

    def __str__(self) -> str:
        return self.rendered


def _norm_token(text: str) -> str:
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True)
class MappingTables:
    """Per-language phoneme -> viseme symbol maps."""

    english: dict
    mandarin: dict

    def for_language(self, lang: Language) -> dict:
        return self.english if lang is Language.ENGLISH else self.mandarin

    def viseme_bases(self, lang: Language) -> frozenset:
        return frozenset(self.for_language(lang).values())


def load_mapping_tables(path) -> MappingTables:
    """Parse a mapping-table file into per-language phoneme->viseme maps.

    Format: one ``<language-tag> <ipa-phoneme> <viseme-symbol>`` record per
    line, ``#`` comments, UTF-8. An empty file yields empty maps. A phoneme
    repeated within one language is a conflict even if the viseme agrees.
    """
    maps = {Language.ENGLISH: {}, Language.MANDARIN: {}}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ParseError(path, line_no, f"expected 3 fields, got {len(parts)}: {line!r}")
            tag, phoneme, viseme = (_norm_token(p) for p in parts)
            try:
                lang = Language.parse(tag)
            except ValueError as exc:
                raise ParseError(path, line_no, str(exc)) from None
            table = maps[lang]
            if phoneme in table:
                raise ConflictError(
                    f"{path}:{line_no}: phoneme {phoneme!r} mapped twice for {lang.value} "
                    f"(have {table[phoneme]!r}, new {viseme!r})"
                )
            table[phoneme] = viseme
    return MappingTables(english=maps[Language.ENGLISH], mandarin=maps[Language.MANDARIN])


def classify_viseme(base: str, tables: MappingTables) -> VisemeLabel:
    """Assign the common / English-only / Mandarin-only class to a symbol."""
    in_en = base in tables.viseme_bases(Language.ENGLISH)
    in_cmn = base in tables.viseme_bases(Language.MANDARIN)
    if in_en and in_cmn:
        return VisemeLabel(base, VisemeClass.COMMON)
    if in_en:
        return VisemeLabel(base, VisemeClass.ENGLISH_ONLY)
    if in_cmn:
        return VisemeLabel(base, VisemeClass.MANDARIN_ONLY)
    raise UnknownVisemeError(f"viseme {base!r} appears in neither language table")


# Tone diacritics stripped from pinyin before lookup. The diaeresis (U+0308)
# is phonemic (u vs. ü) and must survive.
_TONE_MARKS = {"̀", "́", "̄", "̌"}


def normalize_word(word: str, lang: Language) -> str:
    """Canonical lexicon key: NFC, trimmed, uppercased; pinyin additionally
    loses tone digits and tone diacritics, and the 'V' spelling becomes 'Ü'.
    """
    text = unicodedata.normalize("NFC", word).strip().upper()
    if lang is Language.MANDARIN:
        text = "".join(ch for ch in text if not ch.isdigit())
        decomposed = unicodedata.normalize("NFD", text)
        text = unicodedata.normalize(
            "NFC", "".join(ch for ch in decomposed if ch not in _TONE_MARKS)
        )
        text = text.replace("V", "Ü")
    return text


@dataclass(frozen=True)
class Lexicon:
    """Frozen word -> IPA phoneme sequence map for one language."""

    language: Language
    entries: dict

    def __contains__(self, word: str) -> bool:
        return normalize_word(word, self.language) in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def words(self):
        return self.entries.keys()


def load_lexicon(path, lang: Language) -> Lexicon:
    """Parse a lexicon file: ``<word> <phoneme> [<phoneme> ...]`` per line."""
    entries = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [_norm_token(p) for p in line.split()]
            if len(parts) < 2:
                raise ParseError(path, line_no, f"expected a word and phonemes: {line!r}")
            key = normalize_word(parts[0], lang)
            if key in entries:
                raise ConflictError(f"{path}:{line_no}: duplicate lexicon entry {key!r}")
            entries[key] = tuple(parts[1:])
    return Lexicon(language=lang, entries=entries)


def transliterate(word: str, lang: Language, lexicon: Lexicon) -> tuple:
    """Look the word up in the lexicon and return its phoneme sequence.

    Out-of-lexicon words are a hard error; there is no fallback guessing.
    """
    if lexicon.language is not lang:
        raise ValueError(f"lexicon is for {lexicon.language.value}, not {lang.value}")
    key = normalize_word(word, lang)
    try:
        return lexicon.entries[key]
    except KeyError:
        raise MissingEntryError(f"word {word!r} ({lang.value}) has no lexicon entry") from None


def phonemes_to_visemes(seq, lang: Language, tables: MappingTables) -> tuple:
    """Map each phoneme to its classified viseme label, position by position.

    Output length always equals input length; consecutive identical visemes
    are intentionally not collapsed.
    """
    table = tables.for_language(lang)
    out = []
    for phoneme in seq:
        try:
            base = table[phoneme]
        except KeyError:
            raise UnmappedPhonemeError(
                f"phoneme {phoneme!r} has no viseme mapping for {lang.value}"
            ) from None
        out.append(classify_viseme(base, tables))
    return tuple(out)


@dataclass(frozen=True)
class VisemeInventory:
    """Ordered label set a model head is built over.

    Labels are sorted lexicographically by rendered form so output indices
    are stable across runs. ``scope`` is a Language or MERGED.
    """

    scope: object
    labels: tuple
    phoneme_maps: dict  # Language -> {phoneme: rendered label}

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def rendered(self) -> tuple:
        return tuple(label.rendered for label in self.labels)

    def index_of(self, rendered: str) -> int:
        try:
            return self.rendered.index(rendered)
        except ValueError:
            raise UnknownVisemeError(f"label {rendered!r} not in {self.scope} inventory") from None

    def class_of(self, rendered: str) -> VisemeClass:
        return self.labels[self.index_of(rendered)].category

    def indices_of_class(self, category: VisemeClass) -> tuple:
        return tuple(i for i, lab in enumerate(self.labels) if lab.category is category)

    def content_hash(self) -> str:
        joined = "\n".join(self.rendered).encode("utf-8")
        return hashlib.sha256(joined).hexdigest()


def build_inventory(tables: MappingTables, scope) -> VisemeInventory:
    """Build the ordered viseme inventory for one language or both merged.

    A monolingual inventory holds the common labels plus that language's
    unique labels and nothing of the other language; the merged inventory is
    the duplicate-free union of both.
    """
    if scope is MERGED:
        langs = [Language.ENGLISH, Language.MANDARIN]
    elif isinstance(scope, Language):
        langs = [scope]
    else:
        raise ValueError(f"scope must be a Language or MERGED, got {scope!r}")
    bases = set()
    for lang in langs:
        bases |= tables.viseme_bases(lang)
    labels = sorted((classify_viseme(b, tables) for b in bases), key=lambda l: l.rendered)
    phoneme_maps = {}
    for lang in langs:
        table = tables.for_language(lang)
        classified = {ph: classify_viseme(v, tables).rendered for ph, v in table.items()}
        phoneme_maps[lang] = classified
    return VisemeInventory(scope=scope, labels=tuple(labels), phoneme_maps=phoneme_maps)
