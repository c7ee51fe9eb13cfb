"""Corpora: word lists, viseme labeling, incremental splits, distributions.

A LabeledCorpus pairs each word with its phoneme and viseme sequences and a
sample count. Splits scale sample counts per word (floor, minimum one) so
every word class survives every split, and smaller splits select a prefix of
the larger split's samples under the same seed.
"""

from dataclasses import dataclass, replace

from .errors import ConflictError, EmptyInputError, ParseError
from .visemes import (
    Language,
    Lexicon,
    MappingTables,
    VisemeClass,
    normalize_word,
    phonemes_to_visemes,
    transliterate,
)

#: The four exposure levels the incremental-training protocols run over.
STANDARD_FRACTIONS = (0.25, 0.50, 0.75, 1.00)


@dataclass(frozen=True)
class WordList:
    language: Language
    entries: tuple  # of (word, sample_count)

    def __len__(self):
        return len(self.entries)

    def total_samples(self):
        return sum(count for _, count in self.entries)


def load_word_list(path, lang: Language) -> WordList:
    """Parse ``<word> <sample_count>`` lines, preserving file order."""
    entries = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(path, line_no, f"expected '<word> <count>', got {line!r}")
            word = normalize_word(parts[0], lang)
            try:
                count = int(parts[1])
            except ValueError:
                raise ParseError(path, line_no, f"sample count {parts[1]!r} is not an integer")
            if count < 1:
                raise ParseError(path, line_no, f"sample count must be >= 1, got {count}")
            if word in seen:
                raise ConflictError(f"{path}:{line_no}: duplicate word {word!r}")
            seen.add(word)
            entries.append((word, count))
    return WordList(language=lang, entries=tuple(entries))


@dataclass(frozen=True)
class CorpusEntry:
    word: str
    phonemes: tuple
    visemes: tuple  # of VisemeLabel
    sample_count: int


@dataclass(frozen=True)
class LabeledCorpus:
    language: Language
    entries: tuple  # of CorpusEntry

    def __len__(self):
        return len(self.entries)

    def total_samples(self):
        return sum(e.sample_count for e in self.entries)

    def rendered_labels(self):
        seen = set()
        for entry in self.entries:
            for label in entry.visemes:
                seen.add(label.rendered)
        return seen


def build_labeled_corpus(words: WordList, lexicon: Lexicon, tables: MappingTables) -> LabeledCorpus:
    """Transliterate every word and attach its viseme sequence.

    Any lookup or mapping failure aborts the build naming the word; silently
    dropping words would skew the viseme distributions downstream.
    """
    entries = []
    for word, count in words.entries:
        phonemes = transliterate(word, words.language, lexicon)
        visemes = phonemes_to_visemes(phonemes, words.language, tables)
        entries.append(CorpusEntry(word=word, phonemes=phonemes, visemes=visemes, sample_count=count))
    return LabeledCorpus(language=words.language, entries=tuple(entries))


@dataclass(frozen=True)
class SplitSpec:
    """Fraction of each word's samples to keep, plus the selection seed.

    Only the four standard fractions are accepted unless ``allow_any`` is
    set (used internally, e.g. to equalize bilingual corpora).
    """

    fraction: float
    seed: int = 0
    allow_any: bool = False

    def __post_init__(self):
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError(f"fraction must be in (0, 1], got {self.fraction}")
        if not self.allow_any and self.fraction not in STANDARD_FRACTIONS:
            raise ValueError(
                f"fraction {self.fraction} is not one of {STANDARD_FRACTIONS}; "
                "pass allow_any=True to override"
            )


def split_sample_count(count: int, fraction: float) -> int:
    return max(1, int(count * fraction))


def split_corpus(corpus: LabeledCorpus, spec: SplitSpec) -> LabeledCorpus:
    """Reduce per-word sample counts to the requested fraction.

    The word set never shrinks. Sample identity is positional: the feature
    generator draws each word's samples from one per-word stream, so the
    n kept samples are always the first n of any larger split, making splits
    nested regardless of the fraction pair.
    """
    entries = tuple(
        replace(e, sample_count=split_sample_count(e.sample_count, spec.fraction))
        for e in corpus.entries
    )
    return LabeledCorpus(language=corpus.language, entries=entries)


def with_sample_count(corpus: LabeledCorpus, count: int) -> LabeledCorpus:
    """Uniform per-word sample count, e.g. for held-out test sets."""
    if count < 1:
        raise ValueError(f"sample count must be >= 1, got {count}")
    entries = tuple(replace(e, sample_count=count) for e in corpus.entries)
    return LabeledCorpus(language=corpus.language, entries=entries)


@dataclass(frozen=True)
class VisemeDistribution:
    """Occurrence counts per rendered label, weighted by sample count."""

    counts: dict  # rendered label -> count
    class_totals: dict  # VisemeClass -> count

    @property
    def total(self):
        return sum(self.counts.values())

    def sorted_items(self):
        """Counts in descending order, label as the tiebreak."""
        return sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))


def viseme_distribution(corpus: LabeledCorpus) -> VisemeDistribution:
    if len(corpus) == 0:
        raise EmptyInputError("cannot compute a viseme distribution of an empty corpus")
    counts = {}
    class_totals = {c: 0 for c in VisemeClass}
    for entry in corpus.entries:
        for label in entry.visemes:
            counts[label.rendered] = counts.get(label.rendered, 0) + entry.sample_count
            class_totals[label.category] += entry.sample_count
    return VisemeDistribution(counts=counts, class_totals=class_totals)
