"""Desk-scale bilingual viseme perception lab.

Transliterates English words and Mandarin pinyin to viseme sequences,
trains surrogate viseme classifiers under monolingual, bilingual, and
sequential curricula over synthetic lip features, and analyzes the
resulting learning curves for critical periods.
"""

from importlib import resources

from .analyzer import (
    CriticalPeriodReport,
    CrossInferenceReport,
    DetectionParams,
    cp_vs_data_fraction,
    cross_inference_compare,
    detect_critical_period,
    gains,
)
from .corpus import (
    STANDARD_FRACTIONS,
    LabeledCorpus,
    SplitSpec,
    WordList,
    build_labeled_corpus,
    load_word_list,
    split_corpus,
    viseme_distribution,
    with_sample_count,
)
from .features import (
    ConfusabilityModel,
    FeatureDataset,
    GeneratorParams,
    default_confusability_model,
    generate_features,
    load_dataset,
    save_dataset,
)
from .learner import (
    BilingualProtocol,
    ModelParams,
    MonolingualProtocol,
    PerVisemeAccuracy,
    SequentialProtocol,
    SwitchRule,
    TrainingConfig,
    detect_convergence_online,
    evaluate,
    init_model,
    run_protocol,
    train_epoch,
)
from .traceio import TrainingTrace, read_trace, write_trace
from .visemes import (
    MERGED,
    Language,
    Lexicon,
    MappingTables,
    VisemeClass,
    VisemeInventory,
    VisemeLabel,
    build_inventory,
    classify_viseme,
    load_lexicon,
    load_mapping_tables,
    phonemes_to_visemes,
    transliterate,
)

__version__ = "0.1.0"


def data_path(name: str):
    """Path to a bundled data file (tables, lexicons, word lists)."""
    return resources.files("visemelab.data") / name


def load_bundled():
    """Convenience loader for the bundled tables, lexicons, and word lists.

    Returns (tables, lexicons, word_lists) with the latter two keyed by
    Language.
    """
    tables = load_mapping_tables(data_path("tables.txt"))
    lexicons = {
        Language.ENGLISH: load_lexicon(data_path("lexicon_en.txt"), Language.ENGLISH),
        Language.MANDARIN: load_lexicon(data_path("lexicon_cmn.txt"), Language.MANDARIN),
    }
    word_lists = {
        Language.ENGLISH: load_word_list(data_path("words_en.txt"), Language.ENGLISH),
        Language.MANDARIN: load_word_list(data_path("words_cmn.txt"), Language.MANDARIN),
    }
    return tables, lexicons, word_lists


def load_bundled_corpora():
    """Bundled corpora keyed by Language, plus the tables used to build them."""
    tables, lexicons, word_lists = load_bundled()
    corpora = {
        lang: build_labeled_corpus(word_lists[lang], lexicons[lang], tables)
        for lang in (Language.ENGLISH, Language.MANDARIN)
    }
    return tables, corpora
