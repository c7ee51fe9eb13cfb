"""Run configuration: one declarative record driving the whole pipeline.

The default configuration is the bundled preset: packaged data files, the
frozen generator and learner settings, the standard fraction grid, and ten
seeds. Configs round-trip losslessly through JSON so every output can embed
the exact settings that produced it.
"""

import json
import os
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .analyzer import DetectionParams
from .corpus import STANDARD_FRACTIONS
from .errors import ConfigurationError
from .features import GeneratorParams
from .learner import TrainingConfig

#: Model families of the run matrix, as spelled in configs and file names.
FAMILIES = ("mono_en", "mono_cmn", "bilingual")

OUTPUT_ROOT_ENV = "VISEMELAB_OUT"


def _bundled(name: str) -> str:
    return str(resources.files("visemelab.data") / name)


@dataclass(frozen=True)
class RunConfig:
    tables_path: str = field(default_factory=lambda: _bundled("tables.txt"))
    lexicon_en_path: str = field(default_factory=lambda: _bundled("lexicon_en.txt"))
    lexicon_cmn_path: str = field(default_factory=lambda: _bundled("lexicon_cmn.txt"))
    words_en_path: str = field(default_factory=lambda: _bundled("words_en.txt"))
    words_cmn_path: str = field(default_factory=lambda: _bundled("words_cmn.txt"))
    generator: GeneratorParams = GeneratorParams()
    training: TrainingConfig = TrainingConfig()
    detection: DetectionParams = DetectionParams()
    families: tuple = FAMILIES
    fractions: tuple = STANDARD_FRACTIONS
    seeds: tuple = tuple(range(10))
    sequential_first_language: str = "en"
    test_samples_per_word: int = 2
    output_dir: str = "out"

    def __post_init__(self):
        for family in self.families:
            if family not in FAMILIES:
                raise ConfigurationError(f"unknown model family {family!r}")
        if not self.seeds:
            raise ConfigurationError("at least one seed is required")
        if self.sequential_first_language not in ("en", "cmn"):
            raise ConfigurationError("sequential first language must be 'en' or 'cmn'")
        if self.test_samples_per_word < 1:
            raise ConfigurationError("test_samples_per_word must be >= 1")

    def to_dict(self) -> dict:
        return {
            "tables_path": self.tables_path,
            "lexicon_en_path": self.lexicon_en_path,
            "lexicon_cmn_path": self.lexicon_cmn_path,
            "words_en_path": self.words_en_path,
            "words_cmn_path": self.words_cmn_path,
            "generator": self.generator.to_dict(),
            "training": self.training.to_dict(),
            "detection": self.detection.to_dict(),
            "families": list(self.families),
            "fractions": list(self.fractions),
            "seeds": list(self.seeds),
            "sequential_first_language": self.sequential_first_language,
            "test_samples_per_word": self.test_samples_per_word,
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return cls(
            tables_path=data["tables_path"],
            lexicon_en_path=data["lexicon_en_path"],
            lexicon_cmn_path=data["lexicon_cmn_path"],
            words_en_path=data["words_en_path"],
            words_cmn_path=data["words_cmn_path"],
            generator=GeneratorParams.from_dict(data["generator"]),
            training=TrainingConfig.from_dict(data["training"]),
            detection=DetectionParams.from_dict(data["detection"]),
            families=tuple(data["families"]),
            fractions=tuple(data["fractions"]),
            seeds=tuple(data["seeds"]),
            sequential_first_language=data["sequential_first_language"],
            test_samples_per_word=data["test_samples_per_word"],
            output_dir=data["output_dir"],
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.loads(Path(path).read_text(encoding="utf-8"))

    def validate_paths(self) -> None:
        for name in ("tables_path", "lexicon_en_path", "lexicon_cmn_path",
                     "words_en_path", "words_cmn_path"):
            path = getattr(self, name)
            if not os.path.exists(path):
                raise ConfigurationError(f"{name} does not exist: {path}")

    def with_overrides(self, **kwargs) -> "RunConfig":
        return replace(self, **kwargs)


def default_output_dir() -> str:
    return os.environ.get(OUTPUT_ROOT_ENV, "out")


def default_config() -> RunConfig:
    return RunConfig(output_dir=default_output_dir())
