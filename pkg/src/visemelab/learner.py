"""Surrogate viseme classifier: a linear-softmax layer over frame features
trained by seeded mini-batch SGD.

The point is not the architecture; it is the learning dynamics. Protocols
mirror the curricula under study: monolingual heads over one language's
inventory, a bilingual head over the merged inventory fed equal data from
both languages, and sequential first-language/second-language runs that
switch either when the critical-period detector fires or at convergence.
Every run is a pure function of (protocol, corpora, feature model, config).
"""

import enum
import hashlib
from dataclasses import dataclass, field

import numpy as np

from . import analyzer
from .corpus import SplitSpec, split_corpus, with_sample_count
from .errors import (
    ConfigurationError,
    EmptyInputError,
    NoCriticalPeriodError,
    NumericFailureError,
)
from .features import ConfusabilityModel, default_confusability_model, generate_features
from .seeds import STREAM_INIT, STREAM_SHUFFLE, stable_seed, substream
from .traceio import EpochRecord, TrainingTrace
from .visemes import MERGED, Language, build_inventory


@dataclass(frozen=True)
class TrainingConfig:
    learning_rate: float = 0.006
    batch_size: int = 32
    max_epochs: int = 40
    seed: int = 0
    convergence_epsilon: float = 0.002
    convergence_patience: int = 3
    # Which accuracy series sequential phases watch for convergence: the
    # trace's overall accuracy ("overall", the default) or the current
    # phase's language ("phase_language").
    convergence_metric: str = "overall"

    def __post_init__(self):
        if self.learning_rate < 0:
            raise ConfigurationError(f"learning rate must be >= 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ConfigurationError(f"batch size must be >= 1, got {self.batch_size}")
        if self.max_epochs < 1:
            raise ConfigurationError(f"max epochs must be >= 1, got {self.max_epochs}")
        if self.convergence_epsilon <= 0:
            raise ConfigurationError("convergence epsilon must be positive")
        if self.convergence_patience < 1:
            raise ConfigurationError("convergence patience must be >= 1")
        if self.convergence_metric not in ("phase_language", "overall"):
            raise ConfigurationError(f"unknown convergence metric {self.convergence_metric!r}")

    def to_dict(self):
        return {
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "max_epochs": self.max_epochs,
            "seed": self.seed,
            "convergence_epsilon": self.convergence_epsilon,
            "convergence_patience": self.convergence_patience,
            "convergence_metric": self.convergence_metric,
        }

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


@dataclass
class ModelParams:
    weights: np.ndarray  # (L, d) float64
    bias: np.ndarray  # (L,) float64
    inventory_labels: tuple

    def __post_init__(self):
        if self.weights.shape[0] != len(self.inventory_labels):
            raise ConfigurationError("weight rows must match inventory size")
        if self.bias.shape != (self.weights.shape[0],):
            raise ConfigurationError("bias length must match inventory size")

    def copy(self):
        return ModelParams(self.weights.copy(), self.bias.copy(), self.inventory_labels)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.weights).tobytes())
        h.update(np.ascontiguousarray(self.bias).tobytes())
        return h.hexdigest()


def init_model(inventory, dim: int, seed: int, scale: float = 0.01) -> ModelParams:
    """Small seeded Gaussian weights, zero bias."""
    if dim < 1:
        raise ConfigurationError(f"feature dimension must be >= 1, got {dim}")
    rng = substream(seed, STREAM_INIT)
    weights = rng.normal(0.0, scale, size=(len(inventory), dim))
    return ModelParams(weights=weights, bias=np.zeros(len(inventory)), inventory_labels=tuple(inventory.rendered))


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def cross_entropy_loss(params: ModelParams, features, labels) -> float:
    """Mean negative log likelihood; the quantity SGD descends."""
    logits = features @ params.weights.T + params.bias
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return float(-log_probs[np.arange(len(labels)), labels].mean())


def loss_gradient(params: ModelParams, features, labels):
    """Analytic mean cross-entropy gradient for (weights, bias)."""
    probs = softmax(features @ params.weights.T + params.bias)
    probs[np.arange(len(labels)), labels] -= 1.0
    grad_w = probs.T @ features / len(labels)
    grad_b = probs.mean(axis=0)
    return grad_w, grad_b


def train_epoch(params: ModelParams, dataset, config: TrainingConfig, epoch_index: int) -> ModelParams:
    """One full pass in the (config.seed, epoch_index) shuffle order.

    Aborts on non-finite loss rather than continuing with poisoned weights.
    """
    if dataset.labels.max(initial=-1) >= len(params.inventory_labels):
        raise ConfigurationError("dataset labels exceed the model head")
    n = len(dataset)
    perm = substream(config.seed, STREAM_SHUFFLE, epoch_index).permutation(n)
    feats = dataset.features[perm].astype(np.float64)
    labels = dataset.labels[perm]
    weights = params.weights.copy()
    bias = params.bias.copy()
    lr = config.learning_rate
    bs = config.batch_size
    loss_sum = 0.0
    for start in range(0, n, bs):
        xb = feats[start:start + bs]
        yb = labels[start:start + bs]
        m = len(yb)
        logits = xb @ weights.T + bias
        shifted = logits - logits.max(axis=1, keepdims=True)
        exp = np.exp(shifted)
        denom = exp.sum(axis=1, keepdims=True)
        probs = exp / denom
        loss_sum += float(-(shifted[np.arange(m), yb] - np.log(denom[:, 0])).sum())
        probs[np.arange(m), yb] -= 1.0
        weights -= lr * (probs.T @ xb) / m
        bias -= lr * probs.mean(axis=0)
    mean_loss = loss_sum / max(n, 1)
    if not np.isfinite(mean_loss) or not np.isfinite(weights).all() or not np.isfinite(bias).all():
        raise NumericFailureError(
            f"non-finite loss or parameters in epoch {epoch_index} (loss={mean_loss})"
        )
    return ModelParams(weights=weights, bias=bias, inventory_labels=params.inventory_labels)


@dataclass
class PerVisemeAccuracy:
    """Correct/total frame counts per inventory label."""

    labels: tuple
    correct: np.ndarray  # (L,) int64
    total: np.ndarray  # (L,) int64

    @property
    def overall(self) -> float:
        return float(self.correct.sum() / self.total.sum())

    def per_label(self) -> tuple:
        """Accuracy per label, None where the label has no test frames."""
        return tuple(
            float(c / t) if t > 0 else None
            for c, t in zip(self.correct, self.total)
        )

    def merged_with(self, other: "PerVisemeAccuracy") -> "PerVisemeAccuracy":
        if self.labels != other.labels:
            raise ConfigurationError("cannot merge accuracy counts over different inventories")
        return PerVisemeAccuracy(self.labels, self.correct + other.correct, self.total + other.total)


def evaluate(params: ModelParams, dataset) -> PerVisemeAccuracy:
    """Frame-level argmax accuracy; ties break toward the lowest index."""
    if len(dataset) == 0:
        raise EmptyInputError("cannot evaluate on an empty dataset")
    logits = dataset.features.astype(np.float64) @ params.weights.T + params.bias
    preds = logits.argmax(axis=1)
    L = len(params.inventory_labels)
    total = np.bincount(dataset.labels, minlength=L).astype(np.int64)
    correct = np.bincount(
        dataset.labels[preds == dataset.labels], minlength=L
    ).astype(np.int64)
    return PerVisemeAccuracy(labels=tuple(params.inventory_labels), correct=correct, total=total)


def detect_convergence_online(overall_accuracies, epsilon: float, patience: int) -> bool:
    """True once the last ``patience`` per-epoch gains are each below epsilon."""
    series = list(overall_accuracies)
    if len(series) < patience + 1:
        return False
    gains = [b - a for a, b in zip(series[-patience - 1:-1], series[-patience:])]
    return all(g < epsilon for g in gains)


class SwitchRule(enum.Enum):
    AT_CRITICAL_PERIOD = "at_critical_period"
    AT_CONVERGENCE = "at_convergence"


@dataclass(frozen=True)
class MonolingualProtocol:
    language: Language
    fraction: float = 1.0


@dataclass(frozen=True)
class BilingualProtocol:
    fraction: float = 1.0


@dataclass(frozen=True)
class SequentialProtocol:
    first_language: Language
    switch: SwitchRule
    fraction: float = 1.0

    @property
    def second_language(self) -> Language:
        return Language.MANDARIN if self.first_language is Language.ENGLISH else Language.ENGLISH


def protocol_to_dict(protocol) -> dict:
    if isinstance(protocol, MonolingualProtocol):
        return {"kind": "monolingual", "language": protocol.language.value, "fraction": protocol.fraction}
    if isinstance(protocol, BilingualProtocol):
        return {"kind": "bilingual", "fraction": protocol.fraction}
    if isinstance(protocol, SequentialProtocol):
        return {
            "kind": "sequential",
            "first_language": protocol.first_language.value,
            "switch": protocol.switch.value,
            "fraction": protocol.fraction,
        }
    raise ConfigurationError(f"unknown protocol {protocol!r}")


def protocol_from_dict(data) -> object:
    kind = data["kind"]
    if kind == "monolingual":
        return MonolingualProtocol(Language.parse(data["language"]), data["fraction"])
    if kind == "bilingual":
        return BilingualProtocol(data["fraction"])
    if kind == "sequential":
        return SequentialProtocol(
            Language.parse(data["first_language"]), SwitchRule(data["switch"]), data["fraction"]
        )
    raise ConfigurationError(f"unknown protocol kind {kind!r}")


def _concat_datasets(parts):
    from .features import FeatureDataset

    return FeatureDataset(
        features=np.concatenate([p.features for p in parts]),
        labels=np.concatenate([p.labels for p in parts]),
        item_lengths=np.concatenate([p.item_lengths for p in parts]),
        inventory_labels=parts[0].inventory_labels,
        seed=parts[0].seed,
    )


def _equalized_splits(corpora, fraction, seed):
    """Per-language splits holding equal sample counts for bilingual mixes."""
    splits = {
        lang: split_corpus(corpora[lang], SplitSpec(fraction, seed=seed))
        for lang in (Language.ENGLISH, Language.MANDARIN)
    }
    totals = {lang: c.total_samples() for lang, c in splits.items()}
    target = min(totals.values())
    for lang, total in totals.items():
        if total > target:
            shrink = SplitSpec(target / total, seed=seed, allow_any=True)
            splits[lang] = split_corpus(splits[lang], shrink)
    return splits


def run_protocol(
    protocol,
    corpora: dict,
    gen_model: ConfusabilityModel | None,
    config: TrainingConfig,
    tables,
    detection=None,
    test_samples_per_word: int = 2,
) -> TrainingTrace:
    """Execute one training run and record its per-epoch trace.

    Held-out test sets are generated once per language from the full word
    list with their own seeds and evaluated after every epoch. Monolingual
    runs see and report only their language's inventory; bilingual and
    sequential runs use the merged inventory and the union of both test
    sets. Sequential runs cap each phase at ``config.max_epochs`` epochs.
    """
    detection = detection if detection is not None else analyzer.DetectionParams()

    if isinstance(protocol, MonolingualProtocol):
        scope = protocol.language
        train_langs = [protocol.language]
        eval_langs = [protocol.language]
    elif isinstance(protocol, BilingualProtocol):
        scope = MERGED
        train_langs = [Language.ENGLISH, Language.MANDARIN]
        eval_langs = [Language.ENGLISH, Language.MANDARIN]
    elif isinstance(protocol, SequentialProtocol):
        scope = MERGED
        train_langs = [protocol.first_language, protocol.second_language]
        eval_langs = [Language.ENGLISH, Language.MANDARIN]
    else:
        raise ConfigurationError(f"unknown protocol {protocol!r}")

    for lang in set(train_langs) | set(eval_langs):
        if lang not in corpora:
            raise ConfigurationError(f"protocol needs a {lang.value} corpus")

    inventory = build_inventory(tables, scope)
    if gen_model is None:
        merged = build_inventory(tables, MERGED)
        gen_model = default_confusability_model(
            merged.rendered, seed=stable_seed(config.seed, "gen-model")
        )

    test_sets = {
        lang: generate_features(
            with_sample_count(corpora[lang], test_samples_per_word),
            gen_model,
            inventory,
            seed=stable_seed(config.seed, "test", lang.value),
        )
        for lang in eval_langs
    }

    def make_train(lang, corpus_split):
        return generate_features(
            corpus_split, gen_model, inventory, seed=stable_seed(config.seed, "train", lang.value)
        )

    if isinstance(protocol, BilingualProtocol):
        splits = _equalized_splits(corpora, protocol.fraction, config.seed)
        train_data = _concat_datasets([make_train(lang, splits[lang]) for lang in train_langs])
        phase_data = [(train_data, None)]
    elif isinstance(protocol, MonolingualProtocol):
        split = split_corpus(corpora[protocol.language], SplitSpec(protocol.fraction, seed=config.seed))
        phase_data = [(make_train(protocol.language, split), protocol.language)]
    else:
        phase_data = []
        for lang in train_langs:
            split = split_corpus(corpora[lang], SplitSpec(protocol.fraction, seed=config.seed))
            phase_data.append((make_train(lang, split), lang))

    params = init_model(inventory, gen_model.means.shape[1], config.seed)
    sequential = isinstance(protocol, SequentialProtocol)

    if sequential:
        # The recorded trace is the second-language inference view, matching
        # how sequential runs are compared downstream. The first-language
        # view exists only in memory, to drive the online switch detector.
        recorded_eval, meta_eval = [protocol.second_language], "l2"
    elif isinstance(protocol, MonolingualProtocol):
        recorded_eval, meta_eval = [protocol.language], "own"
    else:
        recorded_eval, meta_eval = list(eval_langs), "merged"

    trace = TrainingTrace(
        protocol=protocol_to_dict(protocol),
        config=config.to_dict(),
        inventory=tuple(inventory.rendered),
        meta={"test_samples_per_word": test_samples_per_word, "evaluation": meta_eval},
    )
    l1_view = TrainingTrace(
        protocol=protocol_to_dict(protocol),
        config=config.to_dict(),
        inventory=tuple(inventory.rendered),
    )

    def eval_epoch():
        by_lang = {lang: evaluate(params, test_sets[lang]) for lang in eval_langs}
        merged_counts = None
        for counts in by_lang.values():
            merged_counts = counts if merged_counts is None else merged_counts.merged_with(counts)
        return merged_counts, by_lang

    def record(epoch, phase):
        merged_counts, by_lang = eval_epoch()
        view = by_lang[recorded_eval[0]] if len(recorded_eval) == 1 else merged_counts
        trace.epochs.append(
            EpochRecord(epoch=epoch, phase=phase, overall=view.overall, per_viseme=view.per_label())
        )
        if sequential:
            l1 = by_lang[protocol.first_language]
            l1_view.epochs.append(
                EpochRecord(epoch=epoch, phase=phase, overall=l1.overall, per_viseme=l1.per_label())
            )
        return merged_counts, by_lang

    epoch = 0
    phase_series = []  # accuracy series the convergence rule watches

    def phase_metric(merged_counts, by_lang, lang):
        if config.convergence_metric == "phase_language" and lang is not None:
            return by_lang[lang].overall
        return merged_counts.overall

    # Phase 1 (the only phase for monolingual/bilingual runs).
    data, lang = phase_data[0]
    phase1_end = None
    for _ in range(config.max_epochs):
        epoch += 1
        params = train_epoch(params, data, config, epoch)
        merged_counts, by_lang = record(epoch, phase=1)
        phase_series.append(phase_metric(merged_counts, by_lang, lang))
        if sequential and protocol.switch is SwitchRule.AT_CRITICAL_PERIOD:
            if l1_view.n_epochs >= 3:
                report = analyzer.detect_critical_period(l1_view, detection)
                if report.cp_epoch is not None:
                    phase1_end = epoch
                    trace.meta["detected_cp"] = report.cp_epoch
                    break
        elif sequential and protocol.switch is SwitchRule.AT_CONVERGENCE:
            if detect_convergence_online(
                phase_series, config.convergence_epsilon, config.convergence_patience
            ):
                phase1_end = epoch
                trace.meta["phase1_converged"] = True
                break

    if sequential:
        if protocol.switch is SwitchRule.AT_CRITICAL_PERIOD and phase1_end is None:
            trace.params_digest = params.digest()
            raise NoCriticalPeriodError(
                f"no critical period detected within {config.max_epochs} epochs of phase 1",
                trace=trace,
            )
        if phase1_end is None:
            phase1_end = epoch
            trace.meta["phase1_converged"] = False
        trace.meta["phase1_end"] = phase1_end

        # Phase 2 trains to convergence within the run's remaining epoch
        # budget: switching late leaves less room to acquire the second
        # language. A small floor keeps degenerate phase-1 overruns from
        # zeroing out phase 2 entirely.
        budget = max(config.max_epochs - phase1_end, config.convergence_patience + 2)
        data, lang = phase_data[1]
        phase_series = []
        trace.meta["phase2_converged"] = False
        for _ in range(budget):
            epoch += 1
            params = train_epoch(params, data, config, epoch)
            merged_counts, by_lang = record(epoch, phase=2)
            phase_series.append(phase_metric(merged_counts, by_lang, lang))
            if detect_convergence_online(
                phase_series, config.convergence_epsilon, config.convergence_patience
            ):
                trace.meta["phase2_converged"] = True
                break

    trace.params_digest = params.digest()
    trace.validate()
    return trace
