"""Learning-curve analytics over recorded traces.

Gains are first differences of per-viseme accuracy in accuracy points. The
critical period of a trace is the earliest epoch where at least a required
fraction of visemes gains at least the surge threshold, optionally after
centered moving-average smoothing of the gain series (zero-padded at the
edges, which keeps detection shift-equivariant under prepended flat epochs).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import IncompatibleTracesError, InsufficientDataError
from .traceio import TrainingTrace
from .visemes import VisemeClass


@dataclass(frozen=True)
class DetectionParams:
    """Surge detector knobs: threshold in accuracy points per epoch, the
    fraction of visemes required to surge together, and the smoothing
    window (1 disables smoothing). ``strict_preset`` mirrors the harshest
    reading of a surge: 95 percent of visemes at once."""

    threshold: float = 0.05
    fraction: float = 0.5
    window: int = 1

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError(f"threshold must be positive, got {self.threshold}")
        if not 0.0 < self.fraction <= 1.0:
            raise ValueError(f"fraction must be in (0, 1], got {self.fraction}")
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and >= 1, got {self.window}")

    @classmethod
    def strict_preset(cls):
        return cls(threshold=0.05, fraction=0.95, window=1)

    def to_dict(self):
        return {"threshold": self.threshold, "fraction": self.fraction, "window": self.window}

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


@dataclass(frozen=True)
class GainMatrix:
    """(epochs-1) x visemes first differences; NaN where a viseme is absent
    on either side of the difference."""

    epochs: tuple  # epoch index of each row (2..n_epochs)
    labels: tuple
    values: np.ndarray

    def row_for_epoch(self, epoch: int) -> np.ndarray:
        return self.values[self.epochs.index(epoch)]


def gains(trace: TrainingTrace) -> GainMatrix:
    if trace.n_epochs < 2:
        raise InsufficientDataError("gains need at least 2 recorded epochs")
    acc = trace.accuracy_matrix()
    values = acc[1:] - acc[:-1]
    return GainMatrix(
        epochs=tuple(range(2, trace.n_epochs + 1)),
        labels=tuple(trace.inventory),
        values=values,
    )


def _smooth_columns(values: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average per column, zero-padded at both ends.

    Any NaN inside a window makes that output NaN: absent data never
    silently averages to a number.
    """
    if window == 1:
        return values
    half = window // 2
    n, cols = values.shape
    padded = np.zeros((n + 2 * half, cols))
    padded[half:half + n] = values
    out = np.empty_like(values)
    for i in range(n):
        out[i] = padded[i:i + window].mean(axis=0)
    return out


@dataclass(frozen=True)
class CriticalPeriodReport:
    cp_epoch: int | None
    surge_fraction: float | None
    mean_gain: float | None
    params: DetectionParams

    @property
    def detected(self) -> bool:
        return self.cp_epoch is not None

    def to_dict(self):
        return {
            "cp_epoch": self.cp_epoch,
            "surge_fraction": self.surge_fraction,
            "mean_gain": self.mean_gain,
            "params": self.params.to_dict(),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            cp_epoch=data["cp_epoch"],
            surge_fraction=data["surge_fraction"],
            mean_gain=data["mean_gain"],
            params=DetectionParams.from_dict(data["params"]),
        )


def detect_critical_period(trace: TrainingTrace, params: DetectionParams = DetectionParams()) -> CriticalPeriodReport:
    """Earliest epoch where enough visemes surge at once; absent if none.

    A missing critical period is a value here, not an error; only the
    learner's online switch path treats it as fatal.
    """
    if trace.n_epochs < 3:
        raise InsufficientDataError("critical-period detection needs at least 3 epochs")
    matrix = gains(trace)
    smoothed = _smooth_columns(matrix.values, params.window)
    for row, epoch in enumerate(matrix.epochs):
        present = ~np.isnan(smoothed[row])
        if not present.any():
            continue
        surged = (smoothed[row][present] >= params.threshold).sum()
        frac = surged / present.sum()
        if frac >= params.fraction:
            return CriticalPeriodReport(
                cp_epoch=epoch,
                surge_fraction=float(frac),
                mean_gain=float(smoothed[row][present].mean()),
                params=params,
            )
    return CriticalPeriodReport(cp_epoch=None, surge_fraction=None, mean_gain=None, params=params)


@dataclass(frozen=True)
class CpFractionSummary:
    """(fraction, cp_epoch) pairs sorted by fraction, plus whether the
    detected epochs are non-increasing as the data fraction grows."""

    pairs: tuple  # of (fraction, cp_epoch) for detected CPs
    monotone: bool
    partial: bool  # True when some fractions had no detected CP
    missing_fractions: tuple

    def to_dict(self):
        return {
            "pairs": [list(p) for p in self.pairs],
            "monotone": self.monotone,
            "partial": self.partial,
            "missing_fractions": list(self.missing_fractions),
        }


def cp_vs_data_fraction(items) -> CpFractionSummary:
    """Summarize how the detected critical period moves with data quantity.

    ``items`` is an iterable of (fraction, CriticalPeriodReport).
    """
    detected, missing = [], []
    for fraction, report in items:
        if report.detected:
            detected.append((float(fraction), int(report.cp_epoch)))
        else:
            missing.append(float(fraction))
    if len(detected) < 2:
        raise InsufficientDataError(
            f"need detected critical periods for at least 2 fractions, have {len(detected)}"
        )
    detected.sort(key=lambda p: p[0])
    epochs = [cp for _, cp in detected]
    monotone = all(b <= a for a, b in zip(epochs, epochs[1:]))
    return CpFractionSummary(
        pairs=tuple(detected),
        monotone=monotone,
        partial=bool(missing),
        missing_fractions=tuple(sorted(missing)),
    )


_CLASS_ORDER = (VisemeClass.COMMON, VisemeClass.MANDARIN_ONLY, VisemeClass.ENGLISH_ONLY)

#: Bar families in a cross-inference comparison, in rendering order.
FAMILIES = ("mono_cmn", "mono_en", "switch_cp", "switch_conv")


@dataclass(frozen=True)
class CrossInferenceReport:
    """Final-epoch accuracy comparison of the two sequential switch rules,
    with monolingual-throughout references attached."""

    class_means: dict  # class name -> {"switch_cp", "switch_conv", "drop", "mono_en", "mono_cmn"}
    per_viseme: dict  # rendered label -> {family -> accuracy or None}
    inventory: tuple

    def drop(self, class_name: str):
        return self.class_means[class_name]["drop"]

    def to_dict(self):
        return {
            "class_means": self.class_means,
            "per_viseme": self.per_viseme,
            "inventory": list(self.inventory),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            class_means=data["class_means"],
            per_viseme=data["per_viseme"],
            inventory=tuple(data["inventory"]),
        )

    def to_text(self) -> str:
        """One tab-separated record per viseme class."""
        lines = ["#class\tswitch_cp\tswitch_conv\tdrop\tmono_en\tmono_cmn"]
        for name in (c.value for c in _CLASS_ORDER):
            row = self.class_means[name]
            cells = [name] + [
                "-" if row[k] is None else repr(row[k])
                for k in ("switch_cp", "switch_conv", "drop", "mono_en", "mono_cmn")
            ]
            lines.append("\t".join(cells))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> dict:
        """Parse the class records back (round-trip check for CLI output)."""
        out = {}
        for line in text.splitlines():
            if not line or line.startswith("#"):
                continue
            cells = line.split("\t")
            out[cells[0]] = {
                key: (None if cell == "-" else float(cell))
                for key, cell in zip(
                    ("switch_cp", "switch_conv", "drop", "mono_en", "mono_cmn"), cells[1:]
                )
            }
        return out


def _require_merged(trace: TrainingTrace, inventory, name: str):
    if tuple(trace.inventory) != tuple(inventory.rendered):
        raise IncompatibleTracesError(
            f"{name} trace inventory {trace.inventory_hash()[:12]} does not match "
            f"the merged inventory {inventory.content_hash()[:12]}"
        )


def cross_inference_compare(trace_cp, trace_conv, trace_mono_refs, inventory) -> CrossInferenceReport:
    """Compare final accuracies of the two sequential switch rules per class.

    ``drop`` is switch-at-critical-period minus switch-at-convergence, so a
    positive drop means converging on the first language first cost
    accuracy. Monolingual reference traces may cover a label subset of the
    merged inventory; their values for the other language's unique visemes
    stay absent.
    """
    _require_merged(trace_cp, inventory, "switch-at-critical-period")
    _require_merged(trace_conv, inventory, "switch-at-convergence")
    for trace in (trace_cp, trace_conv):
        if 2 not in trace.phases():
            raise InsufficientDataError("sequential trace has no phase-2 epochs")

    finals_cp = trace_cp.final_accuracies()
    finals_conv = trace_conv.final_accuracies()

    ref_finals = {"mono_en": {}, "mono_cmn": {}}
    for ref in trace_mono_refs:
        extra = set(ref.inventory) - set(inventory.rendered)
        if extra:
            raise IncompatibleTracesError(
                f"reference trace {ref.inventory_hash()[:12]} has labels outside the "
                f"merged inventory: {sorted(extra)}"
            )
        lang = ref.protocol.get("language")
        key = "mono_en" if lang == "en" else "mono_cmn"
        ref_finals[key] = ref.final_accuracies()

    per_viseme = {}
    for label in inventory.rendered:
        per_viseme[label] = {
            "mono_cmn": ref_finals["mono_cmn"].get(label),
            "mono_en": ref_finals["mono_en"].get(label),
            "switch_cp": finals_cp.get(label),
            "switch_conv": finals_conv.get(label),
        }

    def class_mean(values):
        values = [v for v in values if v is not None]
        return float(np.mean(values)) if values else None

    class_means = {}
    for category in _CLASS_ORDER:
        labels = [inventory.rendered[i] for i in inventory.indices_of_class(category)]
        mean_cp = class_mean([finals_cp.get(l) for l in labels])
        mean_conv = class_mean([finals_conv.get(l) for l in labels])
        drop = None if mean_cp is None or mean_conv is None else mean_cp - mean_conv
        class_means[category.value] = {
            "switch_cp": mean_cp,
            "switch_conv": mean_conv,
            "drop": drop,
            "mono_en": class_mean([ref_finals["mono_en"].get(l) for l in labels]),
            "mono_cmn": class_mean([ref_finals["mono_cmn"].get(l) for l in labels]),
        }

    return CrossInferenceReport(
        class_means=class_means, per_viseme=per_viseme, inventory=tuple(inventory.rendered)
    )
