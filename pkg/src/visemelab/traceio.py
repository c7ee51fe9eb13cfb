"""Training-trace persistence: the contract between learner and analyzer.

A trace file is line-delimited text: one JSON header line carrying the
protocol, the training configuration, the inventory (labels and hash), a
digest of the final parameters, and run metadata; then one line per epoch:

    <epoch> <phase> <overall> <acc,acc,...,->

Per-viseme accuracies follow inventory order; ``-`` marks a viseme with no
test frames. Floats are written with shortest round-trip repr, so identical
runs produce byte-identical files.
"""

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ParseError

FORMAT_NAME = "visemelab-trace"
FORMAT_VERSION = 1


def inventory_hash(labels) -> str:
    joined = "\n".join(labels).encode("utf-8")
    return hashlib.sha256(joined).hexdigest()


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    phase: int
    overall: float
    per_viseme: tuple  # float or None per inventory label


@dataclass
class TrainingTrace:
    protocol: dict
    config: dict
    inventory: tuple
    epochs: list = field(default_factory=list)
    params_digest: str = ""
    meta: dict = field(default_factory=dict)

    def validate(self):
        for i, rec in enumerate(self.epochs, start=1):
            if rec.epoch != i:
                raise ValueError(f"epoch indices must be contiguous from 1, got {rec.epoch} at {i}")
            if rec.phase not in (1, 2):
                raise ValueError(f"phase must be 1 or 2, got {rec.phase}")
            if i > 1 and rec.phase < self.epochs[i - 2].phase:
                raise ValueError("phase markers must be non-decreasing")
            if not 0.0 <= rec.overall <= 1.0:
                raise ValueError(f"overall accuracy {rec.overall} outside [0, 1]")
            if len(rec.per_viseme) != len(self.inventory):
                raise ValueError("per-viseme vector does not match inventory size")
            for value in rec.per_viseme:
                if value is not None and not 0.0 <= value <= 1.0:
                    raise ValueError(f"per-viseme accuracy {value} outside [0, 1]")

    @property
    def n_epochs(self):
        return len(self.epochs)

    def inventory_hash(self) -> str:
        return inventory_hash(self.inventory)

    def overall_series(self):
        return [rec.overall for rec in self.epochs]

    def phases(self):
        return [rec.phase for rec in self.epochs]

    def accuracy_matrix(self) -> np.ndarray:
        """Epochs x visemes accuracy matrix, NaN where absent."""
        out = np.full((len(self.epochs), len(self.inventory)), np.nan)
        for i, rec in enumerate(self.epochs):
            for j, value in enumerate(rec.per_viseme):
                if value is not None:
                    out[i, j] = value
        return out

    def final_accuracies(self) -> dict:
        """Rendered label -> last-epoch accuracy (absent labels omitted)."""
        last = self.epochs[-1]
        return {
            lab: value
            for lab, value in zip(self.inventory, last.per_viseme)
            if value is not None
        }


def _fmt(value) -> str:
    return "-" if value is None else repr(float(value))


def dumps_trace(trace: TrainingTrace) -> str:
    trace.validate()
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "protocol": trace.protocol,
        "config": trace.config,
        "inventory": list(trace.inventory),
        "inventory_hash": trace.inventory_hash(),
        "params_digest": trace.params_digest,
        "meta": trace.meta,
    }
    lines = [json.dumps(header, sort_keys=True)]
    for rec in trace.epochs:
        cells = ",".join(_fmt(v) for v in rec.per_viseme)
        lines.append(f"{rec.epoch} {rec.phase} {repr(float(rec.overall))} {cells}")
    return "\n".join(lines) + "\n"


def write_trace(trace: TrainingTrace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_trace(trace))


def loads_trace(text: str, source="<string>") -> TrainingTrace:
    lines = text.splitlines()
    if not lines:
        raise ParseError(source, 0, "empty trace")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise ParseError(source, 1, f"bad header JSON: {exc}") from None
    if header.get("format") != FORMAT_NAME:
        raise ParseError(source, 1, f"not a {FORMAT_NAME} file")
    if header.get("version") != FORMAT_VERSION:
        raise ParseError(source, 1, f"unsupported trace version {header.get('version')}")
    inventory = tuple(header["inventory"])
    if header.get("inventory_hash") != inventory_hash(inventory):
        raise ParseError(source, 1, "inventory hash does not match the stored labels")
    epochs = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ParseError(source, line_no, f"expected 4 fields, got {len(parts)}")
        epoch, phase = int(parts[0]), int(parts[1])
        overall = float(parts[2])
        cells = parts[3].split(",")
        if len(cells) != len(inventory):
            raise ParseError(
                source, line_no, f"expected {len(inventory)} accuracy cells, got {len(cells)}"
            )
        per_viseme = tuple(None if c == "-" else float(c) for c in cells)
        epochs.append(EpochRecord(epoch=epoch, phase=phase, overall=overall, per_viseme=per_viseme))
    trace = TrainingTrace(
        protocol=header["protocol"],
        config=header["config"],
        inventory=inventory,
        epochs=epochs,
        params_digest=header.get("params_digest", ""),
        meta=header.get("meta", {}),
    )
    trace.validate()
    return trace


def read_trace(path) -> TrainingTrace:
    with open(path, encoding="utf-8") as fh:
        return loads_trace(fh.read(), source=str(path))
