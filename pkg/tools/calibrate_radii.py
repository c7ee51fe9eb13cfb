#!/usr/bin/env python3
"""Auto-calibrate per-viseme shell radii so escape onsets synchronize.

Escape onset scales like 1 / (frequency * radius^2): rare visemes need to
sit farther from the capture anchor to surge at the same epoch as frequent
ones. This script measures each satellite's surge onset on full-fraction
monolingual runs over a few seeds, nudges its radius toward the median
onset, and repeats. The converged table is frozen into features.py.
"""

import sys

import numpy as np

sys.path.insert(0, "src")

import visemelab as vl
from visemelab.features import GeneratorParams
from visemelab.seeds import stable_seed

TARGET_LO, TARGET_HI = 0.15, 3.5
SEEDS = (0, 1, 2)


def onsets_for(params, lr, lang, seed, fraction=0.25, max_epochs=40):
    tables, corpora = vl.load_bundled_corpora()
    merged = vl.build_inventory(tables, vl.MERGED)
    model = vl.default_confusability_model(
        merged.rendered, seed=stable_seed(seed, "gen-model"), params=params
    )
    cfg = vl.TrainingConfig(seed=seed, max_epochs=max_epochs, learning_rate=lr)
    tr = vl.run_protocol(vl.MonolingualProtocol(lang, fraction), corpora, model, cfg, tables)
    acc = tr.accuracy_matrix()
    g = acc[1:] - acc[:-1]
    onset = {}
    for j, lab in enumerate(tr.inventory):
        col = g[:, j]
        hits = np.where(col >= 0.05)[0]
        onset[lab] = int(hits[0]) + 2 if len(hits) else None
    return onset, tr


def calibrate(lr, iterations=4):
    factors = dict(GeneratorParams().radius_factors)
    for it in range(iterations):
        params = GeneratorParams(radius_factors=tuple(sorted(factors.items())))
        measured = {}
        for lang in (vl.Language.ENGLISH, vl.Language.MANDARIN):
            for seed in SEEDS:
                onset, _ = onsets_for(params, lr, lang, seed)
                for lab, ep in onset.items():
                    base = lab.split("_", 1)[0]
                    if base == params.anchor or ep is None:
                        continue
                    measured.setdefault(base, []).append(ep)
        med = {b: float(np.median(eps)) for b, eps in measured.items()}
        target = float(np.median(list(med.values())))
        print(f"iter {it}: target onset {target:.1f}")
        for base in sorted(factors):
            if base not in med:
                print(f"  {base:3s} factor {factors[base]:.2f} onset None (never surged)")
                factors[base] = min(factors[base] * 1.3, TARGET_HI)
                continue
            adj = (med[base] / target) ** 0.5
            new = float(np.clip(factors[base] * adj, TARGET_LO, TARGET_HI))
            print(f"  {base:3s} factor {factors[base]:.2f} -> {new:.2f} (onset {med[base]:.0f})")
            factors[base] = new
    print("\nfrozen table:")
    for base in sorted(factors, key=lambda b: factors[b]):
        print(f'    ("{base}", {factors[base]:.2f}),')
    return factors


if __name__ == "__main__":
    lr = float(sys.argv[1]) if len(sys.argv) > 1 else 2e-4
    calibrate(lr)
