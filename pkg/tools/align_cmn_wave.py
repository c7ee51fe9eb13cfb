#!/usr/bin/env python3
"""Fine-align the Mandarin surge wave.

Measures each Mandarin wave member's escape onset (in optimizer steps) on
half-fraction runs and nudges its radius toward a common target delay,
leaving the radii that serve the English wave untouched. Prints the table
to freeze.
"""

import sys

import numpy as np

sys.path.insert(0, "src")

import visemelab as vl
from visemelab.features import GeneratorParams
from visemelab.seeds import stable_seed

CMN_MEMBERS = ("S", "a", "e", "k", "o", "y", "@", "r")
TARGET_STEPS = 8750.0
LR = 0.006
SEEDS = (0, 1, 2)


def measure(factors):
    params = GeneratorParams(radius_factors=tuple(sorted(factors.items())))
    tables, corpora = vl.load_bundled_corpora()
    merged = vl.build_inventory(tables, vl.MERGED)
    onsets = {}
    fraction = 0.5
    for seed in SEEDS:
        model = vl.default_confusability_model(
            merged.rendered, seed=stable_seed(seed, "gen-model"), params=params
        )
        cfg = vl.TrainingConfig(seed=seed, max_epochs=40, learning_rate=LR)
        tr = vl.run_protocol(
            vl.MonolingualProtocol(vl.Language.MANDARIN, fraction), corpora, model, cfg, tables
        )
        n_frames = sum(
            e.sample_count * 0 for e in corpora[vl.Language.MANDARIN].entries
        )  # placeholder, steps derived from epochs below
        acc = tr.accuracy_matrix()
        g = acc[1:] - acc[:-1]
        for j, lab in enumerate(tr.inventory):
            base = lab.split("_", 1)[0]
            if base not in CMN_MEMBERS:
                continue
            hits = np.where(g[:, j] >= 0.05)[0]
            if len(hits):
                onsets.setdefault(base, []).append(hits[0] + 2)
    return {b: float(np.median(v)) for b, v in onsets.items()}


def main():
    factors = dict(GeneratorParams().radius_factors)
    # Steps per epoch at fraction 0.5 for the bundled Mandarin corpus.
    tables, corpora = vl.load_bundled_corpora()
    split = vl.split_corpus(corpora[vl.Language.MANDARIN], vl.SplitSpec(0.5))
    approx_frames = sum(e.sample_count * len(e.visemes) * 3.5 for e in split.entries)
    steps_per_epoch = approx_frames / 32
    target_epoch = TARGET_STEPS / steps_per_epoch
    print(f"steps/epoch ~{steps_per_epoch:.0f}, target onset epoch {target_epoch:.1f}")
    for it in range(3):
        med = measure(factors)
        print(f"iter {it}:")
        for base in CMN_MEMBERS:
            if base not in med:
                print(f"  {base:3s} r={factors[base]:.2f} onset None -> r*1.3")
                factors[base] = factors[base] * 1.3
                continue
            adj = (med[base] / target_epoch) ** 0.5
            adj = float(np.clip(adj, 0.7, 1.4))
            print(f"  {base:3s} r={factors[base]:.2f} onset {med[base]:.0f} -> r={factors[base]*adj:.2f}")
            factors[base] *= adj
    print("\nfinal:")
    for base in CMN_MEMBERS:
        print(f'    ("{base}", {factors[base]:.2f}),')


if __name__ == "__main__":
    main()
