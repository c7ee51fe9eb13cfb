#!/usr/bin/env python3
"""Sweep generator/learner knobs and report learning-curve shape metrics.

Run before freezing GeneratorParams defaults. For each candidate it prints
per-fraction critical periods, epoch-1 and final accuracies, so candidates
can be judged against the acceptance targets: CP detected at every
fraction, CP epoch non-increasing in fraction, and a >= 3 point final gap
between the 1.0 and 0.25 fractions.
"""

import itertools
import sys
import time

sys.path.insert(0, "src")

import visemelab as vl
from visemelab.features import GeneratorParams
from visemelab.seeds import stable_seed


def probe(params, seeds, fractions, lang=vl.Language.ENGLISH, max_epochs=40):
    tables, corpora = vl.load_bundled_corpora()
    merged = vl.build_inventory(tables, vl.MERGED)
    rows = []
    for seed in seeds:
        model = vl.default_confusability_model(
            merged.rendered, seed=stable_seed(seed, "gen-model"), params=params
        )
        by_fraction = {}
        for fraction in fractions:
            cfg = vl.TrainingConfig(seed=seed, max_epochs=max_epochs)
            trace = vl.run_protocol(
                vl.MonolingualProtocol(lang, fraction), corpora, model, cfg, tables
            )
            report = vl.detect_critical_period(trace)
            series = trace.overall_series()
            by_fraction[fraction] = {
                "cp": report.cp_epoch,
                "surge": report.surge_fraction,
                "first": series[0],
                "final": series[-1],
                "series": series,
            }
        rows.append((seed, by_fraction))
    return rows


def summarize(tag, rows, fractions):
    print(f"--- {tag}")
    for seed, by_fraction in rows:
        cps = [by_fraction[f]["cp"] for f in fractions]
        finals = [by_fraction[f]["final"] for f in fractions]
        firsts = [by_fraction[f]["first"] for f in fractions]
        det = [c for c in cps if c is not None]
        monotone = all(b <= a for a, b in zip(det, det[1:])) and len(det) == len(cps)
        gap = finals[-1] - finals[0]
        print(
            f"  seed {seed}: cps={cps} monotone={monotone} "
            f"first={['%.2f' % x for x in firsts]} final={['%.3f' % x for x in finals]} gap={gap:+.3f}"
        )
        f10 = by_fraction[fractions[-1]]["series"]
        f25 = by_fraction[fractions[0]]["series"]
        print(f"    f=1.00: {' '.join('%.2f' % x for x in f10[:20])}")
        print(f"    f=0.25: {' '.join('%.2f' % x for x in f25[:20])}")


def main():
    fractions = [0.25, 0.5, 0.75, 1.0]
    seeds = [0, 1]
    grid = itertools.product([1.5, 2.0, 3.0], [0.6, 0.75])
    for scale, gw in grid:
        params = GeneratorParams(mean_scale=scale, group_weight=gw)
        t0 = time.perf_counter()
        rows = probe(params, seeds, fractions)
        summarize(f"scale={scale} gw={gw} ({time.perf_counter() - t0:.0f}s)", rows, fractions)


if __name__ == "__main__":
    main()
