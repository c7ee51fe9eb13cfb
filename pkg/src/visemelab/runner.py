"""Run-matrix orchestration: execute protocols, persist traces, analyze.

Each run writes one trace file named after (family, fraction, seed), written
atomically (temp file then rename) so interrupted matrices resume cleanly:
existing outputs are skipped unless forced. Failures are recorded in the
run summary without touching the other runs.
"""

import json
import os
import tempfile
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analyzer, svgrender
from .analyzer import cp_vs_data_fraction, cross_inference_compare, detect_critical_period
from .config import RunConfig
from .corpus import build_labeled_corpus, load_word_list
from .errors import NoCriticalPeriodError, NumericFailureError, VisemeLabError
from .features import default_confusability_model
from .learner import (
    BilingualProtocol,
    MonolingualProtocol,
    SequentialProtocol,
    SwitchRule,
    run_protocol,
)
from .seeds import stable_seed
from .traceio import TrainingTrace, dumps_trace, read_trace
from .visemes import (
    MERGED,
    Language,
    build_inventory,
    load_lexicon,
    load_mapping_tables,
)


def load_environment(config: RunConfig):
    """Load tables and corpora referenced by the config."""
    config.validate_paths()
    tables = load_mapping_tables(config.tables_path)
    lex_en = load_lexicon(config.lexicon_en_path, Language.ENGLISH)
    lex_cmn = load_lexicon(config.lexicon_cmn_path, Language.MANDARIN)
    words_en = load_word_list(config.words_en_path, Language.ENGLISH)
    words_cmn = load_word_list(config.words_cmn_path, Language.MANDARIN)
    corpora = {
        Language.ENGLISH: build_labeled_corpus(words_en, lex_en, tables),
        Language.MANDARIN: build_labeled_corpus(words_cmn, lex_cmn, tables),
    }
    return tables, corpora


@dataclass(frozen=True)
class RunSpec:
    family: str  # mono_en | mono_cmn | bilingual | seq_cp | seq_conv
    fraction: float
    seed: int

    @property
    def run_id(self) -> str:
        return f"{self.family}_f{int(round(self.fraction * 100)):03d}_s{self.seed}"

    def protocol(self, first_language: Language):
        if self.family == "mono_en":
            return MonolingualProtocol(Language.ENGLISH, self.fraction)
        if self.family == "mono_cmn":
            return MonolingualProtocol(Language.MANDARIN, self.fraction)
        if self.family == "bilingual":
            return BilingualProtocol(self.fraction)
        if self.family == "seq_cp":
            return SequentialProtocol(first_language, SwitchRule.AT_CRITICAL_PERIOD, self.fraction)
        if self.family == "seq_conv":
            return SequentialProtocol(first_language, SwitchRule.AT_CONVERGENCE, self.fraction)
        raise ValueError(f"unknown family {self.family!r}")


def plan_matrix(config: RunConfig, include_sequential=True):
    """All runs the config asks for: families x fractions x seeds, plus the
    sequential pair at full fraction per seed."""
    specs = [
        RunSpec(family, fraction, seed)
        for family in config.families
        for fraction in config.fractions
        for seed in config.seeds
    ]
    if include_sequential:
        for seed in config.seeds:
            specs.append(RunSpec("seq_cp", 1.0, seed))
            specs.append(RunSpec("seq_conv", 1.0, seed))
    return specs


def trace_path(out_dir, spec: RunSpec) -> Path:
    return Path(out_dir) / "traces" / f"{spec.run_id}.trace"


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def execute_run(config: RunConfig, spec: RunSpec, tables=None, corpora=None) -> TrainingTrace:
    """Run one protocol with the per-run derived seed and return its trace."""
    if tables is None or corpora is None:
        tables, corpora = load_environment(config)
    from dataclasses import replace as dc_replace

    merged = build_inventory(tables, MERGED)
    run_seed = stable_seed(config.training.seed, spec.family, spec.fraction, spec.seed)
    training = dc_replace(config.training, seed=run_seed)
    gen_model = default_confusability_model(
        merged.rendered, seed=stable_seed(run_seed, "gen-model"), params=config.generator
    )
    protocol = spec.protocol(Language.parse(config.sequential_first_language))
    return run_protocol(
        protocol,
        corpora,
        gen_model,
        training,
        tables,
        detection=config.detection,
        test_samples_per_word=config.test_samples_per_word,
    )


def _run_one(args):
    config_dict, spec = args
    config = RunConfig.from_dict(config_dict)
    try:
        trace = execute_run(config, spec)
        write_atomic(trace_path(config.output_dir, spec), dumps_trace(trace))
        return spec.run_id, "ok", ""
    except NoCriticalPeriodError as exc:
        # Keep the partial trace for inspection, marked failed in the summary.
        if exc.trace is not None:
            write_atomic(
                Path(config.output_dir) / "traces" / f"{spec.run_id}.partial.trace",
                dumps_trace(exc.trace),
            )
        return spec.run_id, "no_critical_period", str(exc)
    except NumericFailureError as exc:
        return spec.run_id, "numeric_failure", str(exc)
    except VisemeLabError as exc:
        return spec.run_id, "error", str(exc)
    except Exception as exc:  # pragma: no cover - defensive
        return spec.run_id, "error", f"{exc}\n{traceback.format_exc()}"


def run_matrix(config: RunConfig, jobs: int = 1, force: bool = False, progress=None):
    """Execute the full matrix, resuming over existing trace files.

    Returns the run summary dict (also written to runs.json).
    """
    specs = plan_matrix(config)
    out = Path(config.output_dir)
    pending, results = [], {}
    for spec in specs:
        path = trace_path(config.output_dir, spec)
        if path.exists() and not force:
            results[spec.run_id] = {"status": "cached"}
        else:
            pending.append(spec)

    if jobs > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for run_id, status, message in pool.map(
                _run_one, [(config.to_dict(), spec) for spec in pending]
            ):
                results[run_id] = {"status": status, **({"message": message} if message else {})}
                if progress:
                    progress(run_id, status)
    else:
        tables, corpora = (load_environment(config) if pending else (None, None))
        for spec in pending:
            try:
                trace = execute_run(config, spec, tables, corpora)
                write_atomic(trace_path(config.output_dir, spec), dumps_trace(trace))
                results[spec.run_id] = {"status": "ok"}
            except NoCriticalPeriodError as exc:
                if exc.trace is not None:
                    write_atomic(
                        out / "traces" / f"{spec.run_id}.partial.trace", dumps_trace(exc.trace)
                    )
                results[spec.run_id] = {"status": "no_critical_period", "message": str(exc)}
            except NumericFailureError as exc:
                results[spec.run_id] = {"status": "numeric_failure", "message": str(exc)}
            except VisemeLabError as exc:
                results[spec.run_id] = {"status": "error", "message": str(exc)}
            if progress:
                progress(spec.run_id, results[spec.run_id]["status"])

    summary = {"runs": {rid: results[rid] for rid in sorted(results)}}
    write_atomic(out / "runs.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def _family_lang(family):
    return Language.ENGLISH if family == "mono_en" else Language.MANDARIN


def analyze_matrix(config: RunConfig):
    """CP reports, fraction summaries, cross-inference, and figures for all
    traces the matrix produced. Returns the claims summary dict."""
    out = Path(config.output_dir)
    reports_dir = out / "reports"
    figures_dir = out / "figures"
    reports_dir.mkdir(parents=True, exist_ok=True)
    figures_dir.mkdir(parents=True, exist_ok=True)

    tables, _ = load_environment(config)
    merged = build_inventory(tables, MERGED)

    cp_reports = {}
    for family in config.families:
        for fraction in config.fractions:
            for seed in config.seeds:
                spec = RunSpec(family, fraction, seed)
                path = trace_path(config.output_dir, spec)
                if not path.exists():
                    continue
                trace = read_trace(path)
                report = detect_critical_period(trace, config.detection)
                cp_reports[spec.run_id] = report
                if seed == config.seeds[0]:
                    svgrender.render_heatmap(
                        trace, figures_dir / f"heatmap_{spec.run_id}.svg", config.detection
                    )

    with open(reports_dir / "cp_reports.json", "w", encoding="utf-8") as fh:
        json.dump(
            {rid: rep.to_dict() for rid, rep in sorted(cp_reports.items())},
            fh, indent=2, sort_keys=True,
        )
        fh.write("\n")

    # Claim 1: a critical period exists at full fraction (monolingual runs).
    # Claim 2: the detected epoch is non-increasing in the data fraction.
    claims = {}
    mono_families = [f for f in config.families if f.startswith("mono")]
    cp_hits, cp_total = 0, 0
    for family in mono_families:
        for seed in config.seeds:
            rep = cp_reports.get(RunSpec(family, 1.0, seed).run_id)
            cp_total += 1
            if rep is not None and rep.detected and rep.surge_fraction >= 0.5:
                cp_hits += 1
    claims["cp_existence"] = {
        "detail": f"{cp_hits}/{cp_total} full-fraction monolingual runs show a critical period",
        "passed": cp_total > 0 and cp_hits >= 0.9 * cp_total,
    }

    monotone_by_family = {}
    for family in mono_families:
        good = 0
        for seed in config.seeds:
            items = []
            for fraction in config.fractions:
                rep = cp_reports.get(RunSpec(family, fraction, seed).run_id)
                if rep is not None:
                    items.append((fraction, rep))
            try:
                summary = cp_vs_data_fraction(items)
                good += summary.monotone and not summary.partial
            except VisemeLabError:
                pass
        monotone_by_family[family] = good
    claims["cp_monotone_vs_fraction"] = {
        "detail": {f: f"{n}/{len(config.seeds)}" for f, n in monotone_by_family.items()},
        "passed": all(n >= 0.8 * len(config.seeds) for n in monotone_by_family.values()),
    }

    # Claim 3 and 4: sequential switch ordering and drop ordering.
    drops = []
    for seed in config.seeds:
        cp_path = trace_path(config.output_dir, RunSpec("seq_cp", 1.0, seed))
        conv_path = trace_path(config.output_dir, RunSpec("seq_conv", 1.0, seed))
        if not (cp_path.exists() and conv_path.exists()):
            continue
        tr_cp, tr_conv = read_trace(cp_path), read_trace(conv_path)
        refs = []
        for family in ("mono_en", "mono_cmn"):
            ref_path = trace_path(config.output_dir, RunSpec(family, 1.0, seed))
            if ref_path.exists():
                refs.append(read_trace(ref_path))
        report = cross_inference_compare(tr_cp, tr_conv, refs, merged)
        drops.append(report)
        if seed == config.seeds[0]:
            svgrender.render_bars(report, figures_dir / "cross_inference_bars.svg")
            with open(reports_dir / "cross_inference.tsv", "w", encoding="utf-8") as fh:
                fh.write(report.to_text())

    l2_unique = (
        "mandarin_only" if config.sequential_first_language == "en" else "english_only"
    )
    ordering_hits = sum(
        1
        for rep in drops
        if (rep.drop("common") or 0) > 0 and (rep.drop(l2_unique) or 0) > 0
    )
    drop_order_hits = sum(
        1
        for rep in drops
        if rep.drop(l2_unique) is not None
        and rep.drop("common") is not None
        and rep.drop(l2_unique) > rep.drop("common")
    )
    claims["switch_at_cp_beats_convergence"] = {
        "detail": f"{ordering_hits}/{len(drops)} seeds with positive drops for all compared classes",
        "passed": len(drops) > 0 and ordering_hits >= 0.8 * len(drops),
    }
    claims["unique_drop_exceeds_common"] = {
        "detail": f"{drop_order_hits}/{len(drops)} seeds with unique-class drop above common",
        "passed": len(drops) > 0 and drop_order_hits >= 0.7 * len(drops),
    }

    # Fraction summaries per family.
    fraction_summaries = {}
    for family in config.families:
        per_seed = {}
        for seed in config.seeds:
            items = [
                (fraction, cp_reports[RunSpec(family, fraction, seed).run_id])
                for fraction in config.fractions
                if RunSpec(family, fraction, seed).run_id in cp_reports
            ]
            try:
                per_seed[seed] = cp_vs_data_fraction(items).to_dict()
            except VisemeLabError as exc:
                per_seed[seed] = {"error": str(exc)}
        fraction_summaries[family] = per_seed
    with open(reports_dir / "cp_vs_fraction.json", "w", encoding="utf-8") as fh:
        json.dump(fraction_summaries, fh, indent=2, sort_keys=True)
        fh.write("\n")

    claims_doc = {"claims": claims, "config": config.to_dict()}
    write_atomic(out / "claims.json", json.dumps(claims_doc, indent=2, sort_keys=True) + "\n")
    lines = ["claim summary:"]
    for name, result in claims.items():
        lines.append(f"  [{'PASS' if result['passed'] else 'FAIL'}] {name}: {result['detail']}")
    write_atomic(out / "claims.txt", "\n".join(lines) + "\n")
    return claims_doc
