"""Command-line entry point.

Subcommands: map, corpus-stats, train, analyze, reproduce. Exit codes are
stable: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

import argparse
import json
import sys
from pathlib import Path

from . import analyzer, svgrender
from .analyzer import cp_vs_data_fraction, cross_inference_compare, detect_critical_period
from .config import RunConfig, default_config
from .corpus import build_labeled_corpus, load_word_list, viseme_distribution
from .errors import NumericFailureError, VisemeLabError
from .runner import analyze_matrix, load_environment, run_matrix
from .traceio import read_trace
from .visemes import (
    MERGED,
    Language,
    build_inventory,
    load_lexicon,
    load_mapping_tables,
    phonemes_to_visemes,
    transliterate,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; our contract says 1
        self.print_usage(sys.stderr)
        raise SystemExit_usage(message)


class SystemExit_usage(Exception):
    pass


def build_parser() -> _Parser:
    parser = _Parser(prog="visemelab", description="Bilingual viseme perception lab")
    parser.add_argument("--config", help="JSON run-config file (defaults to the bundled preset)")
    parser.add_argument("--seed", type=int, help="override the base training seed")
    parser.add_argument("--jobs", type=int, default=1, help="parallel runs for the matrix")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--force", action="store_true", help="recompute cached outputs")
    parser.add_argument("--out", help="output directory (also via VISEMELAB_OUT)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_map = sub.add_parser("map", help="word to phonemes and visemes")
    p_map.add_argument("word")
    p_map.add_argument("--lang", required=True, help="en or cmn")

    p_stats = sub.add_parser("corpus-stats", help="viseme distribution of a word list")
    p_stats.add_argument("--lang", required=True, help="en or cmn")
    p_stats.add_argument("--words", help="word list file (defaults to the bundled list)")
    p_stats.add_argument("--plot", help="write a bar-chart SVG to this path")

    p_train = sub.add_parser("train", help="run the protocol matrix, one trace per run")

    p_analyze = sub.add_parser("analyze", help="analyze recorded traces")
    p_analyze.add_argument("traces", nargs="*", help="trace files (default: the full matrix)")
    p_analyze.add_argument("--figures", action="store_true", help="also render SVG figures")

    sub.add_parser("reproduce", help="corpus, matrix, analysis, claim summary in one shot")
    return parser


def resolve_config(args) -> RunConfig:
    config = RunConfig.load(args.config) if args.config else default_config()
    if args.seed is not None:
        from dataclasses import replace

        config = config.with_overrides(training=replace(config.training, seed=args.seed))
    if args.out:
        config = config.with_overrides(output_dir=args.out)
    return config


def cmd_map(args, config) -> int:
    lang = Language.parse(args.lang)
    tables = load_mapping_tables(config.tables_path)
    lex_path = config.lexicon_en_path if lang is Language.ENGLISH else config.lexicon_cmn_path
    lexicon = load_lexicon(lex_path, lang)
    phonemes = transliterate(args.word, lang, lexicon)
    visemes = phonemes_to_visemes(phonemes, lang, tables)
    if args.json:
        print(json.dumps({
            "word": args.word,
            "lang": lang.value,
            "phonemes": list(phonemes),
            "visemes": [v.rendered for v in visemes],
        }, ensure_ascii=False))
    else:
        print(" ".join(phonemes))
        print(" ".join(v.rendered for v in visemes))
    return EXIT_OK


def cmd_corpus_stats(args, config) -> int:
    lang = Language.parse(args.lang)
    tables = load_mapping_tables(config.tables_path)
    if lang is Language.ENGLISH:
        words_path, lex_path = config.words_en_path, config.lexicon_en_path
    else:
        words_path, lex_path = config.words_cmn_path, config.lexicon_cmn_path
    words = load_word_list(args.words or words_path, lang)
    lexicon = load_lexicon(lex_path, lang)
    corpus = build_labeled_corpus(words, lexicon, tables)
    dist = viseme_distribution(corpus)
    class_totals = {c.value: n for c, n in dist.class_totals.items()}
    if args.json:
        print(json.dumps({
            "lang": lang.value,
            "counts": dict(dist.sorted_items()),
            "class_totals": class_totals,
            "total": dist.total,
        }, ensure_ascii=False))
    else:
        for label, count in dist.sorted_items():
            print(f"{label}\t{count}")
        print("#class_totals\t" + "\t".join(f"{k}={v}" for k, v in sorted(class_totals.items())))
    if args.plot:
        svgrender.render_distribution(dist, args.plot, title=f"viseme distribution ({lang.value})")
    return EXIT_OK


def cmd_train(args, config) -> int:
    def progress(run_id, status):
        if not args.json:
            print(f"{run_id}: {status}", file=sys.stderr)

    summary = run_matrix(config, jobs=args.jobs, force=args.force, progress=progress)
    statuses = [r["status"] for r in summary["runs"].values()]
    if args.json:
        print(json.dumps(summary))
    else:
        done = sum(s in ("ok", "cached") for s in statuses)
        print(f"{done}/{len(statuses)} runs complete; summary in {config.output_dir}/runs.json")
    if any(s == "numeric_failure" for s in statuses):
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_analyze(args, config) -> int:
    if args.traces:
        tables, _ = load_environment(config)
        merged = build_inventory(tables, MERGED)
        traces = [read_trace(p) for p in args.traces]
        reports = {}
        for path, trace in zip(args.traces, traces):
            report = detect_critical_period(trace, config.detection)
            reports[path] = report.to_dict()
            if args.figures:
                out = Path(path).with_suffix(".heatmap.svg")
                svgrender.render_heatmap(trace, out, config.detection)
        sequentials = [t for t in traces if t.protocol.get("kind") == "sequential"]
        extra = {}
        if len(sequentials) >= 2:
            by_switch = {t.protocol.get("switch"): t for t in sequentials}
            if {"at_critical_period", "at_convergence"} <= set(by_switch):
                refs = [t for t in traces if t.protocol.get("kind") == "monolingual"]
                cross = cross_inference_compare(
                    by_switch["at_critical_period"], by_switch["at_convergence"], refs, merged
                )
                extra["cross_inference"] = cross.to_dict()
                if args.figures:
                    svgrender.render_bars(cross, Path(config.output_dir) / "cross_inference_bars.svg")
        monolingual = [t for t in traces if t.protocol.get("kind") == "monolingual"]
        if len(monolingual) >= 2:
            items = [
                (t.protocol["fraction"], detect_critical_period(t, config.detection))
                for t in monolingual
            ]
            try:
                extra["cp_vs_fraction"] = cp_vs_data_fraction(items).to_dict()
            except VisemeLabError:
                pass
        payload = {"cp_reports": reports, **extra}
        print(json.dumps(payload) if args.json else json.dumps(payload, indent=2))
        return EXIT_OK
    claims = analyze_matrix(config)
    if args.json:
        print(json.dumps(claims))
    else:
        print(Path(config.output_dir, "claims.txt").read_text(encoding="utf-8"), end="")
    return EXIT_OK


def cmd_reproduce(args, config) -> int:
    def progress(run_id, status):
        if not args.json:
            print(f"{run_id}: {status}", file=sys.stderr)

    run_matrix(config, jobs=args.jobs, force=args.force, progress=progress)
    claims = analyze_matrix(config)
    if args.json:
        print(json.dumps(claims))
    else:
        print(Path(config.output_dir, "claims.txt").read_text(encoding="utf-8"), end="")
    failed = [name for name, c in claims["claims"].items() if not c["passed"]]
    return EXIT_OK if not failed else EXIT_DATA


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit_usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        config = resolve_config(args)
        handler = {
            "map": cmd_map,
            "corpus-stats": cmd_corpus_stats,
            "train": cmd_train,
            "analyze": cmd_analyze,
            "reproduce": cmd_reproduce,
        }[args.command]
        return handler(args, config)
    except NumericFailureError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except VisemeLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
