"""Command-line entry point: ingestion -> scoring -> graph -> selection -> report.

Exit codes: 0 success, 2 configuration error, 3 input parse error,
4 missing quality records, 5 write failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .corpus import (
    DEFAULT_POLICY,
    ContentSide,
    DatasetFormatError,
    parse_records,
)
from .graph import build_graph
from .metrics import format_table, summarize, write_report
from .quality import (
    MissingQualityError,
    QualityFileError,
    builtin_quality,
    fill_missing_with_median,
    load_quality_file,
    scores_from_records,
    uniform_quality,
)
from .selector import (
    PriorityMode,
    SelectionConfig,
    SelectionResult,
    baseline_longest,
    baseline_quality_topk,
    baseline_random,
    select,
)

__all__ = ["RunConfig", "main", "run_compare", "run_select"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_MISSING_QUALITY = 4
EXIT_WRITE = 5

_PRIORITY_MODES = {m.value: m for m in PriorityMode}
_SIDES = {s.value: s for s in ContentSide}
STRATEGIES = ("greedy", "random", "longest", "quality-topk")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    input_path: str
    output_path: str | None
    budget: int
    orders: tuple[int, ...] = (1, 2, 3)
    side: ContentSide = ContentSide.INSTRUCTION
    quality_source: str = "builtin"  # builtin | uniform | file
    quality_file: str | None = None
    priority_mode: PriorityMode = PriorityMode.COMBINED
    seed: int = 0
    report_path: str | None = None
    trace_path: str | None = None
    report_timing: bool = False
    fill_missing_quality: bool = False
    strategies: tuple[str, ...] = ()

    def validate(self, compare: bool = False) -> None:
        problems = []
        if self.budget < 1:
            problems.append(f"budget must be >= 1, got {self.budget}")
        if not self.orders or not set(self.orders) <= {1, 2, 3}:
            problems.append(f"orders must be a non-empty subset of {{1,2,3}}, got {self.orders}")
        if self.quality_source not in ("builtin", "uniform", "file"):
            problems.append(f"unknown quality source {self.quality_source!r}")
        if self.quality_source == "file" and not self.quality_file:
            problems.append("--quality file requires --quality-file PATH")
        if self.quality_source != "file" and self.quality_file:
            problems.append("--quality-file only applies with --quality file")
        if compare:
            if not self.strategies:
                problems.append("compare requires a non-empty --strategies list")
            unknown = [s for s in self.strategies if s not in STRATEGIES]
            if unknown:
                problems.append(
                    f"unknown strategies {unknown}; choose from {list(STRATEGIES)}"
                )
        elif not self.output_path:
            problems.append("select requires --output PATH")
        if problems:
            raise ConfigError("; ".join(problems))


def _load_corpus(cfg: RunConfig):
    try:
        text = Path(cfg.input_path).read_text(encoding="utf-8")
    except OSError as e:
        raise DatasetFormatError(f"cannot read {cfg.input_path}: {e.strerror}") from e
    except UnicodeDecodeError as e:
        raise DatasetFormatError("input is not valid UTF-8") from e
    raw_lines = text.splitlines()
    instances = parse_records(raw_lines)
    return raw_lines, instances


def _quality_scores(cfg: RunConfig, instances):
    if cfg.quality_source == "uniform":
        records = uniform_quality(instances)
    elif cfg.quality_source == "builtin":
        records = builtin_quality(instances)
    else:
        records = load_quality_file(cfg.quality_file, dataset_size=len(instances))
    scores = scores_from_records(records)
    if cfg.fill_missing_quality and scores:
        scores = fill_missing_with_median(scores, (i.id for i in instances))
    return scores


def _write_trace(result: SelectionResult, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        for step_no, step in enumerate(result.steps):
            fp.write(
                json.dumps(
                    {
                        "step": step_no,
                        "id": step.sentence_id,
                        "priority": step.priority,
                        "new_ngrams": step.new_ngrams,
                    },
                    sort_keys=True,
                )
                + "\n"
            )


def _run_strategy(name: str, cfg: RunConfig, instances, graph, stats, scores):
    k = cfg.budget
    if name == "greedy":
        return select(graph, stats, scores, SelectionConfig(k, cfg.priority_mode, cfg.seed))
    if name == "random":
        return baseline_random(instances, k, cfg.seed, graph)
    if name == "longest":
        return baseline_longest(instances, k, graph=graph)
    if name == "quality-topk":
        return baseline_quality_topk(scores, k, graph=graph)
    raise ConfigError(f"unknown strategy {name!r}")


def run_select(cfg: RunConfig) -> int:
    cfg.validate()
    raw_lines, instances = _load_corpus(cfg)
    if not instances:
        raise ConfigError("input dataset is empty")
    if cfg.budget > len(instances):
        print(
            f"warning: budget {cfg.budget} exceeds dataset size {len(instances)}; "
            "selecting everything",
            file=sys.stderr,
        )
    graph, stats = build_graph(instances, cfg.side, cfg.orders)
    scores = _quality_scores(cfg, instances)
    start = time.perf_counter()
    result = select(
        graph, stats, scores, SelectionConfig(cfg.budget, cfg.priority_mode, cfg.seed)
    )
    elapsed = time.perf_counter() - start

    chosen = set(result.selected)
    record_lines = [line for line in raw_lines if line.strip()]
    try:
        with open(cfg.output_path, "w", encoding="utf-8") as fp:
            for idx, line in enumerate(record_lines):
                if idx in chosen:
                    fp.write(line + "\n")
        if cfg.trace_path:
            _write_trace(result, cfg.trace_path)
        if cfg.report_path:
            reports = summarize(
                [("greedy", result, elapsed)], instances, graph, scores, cfg.budget
            )
            write_report(reports, cfg.report_path, cfg.report_timing)
    except OSError as e:
        raise OSError(f"write failed: {e}") from e

    cov = result.covered_ngrams / result.initial_ngrams if result.initial_ngrams else 1.0
    print(
        f"selected {len(result.selected)} of {len(instances)} "
        f"(budget {cfg.budget}), n-gram coverage {cov:.4f}, {elapsed:.2f}s"
    )
    return EXIT_OK


def run_compare(cfg: RunConfig) -> int:
    cfg.validate(compare=True)
    _raw_lines, instances = _load_corpus(cfg)
    if not instances:
        raise ConfigError("input dataset is empty")
    graph, stats = build_graph(instances, cfg.side, cfg.orders)
    scores = _quality_scores(cfg, instances)
    named = []
    for name in cfg.strategies:
        start = time.perf_counter()
        result = _run_strategy(name, cfg, instances, graph, stats, scores)
        named.append((name, result, time.perf_counter() - start))
    reports = summarize(named, instances, graph, scores, cfg.budget)
    if cfg.report_path:
        write_report(reports, cfg.report_path, cfg.report_timing)
    print(format_table(reports, include_timing=cfg.report_timing), end="")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ngramcover",
        description="Budget-constrained corpus subset selection maximizing "
        "n-gram coverage under a quality-diversity priority.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("select", "select a subset and write it as JSONL"),
        ("compare", "run several strategies and emit a comparison report"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", required=True, help="input JSONL dataset")
        p.add_argument("--output", help="output JSONL path (selected records)")
        p.add_argument("--budget", type=int, required=True, help="subset size k")
        p.add_argument(
            "--orders", default="1,2,3",
            help="comma-separated n-gram orders from {1,2,3} (default 1,2,3)",
        )
        p.add_argument(
            "--side", choices=sorted(_SIDES), default="instruction",
            help="which text feeds the graph (default instruction)",
        )
        p.add_argument(
            "--quality", choices=("builtin", "uniform", "file"), default="builtin",
            help="quality score source (default builtin bigram model)",
        )
        p.add_argument("--quality-file", help="JSONL quality sidecar (with --quality file)")
        p.add_argument(
            "--priority", choices=sorted(_PRIORITY_MODES), default="combined",
            help="priority mode for the greedy selector (default combined)",
        )
        p.add_argument("--seed", type=int, default=0, help="seed for randomized strategies")
        p.add_argument("--report", help="write a JSONL report here (plus .txt table)")
        p.add_argument("--trace", help="write a per-step JSONL selection trace here")
        p.add_argument(
            "--report-timing", action="store_true",
            help="include wall-clock seconds in report files (breaks byte-level "
            "reproducibility of reports)",
        )
        p.add_argument(
            "--fill-missing-quality", action="store_true",
            help="give unscored instances the corpus-median score instead of failing",
        )
        if name == "compare":
            p.add_argument(
                "--strategies", required=True,
                help=f"comma-separated strategies from {list(STRATEGIES)}",
            )
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    try:
        orders = tuple(int(x) for x in args.orders.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"cannot parse --orders {args.orders!r}")
    strategies = ()
    if getattr(args, "strategies", None):
        strategies = tuple(s.strip() for s in args.strategies.split(",") if s.strip())
    return RunConfig(
        input_path=args.input,
        output_path=args.output,
        budget=args.budget,
        orders=orders,
        side=_SIDES[args.side],
        quality_source=args.quality,
        quality_file=args.quality_file,
        priority_mode=_PRIORITY_MODES[args.priority],
        seed=args.seed,
        report_path=args.report,
        trace_path=args.trace,
        report_timing=args.report_timing,
        fill_missing_quality=args.fill_missing_quality,
        strategies=strategies,
    )


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        if args.command == "select":
            return run_select(cfg)
        return run_compare(cfg)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (DatasetFormatError, QualityFileError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except MissingQualityError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MISSING_QUALITY
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_WRITE


if __name__ == "__main__":
    sys.exit(main())
