"""Subset reporting: n-gram coverage, MTLD lexical diversity, quality summaries."""

from __future__ import annotations

import json
import statistics
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import asdict, dataclass
from pathlib import Path

from .corpus import DEFAULT_POLICY, TokenizerPolicy, TrainingInstance, tokenize
from .graph import BipartiteGraph
from .selector import SelectionResult

__all__ = [
    "SubsetReport",
    "coverage",
    "format_table",
    "mtld",
    "mtld_with_flag",
    "summarize",
    "write_report",
]

MTLD_DEFAULT_THRESHOLD = 0.72


def coverage(selected: Iterable[int], graph: BipartiteGraph) -> float:
    """Fraction of the initial n-gram universe covered by ``selected``.

    Uses the build-time adjacency, so the graph may already be mutated.
    """
    seen: set[int] = set()
    any_selected = False
    for u in selected:
        if not 0 <= u < graph.n_sentences:
            raise KeyError(f"unknown sentence id {u}")
        any_selected = True
        seen.update(graph.cols[u].tolist())
    total = graph.initial_ngram_count
    if total == 0:
        return 1.0 if any_selected else 0.0
    return len(seen) / total


def _factor_count(tokens: Sequence[str], threshold: float) -> float:
    factors = 0.0
    types: set[str] = set()
    count = 0
    ttr = 1.0
    for t in tokens:
        count += 1
        types.add(t)
        ttr = len(types) / count
        if ttr < threshold:
            factors += 1.0
            types.clear()
            count = 0
    if count > 0:
        factors += (1.0 - ttr) / (1.0 - threshold)
    return factors


def mtld_with_flag(
    tokens: Sequence[str], threshold: float = MTLD_DEFAULT_THRESHOLD
) -> tuple[float, bool]:
    """MTLD plus a degeneracy flag.

    Forward pass: scan tokens tracking the running type-token ratio; each
    drop below the threshold closes one factor and resets; a trailing
    partial factor counts as (1 - TTR) / (1 - threshold). The score of a
    pass is token count / factor count, and the reported value averages the
    forward and reversed passes. When the TTR never drops and no partial
    accrues (all tokens distinct) the factor count is 0; we then return the
    token count itself with the flag set instead of dividing by a tiny
    epsilon.
    """
    if not tokens:
        raise ValueError("MTLD of an empty token sequence is undefined")
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be in (0, 1), got {threshold}")
    n = len(tokens)
    forward = _factor_count(tokens, threshold)
    if forward == 0.0:
        return float(n), True
    backward = _factor_count(list(reversed(tokens)), threshold)
    return (n / forward + n / backward) / 2.0, False


def mtld(tokens: Sequence[str], threshold: float = MTLD_DEFAULT_THRESHOLD) -> float:
    return mtld_with_flag(tokens, threshold)[0]


@dataclass(frozen=True)
class SubsetReport:
    """Per-strategy summary of one selected subset."""

    strategy: str
    budget: int
    coverage: float
    mean_quality: float | None
    median_quality: float | None
    mtld_instructions: float | None
    mtld_instructions_degenerate: bool
    mtld_responses: float | None
    mtld_responses_degenerate: bool
    seconds: float


def summarize(
    named_results: Sequence[tuple[str, SelectionResult, float]],
    instances: Sequence[TrainingInstance],
    graph: BipartiteGraph,
    quality: Mapping[int, float] | None,
    budget: int,
    policy: TokenizerPolicy = DEFAULT_POLICY,
    threshold: float = MTLD_DEFAULT_THRESHOLD,
) -> list[SubsetReport]:
    """One report per (strategy, result, seconds) triple, in input order."""
    reports = []
    for name, result, seconds in named_results:
        ids = result.selected
        scores = None
        if quality is not None:
            scores = [quality[u] for u in ids if u in quality]
        itoks: list[str] = []
        rtoks: list[str] = []
        for u in ids:
            itoks.extend(tokenize(instances[u].instruction, policy))
            rtoks.extend(tokenize(instances[u].response, policy))
        mtld_i, deg_i = mtld_with_flag(itoks, threshold) if itoks else (None, False)
        mtld_r, deg_r = mtld_with_flag(rtoks, threshold) if rtoks else (None, False)
        reports.append(
            SubsetReport(
                strategy=name,
                budget=budget,
                coverage=coverage(ids, graph),
                mean_quality=statistics.fmean(scores) if scores else None,
                median_quality=statistics.median(scores) if scores else None,
                mtld_instructions=mtld_i,
                mtld_instructions_degenerate=deg_i,
                mtld_responses=mtld_r,
                mtld_responses_degenerate=deg_r,
                seconds=seconds,
            )
        )
    return reports


def _format_cell(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def format_table(reports: Sequence[SubsetReport], include_timing: bool = False) -> str:
    """Aligned, human-readable comparison table."""
    fields = [f for f in SubsetReport.__dataclass_fields__]
    if not include_timing:
        fields = [f for f in fields if f != "seconds"]
    rows = [fields] + [
        [_format_cell(getattr(r, f)) for f in fields] for r in reports
    ]
    widths = [max(len(row[i]) for row in rows) for i in range(len(fields))]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"


def write_report(
    reports: Sequence[SubsetReport],
    path: str | Path,
    include_timing: bool = False,
) -> None:
    """Write reports as JSON lines at ``path`` plus an aligned table at
    ``path`` + ".txt". Timing is excluded by default so identical runs
    produce byte-identical files."""
    path = Path(path)
    lines = []
    for r in reports:
        d = asdict(r)
        if not include_timing:
            d.pop("seconds")
        lines.append(json.dumps(d, sort_keys=True))
    try:
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        path.with_name(path.name + ".txt").write_text(
            format_table(reports, include_timing), encoding="utf-8"
        )
    except OSError as e:
        raise OSError(f"cannot write report to {path}: {e.strerror}") from e
