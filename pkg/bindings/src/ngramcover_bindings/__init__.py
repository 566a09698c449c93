"""In-memory bindings for the ngramcover selection pipeline.

Pipeline callers usually hold their instruction/response records in memory;
this package marshals them through the ngramcover command-line interface and
its documented file formats (input JSONL, quality sidecar, per-step trace,
report) and hands the results back as plain Python objects. No selection
logic lives here -- every computation is delegated to the installed
``ngramcover`` package via ``python -m ngramcover``, so bindings output is
identical to CLI output by construction.

Errors surface as :class:`BindingError` with a ``category`` mirroring the
CLI's documented exit codes (config / parse / missing-quality / write).
"""

from __future__ import annotations

import json
import subprocess
import sys
import tempfile
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

__all__ = [
    "BindingError",
    "BindOptions",
    "BoundSelection",
    "BoundStep",
    "bound_compare",
    "bound_select",
    "load_records",
    "write_records",
]

__version__ = "0.1.0"

# Exit-code -> error category, per the CLI's documented contract.
_CATEGORIES = {
    2: "config",
    3: "parse",
    4: "missing-quality",
    5: "write",
}


class BindingError(Exception):
    """A delegated run failed; ``category`` names the CLI error class."""

    def __init__(self, category: str, message: str):
        super().__init__(f"{category}: {message}")
        self.category = category
        self.message = message


@dataclass(frozen=True)
class BindOptions:
    """Mirror of the CLI's run configuration.

    ``quality_scores`` is the in-memory alternative to ``quality_file``: a
    mapping of record index to positive score, serialized to a temporary
    sidecar for the run. Validation is delegated to the CLI; invalid
    combinations raise :class:`BindingError` with category "config".
    """

    budget: int
    orders: tuple[int, ...] = (1, 2, 3)
    side: str = "instruction"
    quality_source: str = "builtin"  # builtin | uniform | file
    quality_file: str | None = None
    quality_scores: Mapping[int, float] | None = None
    priority_mode: str = "combined"
    seed: int = 0
    fill_missing_quality: bool = False


@dataclass(frozen=True)
class BoundStep:
    """One selection step: chosen record index, its priority at selection
    time, and how many previously uncovered n-grams it contributed."""

    id: int
    priority: float
    new_ngrams: int


@dataclass(frozen=True)
class BoundSelection:
    """Selection outcome; ``selected`` preserves selection order."""

    selected: tuple[int, ...]
    steps: tuple[BoundStep, ...]
    coverage: float
    report: dict = field(compare=False)


def _normalize_record(record) -> dict:
    if isinstance(record, Mapping):
        return dict(record)
    instruction, response = record
    return {"instruction": instruction, "response": response}


def write_records(records: Sequence, path: str | Path) -> None:
    """Serialize in-memory records to the documented input JSONL format."""
    with open(path, "w", encoding="utf-8") as fp:
        for record in records:
            fp.write(json.dumps(_normalize_record(record), sort_keys=True) + "\n")


def load_records(path: str | Path) -> list[dict]:
    """Read an input JSONL file back into in-memory records.

    Structural validation is the CLI's job; this only parses the JSON lines
    so callers can round-trip files through the bindings.
    """
    records = []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise BindingError("parse", f"cannot read {path}: {e.strerror}") from e
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(json.loads(line))
        except json.JSONDecodeError as e:
            raise BindingError("parse", f"line {lineno}: {e.msg}") from e
    return records


def _quality_args(options: BindOptions, workdir: Path) -> list[str]:
    if options.quality_scores is not None:
        if options.quality_file is not None:
            raise BindingError(
                "config", "quality_scores and quality_file are mutually exclusive"
            )
        sidecar = workdir / "quality.jsonl"
        with open(sidecar, "w", encoding="utf-8") as fp:
            for sid in sorted(options.quality_scores):
                fp.write(
                    json.dumps(
                        {"id": sid, "score": options.quality_scores[sid]},
                        sort_keys=True,
                    )
                    + "\n"
                )
        return ["--quality", "file", "--quality-file", str(sidecar)]
    args = ["--quality", options.quality_source]
    if options.quality_file is not None:
        args += ["--quality-file", options.quality_file]
    return args


def _common_args(options: BindOptions, workdir: Path) -> list[str]:
    args = [
        "--budget", str(options.budget),
        "--orders", ",".join(str(n) for n in options.orders),
        "--side", options.side,
        "--priority", options.priority_mode,
        "--seed", str(options.seed),
    ]
    args += _quality_args(options, workdir)
    if options.fill_missing_quality:
        args.append("--fill-missing-quality")
    return args


def _run_cli(argv: list[str]) -> None:
    proc = subprocess.run(
        [sys.executable, "-m", "ngramcover", *argv],
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        category = _CATEGORIES.get(proc.returncode, "internal")
        raise BindingError(category, proc.stderr.strip() or "delegated run failed")


def bound_select(records: Sequence, options: BindOptions) -> BoundSelection:
    """Select a subset of in-memory records; delegates to the CLI.

    Records are mappings with "instruction" and "response" (alias "output")
    fields, or (instruction, response) pairs. Returns the selected record
    indices in selection order along with per-step scores and the n-gram
    coverage of the subset.
    """
    with tempfile.TemporaryDirectory(prefix="ngramcover-bind-") as td:
        workdir = Path(td)
        input_path = workdir / "input.jsonl"
        output_path = workdir / "selected.jsonl"
        trace_path = workdir / "trace.jsonl"
        report_path = workdir / "report.jsonl"
        write_records(records, input_path)
        _run_cli(
            [
                "select",
                "--input", str(input_path),
                "--output", str(output_path),
                "--trace", str(trace_path),
                "--report", str(report_path),
                *_common_args(options, workdir),
            ]
        )
        steps = tuple(
            BoundStep(row["id"], row["priority"], row["new_ngrams"])
            for row in load_records(trace_path)
        )
        report = load_records(report_path)[0]
    return BoundSelection(
        selected=tuple(step.id for step in steps),
        steps=steps,
        coverage=report["coverage"],
        report=report,
    )


def bound_compare(
    records: Sequence, options: BindOptions, strategies: Sequence[str]
) -> list[dict]:
    """Run the CLI's strategy comparison; returns one report row per
    strategy, in the order given."""
    with tempfile.TemporaryDirectory(prefix="ngramcover-bind-") as td:
        workdir = Path(td)
        input_path = workdir / "input.jsonl"
        report_path = workdir / "report.jsonl"
        write_records(records, input_path)
        _run_cli(
            [
                "compare",
                "--input", str(input_path),
                "--report", str(report_path),
                "--strategies", ",".join(strategies),
                *_common_args(options, workdir),
            ]
        )
        return load_records(report_path)
