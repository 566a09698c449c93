"""Acceptance gate for the bindings package: exact parity with the CLI."""

import json
import random
import subprocess
import sys
import time

import pytest

ngb = pytest.importorskip("ngramcover_bindings")

from support import FIVE_SENTENCES, make_records, random_records


def _report(criterion, detail=""):
    print(f"ACCEPTANCE {criterion}: PASS {detail}".rstrip())


def _cli_selected_ids(tmp_path, records, options: "ngb.BindOptions"):
    """Run the same configuration straight through the CLI and read the
    trace, bypassing the bindings entirely."""
    data = tmp_path / "data.jsonl"
    trace = tmp_path / "trace.jsonl"
    out = tmp_path / "out.jsonl"
    ngb.write_records(records, data)
    argv = [
        sys.executable, "-m", "ngramcover", "select",
        "--input", str(data), "--output", str(out), "--trace", str(trace),
        "--budget", str(options.budget),
        "--orders", ",".join(str(n) for n in options.orders),
        "--side", options.side,
        "--priority", options.priority_mode,
        "--seed", str(options.seed),
    ]
    if options.quality_scores is not None:
        qfile = tmp_path / "quality.jsonl"
        qfile.write_text(
            "".join(
                json.dumps({"id": i, "score": s}, sort_keys=True) + "\n"
                for i, s in sorted(options.quality_scores.items())
            ),
            encoding="utf-8",
        )
        argv += ["--quality", "file", "--quality-file", str(qfile)]
    else:
        argv += ["--quality", options.quality_source]
    proc = subprocess.run(argv, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return tuple(
        json.loads(line)["id"] for line in trace.read_text().splitlines()
    )


def test_criterion_10_bindings_cli_parity(tmp_path):
    rng = random.Random(10_10)
    sides = ("instruction", "response", "both")
    orders_choices = ((1,), (1, 2), (1, 2, 3))
    modes = ("combined", "quality", "diversity", "uniform")
    start = time.perf_counter()
    for i in range(50):
        records = random_records(rng)
        n = len(records)
        mode = modes[i % len(modes)]
        options = ngb.BindOptions(
            budget=rng.randint(1, n),
            orders=orders_choices[i % len(orders_choices)],
            side=sides[i % len(sides)],
            priority_mode=mode,
            quality_scores=(
                {u: rng.uniform(0.05, 3.0) for u in range(n)}
                if mode in ("combined", "quality")
                else None
            ),
            quality_source="uniform",
            seed=i,
        )
        bound = ngb.bound_select(records, options).selected
        case_dir = tmp_path / f"case{i}"
        case_dir.mkdir()
        direct = _cli_selected_ids(case_dir, records, options)
        assert bound == direct, f"corpus {i}: bindings {bound} != CLI {direct}"
    elapsed = time.perf_counter() - start

    # Known-answer fixture through the bindings path.
    fixture = ngb.bound_select(
        make_records(FIVE_SENTENCES),
        ngb.BindOptions(
            budget=2, orders=(1,), priority_mode="uniform",
            quality_source="uniform",
        ),
    )
    assert fixture.selected == (0, 3)
    assert fixture.coverage == 1.0

    # Error-category passthrough for mismatched quality ids.
    with pytest.raises(ngb.BindingError) as exc:
        ngb.bound_select(
            make_records(FIVE_SENTENCES),
            ngb.BindOptions(budget=2, quality_scores={0: 1.0, 1: 2.0}),
        )
    assert exc.value.category == "missing-quality"
    _report(10, f"(50 corpora exact parity, {elapsed:.1f} s)")
