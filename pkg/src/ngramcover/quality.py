"""Per-instance quality scores from perplexity ratios.

The score of an instance is ppl(response | instruction) / ppl(response):
a response that the instruction makes easier to predict scores below 1,
and higher scores are read as higher quality. Scores can be ingested from
a sidecar file of precomputed perplexities, or produced by a built-in
add-one-smoothed bigram model (a deterministic CPU stand-in for neural
scoring; its absolute values are not comparable to any neural model's).
"""

from __future__ import annotations

import json
import math
import warnings
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path

from .corpus import DEFAULT_POLICY, TokenizerPolicy, TrainingInstance, tokenize

__all__ = [
    "MissingQualityError",
    "QualityFileError",
    "QualityRecord",
    "builtin_quality",
    "fill_missing_with_median",
    "load_quality_file",
    "perplexity",
    "scores_from_records",
    "superfilter_score",
    "uniform_quality",
]

# Start-of-sequence context for the built-in bigram model; an internal
# dictionary key only, never emitted as a token.
_BOS = "\x01"


class QualityFileError(ValueError):
    """Raised for malformed or inconsistent quality sidecar files."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class MissingQualityError(ValueError):
    """Raised when selection needs a score an instance does not have."""

    def __init__(self, missing_ids: Iterable[int]):
        self.missing_ids = sorted(missing_ids)
        shown = ", ".join(map(str, self.missing_ids[:10]))
        more = "" if len(self.missing_ids) <= 10 else ", ..."
        super().__init__(
            f"no quality score for {len(self.missing_ids)} instance(s): "
            f"{shown}{more}"
        )


def _require_positive_finite(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive and finite, got {value!r}")


@dataclass(frozen=True)
class QualityRecord:
    """Conditional/unconditional response perplexities and their ratio."""

    id: int
    ppl_conditional: float
    ppl_plain: float
    score: float

    def __post_init__(self):
        _require_positive_finite("ppl_conditional", self.ppl_conditional)
        _require_positive_finite("ppl_plain", self.ppl_plain)
        _require_positive_finite("score", self.score)

    @classmethod
    def from_perplexities(
        cls, id: int, ppl_conditional: float, ppl_plain: float
    ) -> "QualityRecord":
        return cls(
            id,
            ppl_conditional,
            ppl_plain,
            superfilter_score(ppl_conditional, ppl_plain),
        )


def perplexity(token_log_probs: Sequence[float]) -> float:
    """exp(-mean(log-probs)); requires a non-empty, non-positive sequence."""
    if len(token_log_probs) == 0:
        raise ValueError("perplexity of an empty sequence is undefined")
    for lp in token_log_probs:
        if lp > 0:
            raise ValueError(f"log-probability {lp} is positive")
    return math.exp(-sum(token_log_probs) / len(token_log_probs))


def superfilter_score(ppl_conditional: float, ppl_plain: float) -> float:
    """ppl(response | instruction) / ppl(response); no clamping."""
    _require_positive_finite("ppl_conditional", ppl_conditional)
    _require_positive_finite("ppl_plain", ppl_plain)
    return ppl_conditional / ppl_plain


def load_quality_file(
    path: str | Path, dataset_size: int | None = None
) -> dict[int, QualityRecord]:
    """Load a JSONL quality sidecar.

    Each line carries "id" plus either both "ppl_conditional" and
    "ppl_plain" (score is recomputed as their ratio) or a bare "score"
    (trusted verbatim). Duplicate ids, out-of-range ids, and non-positive
    values are rejected.
    """
    records: dict[int, QualityRecord] = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise QualityFileError(f"cannot read {path}: {e.strerror}") from e
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise QualityFileError(f"invalid JSON ({e.msg})", lineno) from e
        if not isinstance(rec, dict) or "id" not in rec:
            raise QualityFileError('missing "id" field', lineno)
        sid = rec["id"]
        if not isinstance(sid, int) or sid < 0:
            raise QualityFileError(f"invalid id {sid!r}", lineno)
        if dataset_size is not None and sid >= dataset_size:
            raise QualityFileError(
                f"id {sid} outside dataset of size {dataset_size}", lineno
            )
        if sid in records:
            raise QualityFileError(f"duplicate id {sid}", lineno)
        try:
            if "ppl_conditional" in rec and "ppl_plain" in rec:
                records[sid] = QualityRecord.from_perplexities(
                    sid, float(rec["ppl_conditional"]), float(rec["ppl_plain"])
                )
            elif "score" in rec:
                score = float(rec["score"])
                records[sid] = QualityRecord(sid, score, 1.0, score)
            else:
                raise ValueError(
                    'need "ppl_conditional"+"ppl_plain" or "score"'
                )
        except (TypeError, ValueError) as e:
            raise QualityFileError(str(e), lineno) from e
    return records


def builtin_quality(
    instances: Sequence[TrainingInstance],
    policy: TokenizerPolicy = DEFAULT_POLICY,
) -> dict[int, QualityRecord]:
    """Score instances with an add-one-smoothed bigram model.

    The model is fit on the token streams of every instruction and every
    response in the corpus (shared vocabulary). The plain perplexity scores
    the response with a start-of-sequence context; the conditional
    perplexity scores the same tokens with the context seeded by the
    instruction's final token. Instances whose response tokenizes to
    nothing receive no record and are reported via a warning.
    """
    instr_tokens = [tokenize(i.instruction, policy) for i in instances]
    resp_tokens = [tokenize(i.response, policy) for i in instances]
    vocab: set[str] = set()
    bigram: dict[tuple[str, str], int] = {}
    context: dict[str, int] = {}
    for seqs in (instr_tokens, resp_tokens):
        for seq in seqs:
            vocab.update(seq)
            prev = _BOS
            for t in seq:
                bigram[(prev, t)] = bigram.get((prev, t), 0) + 1
                context[prev] = context.get(prev, 0) + 1
                prev = t
    v = len(vocab)

    def log_prob(prev: str, cur: str) -> float:
        return math.log(
            (bigram.get((prev, cur), 0) + 1) / (context.get(prev, 0) + v)
        )

    def seq_log_probs(prev: str, seq: list[str]) -> list[float]:
        out = []
        for t in seq:
            out.append(log_prob(prev, t))
            prev = t
        return out

    records: dict[int, QualityRecord] = {}
    skipped: list[int] = []
    for inst, itoks, rtoks in zip(instances, instr_tokens, resp_tokens):
        if not rtoks:
            skipped.append(inst.id)
            continue
        cond_ctx = itoks[-1] if itoks else _BOS
        ppl_plain = perplexity(seq_log_probs(_BOS, rtoks))
        ppl_cond = perplexity(seq_log_probs(cond_ctx, rtoks))
        records[inst.id] = QualityRecord.from_perplexities(
            inst.id, ppl_cond, ppl_plain
        )
    if skipped:
        warnings.warn(
            f"{len(skipped)} instance(s) with empty responses were not "
            f"scored: {skipped[:10]}",
            stacklevel=2,
        )
    return records


def uniform_quality(instances: Sequence[TrainingInstance]) -> dict[int, QualityRecord]:
    """Assign every instance the neutral score 1.0."""
    return {i.id: QualityRecord(i.id, 1.0, 1.0, 1.0) for i in instances}


def scores_from_records(
    records: Mapping[int, QualityRecord]
) -> dict[int, float]:
    """Project records down to the id -> score mapping selection consumes."""
    return {sid: rec.score for sid, rec in records.items()}


def fill_missing_with_median(
    scores: Mapping[int, float], ids: Iterable[int]
) -> dict[int, float]:
    """Assign the corpus-median score to any id without one."""
    if not scores:
        raise ValueError("cannot take the median of an empty score mapping")
    ordered = sorted(scores.values())
    mid = len(ordered) // 2
    if len(ordered) % 2:
        median = ordered[mid]
    else:
        median = (ordered[mid - 1] + ordered[mid]) / 2
    out = dict(scores)
    for sid in ids:
        out.setdefault(sid, median)
    return out
