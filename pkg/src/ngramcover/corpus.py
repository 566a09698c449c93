"""Dataset loading, tokenization, and n-gram extraction.

The input format is UTF-8 JSON lines, one record per line, with a required
"instruction" field and a required "response" field ("output" is accepted as
an alias for "response"). Records are numbered 0..N-1 in file order.
"""

from __future__ import annotations

import io
import json
import re
from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

__all__ = [
    "BOUNDARY_TOKEN",
    "ContentSide",
    "DatasetFormatError",
    "NGram",
    "TokenizerPolicy",
    "DEFAULT_POLICY",
    "TrainingInstance",
    "extract_ngrams",
    "load_dataset",
    "parse_records",
    "select_content",
    "tokenize",
]

# Control character used to separate instruction from response when both
# sides contribute n-grams. The tokenizer emits it as a standalone token and
# extract_ngrams never lets a window cross it. NUL specifically: it is
# neither a word character nor whitespace, so the tokenizer keeps it intact.
BOUNDARY_TOKEN = "\x00"

_WORD_OR_PUNCT = re.compile(r"\w+|[^\w\s]", re.UNICODE)


class DatasetFormatError(ValueError):
    """Raised when an input file violates the JSONL record format."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


@dataclass(frozen=True)
class TrainingInstance:
    """One instruction/response pair; ``id`` is its position in the file."""

    id: int
    instruction: str
    response: str


class ContentSide(Enum):
    """Which text of an instance feeds the n-gram graph."""

    INSTRUCTION = "instruction"
    RESPONSE = "response"
    BOTH = "both"


@dataclass(frozen=True)
class TokenizerPolicy:
    """Named, swappable tokenization policy.

    The default lowercases (Unicode-aware), splits on whitespace, and splits
    punctuation marks into standalone tokens.
    """

    name: str = "lower-punct"
    lowercase: bool = True
    split_punctuation: bool = True

    def __call__(self, text: str) -> list[str]:
        return tokenize(text, self)


DEFAULT_POLICY = TokenizerPolicy()


def tokenize(text: str, policy: TokenizerPolicy = DEFAULT_POLICY) -> list[str]:
    """Split ``text`` into normalized tokens. Deterministic; "" -> []."""
    if policy.lowercase:
        text = text.lower()
    if policy.split_punctuation:
        return _WORD_OR_PUNCT.findall(text)
    return text.split()


@dataclass(frozen=True)
class NGram:
    """An order-n token sequence; equality is over (order, tokens)."""

    order: int
    tokens: tuple[str, ...]

    def __post_init__(self):
        if self.order != len(self.tokens):
            raise ValueError(
                f"order {self.order} != token count {len(self.tokens)}"
            )
        for t in self.tokens:
            if not t or any(ch.isspace() for ch in t):
                raise ValueError(f"invalid token {t!r}")

    def text(self) -> str:
        return " ".join(self.tokens)


def extract_ngrams(
    tokens: Iterable[str], orders: Iterable[int]
) -> dict[NGram, int]:
    """Count contiguous n-gram occurrences for each requested order.

    Windows never cross a BOUNDARY_TOKEN, and the boundary itself yields no
    n-grams. Keys are returned in first-occurrence order (lowest order first
    within a fixed scan of the sequence).
    """
    orders = sorted(set(orders))
    for n in orders:
        if n not in (1, 2, 3):
            raise ValueError(f"unsupported n-gram order {n}")
    tokens = list(tokens)
    segments: list[list[str]] = [[]]
    for t in tokens:
        if t == BOUNDARY_TOKEN:
            segments.append([])
        else:
            segments[-1].append(t)
    counts: dict[NGram, int] = {}
    for n in orders:
        for seg in segments:
            for i in range(len(seg) - n + 1):
                g = NGram(n, tuple(seg[i : i + n]))
                counts[g] = counts.get(g, 0) + 1
    return counts


def select_content(instance: TrainingInstance, side: ContentSide) -> str:
    """Project the text the graph is built from, per the configured side."""
    if side is ContentSide.INSTRUCTION:
        return instance.instruction
    if side is ContentSide.RESPONSE:
        return instance.response
    return f"{instance.instruction} {BOUNDARY_TOKEN} {instance.response}"


def parse_records(
    lines: Iterable[str], policy: TokenizerPolicy = DEFAULT_POLICY
) -> list[TrainingInstance]:
    """Parse JSONL records into instances with ids 0..N-1.

    Rejects records missing "instruction", records whose instruction
    normalizes to nothing, and malformed JSON, naming the offending line.
    """
    instances: list[TrainingInstance] = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as e:
            raise DatasetFormatError(f"invalid JSON ({e.msg})", lineno) from e
        if not isinstance(rec, dict):
            raise DatasetFormatError("record is not an object", lineno)
        if "instruction" not in rec:
            raise DatasetFormatError('missing "instruction" field', lineno)
        instruction = rec["instruction"]
        response = rec.get("response", rec.get("output"))
        if response is None:
            raise DatasetFormatError('missing "response" field', lineno)
        if not isinstance(instruction, str) or not isinstance(response, str):
            raise DatasetFormatError("fields must be strings", lineno)
        if not tokenize(instruction, policy):
            raise DatasetFormatError("instruction is empty after normalization", lineno)
        instances.append(TrainingInstance(len(instances), instruction, response))
    return instances


def load_dataset(
    source: str | Path | io.IOBase,
    policy: TokenizerPolicy = DEFAULT_POLICY,
) -> list[TrainingInstance]:
    """Load a JSONL dataset from a path or readable stream."""
    if isinstance(source, (str, Path)):
        try:
            data = Path(source).read_bytes()
        except OSError as e:
            raise DatasetFormatError(f"cannot read {source}: {e.strerror}") from e
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode("utf-8")
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        lineno = data.count(b"\n", 0, e.start) + 1
        raise DatasetFormatError("input is not valid UTF-8", lineno) from e
    return parse_records(text.splitlines(), policy)
