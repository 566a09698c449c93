"""Greedy budget-constrained subset selection over the bipartite graph.

Each iteration picks the live sentence with the highest priority, removes
it together with the n-grams it covers, and refreshes priorities only for
the sentences that lost edges. ``select`` realizes this with a lazily
invalidated max-heap; ``select_reference`` is the naive full-rescan oracle
with an identical contract. Both compute priorities through the same
vectorized routine, so their outputs (including recorded priority floats)
match exactly.

Tie-breaking is lexicographic on (priority, quality score, lower id), with
quality treated as 0 in modes that do not consume it. Once every n-gram is
covered, diversity-bearing priorities are all 0 and the tie chain selects
by quality, then id; large budgets routinely reach this regime.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .corpus import TrainingInstance, tokenize, DEFAULT_POLICY, TokenizerPolicy
from .graph import BipartiteGraph, CorpusStats, remove_selected
from .quality import MissingQualityError

__all__ = [
    "PriorityMode",
    "SelectionConfig",
    "SelectionResult",
    "SelectionStep",
    "baseline_longest",
    "baseline_quality_topk",
    "baseline_random",
    "diversity",
    "harmonic_bound_check",
    "harmonic_number",
    "oracle_min_cover",
    "priority",
    "select",
    "select_reference",
]


class PriorityMode(Enum):
    COMBINED = "combined"
    QUALITY_ONLY = "quality"
    DIVERSITY_ONLY = "diversity"
    UNIFORM = "uniform"


_QUALITY_MODES = (PriorityMode.COMBINED, PriorityMode.QUALITY_ONLY)


@dataclass(frozen=True)
class SelectionConfig:
    budget: int
    priority_mode: PriorityMode = PriorityMode.COMBINED
    seed: int = 0

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")


@dataclass(frozen=True)
class SelectionStep:
    sentence_id: int
    priority: float
    new_ngrams: int


@dataclass(frozen=True)
class SelectionResult:
    selected: tuple[int, ...]
    steps: tuple[SelectionStep, ...]
    covered_ngrams: int
    initial_ngrams: int


def _quality_array(
    graph: BipartiteGraph,
    quality: Mapping[int, float] | None,
    mode: PriorityMode,
) -> np.ndarray:
    if mode not in _QUALITY_MODES:
        return np.zeros(graph.n_sentences)
    if quality is None:
        raise MissingQualityError(sorted(graph.live_sentences))
    bad = [sid for sid in quality if not 0 <= sid < graph.n_sentences]
    if bad:
        raise ValueError(f"quality ids outside dataset range: {sorted(bad)[:10]}")
    missing = [u for u in graph.live_sentences if u not in quality]
    if missing:
        raise MissingQualityError(missing)
    arr = np.zeros(graph.n_sentences)
    for sid, score in quality.items():
        if not (math.isfinite(score) and score > 0):
            raise ValueError(f"quality score for id {sid} must be positive, got {score}")
        arr[sid] = score
    return arr


def _weight_vector(
    graph: BipartiteGraph, stats: CorpusStats | None, mode: PriorityMode
) -> np.ndarray | None:
    """Static per-n-gram weights for the mode; None means unit weights."""
    if mode is PriorityMode.UNIFORM:
        return None
    if stats is None:
        raise ValueError(f"{mode.value} priority requires corpus statistics")
    return stats.tfidf_array


def _live_row_sums(
    graph: BipartiteGraph, weights: np.ndarray | None, ids: np.ndarray
) -> np.ndarray:
    """Sum of weights over each listed sentence's live n-grams.

    Gathers only the live columns of each row, so every row's terms are
    exactly its live weight multiset in the graph's canonical order, and
    each row sum depends only on that multiset -- not on dead columns, the
    batch it is computed in, or summation-order accidents. Unit weights
    reduce to exact integer degree counts.
    """
    indptr = graph.indptr
    counts = indptr[ids + 1] - indptr[ids]
    total = int(counts.sum())
    out = np.zeros(len(ids))
    if total == 0:
        return out
    ends = np.cumsum(counts)
    starts = ends - counts
    pos = (
        np.arange(total, dtype=np.int64)
        - np.repeat(starts, counts)
        + np.repeat(indptr[ids], counts)
    )
    cols = graph.flat_cols[pos]
    live = graph.live01[cols] != 0.0
    nonempty = counts > 0
    live_counts = np.zeros(len(ids), dtype=np.int64)
    live_counts[nonempty] = np.add.reduceat(
        live.astype(np.int64), starts[nonempty]
    )
    if weights is None:
        return live_counts.astype(np.float64)
    terms = weights[cols[live]]
    fstarts = np.cumsum(live_counts) - live_counts
    haslive = live_counts > 0
    if terms.size:
        out[haslive] = np.add.reduceat(terms, fstarts[haslive])
    return out


def _priorities(
    graph: BipartiteGraph,
    weights: np.ndarray | None,
    qual: np.ndarray,
    mode: PriorityMode,
    ids: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Priority and tie-break-quality arrays for the given sentence ids.

    This is the single priority implementation shared by the heap selector
    and the reference oracle, so both paths see identical floats.
    """
    if mode is PriorityMode.QUALITY_ONLY:
        q = qual[ids]
        return q, q
    div = _live_row_sums(graph, weights, ids)
    if mode is PriorityMode.COMBINED:
        q = qual[ids]
        return q * div, q
    return div, np.zeros(len(ids))


def diversity(u: int, graph: BipartiteGraph, stats: CorpusStats) -> float:
    """Sum of TF-IDF weights over ``u``'s current live n-grams."""
    graph._require_live(u)
    w = _weight_vector(graph, stats, PriorityMode.DIVERSITY_ONLY)
    ids = np.array([u], dtype=np.int64)
    return float(_priorities(graph, w, np.zeros(0), PriorityMode.DIVERSITY_ONLY, ids)[0][0])


def priority(
    u: int,
    graph: BipartiteGraph,
    stats: CorpusStats | None,
    quality: Mapping[int, float] | None,
    mode: PriorityMode,
) -> float:
    """Selection key of one live sentence under the given mode."""
    graph._require_live(u)
    if mode in _QUALITY_MODES and (quality is None or u not in quality):
        raise MissingQualityError([u])
    qual = np.zeros(graph.n_sentences)
    if mode in _QUALITY_MODES:
        qual[u] = quality[u]
    w = _weight_vector(graph, stats, mode)
    ids = np.array([u], dtype=np.int64)
    return float(_priorities(graph, w, qual, mode, ids)[0][0])


def select(
    graph: BipartiteGraph,
    stats: CorpusStats | None,
    quality: Mapping[int, float] | None,
    config: SelectionConfig,
) -> SelectionResult:
    """Greedy selection via a lazily invalidated max-heap.

    The input graph is not mutated (selection runs on a private copy).
    Stale heap entries are recognized by per-sentence version counters and
    discarded on extraction; fresh entries are pushed only for the frontier
    a removal reports.
    """
    g = graph.copy()
    mode = config.priority_mode
    qual = _quality_array(g, quality, mode)
    weights = _weight_vector(g, stats, mode)
    initial_ngrams = len(g.live_ngrams)

    version = [0] * g.n_sentences
    ids = np.array(sorted(g.live_sentences), dtype=np.int64)
    p, q = _priorities(g, weights, qual, mode, ids)
    heap = [
        (-p[i], -q[i], int(u), 0) for i, u in enumerate(ids)
    ]
    heapq.heapify(heap)

    selected: list[int] = []
    steps: list[SelectionStep] = []
    covered_total = 0
    while len(selected) < config.budget and g.live_sentences:
        neg_p, _neg_q, u, ver = heapq.heappop(heap)
        if u not in g.live_sentences or ver != version[u]:
            continue
        record = remove_selected(g, u)
        selected.append(u)
        steps.append(SelectionStep(u, float(-neg_p), len(record.covered_ngrams)))
        covered_total += len(record.covered_ngrams)
        if record.affected_sentences:
            aff = np.array(sorted(record.affected_sentences), dtype=np.int64)
            p, q = _priorities(g, weights, qual, mode, aff)
            for i, a in enumerate(aff):
                a = int(a)
                version[a] += 1
                heapq.heappush(heap, (-p[i], -q[i], a, version[a]))
    return SelectionResult(
        tuple(selected), tuple(steps), covered_total, initial_ngrams
    )


def select_reference(
    graph: BipartiteGraph,
    stats: CorpusStats | None,
    quality: Mapping[int, float] | None,
    config: SelectionConfig,
) -> SelectionResult:
    """Naive oracle: recompute every live sentence's priority each round."""
    g = graph.copy()
    mode = config.priority_mode
    qual = _quality_array(g, quality, mode)
    weights = _weight_vector(g, stats, mode)
    initial_ngrams = len(g.live_ngrams)

    selected: list[int] = []
    steps: list[SelectionStep] = []
    covered_total = 0
    while len(selected) < config.budget and g.live_sentences:
        ids = np.array(sorted(g.live_sentences), dtype=np.int64)
        p, q = _priorities(g, weights, qual, mode, ids)
        best = np.flatnonzero(p == p.max())
        if len(best) > 1:
            best = best[q[best] == q[best].max()]
        i = int(best[0])  # ids ascending, so the first is the lowest id
        u = int(ids[i])
        record = remove_selected(g, u)
        selected.append(u)
        steps.append(SelectionStep(u, float(p[i]), len(record.covered_ngrams)))
        covered_total += len(record.covered_ngrams)
    return SelectionResult(
        tuple(selected), tuple(steps), covered_total, initial_ngrams
    )


def harmonic_number(r: int) -> float:
    return sum(1.0 / k for k in range(1, r + 1))


def oracle_min_cover(graph: BipartiteGraph, cap: int = 15) -> int:
    """Exact minimum number of sentences covering every n-gram.

    Exhaustive search in increasing subset size over sentence bitmasks;
    refuses corpora larger than ``cap`` sentences.
    """
    n = graph.n_sentences
    if n > cap:
        raise ValueError(f"corpus size {n} exceeds oracle cap {cap}")
    universe = (1 << len(graph.ngrams)) - 1
    masks = []
    for u in range(n):
        m = 0
        for v in graph.cols[u].tolist():
            m |= 1 << v
        masks.append(m)
    for size in range(n + 1):
        for combo in itertools.combinations(range(n), size):
            acc = 0
            for u in combo:
                acc |= masks[u]
            if acc == universe:
                return size
    raise AssertionError("full corpus does not cover its own n-grams")


def harmonic_bound_check(graph: BipartiteGraph, cap: int = 15) -> tuple[int, int, float]:
    """Greedy-vs-optimal set-cover audit on a small corpus.

    Runs degree-priority selection to full coverage, computes the exact
    optimum and H(r) for r the maximum initial sentence degree, and asserts
    the classic greedy bound greedy <= H(r) * optimum.
    """
    opt = oracle_min_cover(graph, cap)
    result = select(
        graph, None, None,
        SelectionConfig(budget=graph.n_sentences, priority_mode=PriorityMode.UNIFORM),
    )
    covered = 0
    greedy_size = 0
    for step in result.steps:
        if covered == result.initial_ngrams:
            break
        covered += step.new_ngrams
        greedy_size += 1
    r = max((len(c) for c in graph.cols), default=0)
    h_r = harmonic_number(r)
    assert greedy_size <= h_r * opt + 1e-9, (
        f"greedy cover {greedy_size} exceeds H({r}) * {opt} = {h_r * opt:.4f}"
    )
    return greedy_size, opt, h_r


def _result_from_ids(
    ids: Sequence[int],
    priorities: Sequence[float],
    graph: BipartiteGraph | None,
) -> SelectionResult:
    steps = []
    covered: set[int] = set()
    total = 0
    for u, p in zip(ids, priorities):
        new = 0
        if graph is not None:
            before = len(covered)
            covered.update(graph.cols[u].tolist())
            new = len(covered) - before
        total += new
        steps.append(SelectionStep(int(u), float(p), new))
    initial = graph.initial_ngram_count if graph is not None else 0
    return SelectionResult(tuple(int(u) for u in ids), tuple(steps), total, initial)


def baseline_random(
    instances: Sequence[TrainingInstance],
    k: int,
    seed: int,
    graph: BipartiteGraph | None = None,
) -> SelectionResult:
    """Uniform sample without replacement; reproducible from the seed."""
    n = len(instances)
    rng = np.random.default_rng(seed)
    ids = rng.choice(n, size=min(k, n), replace=False)
    return _result_from_ids(ids.tolist(), [0.0] * len(ids), graph)


def baseline_longest(
    instances: Sequence[TrainingInstance],
    k: int,
    policy: TokenizerPolicy = DEFAULT_POLICY,
    graph: BipartiteGraph | None = None,
) -> SelectionResult:
    """Top-k by instruction token count; ties go to the lower id."""
    lengths = [len(tokenize(i.instruction, policy)) for i in instances]
    order = sorted(range(len(instances)), key=lambda u: (-lengths[u], u))
    ids = order[: min(k, len(instances))]
    return _result_from_ids(ids, [float(lengths[u]) for u in ids], graph)


def baseline_quality_topk(
    quality: Mapping[int, float],
    k: int,
    graph: BipartiteGraph | None = None,
) -> SelectionResult:
    """Top-k by supplied score; ties go to the lower id."""
    if not quality:
        raise MissingQualityError([])
    order = sorted(quality, key=lambda u: (-quality[u], u))
    ids = order[: min(k, len(order))]
    return _result_from_ids(ids, [float(quality[u]) for u in ids], graph)
