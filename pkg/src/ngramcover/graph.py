"""Sentence/n-gram bipartite graph and frozen corpus TF-IDF statistics.

Sentence nodes are instance ids; n-gram nodes get dense integer ids in
first-occurrence order. The graph supports the selection loop's removals:
selecting a sentence deletes it, every n-gram it still touches, and all
edges incident to those n-grams. TF/DF/TF-IDF are computed once at build
time and never change afterwards.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np

from .corpus import (
    DEFAULT_POLICY,
    ContentSide,
    NGram,
    TokenizerPolicy,
    TrainingInstance,
    extract_ngrams,
    select_content,
    tokenize,
)

__all__ = [
    "BipartiteGraph",
    "CorpusStats",
    "RemovalRecord",
    "build_graph",
    "remove_selected",
    "tfidf_weight",
]


@dataclass(frozen=True)
class CorpusStats:
    """Frozen corpus-global n-gram statistics, indexed by n-gram id.

    ``tf`` is the corpus-wide occurrence count (not per-document), ``df``
    the number of distinct sentences containing the n-gram, and
    ``tfidf[v] = tf[v] * ln(N / df[v])``.
    """

    n_sentences: int
    tf: tuple[int, ...]
    df: tuple[int, ...]
    tfidf: tuple[float, ...]
    tfidf_array: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "tfidf_array", np.asarray(self.tfidf, dtype=np.float64)
        )


def tfidf_weight(v: int, stats: CorpusStats) -> float:
    """TF-IDF weight of n-gram ``v``: tf * ln(N / df), natural log."""
    if not 0 <= v < len(stats.tf):
        raise KeyError(f"unknown n-gram id {v}")
    return stats.tf[v] * math.log(stats.n_sentences / stats.df[v])


@dataclass(frozen=True)
class RemovalRecord:
    """What one selection removed: covered n-grams and the other sentences
    that lost at least one edge (the priority-update frontier)."""

    covered_ngrams: tuple[int, ...]
    affected_sentences: frozenset[int]


class BipartiteGraph:
    """Mutable bipartite adjacency between live sentences and live n-grams.

    Static structure (shared across copies): per-sentence n-gram id arrays
    in ascending static-weight order (a flat CSR-style layout), and
    per-n-gram sentence membership. Mutable state: the live sets, a float
    0/1 liveness mask over n-grams, and the live edge count.

    The per-row column order is the canonical summation order for priority
    computations: ascending weight, ties by n-gram id. Summing each row's
    live weights in this fixed order makes two rows with equal weight
    multisets produce bit-identical sums, and keeps that equality under any
    uniform positive rescale of the weights (rescaling is monotone, so it
    preserves the order and the value-level coincidences).
    """

    __slots__ = (
        "n_sentences",
        "ngrams",
        "cols",
        "flat_cols",
        "indptr",
        "members",
        "live_sentences",
        "live_ngrams",
        "live01",
        "edge_count",
    )

    def __init__(
        self,
        ngrams: list[NGram],
        cols: list[np.ndarray],
        members: list[tuple[int, ...]],
    ):
        self.n_sentences = len(cols)
        self.ngrams = ngrams
        self.indptr = np.zeros(len(cols) + 1, dtype=np.int64)
        np.cumsum([len(c) for c in cols], out=self.indptr[1:])
        self.flat_cols = (
            np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
        )
        # Row views into the flat layout; same objects shared by copies.
        self.cols = [
            self.flat_cols[self.indptr[u] : self.indptr[u + 1]]
            for u in range(len(cols))
        ]
        self.members = members
        self.live_sentences = set(range(len(cols)))
        self.live_ngrams = set(range(len(ngrams)))
        self.live01 = np.ones(len(ngrams), dtype=np.float64)
        self.edge_count = int(sum(len(c) for c in cols))

    @property
    def initial_ngram_count(self) -> int:
        return len(self.ngrams)

    def copy(self) -> "BipartiteGraph":
        """Independent mutable view sharing the static structure."""
        g = object.__new__(BipartiteGraph)
        g.n_sentences = self.n_sentences
        g.ngrams = self.ngrams
        g.cols = self.cols
        g.flat_cols = self.flat_cols
        g.indptr = self.indptr
        g.members = self.members
        g.live_sentences = set(self.live_sentences)
        g.live_ngrams = set(self.live_ngrams)
        g.live01 = self.live01.copy()
        g.edge_count = self.edge_count
        return g

    def _require_live(self, u: int) -> None:
        if u not in self.live_sentences:
            raise KeyError(f"sentence {u} is not live")

    def neighbors(self, u: int) -> set[int]:
        """Live n-gram ids currently adjacent to live sentence ``u``."""
        self._require_live(u)
        cu = self.cols[u]
        return set(cu[self.live01[cu] != 0.0].tolist())

    def degree(self, u: int) -> int:
        self._require_live(u)
        cu = self.cols[u]
        return int(np.count_nonzero(self.live01[cu]))

    def check_invariants(self) -> None:
        """Debug audit: edge symmetry, live endpoints, edge-count totals."""
        total = 0
        for u in self.live_sentences:
            total += self.degree(u)
        assert total == self.edge_count, "sentence-side edge count mismatch"
        total = 0
        for v in self.live_ngrams:
            for u in self.members[v]:
                assert u in self.live_sentences, "dead endpoint on live n-gram"
                assert v in self.neighbors(u), "edge symmetry violated"
            total += len(self.members[v])
        assert total == self.edge_count, "n-gram-side edge count mismatch"

    def dump_edges(self, fp) -> None:
        """Write live edges as 'sentence-id<TAB>ngram tokens' lines."""
        for u in sorted(self.live_sentences):
            for v in sorted(self.neighbors(u)):
                fp.write(f"{u}\t{self.ngrams[v].text()}\n")


def build_graph(
    instances: Sequence[TrainingInstance],
    side: ContentSide = ContentSide.INSTRUCTION,
    orders: Iterable[int] = (1, 2, 3),
    policy: TokenizerPolicy = DEFAULT_POLICY,
) -> tuple[BipartiteGraph, CorpusStats]:
    """Build the bipartite graph and frozen TF-IDF table for a corpus."""
    if not instances:
        raise ValueError("cannot build a graph from an empty corpus")
    orders = sorted(set(orders))
    ngram_ids: dict[NGram, int] = {}
    ngrams: list[NGram] = []
    tf: list[int] = []
    df: list[int] = []
    cols: list[np.ndarray] = []
    member_lists: list[list[int]] = []
    for inst in instances:
        tokens = tokenize(select_content(inst, side), policy)
        counts = extract_ngrams(tokens, orders)
        row = []
        for g, c in counts.items():
            v = ngram_ids.get(g)
            if v is None:
                v = ngram_ids[g] = len(ngrams)
                ngrams.append(g)
                tf.append(0)
                df.append(0)
                member_lists.append([])
            tf[v] += c
            df[v] += 1
            member_lists[v].append(inst.id)
            row.append(v)
        cols.append(row)
    n = len(instances)
    stats = CorpusStats(
        n_sentences=n,
        tf=tuple(tf),
        df=tuple(df),
        tfidf=tuple(t * math.log(n / d) for t, d in zip(tf, df)),
    )
    # Canonical per-row order: ascending weight, then n-gram id (see
    # BipartiteGraph's docstring for why summation order matters).
    tfidf = stats.tfidf
    cols = [
        np.array(sorted(row, key=lambda v: (tfidf[v], v)), dtype=np.int64)
        for row in cols
    ]
    graph = BipartiteGraph(
        ngrams, cols, [tuple(sorted(m)) for m in member_lists]
    )
    return graph, stats


def remove_selected(graph: BipartiteGraph, u: int) -> RemovalRecord:
    """Apply one selection step's removals.

    Removes ``u``, every n-gram it still touches, and all edges incident to
    those n-grams. Returns the covered n-grams (ascending id) and the other
    sentences that lost at least one edge.
    """
    graph._require_live(u)
    cu = graph.cols[u]
    covered = cu[graph.live01[cu] != 0.0]
    graph.live_sentences.remove(u)
    affected: set[int] = set()
    removed_edges = 0
    for v in covered.tolist():
        graph.live_ngrams.remove(v)
        m = graph.members[v]
        removed_edges += len(m)
        affected.update(m)
    graph.live01[covered] = 0.0
    graph.edge_count -= removed_edges
    affected.discard(u)
    return RemovalRecord(tuple(sorted(covered.tolist())), frozenset(affected))
