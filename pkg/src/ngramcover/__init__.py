"""Budget-constrained corpus subset selection over a sentence/n-gram graph.

The library models an instruction-tuning dataset as a bipartite graph of
sentences and their n-grams, then greedily selects a k-instance subset
maximizing n-gram coverage under a configurable priority that multiplies a
perplexity-ratio quality score with a TF-IDF diversity score.
"""

from .corpus import (
    BOUNDARY_TOKEN,
    ContentSide,
    DatasetFormatError,
    DEFAULT_POLICY,
    NGram,
    TokenizerPolicy,
    TrainingInstance,
    extract_ngrams,
    load_dataset,
    parse_records,
    select_content,
    tokenize,
)
from .graph import (
    BipartiteGraph,
    CorpusStats,
    RemovalRecord,
    build_graph,
    remove_selected,
    tfidf_weight,
)
from .metrics import (
    SubsetReport,
    coverage,
    format_table,
    mtld,
    mtld_with_flag,
    summarize,
    write_report,
)
from .quality import (
    MissingQualityError,
    QualityFileError,
    QualityRecord,
    builtin_quality,
    fill_missing_with_median,
    load_quality_file,
    perplexity,
    scores_from_records,
    superfilter_score,
    uniform_quality,
)
from .selector import (
    PriorityMode,
    SelectionConfig,
    SelectionResult,
    SelectionStep,
    baseline_longest,
    baseline_quality_topk,
    baseline_random,
    diversity,
    harmonic_bound_check,
    harmonic_number,
    oracle_min_cover,
    priority,
    select,
    select_reference,
)

__version__ = "0.1.0"
