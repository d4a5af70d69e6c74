"""Network alignment via elimination-rule similarity iteration, with a
random-walk-guided local search for refinement."""

from .alignment import (
    Alignment,
    default_delta,
    naive_align,
    pair_similarities,
    read_alignment,
    seed_and_extend_align,
    write_alignment,
)
from .generators import GroundTruth, NoiseSpec, generate_ba, generate_hk, make_rng, perturb
from .graph import (
    Graph,
    LabelMap,
    ParseError,
    ParseReport,
    ParseResult,
    SubgraphResult,
    diameter,
    eccentricities,
    graph_edge_labels,
    induced_subgraph,
    load_edge_list,
    parse_edge_list,
    write_edge_list,
)
from .local_search import (
    MergeResult,
    MismatchState,
    NoMismatchError,
    PropagationResult,
    SearchConfig,
    SearchResult,
    TraceRow,
    baseline_search,
    block_objective_delta,
    compute_violations,
    merge_graphs,
    propagate_mismatch,
    rank_mismatched,
    rawsem_search,
    write_trace,
)
from .metrics import (
    Scorecard,
    conserved_edges,
    edge_correctness,
    qap_objective,
    s3_score,
    write_scorecards,
)
from .oracle import ExactResult, audit_best_matching, audit_theorem1, exact_align
from .similarity import (
    ContributionContext,
    SimilarityState,
    accumulate_pair,
    contribution_amount,
    iterate,
    load_similarity,
    run_similarity,
    save_similarity,
)
from .threshold import ThresholdMatrix, compute_thresholds

__version__ = "0.1.0"
