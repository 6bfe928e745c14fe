"""Exact analysis of federated Byzantine agreement systems.

Determines liveness and safety buffers by enumerating minimal quorums,
minimal blocking sets and minimal splitting sets, and simulates quorum-set
configuration policies that bootstrap FBASs from trust graphs.
"""

from .analysis import (
    AnalysisAborted,
    AnalysisResult,
    FamilyStats,
    analyze,
    canonical_family,
    find_minimal_blocking_sets,
    find_minimal_quorums,
    find_minimal_splitting_sets,
    has_quorum_intersection_complement,
    has_quorum_intersection_pairwise,
    merge_families_by_group,
    reduce_to_minimal_sets,
    symmetric_top_tier_analysis,
    top_tier,
)
from .core import (
    Fbas,
    Grouping,
    QuorumSet,
    contains_quorum,
    delete_for_liveness,
    delete_for_safety,
    greatest_quorum,
    is_quorum,
    is_satisfiable,
    is_slice_for,
    members,
    node_set,
    satisfies,
)
from .preprocess import (
    RankedNodes,
    SymmetricCluster,
    find_symmetric_clusters,
    rank_nodes,
    reduce_to_relevant,
    strongly_connected_components,
)
from .qsc import (
    QscPolicy,
    TrustGraph,
    apply_policy,
    generate_flat_topology,
    generate_stellar_like_topology,
    relaxed_bft_threshold,
    simulate_and_analyze,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisAborted",
    "AnalysisResult",
    "FamilyStats",
    "Fbas",
    "Grouping",
    "QscPolicy",
    "QuorumSet",
    "RankedNodes",
    "SymmetricCluster",
    "TrustGraph",
    "analyze",
    "apply_policy",
    "canonical_family",
    "contains_quorum",
    "delete_for_liveness",
    "delete_for_safety",
    "find_minimal_blocking_sets",
    "find_minimal_quorums",
    "find_minimal_splitting_sets",
    "find_symmetric_clusters",
    "generate_flat_topology",
    "generate_stellar_like_topology",
    "greatest_quorum",
    "has_quorum_intersection_complement",
    "has_quorum_intersection_pairwise",
    "is_quorum",
    "is_satisfiable",
    "is_slice_for",
    "members",
    "merge_families_by_group",
    "node_set",
    "rank_nodes",
    "reduce_to_minimal_sets",
    "reduce_to_relevant",
    "relaxed_bft_threshold",
    "satisfies",
    "simulate_and_analyze",
    "strongly_connected_components",
    "symmetric_top_tier_analysis",
    "top_tier",
    "__version__",
]
