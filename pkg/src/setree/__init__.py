"""Minimum-structural-entropy coding trees for graphs.

Build low-entropy hierarchies over a graph (greedy three-stage construction
or a seeded random baseline), account for every bit of entropy along the
way, and run a deterministic tree-structured encoder forward pass on top.
"""

from .agglomerate import (
    ENV_FLAG,
    NUMBA_AVAILABLE,
    MergeSchedule,
    active_backend,
    merge_schedule,
    warmup,
)
from .circa import CircaTrace, circa, random_tree
from .encoder import (
    LossConfig,
    MlpLayer,
    TinWeights,
    bce_loss,
    classify,
    duplicate_project,
    forward,
    readout,
    recursive_reg,
    tin_layer,
    total_loss,
    weights_from_json,
    weights_to_json,
)
from .entropy import (
    EntropyReport,
    brute_force_k_entropy,
    delete_delta,
    merge_delta,
    one_dim_entropy,
    structural_entropy,
)
from .graph import (
    Graph,
    GraphFormatError,
    TaxonomyInfo,
    TaxonomyWarning,
    VertexSubset,
    from_edge_list,
    from_taxonomy,
    subset_stats,
    taxonomy_stats,
)
from .metrics import PredictionSet, macro_f1, micro_f1
from .tree import CodingTree, TreeNode, ValidationIssue, ValidationReport, star_tree, validate

__version__ = "0.1.0"

__all__ = [
    "ENV_FLAG",
    "CircaTrace",
    "CodingTree",
    "EntropyReport",
    "Graph",
    "GraphFormatError",
    "LossConfig",
    "MergeSchedule",
    "MlpLayer",
    "NUMBA_AVAILABLE",
    "PredictionSet",
    "TaxonomyInfo",
    "TaxonomyWarning",
    "TinWeights",
    "TreeNode",
    "ValidationIssue",
    "ValidationReport",
    "VertexSubset",
    "active_backend",
    "bce_loss",
    "brute_force_k_entropy",
    "circa",
    "classify",
    "delete_delta",
    "duplicate_project",
    "forward",
    "from_edge_list",
    "from_taxonomy",
    "macro_f1",
    "merge_delta",
    "merge_schedule",
    "micro_f1",
    "one_dim_entropy",
    "random_tree",
    "readout",
    "recursive_reg",
    "star_tree",
    "structural_entropy",
    "subset_stats",
    "taxonomy_stats",
    "tin_layer",
    "total_loss",
    "validate",
    "warmup",
    "weights_from_json",
    "weights_to_json",
    "__version__",
]
