"""Group-constrained label propagation over image collections.

Builds per-image category distributions from noisy initial predictions by
propagating label mass along a Gaussian feature-similarity graph and a
Jaccard category-affinity matrix, then aggregates them into per-user
interest profiles with ranking metrics for evaluation.
"""

__version__ = "0.1.0"

from .affinity import (
    category_affinity,
    column_normalize,
    gaussian_similarity,
    group_distance_report,
    jaccard_affinity,
    kernel_bandwidth,
    pairwise_sq_distances,
    row_normalize,
    similarity_matrix,
)
from .backend import BACKEND_NAME, available_backends
from .dataio import Dataset, load_affinity, load_dataset, save_affinity, save_dataset
from .metrics import RankedCategories, accuracy, argmax_labels, dcg, ndcg, rank_categories, recall_at_k
from .model import (
    DEFAULT_CATEGORIES,
    CategorySet,
    FeatureMatrix,
    IncidenceRecord,
    UserCollection,
    normalize_rows,
    validate_label_matrix,
)
from .pipeline import PipelineConfig, PipelineReport, run_pipeline
from .profiling import aggregate_user_profile, ground_truth_distribution, prior_distribution
from .propagation import (
    PropagationConfig,
    PropagationResult,
    closed_form_partial_sum,
    compute_lambda,
    element_wise_upper_bound,
    propagate,
    propagate_step,
)
from .synth import SynthConfig, synth_generate

__all__ = [
    "BACKEND_NAME",
    "CategorySet",
    "DEFAULT_CATEGORIES",
    "Dataset",
    "FeatureMatrix",
    "IncidenceRecord",
    "PipelineConfig",
    "PipelineReport",
    "PropagationConfig",
    "PropagationResult",
    "RankedCategories",
    "SynthConfig",
    "UserCollection",
    "accuracy",
    "aggregate_user_profile",
    "argmax_labels",
    "available_backends",
    "category_affinity",
    "closed_form_partial_sum",
    "column_normalize",
    "compute_lambda",
    "dcg",
    "element_wise_upper_bound",
    "gaussian_similarity",
    "ground_truth_distribution",
    "group_distance_report",
    "jaccard_affinity",
    "kernel_bandwidth",
    "load_affinity",
    "load_dataset",
    "ndcg",
    "normalize_rows",
    "pairwise_sq_distances",
    "prior_distribution",
    "propagate",
    "propagate_step",
    "rank_categories",
    "recall_at_k",
    "row_normalize",
    "run_pipeline",
    "save_affinity",
    "save_dataset",
    "similarity_matrix",
    "synth_generate",
    "validate_label_matrix",
]
