"""Bag-of-paths betweenness measures and semi-supervised node classification.

The library models a weighted directed graph as a bag of walks weighted
by a Boltzmann distribution that favors low-cost walks. From the bag it
derives node betweenness, group and within-class betweenness, and a
classifier that labels nodes by their strongest within-class
betweenness, alongside seven standard baselines and a reproducible
evaluation harness.
"""

from .betweenness import (
    IntermediatePosterior,
    ScoreVector,
    bop_betweenness,
    bop_betweenness_direct,
    group_betweenness,
    group_betweenness_direct,
    intermediate_posterior,
    within_class_betweenness,
    within_class_betweenness_direct,
)
from .classifiers import (
    METHODS,
    ClassifierSpec,
    Prediction,
    bop_classify,
    classify,
    dwalk_classify,
    harmonic_classify,
    kernel_classify,
    rwwr_classify,
)
from .errors import (
    BagOfPathsError,
    DegenerateClassError,
    InputError,
    NumericalError,
)
from .evaluation import (
    DEFAULT_GRIDS,
    DEFAULT_LABELING_RATES,
    CellResult,
    ExperimentConfig,
    ExperimentReport,
    MethodConfig,
    accuracy_on,
    borda_ranking,
    mask_labels,
    nested_cv_tune,
    paired_t_test_one_sided,
    run_experiment,
    time_method,
)
from .graphs import (
    NO_EDGE,
    Graph,
    LabelAssignment,
    TransitionMatrix,
    affinity_to_cost,
    generate_planted_partition,
    is_strongly_connected,
    load_edge_list,
    load_labels,
    reference_transitions,
    write_edge_list,
)
from .model import (
    ORACLE_MAX_NODES,
    BopModel,
    PathSumEstimate,
    bop_probabilities,
    build_model,
    hitting_probabilities,
    path_sum_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "BagOfPathsError",
    "BopModel",
    "CellResult",
    "ClassifierSpec",
    "DEFAULT_GRIDS",
    "DEFAULT_LABELING_RATES",
    "DegenerateClassError",
    "ExperimentConfig",
    "ExperimentReport",
    "Graph",
    "InputError",
    "IntermediatePosterior",
    "LabelAssignment",
    "METHODS",
    "MethodConfig",
    "NO_EDGE",
    "NumericalError",
    "ORACLE_MAX_NODES",
    "PathSumEstimate",
    "Prediction",
    "ScoreVector",
    "TransitionMatrix",
    "accuracy_on",
    "affinity_to_cost",
    "bop_betweenness",
    "bop_betweenness_direct",
    "bop_classify",
    "bop_probabilities",
    "borda_ranking",
    "build_model",
    "classify",
    "dwalk_classify",
    "generate_planted_partition",
    "group_betweenness",
    "group_betweenness_direct",
    "harmonic_classify",
    "hitting_probabilities",
    "intermediate_posterior",
    "is_strongly_connected",
    "kernel_classify",
    "load_edge_list",
    "load_labels",
    "mask_labels",
    "nested_cv_tune",
    "paired_t_test_one_sided",
    "path_sum_oracle",
    "reference_transitions",
    "rwwr_classify",
    "run_experiment",
    "time_method",
    "within_class_betweenness",
    "within_class_betweenness_direct",
    "write_edge_list",
]
