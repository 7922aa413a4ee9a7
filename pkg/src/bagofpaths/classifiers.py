"""Semi-supervised node classifiers behind one uniform interface.

Eight methods share the same contract: given a graph and a partial
label assignment, produce one raw score per (node, class) and assign
every node the argmax class. Ties break to the lowest class index, and
nodes that arrived labeled keep their given class in the reported
labels; the raw scores stay available for audit.

Methods
-------
BOP
    Within-class bag-of-paths betweenness per class (the headline
    method of this library).
RL, RNL, RCT
    Kernel alignments: regularized Laplacian, its degree-normalized
    variant, and the regularized commute-time kernel. One solve scores
    all classes at once.
HF
    Harmonic function: labeled nodes are clamped and unlabeled scores
    satisfy the averaging (electrical potential) condition.
RWWR
    Random walk with restart toward the seeds of each class.
DW1, DW2
    Discriminative walks: expected visit counts of walks started at a
    class's seeds and absorbed at any labeled node, undamped (DW1) or
    killed at rate 1 - alpha per step (DW2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .betweenness import within_class_betweenness
from .errors import DegenerateClassError, InputError
from .graphs import Graph, LabelAssignment, reference_transitions
from .linalg import guarded_solve
from .model import BopModel, build_model

#: Recognized method tags.
METHODS = ("RL", "RNL", "RCT", "HF", "RWWR", "DW1", "DW2", "BOP")

#: Methods that take no hyperparameter.
PARAMETER_FREE = frozenset({"HF", "DW1"})


@dataclass(frozen=True)
class ClassifierSpec:
    """A method tag plus its hyperparameter (theta, lambda, or alpha).

    The parameter must be present exactly for the methods that have one;
    HF and DW1 are parameter free.
    """

    method: str
    parameter: float | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise InputError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.method in PARAMETER_FREE:
            if self.parameter is not None:
                raise InputError(f"{self.method} takes no parameter")
        elif self.parameter is None:
            raise InputError(f"{self.method} requires a parameter")


@dataclass(frozen=True)
class Prediction:
    """Classifier output: labels, one-hot memberships, and raw scores."""

    labels: np.ndarray
    memberships: np.ndarray
    scores: np.ndarray


def _assemble(scores: np.ndarray, labels: LabelAssignment) -> Prediction:
    # argmax returns the first maximal index, which is the documented
    # lowest-class tie-break.
    predicted = scores.argmax(axis=1).astype(np.int64)
    given = labels.labels
    out = np.where(given >= 0, given, predicted)
    memberships = np.zeros_like(scores)
    memberships[np.arange(out.size), out] = 1.0
    return Prediction(labels=out, memberships=memberships, scores=scores)


def _require_seeds(labels: LabelAssignment, minimum: int, method: str) -> None:
    sizes = labels.class_sizes()
    for c, size in enumerate(sizes):
        if size < minimum:
            raise DegenerateClassError(
                f"{method} needs at least {minimum} seed(s) per class; "
                f"class {c} has {int(size)}"
            )


def bop_classify(model: BopModel, labels: LabelAssignment) -> Prediction:
    """Assign each node the class with the largest within-class betweenness.

    Score column c is exactly the normalized within-class betweenness of
    class c; no post-processing happens besides the argmax and the
    labeled-node override.
    """
    if labels.n != model.n:
        raise InputError("label assignment size does not match the model")
    _require_seeds(labels, 2, "BOP")
    scores = np.zeros((model.n, labels.m))
    for c in range(labels.m):
        scores[:, c] = within_class_betweenness(model, labels.indicator[:, c]).values
    return _assemble(scores, labels)


def kernel_classify(
    graph: Graph, labels: LabelAssignment, method: str, parameter: float
) -> Prediction:
    """Kernel alignment: scores are K @ Y, one solve for all classes.

    RL uses K = (I + lambda L)^(-1) with L = D - A the Laplacian and
    D = Diag(A 1) the generalized outdegree matrix. RNL replaces L by
    the normalized Laplacian D^(-1/2) L D^(-1/2). RCT uses the
    regularized commute-time kernel K = (D - alpha A)^(-1), whose
    entries are discounted cumulated visit probabilities. A singular
    kernel system (for example RCT at alpha = 1, where D - A is the
    singular Laplacian) is reported as a numerical error, not patched.
    """
    if method not in ("RL", "RNL", "RCT"):
        raise InputError(f"kernel_classify does not handle method {method!r}")
    if labels.n != graph.n:
        raise InputError("label assignment size does not match the graph")
    _require_seeds(labels, 1, method)
    degree = graph.affinity.sum(axis=1)
    if method == "RCT":
        if not 0 < parameter <= 1:
            raise InputError(f"RCT requires alpha in (0, 1], got {parameter}")
        system = np.diag(degree) - parameter * graph.affinity
    else:
        if parameter <= 0:
            raise InputError(f"{method} requires lambda > 0, got {parameter}")
        laplacian = np.diag(degree) - graph.affinity
        if method == "RNL":
            scale = 1.0 / np.sqrt(degree)
            laplacian = scale[:, np.newaxis] * laplacian * scale[np.newaxis, :]
        system = np.eye(graph.n) + parameter * laplacian
    scores = guarded_solve(system, labels.indicator, context=f"{method} parameter={parameter}")
    return _assemble(scores, labels)


def harmonic_classify(graph: Graph, labels: LabelAssignment) -> Prediction:
    """Harmonic function scores: clamp the labeled nodes, average the rest.

    On the unlabeled block the scores solve (I - P_uu) F_u = P_ul Y_l
    with P the natural random-walk transitions, so each unlabeled score
    is the probability that a walk is absorbed in the given class.
    """
    if labels.n != graph.n:
        raise InputError("label assignment size does not match the graph")
    _require_seeds(labels, 1, "HF")
    scores = labels.indicator.copy()
    unlabeled = np.flatnonzero(labels.labels < 0)
    if unlabeled.size:
        labeled = labels.labeled_nodes
        p = reference_transitions(graph).probs
        p_uu = p[np.ix_(unlabeled, unlabeled)]
        p_ul = p[np.ix_(unlabeled, labeled)]
        system = np.eye(unlabeled.size) - p_uu
        scores[unlabeled] = guarded_solve(
            system, p_ul @ labels.indicator[labeled], context="HF"
        )
    return _assemble(scores, labels)


def rwwr_classify(graph: Graph, labels: LabelAssignment, alpha: float) -> Prediction:
    """Random walk with restart: stationary visit distribution per class.

    The walker follows the graph with probability alpha and teleports
    uniformly to a class-c seed with probability 1 - alpha; column c of
    the scores is the resulting stationary distribution
    (1 - alpha) (I - alpha P^T)^(-1) u_c, which sums to one.
    """
    if labels.n != graph.n:
        raise InputError("label assignment size does not match the graph")
    if not 0 < alpha < 1:
        raise InputError(f"RWWR requires alpha in (0, 1), got {alpha}")
    _require_seeds(labels, 1, "RWWR")
    p = reference_transitions(graph).probs
    system = np.eye(graph.n) - alpha * p.T
    scores = np.zeros((graph.n, labels.m))
    for c in range(labels.m):
        restart = labels.indicator[:, c] / labels.indicator[:, c].sum()
        scores[:, c] = guarded_solve(
            system, (1.0 - alpha) * restart, context=f"RWWR alpha={alpha}"
        )
    return _assemble(scores, labels)


def dwalk_classify(graph: Graph, labels: LabelAssignment, alpha: float) -> Prediction:
    """Discriminative walks: expected visits to unlabeled nodes per class.

    Walks start uniformly at the seeds of class c and stop on the first
    arrival at any labeled node. With Q = alpha P restricted to the
    unlabeled block and B = alpha P from the class-c seeds into it, the
    expected visit counts are (uniform row over seeds) B (I - Q)^(-1).
    Labeled nodes score zero in every column. alpha = 1 is the undamped
    walk (DW1); alpha < 1 kills the walk at rate 1 - alpha per step.
    """
    if labels.n != graph.n:
        raise InputError("label assignment size does not match the graph")
    if not 0 < alpha <= 1:
        raise InputError(f"D-walks require alpha in (0, 1], got {alpha}")
    _require_seeds(labels, 1, "DW")
    p = alpha * reference_transitions(graph).probs
    unlabeled = np.flatnonzero(labels.labels < 0)
    scores = np.zeros((graph.n, labels.m))
    if unlabeled.size == 0:
        return _assemble(scores, labels)
    q = p[np.ix_(unlabeled, unlabeled)]
    system_t = (np.eye(unlabeled.size) - q).T
    for c in range(labels.m):
        seeds = labels.class_members(c)
        b = p[np.ix_(seeds, unlabeled)]
        start = np.full(seeds.size, 1.0 / seeds.size)
        # One solve per class: visits = start @ B @ (I - Q)^(-1).
        scores[unlabeled, c] = guarded_solve(
            system_t, b.T @ start, context=f"DW alpha={alpha}"
        )
    return _assemble(scores, labels)


def classify(graph: Graph, labels: LabelAssignment, spec: ClassifierSpec) -> Prediction:
    """Run the classifier described by ``spec`` on ``graph``."""
    if spec.method == "BOP":
        return bop_classify(build_model(graph, spec.parameter), labels)
    if spec.method in ("RL", "RNL", "RCT"):
        return kernel_classify(graph, labels, spec.method, spec.parameter)
    if spec.method == "HF":
        return harmonic_classify(graph, labels)
    if spec.method == "RWWR":
        return rwwr_classify(graph, labels, spec.parameter)
    if spec.method == "DW1":
        return dwalk_classify(graph, labels, 1.0)
    return dwalk_classify(graph, labels, spec.parameter)
