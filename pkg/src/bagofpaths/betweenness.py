"""Betweenness measures on a bag-of-paths model.

Given the fundamental matrix Z, the joint weight of the paths from i to
k that visit an intermediate node j (with i, j, k pairwise distinct) is
z_ij * z_jk / z_jj: a path is split at its first arrival in j into a
hitting sub-path i ~> j and a free sub-path j ~> k. Normalizing over the
candidate intermediates yields the posterior probability of visiting j
given that a path was drawn from i to k. The betweenness of j sums that
posterior over all ordered pairs; the group variants constrain the pair
endpoints to labeled classes.

Every measure exists in two forms: the production matrix expression and
a direct triple-sum reference with explicit loops. The direct forms are
the internal oracle for the matrix algebra and are quadratic-to-cubic in
n with Python-level loops, so keep them to small graphs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateClassError, InputError, NumericalError
from .model import BopModel

#: Allowed tags for :class:`ScoreVector`.
SCORE_KINDS = ("betweenness", "group-betweenness", "membership")


@dataclass(frozen=True)
class ScoreVector:
    """Nonnegative per-node scores with a tag describing their meaning."""

    values: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        values = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if values.ndim != 1:
            raise InputError("score vector must be 1-d")
        if self.kind not in SCORE_KINDS:
            raise InputError(f"unknown score kind {self.kind!r}")
        if np.any(values < 0):
            raise NumericalError("score vector has negative entries")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class IntermediatePosterior:
    """Posterior distribution over intermediates for one ordered node pair.

    ``probs[j]`` is the probability that a path drawn from ``source`` to
    ``target`` visits j strictly in between; the source and target
    entries are zero and the rest sums to one.
    """

    source: int
    target: int
    probs: np.ndarray


def _validate_indicator(model: BopModel, y: np.ndarray, name: str) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.shape[0] != model.n:
        raise InputError(f"{name} must have length n={model.n}")
    if not np.all((y == 0) | (y == 1)):
        raise InputError(f"{name} must be a binary indicator vector")
    return y


def intermediate_posterior(model: BopModel, i: int, k: int) -> IntermediatePosterior:
    """Posterior probability of visiting each intermediate on paths i ~> k."""
    n = model.n
    if n < 3:
        raise InputError("intermediate posteriors need at least 3 nodes")
    if not (0 <= i < n and 0 <= k < n):
        raise InputError(f"node pair ({i}, {k}) out of range for n={n}")
    if i == k:
        raise InputError("source and target must differ")
    raw = model.Z[i, :] * model.Z[:, k] / model.dz
    raw[i] = 0.0
    raw[k] = 0.0
    total = raw.sum()
    if total <= 0:
        # Impossible on a strongly connected graph: z is entrywise positive.
        raise NumericalError(f"no intermediate mass for pair ({i}, {k})")
    return IntermediatePosterior(source=i, target=k, probs=raw / total)


def bop_betweenness(model: BopModel) -> ScoreVector:
    """Betweenness of every node: summed intermediate posteriors over all pairs.

    Uses the closed matrix form. With Z0 the zero-diagonal fundamental
    matrix and N = Z0 diag(Z)^(-1) Z0 the per-pair normalization factors,
    the betweenness vector is

        diag(Z)^(-1) diag[ Z0^T (N^div - Diag(N^div)) Z0^T ]

    where N^div holds elementwise reciprocals of N. Equals the direct
    triple sum within 1e-10.
    """
    n = model.n
    if n < 3:
        raise InputError("betweenness needs at least 3 nodes")
    inv_dz = 1.0 / model.dz
    z0 = model.Z0
    norm = (z0 * inv_dz[np.newaxis, :]) @ z0
    off_diag = ~np.eye(n, dtype=bool)
    if np.any(norm[off_diag] <= 0):
        raise NumericalError("pair normalization factor is not positive")
    norm_div = np.zeros_like(norm)
    norm_div[off_diag] = 1.0 / norm[off_diag]
    zt0 = z0.T
    bet = inv_dz * np.einsum("ij,ji->i", zt0 @ norm_div, zt0)
    return ScoreVector(values=bet, kind="betweenness")


def bop_betweenness_direct(model: BopModel) -> ScoreVector:
    """Reference betweenness by explicit summation over ordered pairs."""
    n = model.n
    if n < 3:
        raise InputError("betweenness needs at least 3 nodes")
    z = model.Z
    dz = model.dz
    bet = np.zeros(n)
    for i in range(n):
        for k in range(n):
            if i == k:
                continue
            denom = 0.0
            for j in range(n):
                if j != i and j != k:
                    denom += z[i, j] * z[j, k] / dz[j]
            assert denom > 0.0
            for j in range(n):
                if j != i and j != k:
                    bet[j] += z[i, j] * z[j, k] / (dz[j] * denom)
    return ScoreVector(values=bet, kind="betweenness")


def _group_numerator(model: BopModel, y_start: np.ndarray, y_end: np.ndarray) -> np.ndarray:
    z0 = model.Z0
    return (z0.T @ y_start) * (z0 @ y_end) / model.dz


def group_betweenness(model: BopModel, y_start: np.ndarray, y_end: np.ndarray) -> ScoreVector:
    """Betweenness restricted to paths from one node set to another.

    ``y_start`` and ``y_end`` are disjoint binary indicator vectors. The
    numerator for node j is (1/z_jj) * (Z0^T y_start)_j * (Z0 y_end)_j;
    the vector is then normalized to unit L1 norm. Nodes inside either
    set score zero because they cannot be strict intermediates of their
    own endpoint role.
    """
    y_start = _validate_indicator(model, y_start, "y_start")
    y_end = _validate_indicator(model, y_end, "y_end")
    if y_start.sum() == 0 or y_end.sum() == 0:
        raise DegenerateClassError("both node sets must be nonempty")
    if np.any((y_start > 0) & (y_end > 0)):
        raise InputError("start and end node sets must be disjoint")
    numerator = _group_numerator(model, y_start, y_end)
    total = numerator.sum()
    if total <= 0:
        raise DegenerateClassError("group betweenness has zero total mass")
    return ScoreVector(values=numerator / total, kind="group-betweenness")


def group_betweenness_direct(
    model: BopModel, y_start: np.ndarray, y_end: np.ndarray
) -> ScoreVector:
    """Reference group betweenness by explicit summation."""
    y_start = _validate_indicator(model, y_start, "y_start")
    y_end = _validate_indicator(model, y_end, "y_end")
    if y_start.sum() == 0 or y_end.sum() == 0:
        raise DegenerateClassError("both node sets must be nonempty")
    if np.any((y_start > 0) & (y_end > 0)):
        raise InputError("start and end node sets must be disjoint")
    z = model.Z
    starts = np.flatnonzero(y_start)
    ends = np.flatnonzero(y_end)
    numerator = np.zeros(model.n)
    for j in range(model.n):
        acc = 0.0
        for i in starts:
            for k in ends:
                if i != j and j != k:
                    acc += z[i, j] * z[j, k]
        numerator[j] = acc / model.dz[j]
    total = numerator.sum()
    if total <= 0:
        raise DegenerateClassError("group betweenness has zero total mass")
    return ScoreVector(values=numerator / total, kind="group-betweenness")


def within_class_betweenness(model: BopModel, y_class: np.ndarray) -> ScoreVector:
    """Betweenness for paths that start and end in the same class.

    With both endpoints drawn from one class the endpoint pairs must
    still be distinct nodes, so the plain product form overcounts the
    i' == k' pairs; subtracting (Z0^T o Z0) y removes them:

        numerator = diag(Z)^(-1) [ (Z0^T y) o (Z0 y) - (Z0^T o Z0) y ]

    followed by L1 normalization. A class needs at least two seed nodes;
    with fewer the numerator vanishes identically.
    """
    y_class = _validate_indicator(model, y_class, "y_class")
    if y_class.sum() < 2:
        raise DegenerateClassError(
            f"within-class betweenness needs at least 2 seed nodes, got {int(y_class.sum())}"
        )
    z0 = model.Z0
    numerator = ((z0.T @ y_class) * (z0 @ y_class) - (z0.T * z0) @ y_class) / model.dz
    total = numerator.sum()
    if total <= 0:
        raise DegenerateClassError(
            "within-class betweenness has zero total mass (fewer than 2 distinct "
            "seeds, or all path weights underflowed)"
        )
    return ScoreVector(values=numerator / total, kind="group-betweenness")


def within_class_betweenness_direct(model: BopModel, y_class: np.ndarray) -> ScoreVector:
    """Reference within-class betweenness with the full distinctness conditions."""
    y_class = _validate_indicator(model, y_class, "y_class")
    seeds = np.flatnonzero(y_class)
    if seeds.size < 2:
        raise DegenerateClassError(
            f"within-class betweenness needs at least 2 seed nodes, got {seeds.size}"
        )
    z = model.Z
    numerator = np.zeros(model.n)
    for j in range(model.n):
        acc = 0.0
        for i in seeds:
            for k in seeds:
                if i != j and j != k and i != k:
                    acc += z[i, j] * z[j, k]
        numerator[j] = acc / model.dz[j]
    total = numerator.sum()
    if total <= 0:
        raise DegenerateClassError("within-class betweenness has zero total mass")
    return ScoreVector(values=numerator / total, kind="group-betweenness")
