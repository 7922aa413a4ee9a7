"""The bag-of-paths model.

A bag of paths assigns every walk of the graph a Boltzmann weight: the
product of the natural random-walk transition probabilities along the
walk times exp(-theta * total cost). Summing those weights over all
walks from i to j gives the entry z_ij of the fundamental matrix

    Z = (I - W)^(-1),    W = P_ref o exp(-theta * C)   (elementwise),

because walks of length L contribute exactly (W^L)_ij and the geometric
series converges: for theta > 0 the matrix W is strictly substochastic.
Dividing z_ij by the grand sum of Z turns the weights into the
probability of drawing a path that starts in i and ends in j.

The hitting (absorbing) variant restricts the bag to walks whose ending
node appears exactly once, at the end; its weights are z_ij / z_jj.

:func:`path_sum_oracle` recomputes the same quantities by accumulating
walk weights length by length, without any linear solve. It exists to
audit the closed form and is exponential-minded: it refuses graphs with
more than 12 nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericalError
from .graphs import Graph, reference_transitions
from .linalg import guarded_solve


@dataclass(frozen=True)
class BopModel:
    """Fundamental matrix and partition sums for one inverse temperature.

    Attributes
    ----------
    theta : float
        Inverse temperature, strictly positive. Small values approach the
        natural random walk, large values concentrate on cheapest paths.
    W : (n, n) ndarray
        Substochastic walk-weight matrix ``P_ref * exp(-theta * C)``.
    Z : (n, n) ndarray
        Fundamental matrix ``(I - W)^(-1)``; entry z_ij is the total
        weight of all walks from i to j (the empty walk counts 1 when
        i == j, so the diagonal is at least 1).
    Z0 : (n, n) ndarray
        Z with its diagonal zeroed.
    dz : (n,) ndarray
        Diagonal of Z.
    partition : float
        Grand sum of Z, normalizing path weights into probabilities.
    hitting_partition : float
        Grand sum of ``z_ij / z_jj``, the hitting-path analogue.
    """

    theta: float
    W: np.ndarray
    Z: np.ndarray
    Z0: np.ndarray
    dz: np.ndarray
    partition: float
    hitting_partition: float

    @property
    def n(self) -> int:
        return self.Z.shape[0]


def build_model(graph: Graph, theta: float) -> BopModel:
    """Build the bag-of-paths model for ``graph`` at inverse temperature ``theta``.

    The fundamental matrix is obtained by LU solves against the identity
    rather than an explicit inverse. As theta approaches 0 the system
    I - W approaches singularity; a reciprocal-condition guard turns that
    regime into an explicit error naming the offending theta.
    """
    if not np.isfinite(theta) or theta <= 0:
        raise InputError(f"theta must be positive, got {theta}")
    p_ref = reference_transitions(graph).probs
    w = p_ref * np.exp(-theta * graph.cost)
    n = graph.n
    z = guarded_solve(np.eye(n) - w, np.eye(n), context=f"theta={theta}")
    dz = np.diag(z).copy()
    z0 = z - np.diag(dz)
    for arr in (w, z, z0, dz):
        arr.setflags(write=False)
    return BopModel(
        theta=float(theta),
        W=w,
        Z=z,
        Z0=z0,
        dz=dz,
        partition=float(z.sum()),
        hitting_partition=float((z / dz[np.newaxis, :]).sum()),
    )


def bop_probabilities(model: BopModel) -> np.ndarray:
    """Matrix of probabilities of drawing a path starting in i and ending in j.

    Entries are ``z_ij`` divided by the partition sum; the grand total
    is 1 by construction.
    """
    return model.Z / model.partition


def hitting_probabilities(model: BopModel) -> tuple[np.ndarray, np.ndarray]:
    """Hitting-path weights and probabilities.

    Returns
    -------
    zh : (n, n) ndarray
        ``z_ij / z_jj``; the diagonal is exactly 1 (the only walk from j
        to j in which j appears once is the empty walk).
    ph : (n, n) ndarray
        ``zh`` divided by its grand sum.
    """
    zh = model.Z / model.dz[np.newaxis, :]
    return zh, zh / model.hitting_partition


@dataclass(frozen=True)
class PathSumEstimate:
    """A truncated walk-weight sum together with its geometric tail bound."""

    value: float
    truncation_length: int
    tail_bound: float


#: Enumeration cost grows exponentially with walk length budgets; keep the
#: oracle for audit-sized graphs only.
ORACLE_MAX_NODES = 12

_ORACLE_MAX_LENGTH = 100_000


def path_sum_oracle(
    graph: Graph,
    theta: float,
    i: int,
    j: int,
    epsilon: float,
    hitting: bool = False,
    max_length: int = _ORACLE_MAX_LENGTH,
) -> PathSumEstimate:
    """Accumulate walk weights from i to j length by length.

    This is the audit path: walk weights are rebuilt from first
    principles (per-arc reciprocal-cost probabilities times the Boltzmann
    factor of the arc cost) and summed over walks of length 0, 1, 2, ...
    grouped by endpoint. No linear system is involved. Accumulation stops
    once the geometric tail bound

        n * rho^(L+1) / (1 - rho),   rho = max row sum of the weights,

    falls below ``epsilon``. With ``hitting=True`` walks that revisit the
    ending node are excluded, which matches the hitting-path weights.

    Raises
    ------
    InputError
        If the graph exceeds :data:`ORACLE_MAX_NODES`, indices are out of
        range, theta is not positive, or epsilon is negative.
    NumericalError
        If the tail bound fails to reach ``epsilon`` within ``max_length``
        steps (always the case for ``epsilon = 0``).
    """
    n = graph.n
    if n > ORACLE_MAX_NODES:
        raise InputError(f"graph too large for oracle: n={n} exceeds {ORACLE_MAX_NODES}")
    if not (0 <= i < n and 0 <= j < n):
        raise InputError(f"node pair ({i}, {j}) out of range for n={n}")
    if not np.isfinite(theta) or theta <= 0:
        raise InputError(f"theta must be positive, got {theta}")
    if epsilon < 0:
        raise InputError("epsilon must be nonnegative")

    # Independent arc-weight table, built entrywise from the definitions.
    weights = np.zeros((n, n))
    for src in range(n):
        recip = [0.0] * n
        for dst in range(n):
            c = graph.cost[src, dst]
            if math.isfinite(c):
                recip[dst] = 1.0 / c
        total = sum(recip)
        for dst in range(n):
            if recip[dst] > 0.0:
                weights[src, dst] = (recip[dst] / total) * math.exp(
                    -theta * graph.cost[src, dst]
                )
    rho = float(weights.sum(axis=1).max())
    # theta > 0 shrinks every arc weight strictly below its transition
    # probability, so every row sum sits strictly below 1.
    assert rho < 1.0

    if hitting and i == j:
        # The empty walk is the only one in which the ending node appears
        # exactly once.
        return PathSumEstimate(value=1.0, truncation_length=0, tail_bound=0.0)

    value = 1.0 if i == j else 0.0
    front = np.zeros(n)
    front[i] = 1.0
    length = 0

    def tail(after: int) -> float:
        return n * rho ** (after + 1) / (1.0 - rho)

    while tail(length) >= epsilon:
        if length >= max_length:
            raise NumericalError(
                f"path sum did not converge below epsilon={epsilon} within "
                f"{max_length} steps (tail bound {tail(length):.3e}, rho={rho:.6f})"
            )
        front = front @ weights
        length += 1
        value += float(front[j])
        if hitting:
            # Walks that have already hit j must not be extended.
            front[j] = 0.0
    return PathSumEstimate(value=value, truncation_length=length, tail_bound=tail(length))
