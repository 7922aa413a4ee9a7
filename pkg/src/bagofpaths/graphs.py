"""Graph and label containers, file formats, and synthetic generators.

Graphs are dense: every method downstream needs the dense inverse of an
n x n matrix, so the natural working regime is a few thousand nodes and
dense numpy arrays throughout. Absent arcs carry an infinite cost and a
zero affinity; no large-float placeholders are ever stored.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, TextIO

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DegenerateClassError, InputError

#: Cost sentinel for an absent arc.
NO_EDGE = np.inf


def _frozen(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Graph:
    """A strongly connected weighted directed graph.

    Attributes
    ----------
    affinity : (n, n) ndarray
        Nonnegative arc affinities; ``affinity[i, j] == 0`` means no arc.
        Undirected graphs store both orientations.
    cost : (n, n) ndarray
        Positive immediate transition costs, ``NO_EDGE`` where no arc
        exists. By default costs are the reciprocal affinities.
    directed : bool
        False when the graph was built from undirected input, in which
        case both matrices are symmetric.
    """

    affinity: np.ndarray
    cost: np.ndarray
    directed: bool = True

    def __post_init__(self) -> None:
        a = np.ascontiguousarray(np.asarray(self.affinity, dtype=np.float64))
        c = np.ascontiguousarray(np.asarray(self.cost, dtype=np.float64))
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InputError(f"affinity matrix must be square, got shape {a.shape}")
        if c.shape != a.shape:
            raise InputError("cost matrix shape does not match affinity matrix")
        if not np.all(np.isfinite(a)):
            raise InputError("affinities must be finite")
        if np.any(a < 0):
            raise InputError("affinities must be nonnegative")
        if np.any(np.diag(a) != 0):
            node = int(np.flatnonzero(np.diag(a))[0])
            raise InputError(f"self-loop on node {node}: self-loops are not allowed")
        has_arc = a > 0
        if np.any(np.isnan(c)) or np.any(c <= 0):
            raise InputError("costs must be positive")
        if not np.array_equal(np.isfinite(c), has_arc):
            raise InputError("finite costs must coincide exactly with positive affinities")
        if not self.directed and not np.array_equal(a, a.T):
            raise InputError("undirected graph requires a symmetric affinity matrix")
        _check_strongly_connected(a)
        object.__setattr__(self, "affinity", _frozen(a))
        object.__setattr__(self, "cost", _frozen(c))

    @property
    def n(self) -> int:
        return self.affinity.shape[0]

    @classmethod
    def from_affinity(cls, affinity: np.ndarray, directed: bool = True) -> "Graph":
        """Build a graph from an affinity matrix, deriving reciprocal costs."""
        affinity = np.asarray(affinity, dtype=np.float64)
        return cls(affinity=affinity, cost=affinity_to_cost(affinity), directed=directed)


@dataclass(frozen=True)
class LabelAssignment:
    """Binary node-class indicator matrix.

    Each row holds at most one 1; an all-zero row marks an unlabeled
    node. Column ``c`` is the seed-indicator vector of class ``c``.
    """

    indicator: np.ndarray

    def __post_init__(self) -> None:
        y = np.ascontiguousarray(np.asarray(self.indicator, dtype=np.float64))
        if y.ndim != 2:
            raise InputError("label indicator must be a 2-d matrix")
        if not np.all((y == 0) | (y == 1)):
            raise InputError("label indicator entries must be 0 or 1")
        rows = y.sum(axis=1)
        if np.any(rows > 1):
            node = int(np.flatnonzero(rows > 1)[0])
            raise InputError(f"node {node} is assigned to more than one class")
        object.__setattr__(self, "indicator", _frozen(y))

    @property
    def n(self) -> int:
        return self.indicator.shape[0]

    @property
    def m(self) -> int:
        return self.indicator.shape[1]

    @property
    def labels(self) -> np.ndarray:
        """Per-node class id, -1 for unlabeled nodes."""
        out = np.full(self.n, -1, dtype=np.int64)
        rows, cols = np.nonzero(self.indicator)
        out[rows] = cols
        return out

    @property
    def labeled_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.indicator.sum(axis=1) > 0)

    def class_members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.indicator[:, c] > 0)

    def class_sizes(self) -> np.ndarray:
        return self.indicator.sum(axis=0).astype(np.int64)

    @classmethod
    def from_labels(cls, labels: Iterable[int], m: int) -> "LabelAssignment":
        """Build from a per-node class vector with -1 marking unlabeled nodes."""
        labels = np.asarray(list(labels), dtype=np.int64)
        if m < 1:
            raise InputError("number of classes must be at least 1")
        if labels.size and (labels.max() >= m or labels.min() < -1):
            raise InputError("class ids must lie in [0, m) or be -1 for unlabeled")
        y = np.zeros((labels.size, m))
        for node, c in enumerate(labels):
            if c >= 0:
                y[node, c] = 1.0
        return cls(y)


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic transition probabilities with support on existing arcs."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        p = np.ascontiguousarray(np.asarray(self.probs, dtype=np.float64))
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise InputError("transition matrix must be square")
        if np.any(p < 0):
            raise InputError("transition probabilities must be nonnegative")
        if np.any(np.abs(p.sum(axis=1) - 1.0) > 1e-12):
            raise InputError("transition matrix rows must sum to 1 within 1e-12")
        object.__setattr__(self, "probs", _frozen(p))

    @property
    def n(self) -> int:
        return self.probs.shape[0]


def affinity_to_cost(affinity: np.ndarray) -> np.ndarray:
    """Reciprocal-affinity costs: ``c = 1/a`` where ``a > 0``, ``NO_EDGE`` elsewhere."""
    affinity = np.asarray(affinity, dtype=np.float64)
    if np.any(affinity < 0):
        raise InputError("affinities must be nonnegative")
    cost = np.full(affinity.shape, NO_EDGE)
    mask = affinity > 0
    cost[mask] = 1.0 / affinity[mask]
    return cost


def reference_transitions(graph: Graph) -> TransitionMatrix:
    """Natural random-walk transition probabilities.

    From node i the walker follows arc (i, j) with probability
    proportional to the reciprocal cost 1/c_ij, favoring cheap arcs.
    """
    recip = np.zeros_like(graph.cost)
    mask = np.isfinite(graph.cost)
    recip[mask] = 1.0 / graph.cost[mask]
    return TransitionMatrix(recip / recip.sum(axis=1, keepdims=True))


def is_strongly_connected(affinity: np.ndarray) -> bool:
    """True when every node can reach every other node along positive arcs."""
    affinity = np.asarray(affinity)
    n = affinity.shape[0]
    if n == 0:
        return False
    if n == 1:
        # A single node has no arcs (self-loops are rejected), so there is
        # no walk at all; treat it as disconnected.
        return False
    sparse = csr_matrix(affinity > 0)
    ncomp, _ = connected_components(sparse, directed=True, connection="strong")
    return int(ncomp) == 1


def _check_strongly_connected(affinity: np.ndarray) -> None:
    if is_strongly_connected(affinity):
        return
    out_deg = (affinity > 0).sum(axis=1)
    if np.any(out_deg == 0):
        node = int(np.flatnonzero(out_deg == 0)[0])
        raise InputError(f"graph is not strongly connected: node {node} has no outgoing arc")
    raise InputError("graph is not strongly connected")


def _iter_lines(source: str | Path | TextIO | Iterable[str]) -> Iterator[tuple[int, str]]:
    if isinstance(source, (str, Path)):
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from exc
        lines: Iterable[str] = text.splitlines()
    elif isinstance(source, io.TextIOBase):
        lines = source.read().splitlines()
    else:
        lines = [line.rstrip("\n") for line in source]
    for number, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        yield number, stripped


def load_edge_list(source, directed: bool = True) -> Graph:
    """Parse a TSV edge list ``src<TAB>dst<TAB>weight`` into a :class:`Graph`.

    Node ids are dense 0-based integers, weights are positive affinities,
    and ``#`` lines are ignored. For undirected input each line sets both
    orientations. A repeated arc keeps the last value and emits a warning.
    """
    arcs: dict[tuple[int, int], float] = {}
    max_node = -1
    for number, line in _iter_lines(source):
        parts = line.split()
        if len(parts) != 3:
            raise InputError(f"line {number}: expected 'src dst weight', got {line!r}")
        try:
            src, dst = int(parts[0]), int(parts[1])
            weight = float(parts[2])
        except ValueError as exc:
            raise InputError(f"line {number}: {exc}") from exc
        if src < 0 or dst < 0:
            raise InputError(f"line {number}: node ids must be nonnegative")
        if not np.isfinite(weight) or weight <= 0:
            raise InputError(f"line {number}: weight must be a positive finite number")
        if src == dst:
            raise InputError(f"line {number}: self-loop on node {src} is not allowed")
        keys = [(src, dst), (dst, src)] if not directed else [(src, dst)]
        for key in keys:
            if key in arcs:
                warnings.warn(
                    f"line {number}: duplicate arc {key[0]}->{key[1]}, keeping last value",
                    stacklevel=2,
                )
            arcs[key] = weight
        max_node = max(max_node, src, dst)
    if max_node < 0:
        raise InputError("edge list contains no arcs")
    n = max_node + 1
    affinity = np.zeros((n, n))
    for (src, dst), weight in arcs.items():
        affinity[src, dst] = weight
    return Graph.from_affinity(affinity, directed=directed)


def write_edge_list(graph: Graph, dest: str | Path | TextIO) -> None:
    """Write a graph back to TSV so that a reload reproduces it bit-exactly.

    Undirected graphs emit each edge once (lower id first); float weights
    are written with ``repr`` so they round-trip exactly.
    """
    lines = []
    rows, cols = np.nonzero(graph.affinity)
    for i, j in zip(rows.tolist(), cols.tolist()):
        if not graph.directed and i > j:
            continue
        lines.append(f"{i}\t{j}\t{graph.affinity[i, j]!r}")
    text = "\n".join(lines) + "\n"
    if isinstance(dest, (str, Path)):
        Path(dest).write_text(text, encoding="utf-8")
    else:
        dest.write(text)


def _looks_like_header(line: str) -> bool:
    first = line.split(",")[0].strip()
    try:
        int(first)
        return False
    except ValueError:
        return True


def load_labels(source, n: int, m: int | None = None) -> LabelAssignment:
    """Parse CSV lines ``node,class`` into a :class:`LabelAssignment`.

    A non-numeric first field on the first data line is treated as a
    header. Every class must end up with at least two labeled nodes;
    anything smaller cannot support a within-class betweenness.

    Parameters
    ----------
    n : int
        Number of graph nodes (rows of the indicator).
    m : int, optional
        Number of classes; inferred as ``max class id + 1`` when omitted.
    """
    entries: list[tuple[int, int, int]] = []
    first = True
    for number, line in _iter_lines(source):
        if first and _looks_like_header(line):
            first = False
            continue
        first = False
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise InputError(f"line {number}: expected 'node,class', got {line!r}")
        try:
            node, cls = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise InputError(f"line {number}: {exc}") from exc
        entries.append((number, node, cls))
    if m is None:
        if not entries:
            raise InputError("label file contains no assignments")
        m = max(cls for _, _, cls in entries) + 1
    assigned: dict[int, int] = {}
    for number, node, cls in entries:
        if not 0 <= node < n:
            raise InputError(f"line {number}: node {node} out of range [0, {n})")
        if not 0 <= cls < m:
            raise InputError(f"line {number}: class {cls} out of range [0, {m})")
        if node in assigned and assigned[node] != cls:
            raise InputError(
                f"line {number}: node {node} listed with conflicting classes "
                f"{assigned[node]} and {cls}"
            )
        assigned[node] = cls
    y = np.zeros((n, m))
    for node, cls in assigned.items():
        y[node, cls] = 1.0
    counts = y.sum(axis=0)
    for c in range(m):
        if counts[c] < 2:
            raise DegenerateClassError(
                f"class {c} has {int(counts[c])} labeled node(s); at least 2 are required"
            )
    return LabelAssignment(y)


def generate_planted_partition(
    blocks: int,
    block_size: int,
    p_in: float,
    p_out: float,
    seed: int,
    max_retries: int = 100,
) -> tuple[Graph, LabelAssignment]:
    """Sample an undirected unit-affinity planted-partition graph.

    Nodes are grouped into ``blocks`` blocks of ``block_size`` nodes;
    within-block edges appear with probability ``p_in`` and cross-block
    edges with probability ``p_out``. Sampling repeats (same RNG stream)
    until the graph is strongly connected. The returned labels are the
    full ground-truth block memberships.
    """
    if blocks < 1 or block_size < 2:
        raise InputError("need at least 1 block of at least 2 nodes")
    if not (0 <= p_out < p_in <= 1):
        raise InputError("edge probabilities must satisfy 0 <= p_out < p_in <= 1")
    if max_retries < 1:
        raise InputError("max_retries must be at least 1")
    n = blocks * block_size
    membership = np.repeat(np.arange(blocks), block_size)
    prob = np.where(membership[:, None] == membership[None, :], p_in, p_out)
    rng = np.random.default_rng(seed)
    for _ in range(max_retries):
        upper = np.triu(rng.random((n, n)) < prob, k=1)
        affinity = (upper | upper.T).astype(np.float64)
        if is_strongly_connected(affinity):
            graph = Graph.from_affinity(affinity, directed=False)
            return graph, LabelAssignment.from_labels(membership, blocks)
    raise InputError(
        f"failed to sample a strongly connected graph in {max_retries} attempts "
        f"(blocks={blocks}, block_size={block_size}, p_in={p_in}, p_out={p_out})"
    )
