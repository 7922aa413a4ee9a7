"""Experimental protocol: label masking, tuning, repetition, and statistics.

The protocol treats random label deletion as the outer evaluation split:
for each labeling rate and each run, a stratified sample of nodes keeps
its labels, hyperparameters are tuned by inner cross-validation on the
kept seeds only, the tuned classifier labels the whole graph, and
accuracy is scored on the masked nodes. The outer-fold count is carried
in the configuration for completeness, but the masked set is the test
split; inner folds are seeded random partitions of the kept seeds.

Everything is deterministic given the configuration seed: each
(rate, run) cell derives its own RNG from the seed and the cell
coordinates, so results do not depend on execution order or on the
number of worker processes.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .classifiers import METHODS, PARAMETER_FREE, ClassifierSpec, bop_classify, classify
from .errors import DegenerateClassError, InputError
from .graphs import Graph, LabelAssignment
from .model import build_model

#: Labeling rates used throughout the experiments.
DEFAULT_LABELING_RATES = (0.1, 0.3, 0.5, 0.7, 0.9)

#: Hyperparameter grids per method. RL/RNL sweep the regularization over
#: 10^-6 .. 10^6, BOP sweeps the inverse temperature over 10^-6 .. 10^2,
#: and the alpha methods sweep 0.1 .. 1.0 in steps of 0.1. RCT and RWWR
#: stop at 0.9: at alpha = 1 their defining systems (the graph Laplacian,
#: respectively I - P^T) are exactly singular.
DEFAULT_GRIDS: dict[str, tuple[float | None, ...]] = {
    "RL": tuple(10.0**k for k in range(-6, 7)),
    "RNL": tuple(10.0**k for k in range(-6, 7)),
    "RCT": tuple(i / 10.0 for i in range(1, 10)),
    "HF": (None,),
    "RWWR": tuple(i / 10.0 for i in range(1, 10)),
    "DW1": (None,),
    "DW2": tuple(i / 10.0 for i in range(1, 11)),
    "BOP": tuple(10.0**k for k in range(-6, 3)),
}


@dataclass(frozen=True)
class MethodConfig:
    """A method tag plus the grid of candidate hyperparameter values."""

    method: str
    grid: tuple[float | None, ...]

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise InputError(f"unknown method {self.method!r}")
        if len(self.grid) == 0:
            raise InputError(f"{self.method}: grid must not be empty")
        if self.method in PARAMETER_FREE:
            if tuple(self.grid) != (None,):
                raise InputError(f"{self.method} takes no parameter; use the singleton grid")
        elif any(v is None for v in self.grid):
            raise InputError(f"{self.method}: grid values must be numbers")

    @classmethod
    def default(cls, method: str) -> "MethodConfig":
        if method not in DEFAULT_GRIDS:
            raise InputError(f"unknown method {method!r}")
        return cls(method=method, grid=DEFAULT_GRIDS[method])


@dataclass(frozen=True)
class ExperimentConfig:
    """Benchmark settings: rates, repetitions, folds, methods, seed."""

    labeling_rates: tuple[float, ...] = DEFAULT_LABELING_RATES
    runs: int = 20
    outer_folds: int = 10
    inner_folds: int = 10
    methods: tuple[MethodConfig, ...] = ()
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.labeling_rates:
            raise InputError("at least one labeling rate is required")
        for rate in self.labeling_rates:
            if not 0 < rate <= 1:
                raise InputError(f"labeling rate must lie in (0, 1], got {rate}")
        if self.runs < 1:
            raise InputError("runs must be at least 1")
        if self.outer_folds < 2 or self.inner_folds < 2:
            raise InputError("fold counts must be at least 2")
        if not self.methods:
            object.__setattr__(
                self, "methods", tuple(MethodConfig.default(m) for m in METHODS)
            )


@dataclass(frozen=True)
class CellResult:
    """One (method, rate, run) measurement."""

    method: str
    rate: float
    run: int
    accuracy: float | None
    parameter: float | None
    seconds: float


@dataclass(frozen=True)
class ExperimentReport:
    """All cell results plus the configuration that produced them."""

    cells: tuple[CellResult, ...]
    labeling_rates: tuple[float, ...]
    runs: int
    methods: tuple[str, ...]
    seed: int

    def mean_accuracy(self, method: str, rate: float) -> float | None:
        values = [
            c.accuracy
            for c in self.cells
            if c.method == method and c.rate == rate and c.accuracy is not None
        ]
        return float(np.mean(values)) if values else None

    def mean_seconds(self, method: str, rate: float) -> float:
        values = [c.seconds for c in self.cells if c.method == method and c.rate == rate]
        return float(np.mean(values))

    def to_json_dict(self) -> dict:
        """Deterministic JSON payload. Wall times are deliberately excluded
        so that identical seeds produce byte-identical documents; timings
        live in the separate timing table."""
        return {
            "seed": self.seed,
            "runs": self.runs,
            "labeling_rates": [_round12(r) for r in self.labeling_rates],
            "methods": list(self.methods),
            "cells": [
                {
                    "method": c.method,
                    "rate": _round12(c.rate),
                    "run": c.run,
                    "accuracy": _round12(c.accuracy),
                    "parameter": _round12(c.parameter),
                }
                for c in self.cells
            ],
            "mean_accuracy": [
                {
                    "method": m,
                    "rate": _round12(r),
                    "accuracy": _round12(self.mean_accuracy(m, r)),
                }
                for m in self.methods
                for r in self.labeling_rates
            ],
        }

    def aggregate_csv(self) -> str:
        """Method-by-rate mean accuracy table."""
        lines = ["method,rate,mean_accuracy"]
        for m in self.methods:
            for r in self.labeling_rates:
                mean = self.mean_accuracy(m, r)
                lines.append(f"{m},{_fmt12(r)},{'' if mean is None else _fmt12(mean)}")
        return "\n".join(lines) + "\n"

    def timing_csv(self) -> str:
        """Mean wall-clock seconds per classify call, per method and rate."""
        lines = ["method,rate,mean_seconds"]
        for m in self.methods:
            for r in self.labeling_rates:
                lines.append(f"{m},{_fmt12(r)},{_fmt12(self.mean_seconds(m, r))}")
        return "\n".join(lines) + "\n"


def _fmt12(x: float) -> str:
    return f"{x:.12g}"


def _round12(x: float | None) -> float | None:
    return None if x is None else float(f"{x:.12g}")


def mask_labels(
    labels: LabelAssignment, rate: float, rng: np.random.Generator
) -> tuple[LabelAssignment, np.ndarray]:
    """Keep a stratified fraction of the labels, masking the rest.

    ceil(rate * labeled count) nodes keep their labels, allocated across
    classes by largest-remainder rounding of the per-class quotas, then
    adjusted so every class keeps at least two seeds. Returns the masked
    assignment and the sorted array of masked (test) node indices.
    """
    if not 0 < rate <= 1:
        raise InputError(f"labeling rate must lie in (0, 1], got {rate}")
    sizes = labels.class_sizes()
    m = labels.m
    total_labeled = int(sizes.sum())
    target = math.ceil(rate * total_labeled)
    if target < 2 * m:
        raise InputError(
            f"rate {rate} keeps only {target} seeds but {2 * m} are needed "
            f"to retain 2 per class"
        )
    if np.any(sizes < 2):
        c = int(np.flatnonzero(sizes < 2)[0])
        raise DegenerateClassError(f"class {c} has fewer than 2 labeled nodes")
    quotas = rate * sizes
    kept = np.floor(quotas).astype(np.int64)
    remainder = target - int(kept.sum())
    if remainder > 0:
        order = np.argsort(-(quotas - kept), kind="stable")
        for c in order[:remainder]:
            kept[c] += 1
    # Floor: raise starving classes to 2 seeds, paying from the classes
    # currently holding the largest surplus over their quota.
    while np.any((kept < 2) & (kept < sizes)):
        needy = int(np.flatnonzero((kept < 2) & (kept < sizes))[0])
        donors = np.flatnonzero((kept > 2) & (np.arange(m) != needy))
        if donors.size == 0:
            raise InputError(f"rate {rate} cannot keep 2 seeds in every class")
        donor = int(donors[np.argmax((kept - quotas)[donors])])
        kept[donor] -= 1
        kept[needy] += 1
    kept = np.minimum(kept, sizes)
    train = np.zeros_like(labels.indicator)
    test: list[int] = []
    for c in range(m):
        members = labels.class_members(c)
        order = rng.permutation(members)
        keep = order[: kept[c]]
        train[keep, c] = 1.0
        test.extend(order[kept[c]:].tolist())
    return LabelAssignment(train), np.sort(np.asarray(test, dtype=np.int64))


def _inner_folds(
    seeds: np.ndarray, k: int, rng: np.random.Generator
) -> list[np.ndarray]:
    """Randomly partition the seed nodes into at most k nonempty folds."""
    order = rng.permutation(seeds)
    return [fold for fold in np.array_split(order, k) if fold.size > 0]


def nested_cv_tune(
    method: MethodConfig,
    graph: Graph,
    train_labels: LabelAssignment,
    inner_folds: int,
    rng: np.random.Generator,
) -> float | None:
    """Pick the grid value with the best mean inner-fold accuracy.

    The kept seeds are partitioned into ``inner_folds`` random folds;
    each candidate value is trained with one fold of seeds masked and
    scored on that fold, and the best mean accuracy wins with ties going
    to the smallest value. Folds whose removal starves a class below two
    seeds are skipped (with a warning) for every candidate alike.
    Singleton grids return immediately without any fold work.
    """
    if inner_folds < 2:
        raise InputError("inner_folds must be at least 2")
    grid = method.grid
    if len(grid) == 1:
        return grid[0]
    seeds = train_labels.labeled_nodes
    truth = train_labels.labels
    folds = _inner_folds(seeds, inner_folds, rng)
    usable: list[np.ndarray] = []
    for fold in folds:
        reduced = train_labels.indicator.copy()
        reduced[fold] = 0.0
        if np.all(reduced.sum(axis=0) >= 2):
            usable.append(fold)
        else:
            warnings.warn(
                f"skipping an inner fold of {fold.size} seed(s): removing it "
                f"leaves a class with fewer than 2 seeds",
                stacklevel=2,
            )
    if not usable:
        raise DegenerateClassError(
            "every inner fold leaves some class below 2 seeds; "
            "not enough labeled nodes to tune"
        )
    best_value: float | None = None
    best_score = -np.inf
    for value in sorted(grid):
        model = build_model(graph, value) if method.method == "BOP" else None
        fold_scores = []
        for fold in usable:
            reduced = train_labels.indicator.copy()
            reduced[fold] = 0.0
            fold_labels = LabelAssignment(reduced)
            if model is not None:
                # The model depends only on the graph and theta, so it is
                # shared across the folds of one candidate value.
                pred = bop_classify(model, fold_labels)
            else:
                pred = classify(graph, fold_labels, ClassifierSpec(method.method, value))
            fold_scores.append(float(np.mean(pred.labels[fold] == truth[fold])))
        score = float(np.mean(fold_scores))
        if score > best_score:
            best_score = score
            best_value = value
    return best_value


def accuracy_on(
    predicted: np.ndarray, truth: np.ndarray, test_nodes: np.ndarray
) -> float | None:
    """Fraction of test nodes whose predicted label matches the truth."""
    if test_nodes.size == 0:
        return None
    return float(np.mean(predicted[test_nodes] == truth[test_nodes]))


def _run_cell(
    graph: Graph,
    labels: LabelAssignment,
    config: ExperimentConfig,
    rate_index: int,
    run_index: int,
) -> list[CellResult]:
    rate = config.labeling_rates[rate_index]
    seq = np.random.SeedSequence(config.seed, spawn_key=(rate_index, run_index))
    rng = np.random.default_rng(seq)
    train, test_nodes = mask_labels(labels, rate, rng)
    truth = labels.labels
    results = []
    for method in config.methods:
        parameter = nested_cv_tune(method, graph, train, config.inner_folds, rng)
        spec = ClassifierSpec(method.method, parameter)
        started = time.perf_counter()
        prediction = classify(graph, train, spec)
        seconds = time.perf_counter() - started
        results.append(
            CellResult(
                method=method.method,
                rate=rate,
                run=run_index,
                accuracy=accuracy_on(prediction.labels, truth, test_nodes),
                parameter=parameter,
                seconds=seconds,
            )
        )
    return results


def _run_cell_star(args) -> list[CellResult]:
    return _run_cell(*args)


def run_experiment(
    graph: Graph, labels: LabelAssignment, config: ExperimentConfig, jobs: int = 1
) -> ExperimentReport:
    """Execute the full protocol: mask, tune, classify, and score every cell.

    Any failure inside a cell aborts the whole experiment with context.
    With ``jobs > 1`` the (rate, run) cells execute in worker processes;
    accuracies and tuned parameters are identical to the sequential run
    because every cell owns an RNG derived from the seed and the cell
    coordinates.
    """
    coords = [
        (ri, run)
        for ri in range(len(config.labeling_rates))
        for run in range(config.runs)
    ]
    if jobs < 1:
        raise InputError("jobs must be at least 1")
    if jobs == 1:
        batches = [_run_cell(graph, labels, config, ri, run) for ri, run in coords]
    else:
        tasks = [(graph, labels, config, ri, run) for ri, run in coords]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            batches = list(pool.map(_run_cell_star, tasks))
    cells = tuple(cell for batch in batches for cell in batch)
    return ExperimentReport(
        cells=cells,
        labeling_rates=config.labeling_rates,
        runs=config.runs,
        methods=tuple(m.method for m in config.methods),
        seed=config.seed,
    )


def paired_t_test_one_sided(
    scores_a: Sequence[float], scores_b: Sequence[float]
) -> float:
    """One-sided paired t-test p-value for mean(A) > mean(B).

    Degenerate difference samples follow fixed conventions: identical
    sequences give p = 0.5, and a constant nonzero difference gives
    p = 0 or 1 according to its sign.
    """
    a = np.asarray(scores_a, dtype=np.float64)
    b = np.asarray(scores_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise InputError("paired samples must be 1-d sequences of equal length")
    if a.size < 2:
        raise InputError("paired t-test needs at least 2 observations")
    diff = a - b
    mean = float(diff.mean())
    sd = float(diff.std(ddof=1))
    if sd == 0.0:
        if mean > 0:
            return 0.0
        if mean < 0:
            return 1.0
        return 0.5
    statistic = mean / (sd / math.sqrt(diff.size))
    return float(stats.t.sf(statistic, diff.size - 1))


def borda_ranking(
    mean_accuracies: Mapping[str, Sequence[float]],
) -> list[tuple[str, float]]:
    """Aggregate per-dataset accuracies into a Borda ranking.

    On each dataset the best of the k methods earns k points down to 1
    for the worst, with exact ties sharing the mean of their positional
    points. Ratings are summed over datasets and methods are returned in
    descending rating order (names break final ties deterministically).
    """
    methods = list(mean_accuracies.keys())
    if not methods:
        raise InputError("no methods to rank")
    table = np.asarray([list(mean_accuracies[m]) for m in methods], dtype=np.float64)
    if table.ndim != 2 or table.shape[1] == 0:
        raise InputError("each method needs at least one dataset accuracy")
    if np.any(np.isnan(table)):
        raise InputError("missing accuracy cell")
    k = len(methods)
    ratings = np.zeros(k)
    for column in table.T:
        ranks = stats.rankdata(-column, method="average")
        ratings += k + 1 - ranks
    order = sorted(range(k), key=lambda idx: (-ratings[idx], methods[idx]))
    return [(methods[idx], float(ratings[idx])) for idx in order]


def time_method(
    spec: ClassifierSpec,
    graph: Graph,
    labels: LabelAssignment,
    repetitions: int = 1,
) -> float:
    """Mean wall-clock seconds of a full classify call.

    Each repetition rebuilds everything the method needs (the
    bag-of-paths model, kernel, or absorbing systems included).
    """
    if repetitions < 1:
        raise InputError("repetitions must be at least 1")
    elapsed = []
    for _ in range(repetitions):
        started = time.perf_counter()
        classify(graph, labels, spec)
        elapsed.append(time.perf_counter() - started)
    return float(np.mean(elapsed))
