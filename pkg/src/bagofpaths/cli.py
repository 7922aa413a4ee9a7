"""Command-line interface.

Subcommands: ``bet`` (betweenness scores), ``classify``, ``benchmark``,
``oracle-check`` (audit the closed form against the path-sum oracle),
and ``generate`` (planted-partition fixtures). Exit codes: 0 ok,
1 input error, 2 numerical error, 3 degenerate-class error.

Every floating-point value is printed with 12 significant digits and
seeded subcommands are byte-deterministic, so outputs work as golden
files. An optional ``--config FILE`` supplies ``key=value`` defaults
mirroring the long flag names; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .betweenness import ScoreVector, bop_betweenness, within_class_betweenness
from .classifiers import METHODS, PARAMETER_FREE, ClassifierSpec, Prediction, classify
from .errors import DegenerateClassError, InputError, NumericalError
from .evaluation import (
    DEFAULT_LABELING_RATES,
    ExperimentConfig,
    MethodConfig,
    nested_cv_tune,
    run_experiment,
)
from .graphs import (
    Graph,
    LabelAssignment,
    generate_planted_partition,
    load_edge_list,
    load_labels,
    write_edge_list,
)
from .model import build_model, path_sum_oracle


def _fmt(x: float) -> str:
    return f"{x:.12g}"


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; route through InputError
    # so that 2 stays reserved for numerical failures.
    def error(self, message):
        raise InputError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="bagofpaths", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: _Parser) -> None:
        p.add_argument("--config", default=None, help="key=value defaults file")
        p.add_argument("--edges", default=None, help="edge list TSV (src dst weight)")
        p.add_argument(
            "--undirected",
            action="store_true",
            default=None,
            help="treat the edge list as undirected",
        )
        p.add_argument("--out", default=None, help="output path (default: stdout)")
        p.add_argument("--format", default=None, choices=("csv", "json"))

    p_bet = sub.add_parser("bet", help="node betweenness, or within-class with labels")
    add_common(p_bet)
    p_bet.add_argument("--theta", type=float, default=None)
    p_bet.add_argument("--labels", default=None, help="labels CSV (node,class)")
    p_bet.add_argument("--class", dest="class_id", type=int, default=None)

    p_cls = sub.add_parser("classify", help="label all nodes with one method")
    add_common(p_cls)
    p_cls.add_argument("--labels", default=None)
    p_cls.add_argument("--method", default=None, choices=METHODS)
    p_cls.add_argument("--param", type=float, default=None)
    p_cls.add_argument("--theta", type=float, default=None)
    p_cls.add_argument(
        "--grid",
        default=None,
        help="comma-separated candidate values, or 'default' for the standard grid",
    )
    p_cls.add_argument("--inner-folds", type=int, default=None)
    p_cls.add_argument("--seed", type=int, default=None)

    p_bench = sub.add_parser("benchmark", help="full masking/tuning/accuracy protocol")
    add_common(p_bench)
    p_bench.add_argument("--labels", default=None)
    p_bench.add_argument("--method", default=None, help="comma-separated method tags")
    p_bench.add_argument("--rates", default=None, help="comma-separated labeling rates")
    p_bench.add_argument("--runs", type=int, default=None)
    p_bench.add_argument("--outer-folds", type=int, default=None)
    p_bench.add_argument("--inner-folds", type=int, default=None)
    p_bench.add_argument("--seed", type=int, default=None)
    p_bench.add_argument("--jobs", type=int, default=None)

    p_oracle = sub.add_parser("oracle-check", help="audit Z against the path-sum oracle")
    add_common(p_oracle)
    p_oracle.add_argument("--theta", type=float, default=None)
    p_oracle.add_argument("--epsilon", type=float, default=None)
    p_oracle.add_argument("--max-n", type=int, default=None)

    p_gen = sub.add_parser("generate", help="write a planted-partition fixture")
    add_common(p_gen)
    p_gen.add_argument("--blocks", type=int, default=None)
    p_gen.add_argument("--block-size", type=int, default=None)
    p_gen.add_argument("--p-in", type=float, default=None)
    p_gen.add_argument("--p-out", type=float, default=None)
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.add_argument("--labels-out", default=None)
    return parser


_CONFIG_CONVERTERS = {
    "edges": str,
    "labels": str,
    "out": str,
    "labels_out": str,
    "format": str,
    "method": str,
    "grid": str,
    "rates": str,
    "theta": float,
    "param": float,
    "epsilon": float,
    "p_in": float,
    "p_out": float,
    "class_id": int,
    "seed": int,
    "runs": int,
    "jobs": int,
    "inner_folds": int,
    "outer_folds": int,
    "max_n": int,
    "blocks": int,
    "block_size": int,
    "undirected": lambda v: v.strip().lower() in ("1", "true", "yes"),
}

_DEFAULTS = {
    "format": "csv",
    "undirected": False,
    "jobs": 1,
    "seed": 0,
    "runs": 20,
    "inner_folds": 10,
    "outer_folds": 10,
    "rates": ",".join(str(r) for r in DEFAULT_LABELING_RATES),
    "epsilon": 1e-8,
    "max_n": 8,
    "blocks": 2,
    "block_size": 25,
    "p_in": 0.5,
    "p_out": 0.05,
}


def _apply_config(args: argparse.Namespace) -> None:
    if getattr(args, "config", None):
        path = Path(args.config)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read config {path}: {exc}") from exc
        for number, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise InputError(f"config line {number}: expected key=value, got {line!r}")
            dest = key.strip().replace("-", "_")
            if dest == "class":
                dest = "class_id"
            if dest not in _CONFIG_CONVERTERS or not hasattr(args, dest):
                raise InputError(f"config line {number}: unknown key {key.strip()!r}")
            if getattr(args, dest) is None:
                try:
                    setattr(args, dest, _CONFIG_CONVERTERS[dest](value.strip()))
                except ValueError as exc:
                    raise InputError(f"config line {number}: {exc}") from exc
    for key, default in _DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, default)


def _require(args: argparse.Namespace, name: str) -> None:
    if getattr(args, name.replace("-", "_")) is None:
        raise InputError(f"--{name} is required for this subcommand")


def _load_graph(args: argparse.Namespace) -> Graph:
    _require(args, "edges")
    return load_edge_list(args.edges, directed=not args.undirected)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _score_csv(scores: ScoreVector) -> str:
    lines = ["node,score"]
    lines.extend(f"{i},{_fmt(v)}" for i, v in enumerate(scores.values))
    return "\n".join(lines) + "\n"


def _score_json(scores: ScoreVector) -> str:
    payload = {"kind": scores.kind, "scores": [float(_fmt(v)) for v in scores.values]}
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _prediction_csv(prediction: Prediction) -> str:
    lines = ["node,label"]
    lines.extend(f"{i},{int(v)}" for i, v in enumerate(prediction.labels))
    return "\n".join(lines) + "\n"


def _prediction_json(prediction: Prediction, meta: dict) -> str:
    payload = dict(meta)
    payload["labels"] = [int(v) for v in prediction.labels]
    payload["scores"] = [
        [float(_fmt(v)) for v in row] for row in prediction.scores
    ]
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _cmd_bet(args: argparse.Namespace) -> int:
    graph = _load_graph(args)
    _require(args, "theta")
    model = build_model(graph, args.theta)
    if args.labels is not None or args.class_id is not None:
        if args.labels is None or args.class_id is None:
            raise InputError("within-class mode needs both --labels and --class")
        labels = load_labels(args.labels, graph.n)
        if not 0 <= args.class_id < labels.m:
            raise InputError(f"--class {args.class_id} out of range [0, {labels.m})")
        scores = within_class_betweenness(model, labels.indicator[:, args.class_id])
    else:
        scores = bop_betweenness(model)
    text = _score_csv(scores) if args.format == "csv" else _score_json(scores)
    _emit(text, args.out)
    return 0


def _parse_grid(text: str, method: str) -> MethodConfig:
    if text == "default":
        return MethodConfig.default(method)
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise InputError(f"bad --grid value: {exc}") from exc
    if not values:
        raise InputError("--grid must list at least one value")
    return MethodConfig(method=method, grid=values)


def _cmd_classify(args: argparse.Namespace) -> int:
    graph = _load_graph(args)
    _require(args, "labels")
    _require(args, "method")
    labels = load_labels(args.labels, graph.n)
    method = args.method
    if method in PARAMETER_FREE and args.param is not None:
        raise InputError(f"{method} takes no parameter")
    if method == "BOP" and args.param is not None:
        raise InputError("BOP takes its parameter via --theta")
    tuned = None
    if args.grid is not None:
        config = _parse_grid(args.grid, method)
        rng = np.random.default_rng(args.seed)
        tuned = nested_cv_tune(config, graph, labels, args.inner_folds, rng)
        parameter = tuned
    elif method in PARAMETER_FREE:
        parameter = None
    elif method == "BOP":
        _require(args, "theta")
        parameter = args.theta
    else:
        _require(args, "param")
        parameter = args.param
    prediction = classify(graph, labels, ClassifierSpec(method, parameter))
    if args.format == "csv":
        text = _prediction_csv(prediction)
    else:
        meta = {
            "method": method,
            "parameter": None if parameter is None else float(_fmt(parameter)),
            "tuned": args.grid is not None,
        }
        text = _prediction_json(prediction, meta)
    _emit(text, args.out)
    return 0


def _cmd_benchmark(args: argparse.Namespace) -> int:
    graph = _load_graph(args)
    _require(args, "labels")
    _require(args, "out")
    labels = load_labels(args.labels, graph.n)
    try:
        rates = tuple(float(r) for r in args.rates.split(",") if r.strip())
    except ValueError as exc:
        raise InputError(f"bad --rates value: {exc}") from exc
    if args.method is None:
        methods = tuple(MethodConfig.default(m) for m in METHODS)
    else:
        methods = tuple(MethodConfig.default(m.strip()) for m in args.method.split(","))
    config = ExperimentConfig(
        labeling_rates=rates,
        runs=args.runs,
        outer_folds=args.outer_folds,
        inner_folds=args.inner_folds,
        methods=methods,
        seed=args.seed,
    )
    report = run_experiment(graph, labels, config, jobs=args.jobs)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(
        json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    (out_dir / "aggregate.csv").write_text(report.aggregate_csv(), encoding="utf-8")
    (out_dir / "timing.csv").write_text(report.timing_csv(), encoding="utf-8")
    sys.stdout.write(f"wrote report.json, aggregate.csv, timing.csv to {out_dir}\n")
    return 0


def _cmd_oracle_check(args: argparse.Namespace) -> int:
    graph = _load_graph(args)
    _require(args, "theta")
    if graph.n > args.max_n:
        raise InputError(f"graph too large for oracle: n={graph.n} exceeds --max-n={args.max_n}")
    model = build_model(graph, args.theta)
    worst = 0.0
    breaches = 0
    for i in range(graph.n):
        for j in range(graph.n):
            estimate = path_sum_oracle(graph, args.theta, i, j, args.epsilon)
            diff = abs(float(model.Z[i, j]) - estimate.value)
            worst = max(worst, diff)
            if diff > args.epsilon + estimate.tail_bound:
                breaches += 1
    sys.stdout.write(f"max |closed-form - oracle| over all pairs: {_fmt(worst)}\n")
    if breaches:
        raise NumericalError(
            f"oracle audit failed: {breaches} pair(s) exceed epsilon + tail bound "
            f"(max diff {_fmt(worst)})"
        )
    return 0


def _cmd_generate(args: argparse.Namespace) -> int:
    _require(args, "out")
    _require(args, "labels-out")
    graph, labels = generate_planted_partition(
        blocks=args.blocks,
        block_size=args.block_size,
        p_in=args.p_in,
        p_out=args.p_out,
        seed=args.seed,
    )
    write_edge_list(graph, args.out)
    lines = ["node,class"]
    truth = labels.labels
    lines.extend(f"{i},{int(truth[i])}" for i in range(labels.n))
    Path(args.labels_out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    sys.stdout.write(
        f"generated {graph.n} nodes, {int((graph.affinity > 0).sum() // 2)} edges, "
        f"{labels.m} classes\n"
    )
    return 0


_COMMANDS = {
    "bet": _cmd_bet,
    "classify": _cmd_classify,
    "benchmark": _cmd_benchmark,
    "oracle-check": _cmd_oracle_check,
    "generate": _cmd_generate,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config(args)
        return _COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    except DegenerateClassError as exc:
        print(f"degenerate class: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
