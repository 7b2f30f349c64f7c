"""Command-line pipeline: generate, train, cluster, evaluate, baseline.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import baselines, cluster as clustering, field as field_mod, synth
from .config import RunConfig, load_config
from .data import (TimeSeriesDataset, load_dataset, read_labels_csv, save_dataset,
                   write_labels_csv)
from .errors import EvoscError
from .evaluation import accuracy_curve
from .linalg import Rng
from .odesolve import ode_solve
from .train import initial_state, train as run_training


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="evosc", description="Evolutionary subspace clustering toolchain")
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--config", default=None, help="key = value config file")
        p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("generate", help="write a synthetic dataset manifest")
    common(p)

    p = sub.add_parser("train", help="fit the affinity dynamic on a dataset")
    common(p)
    p.add_argument("--data", required=True, help="dataset manifest or directory")

    p = sub.add_parser("cluster", help="cluster at requested times from a checkpoint")
    common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--times", required=True, help="comma-separated times in [0, 1]")

    p = sub.add_parser("evaluate", help="score predicted labels against ground truth")
    common(p)
    p.add_argument("--labels", required=True, help="predicted labels CSV (one line per step)")
    p.add_argument("--truth", required=True, help="ground-truth labels CSV or dataset dir")

    p = sub.add_parser("baseline", help="run a comparison method on a dataset")
    common(p)
    p.add_argument("--data", required=True)
    p.add_argument("--method", required=True, choices=["ssc", "affect", "cesm"])
    return parser


def _load_run_config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def _cluster_states(states, n, k, seed, restarts):
    rng = Rng(seed)
    labels = []
    for h in states:
        a = clustering.affinity(clustering.mat(h.value if hasattr(h, "value") else h))
        labels.append(clustering.spectral_cluster(a, k, rng, restarts))
    return np.array(labels)


def _cmd_generate(args) -> int:
    cfg = _load_run_config(args)
    dataset = synth.generate(cfg.synth_config())
    manifest = save_dataset(dataset, args.out)
    print(f"wrote {manifest}")
    return 0


def _cmd_train(args) -> int:
    cfg = _load_run_config(args)
    dataset = load_dataset(args.data)
    rng = Rng(cfg.seed)
    params0 = field_mod.init_params(rng, dataset.n_points, dataset.n_features,
                                    cfg.hidden, cfg.layers, cfg.init_scheme,
                                    cfg.activation, cfg.append_time)
    params, report = run_training(dataset, params0, cfg.train_config())
    os.makedirs(args.out, exist_ok=True)
    field_mod.save_checkpoint(params, os.path.join(args.out, "checkpoint.txt"))
    report.to_csv(os.path.join(args.out, "train_report.csv"))
    report.to_json(os.path.join(args.out, "train_summary.json"), cfg.echo())
    print(f"final loss {report.epochs[-1]['total']:.6g}, "
          f"convergence epoch {report.convergence_epoch}")
    return 0


def _cmd_cluster(args) -> int:
    cfg = _load_run_config(args)
    dataset = load_dataset(args.data)
    params = field_mod.load_checkpoint(args.checkpoint)
    times = sorted(float(v) for v in args.times.split(","))
    h0 = initial_state(params, cfg.train_config())
    states = ode_solve(h0, params, dataset.control_path(), times,
                       cfg.train_config().solve)
    labels = _cluster_states(states, dataset.n_points, cfg.k, cfg.seed, cfg.restarts)
    os.makedirs(args.out, exist_ok=True)
    write_labels_csv(os.path.join(args.out, "labels.csv"), labels)
    with open(os.path.join(args.out, "times.csv"), "w") as fh:
        fh.write(",".join(f"{t:.17g}" for t in times) + "\n")
    print(f"wrote labels for {len(times)} time(s) to {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    pred = np.atleast_2d(read_labels_csv(args.labels))
    if os.path.isdir(args.truth) or args.truth.endswith("manifest.txt"):
        truth = load_dataset(args.truth).labels
        if truth is None:
            raise EvoscError("evaluate: dataset carries no ground-truth labels")
    else:
        truth = read_labels_csv(args.truth)
    report = accuracy_curve(pred, truth)
    os.makedirs(args.out, exist_ok=True)
    report.to_csv(os.path.join(args.out, "eval_report.csv"))
    report.to_json(os.path.join(args.out, "eval_summary.json"))
    print(f"mean accuracy {report.mean_accuracy:.6g}")
    return 0


def _cmd_baseline(args) -> int:
    cfg = _load_run_config(args)
    dataset = load_dataset(args.data)
    rng = Rng(cfg.seed)
    labels = []
    if args.method == "ssc":
        for x in dataset.snapshots:
            c = baselines.ssc_solve(x, cfg.ssc_config())
            labels.append(clustering.spectral_cluster(clustering.affinity(c), cfg.k,
                                                      rng, cfg.restarts))
    elif args.method == "affect":
        smoothed = None
        for x in dataset.snapshots:
            smoothed = baselines.affect_smooth(smoothed, x, cfg.affect_config())
            a = np.maximum(smoothed, 0.0)
            np.fill_diagonal(a, 0.0)
            labels.append(clustering.spectral_cluster(a, cfg.k, rng, cfg.restarts))
    else:
        coeffs = baselines.cesm_fit(dataset, cfg.cesm_config())
        for c in coeffs:
            labels.append(clustering.spectral_cluster(clustering.affinity(c), cfg.k,
                                                      rng, cfg.restarts))
    labels = np.array(labels)
    os.makedirs(args.out, exist_ok=True)
    write_labels_csv(os.path.join(args.out, "labels.csv"), labels)
    if dataset.labels is not None:
        report = accuracy_curve(labels, dataset.labels, dataset.timestamps)
        report.to_csv(os.path.join(args.out, "eval_report.csv"))
        report.to_json(os.path.join(args.out, "eval_summary.json"),
                       {"method": args.method})
        print(f"{args.method}: mean accuracy {report.mean_accuracy:.6g}")
    else:
        print(f"{args.method}: wrote labels to {args.out}")
    return 0


_COMMANDS = {
    "generate": _cmd_generate,
    "train": _cmd_train,
    "cluster": _cmd_cluster,
    "evaluate": _cmd_evaluate,
    "baseline": _cmd_baseline,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except EvoscError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint():  # console script
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
