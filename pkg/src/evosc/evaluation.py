"""Clustering accuracy under optimal label matching and per-time curves."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .data import atomic_write
from .errors import ContractError


def _confusion(pred: np.ndarray, truth: np.ndarray, k: int) -> np.ndarray:
    m = np.zeros((k, k), dtype=int)
    for p, t in zip(pred, truth):
        m[p, t] += 1
    return m


def match_labels(pred: np.ndarray, truth: np.ndarray) -> tuple[float, dict]:
    """Best-permutation accuracy and the matching used.

    Exhaustive permutation search for k <= 8, otherwise optimal assignment
    on the k x k confusion matrix; both give the identical optimum.
    """
    pred = np.asarray(pred, dtype=int)
    truth = np.asarray(truth, dtype=int)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ContractError("match_labels: label vectors must be 1-D and equal length")
    k = int(max(pred.max(initial=0), truth.max(initial=0))) + 1
    conf = _confusion(pred, truth, k)
    if k <= 8:
        best, best_perm = -1, None
        for perm in itertools.permutations(range(k)):
            hits = sum(conf[i, perm[i]] for i in range(k))
            if hits > best:
                best, best_perm = hits, perm
        mapping = {i: best_perm[i] for i in range(k)}
        return best / len(pred), mapping
    rows, cols = linear_sum_assignment(-conf)
    hits = conf[rows, cols].sum()
    return hits / len(pred), {int(r): int(c) for r, c in zip(rows, cols)}


def clustering_accuracy(pred, truth) -> float:
    """Fraction of points correct under the best relabeling of pred."""
    return match_labels(pred, truth)[0]


@dataclass
class EvalReport:
    timestamps: list = dc_field(default_factory=list)
    accuracies: list = dc_field(default_factory=list)
    matchings: list = dc_field(default_factory=list)

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def misclassification_rates(self) -> list:
        return [1.0 - a for a in self.accuracies]

    def to_csv(self, path):
        lines = ["time,accuracy,misclassification"]
        for t, a in zip(self.timestamps, self.accuracies):
            lines.append(f"{t:.17g},{a:.17g},{1.0 - a:.17g}")
        atomic_write(path, "\n".join(lines) + "\n")

    def to_json(self, path, extra: dict | None = None):
        summary = {
            "mean_accuracy": self.mean_accuracy,
            "mean_misclassification": 1.0 - self.mean_accuracy,
            "per_step_accuracy": list(self.accuracies),
            "timestamps": list(self.timestamps),
        }
        if extra:
            summary.update(extra)
        atomic_write(path, json.dumps(summary, indent=2, sort_keys=True) + "\n")


def accuracy_curve(pred_per_step, truth_per_step, timestamps=None) -> EvalReport:
    """Per-time-step accuracy against ground truth.

    truth_per_step may be a single label vector (constant truth) or one
    vector per step.
    """
    pred_per_step = [np.asarray(p, dtype=int) for p in np.atleast_2d(pred_per_step)]
    truth = np.asarray(truth_per_step, dtype=int)
    if truth.ndim == 1:
        truths = [truth] * len(pred_per_step)
    else:
        truths = [t for t in truth]
    if len(truths) != len(pred_per_step):
        raise ContractError("accuracy_curve: prediction and truth step counts differ")
    report = EvalReport()
    report.timestamps = (list(timestamps) if timestamps is not None
                         else list(range(1, len(pred_per_step) + 1)))
    for p, t in zip(pred_per_step, truths):
        acc, mapping = match_labels(p, t)
        report.accuracies.append(acc)
        report.matchings.append(mapping)
    return report
