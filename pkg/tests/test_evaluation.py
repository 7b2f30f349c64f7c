import numpy as np
import pytest

from evosc.errors import ContractError
from evosc.evaluation import EvalReport, accuracy_curve, clustering_accuracy, match_labels
from evosc.linalg import Rng


def test_identical_labels():
    labels = np.array([0, 1, 2, 0, 1, 2])
    assert clustering_accuracy(labels, labels) == 1.0


def test_permutation_invariance():
    rng = Rng(0)
    truth = rng.integers(0, 4) * np.ones(0, dtype=int)  # noqa: F841 (seed burn)
    truth = np.array([rng.integers(0, 4) for _ in range(50)])
    perm = np.array([2, 3, 1, 0])
    assert clustering_accuracy(perm[truth], truth) == 1.0


def test_known_fraction():
    truth = np.zeros(10, dtype=int)
    truth[5:] = 1
    pred = truth.copy()
    pred[0] = 1   # one mistake
    assert clustering_accuracy(pred, truth) == 0.9


def test_104_of_105():
    truth = np.repeat(np.arange(5), 21)
    pred = truth.copy()
    pred[17] = (pred[17] + 1) % 5
    assert abs(clustering_accuracy(pred, truth) - 104 / 105) <= 1e-15


def test_matching_is_a_mapping():
    truth = np.array([0, 0, 1, 1, 2, 2])
    pred = np.array([1, 1, 2, 2, 0, 0])
    acc, mapping = match_labels(pred, truth)
    assert acc == 1.0
    assert mapping[1] == 0 and mapping[2] == 1 and mapping[0] == 2


def test_large_k_uses_assignment_route():
    rng = Rng(1)
    truth = np.array([rng.integers(0, 12) for _ in range(240)])
    perm = Rng(2).permutation(12)
    assert clustering_accuracy(perm[truth], truth) == 1.0


def test_chance_level_two_clusters():
    """Random labels against balanced truth stay near 1/2 (above, by matching)."""
    rng = Rng(3)
    truth = np.repeat([0, 1], 100)
    accs = []
    for _ in range(50):
        pred = np.array([rng.integers(0, 2) for _ in range(200)])
        accs.append(clustering_accuracy(pred, truth))
    mean = np.mean(accs)
    assert 0.5 <= mean <= 0.60


def test_shape_mismatch_rejected():
    with pytest.raises(ContractError):
        clustering_accuracy(np.zeros(3, dtype=int), np.zeros(4, dtype=int))


def test_accuracy_curve_constant_truth():
    truth = np.array([0, 0, 1, 1])
    preds = [truth, np.array([1, 1, 0, 0]), np.array([0, 1, 0, 1])]
    report = accuracy_curve(preds, truth, timestamps=[0.1, 0.2, 0.3])
    assert report.accuracies[0] == 1.0
    assert report.accuracies[1] == 1.0
    assert report.accuracies[2] == 0.5
    assert abs(report.mean_accuracy - (1 + 1 + 0.5) / 3) <= 1e-15
    assert report.timestamps == [0.1, 0.2, 0.3]


def test_accuracy_curve_per_step_truth():
    preds = np.array([[0, 1], [1, 0]])
    truths = np.array([[0, 1], [0, 1]])
    report = accuracy_curve(preds, truths)
    assert report.accuracies == [1.0, 1.0]


def test_accuracy_curve_step_count_mismatch():
    with pytest.raises(ContractError):
        accuracy_curve(np.zeros((2, 4), dtype=int), np.zeros((3, 4), dtype=int))


def test_report_serialization(tmp_path):
    report = EvalReport([0.5, 1.0], [0.9, 1.0], [{}, {}])
    csv_path, json_path = tmp_path / "r.csv", tmp_path / "r.json"
    report.to_csv(csv_path)
    report.to_json(json_path)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "time,accuracy,misclassification"
    assert len(lines) == 3
    import json
    summary = json.loads(json_path.read_text())
    assert abs(summary["mean_accuracy"] - 0.95) <= 1e-15
