import json
import os

import numpy as np
import pytest

from evosc.cli import main
from evosc.data import load_dataset, read_labels_csv


SMALL_CONFIG = """
# small problem so the pipeline runs in seconds
synth_ambient_dim = 6
synth_subspace_dim = 2
synth_subspaces = 2
synth_points = 6
synth_steps = 3
synth_noise = 0.05
epochs = 3
learning_rate = 0.005
substeps_per_unit = 10
hidden = 8
k = 2
restarts = 5
"""


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    cfg = root / "run.cfg"
    cfg.write_text(SMALL_CONFIG)
    return root, str(cfg)


def test_no_arguments_is_usage_error(capsys):
    assert main([]) == 1


def test_missing_required_flag_is_usage_error():
    assert main(["train", "--out", "/tmp/x"]) == 1


def test_generate(workspace):
    root, cfg = workspace
    out = str(root / "data")
    assert main(["generate", "--config", cfg, "--seed", "0", "--out", out]) == 0
    data = load_dataset(out)
    assert data.snapshots.shape == (3, 6, 12)
    assert data.labels is not None


def test_train(workspace):
    root, cfg = workspace
    out = str(root / "run")
    code = main(["train", "--config", cfg, "--seed", "0",
                 "--data", str(root / "data"), "--out", out])
    assert code == 0
    assert os.path.exists(os.path.join(out, "checkpoint.txt"))
    assert os.path.exists(os.path.join(out, "train_report.csv"))
    summary = json.loads(open(os.path.join(out, "train_summary.json")).read())
    assert "final_mse" in summary and summary["config"]["epochs"] == 3


def test_cluster_at_unobserved_times(workspace):
    root, cfg = workspace
    out = str(root / "clust")
    code = main(["cluster", "--config", cfg, "--seed", "0",
                 "--data", str(root / "data"),
                 "--checkpoint", str(root / "run" / "checkpoint.txt"),
                 "--times", "0.5,0.8", "--out", out])
    assert code == 0
    labels = read_labels_csv(os.path.join(out, "labels.csv"))
    assert np.atleast_2d(labels).shape == (2, 12)
    times = open(os.path.join(out, "times.csv")).read().strip().split(",")
    assert [float(t) for t in times] == [0.5, 0.8]


def test_evaluate_against_dataset_truth(workspace):
    root, cfg = workspace
    out = str(root / "eval")
    code = main(["evaluate", "--labels", str(root / "clust" / "labels.csv"),
                 "--truth", str(root / "data"), "--out", out])
    assert code == 0
    summary = json.loads(open(os.path.join(out, "eval_summary.json")).read())
    assert 0.0 <= summary["mean_accuracy"] <= 1.0
    assert len(summary["per_step_accuracy"]) == 2


def test_baseline_ssc(workspace):
    root, cfg = workspace
    out = str(root / "base_ssc")
    code = main(["baseline", "--config", cfg, "--seed", "0",
                 "--data", str(root / "data"), "--method", "ssc", "--out", out])
    assert code == 0
    labels = np.atleast_2d(read_labels_csv(os.path.join(out, "labels.csv")))
    assert labels.shape == (3, 12)
    assert os.path.exists(os.path.join(out, "eval_summary.json"))


def test_baseline_affect(workspace):
    root, cfg = workspace
    out = str(root / "base_affect")
    code = main(["baseline", "--config", cfg, "--seed", "0",
                 "--data", str(root / "data"), "--method", "affect", "--out", out])
    assert code == 0


def test_baseline_cesm(workspace):
    root, cfg = workspace
    out = str(root / "base_cesm")
    code = main(["baseline", "--config", cfg, "--seed", "0",
                 "--data", str(root / "data"), "--method", "cesm", "--out", out])
    assert code == 0


def test_runtime_failure_exit_code(workspace, tmp_path):
    root, cfg = workspace
    missing = str(tmp_path / "nowhere")
    assert main(["train", "--config", cfg, "--data", missing,
                 "--out", str(tmp_path / "out")]) == 2


def test_bad_config_exit_code(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("no_such_key = 1\n")
    assert main(["generate", "--config", str(bad), "--out", str(tmp_path / "o")]) == 2
