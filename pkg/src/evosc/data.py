"""Dataset container and on-disk manifest format.

A dataset lives in a directory: a `manifest.txt` of key = value lines
naming per-step matrix CSVs (one row per feature, comma separated, 17
significant digits so doubles round-trip exactly) plus an optional labels
CSV. Timestamps are stored already normalized to [0, 1].
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import LoadError
from .odesolve import ControlPath

MANIFEST_VERSION = 1
MANIFEST_NAME = "manifest.txt"


@dataclass
class TimeSeriesDataset:
    timestamps: np.ndarray        # (T,) strictly increasing in [0, 1]
    snapshots: np.ndarray         # (T, D, N)
    labels: np.ndarray | None = None   # (N,) ground truth, constant over time
    provenance: str = ""

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype=float)
        self.snapshots = np.asarray(self.snapshots, dtype=float)
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)

    @property
    def n_steps(self) -> int:
        return len(self.timestamps)

    @property
    def n_features(self) -> int:
        return self.snapshots.shape[1]

    @property
    def n_points(self) -> int:
        return self.snapshots.shape[2]

    def control_path(self) -> ControlPath:
        return ControlPath(self.timestamps, self.snapshots)

    def restrict(self, indices) -> "TimeSeriesDataset":
        """Sub-dataset keeping only the given snapshot indices."""
        idx = np.asarray(indices, dtype=int)
        return TimeSeriesDataset(self.timestamps[idx], self.snapshots[idx],
                                 self.labels, self.provenance)


def atomic_write(path, text: str) -> None:
    """Write-temp-then-rename so readers never see a partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def write_matrix_csv(path, mat: np.ndarray) -> None:
    rows = [",".join(f"{v:.17g}" for v in row) for row in np.asarray(mat, dtype=float)]
    atomic_write(path, "\n".join(rows) + "\n")


def read_matrix_csv(path) -> np.ndarray:
    try:
        with open(path) as fh:
            rows = [[float(v) for v in line.split(",")] for line in fh.read().splitlines() if line]
    except OSError as exc:
        raise LoadError(f"matrix file '{path}': {exc}") from exc
    except ValueError as exc:
        raise LoadError(f"matrix file '{path}': bad number: {exc}") from exc
    widths = {len(r) for r in rows}
    if not rows or len(widths) != 1:
        raise LoadError(f"matrix file '{path}': ragged or empty rows")
    return np.array(rows)


def write_labels_csv(path, labels) -> None:
    """One CSV line of integers per row of `labels` (1-D input is one line)."""
    arr = np.atleast_2d(np.asarray(labels, dtype=int))
    atomic_write(path, "\n".join(",".join(str(v) for v in row) for row in arr) + "\n")


def read_labels_csv(path) -> np.ndarray:
    try:
        with open(path) as fh:
            rows = [[int(v) for v in line.split(",")] for line in fh.read().splitlines() if line]
    except OSError as exc:
        raise LoadError(f"labels file '{path}': {exc}") from exc
    except ValueError as exc:
        raise LoadError(f"labels file '{path}': bad integer: {exc}") from exc
    arr = np.array(rows)
    return arr[0] if arr.shape[0] == 1 else arr


def save_dataset(dataset: TimeSeriesDataset, outdir) -> str:
    """Write snapshots, optional labels and the manifest; returns manifest path."""
    os.makedirs(outdir, exist_ok=True)
    files = []
    for j in range(dataset.n_steps):
        name = f"X_{j:03d}.csv"
        write_matrix_csv(os.path.join(outdir, name), dataset.snapshots[j])
        files.append(name)
    lines = [
        f"format_version = {MANIFEST_VERSION}",
        f"D = {dataset.n_features}",
        f"N = {dataset.n_points}",
        f"T = {dataset.n_steps}",
        "timestamps = " + ",".join(f"{t:.17g}" for t in dataset.timestamps),
        "snapshot_files = " + ",".join(files),
    ]
    if dataset.labels is not None:
        write_labels_csv(os.path.join(outdir, "labels.csv"), dataset.labels)
        lines.append("labels_file = labels.csv")
    if dataset.provenance:
        lines.append(f"provenance = {dataset.provenance}")
    manifest = os.path.join(outdir, MANIFEST_NAME)
    atomic_write(manifest, "\n".join(lines) + "\n")
    return manifest


def load_dataset(manifest_path) -> TimeSeriesDataset:
    """Load and validate a dataset; errors name the offending field."""
    if os.path.isdir(manifest_path):
        manifest_path = os.path.join(manifest_path, MANIFEST_NAME)
    try:
        with open(manifest_path) as fh:
            raw = fh.read().splitlines()
    except OSError as exc:
        raise LoadError(f"manifest '{manifest_path}': {exc}") from exc
    fields: dict[str, str] = {}
    for line in raw:
        if not line.strip():
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise LoadError(f"manifest: line without '=': {line!r}")
        fields[key.strip()] = value.strip()

    def need(key):
        if key not in fields:
            raise LoadError(f"manifest: missing field '{key}'")
        return fields[key]

    if int(need("format_version")) != MANIFEST_VERSION:
        raise LoadError(f"manifest: unsupported format_version {fields['format_version']}")
    d, n, t = int(need("D")), int(need("N")), int(need("T"))
    try:
        timestamps = np.array([float(v) for v in need("timestamps").split(",")])
    except ValueError as exc:
        raise LoadError(f"manifest: bad 'timestamps': {exc}") from exc
    if len(timestamps) != t:
        raise LoadError(f"manifest: 'timestamps' has {len(timestamps)} entries, T = {t}")
    if np.any(np.diff(timestamps) <= 0):
        raise LoadError("manifest: 'timestamps' must be strictly increasing")
    if timestamps[0] < 0 or timestamps[-1] > 1:
        raise LoadError("manifest: 'timestamps' must lie in [0, 1]")
    files = need("snapshot_files").split(",")
    if len(files) != t:
        raise LoadError(f"manifest: 'snapshot_files' lists {len(files)} files, T = {t}")

    base = os.path.dirname(os.path.abspath(manifest_path))
    snapshots = np.empty((t, d, n))
    for j, name in enumerate(files):
        m = read_matrix_csv(os.path.join(base, name.strip()))
        if m.shape != (d, n):
            raise LoadError(f"manifest: snapshot '{name.strip()}' has shape {m.shape}, expected {(d, n)}")
        snapshots[j] = m

    labels = None
    if "labels_file" in fields:
        labels = read_labels_csv(os.path.join(base, fields["labels_file"]))
        if labels.ndim != 1 or len(labels) != n:
            raise LoadError(f"manifest: 'labels_file' must hold one line of {n} integers")
    return TimeSeriesDataset(timestamps, snapshots, labels, fields.get("provenance", ""))
