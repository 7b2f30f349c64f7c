"""Synthetic evolving union-of-subspaces generator.

At the first time step each cluster is sampled from a random orthonormal
basis; every subsequent step applies one random-plane Givens rotation with
an angle drawn uniformly from (0, max_angle), so the subspace structure
drifts while all labels stay fixed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import TimeSeriesDataset
from .errors import ContractError
from .linalg import Rng, orth


@dataclass
class SynthConfig:
    ambient_dim: int = 30         # D
    subspace_dim: int = 4         # d
    n_subspaces: int = 5
    points_per_subspace: int = 21
    n_steps: int = 10             # T
    noise: float = 0.1
    max_angle: float = np.pi / 10
    seed: int = 0
    shuffle: bool = True
    fixed_plane: bool = False     # reuse one rotation plane across all steps

    def __post_init__(self):
        if self.subspace_dim >= self.ambient_dim:
            raise ContractError("SynthConfig: need subspace_dim < ambient_dim")
        if min(self.n_subspaces, self.points_per_subspace, self.n_steps) < 1:
            raise ContractError("SynthConfig: counts must be positive")


def givens(dim: int, a: int, b: int, theta: float) -> np.ndarray:
    """Rotation by theta in the (a, b) coordinate plane of R^dim."""
    if not (0 <= a < b < dim):
        raise ContractError(f"givens: need 0 <= a < b < dim, got a={a}, b={b}, dim={dim}")
    g = np.eye(dim)
    c, s = np.cos(theta), np.sin(theta)
    g[a, a] = c
    g[b, b] = c
    g[a, b] = -s
    g[b, a] = s
    return g


def generate(cfg: SynthConfig) -> TimeSeriesDataset:
    """Build the evolving dataset; deterministic under cfg.seed.

    Timestamps are 1..T mapped to (0, 1] by dividing by T. The column
    shuffle permutation (if any) is recorded in the provenance string.
    """
    rng = Rng(cfg.seed)
    d_amb, d_sub = cfg.ambient_dim, cfg.subspace_dim
    blocks, labels = [], []
    for i in range(cfg.n_subspaces):
        q = rng.randn(d_sub, cfg.points_per_subspace)
        basis = orth(rng.randn(d_amb, d_sub))
        block = basis @ q + cfg.noise * rng.randn(d_amb, cfg.points_per_subspace)
        blocks.append(block)
        labels.extend([i] * cfg.points_per_subspace)
    x1 = np.concatenate(blocks, axis=1)
    labels = np.array(labels)

    perm_note = "unshuffled"
    if cfg.shuffle:
        perm = rng.permutation(x1.shape[1])
        x1 = x1[:, perm]
        labels = labels[perm]
        perm_note = "perm=" + ",".join(str(p) for p in perm)

    snapshots = [x1]
    plane = None
    for _ in range(cfg.n_steps - 1):
        if plane is None or not cfg.fixed_plane:
            a = rng.integers(0, d_amb)
            b = rng.integers(0, d_amb - 1)
            if b >= a:
                b += 1
            plane = (min(a, b), max(a, b))
        theta = rng.uniform(0.0, cfg.max_angle)
        snapshots.append(givens(d_amb, plane[0], plane[1], theta) @ snapshots[-1])

    timestamps = np.arange(1, cfg.n_steps + 1) / cfg.n_steps
    provenance = (f"synth seed={cfg.seed} D={d_amb} d={d_sub} n={cfg.n_subspaces} "
                  f"p={cfg.points_per_subspace} T={cfg.n_steps} noise={cfg.noise} "
                  f"max_angle={cfg.max_angle:.17g} {perm_note}")
    return TimeSeriesDataset(timestamps, np.array(snapshots), labels, provenance)
