"""From solver states to cluster labels.

mat/vec are the frozen linear bijection between a length N(N-1)/2 state
vector and the symmetric zero-diagonal coefficient matrix (column-major
over the strict lower triangle). The affinity |C| + |C|^T feeds spectral
clustering on the normalized symmetric Laplacian with k-means++ at the
bottom.
"""

from __future__ import annotations

import numpy as np

from .autodiff import lower_indices
from .errors import ContractError, ShapeError
from .linalg import Rng, sym_eigen


def side_from_state_length(m: int) -> int:
    """Recover N from m = N(N-1)/2, or raise ShapeError."""
    n = int((1 + np.sqrt(1 + 8 * m)) / 2 + 0.5)
    if n * (n - 1) // 2 != m:
        raise ShapeError(f"state length {m} is not of the form N(N-1)/2")
    return n


def mat(h: np.ndarray) -> np.ndarray:
    """Scatter h into the symmetric zero-diagonal N x N coefficient matrix."""
    h = np.asarray(h, dtype=float)
    n = side_from_state_length(h.shape[0])
    rows, cols = lower_indices(n)
    c = np.zeros((n, n))
    c[rows, cols] = h
    c[cols, rows] = h
    return c


def vec(c: np.ndarray) -> np.ndarray:
    """Inverse of mat: stack the strict lower triangle column-major."""
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ShapeError(f"vec: square matrix required, got {c.shape}")
    if np.max(np.abs(c - c.T), initial=0.0) != 0.0:
        raise ContractError("vec: matrix must be exactly symmetric")
    if np.max(np.abs(np.diag(c)), initial=0.0) != 0.0:
        raise ContractError("vec: matrix must have a zero diagonal")
    rows, cols = lower_indices(c.shape[0])
    return c[rows, cols].copy()


def affinity(c: np.ndarray) -> np.ndarray:
    """|C| + |C|^T: symmetric, nonnegative, zero diagonal for zero-diagonal C."""
    c = np.asarray(c, dtype=float)
    return np.abs(c) + np.abs(c).T


def kmeans(points: np.ndarray, k: int, rng: Rng, restarts: int = 20) -> np.ndarray:
    """k-means with k-means++ seeding, best of `restarts` by within-cluster SSQ.

    Lloyd iterations run to an assignment fixpoint (cap 300); an emptied
    cluster seizes the point farthest from its current centroid. Ties in
    assignment break toward the lowest cluster index.
    """
    points = np.asarray(points, dtype=float)
    n = points.shape[0]
    if k > n:
        raise ContractError(f"kmeans: k={k} exceeds the number of points {n}")
    best_labels, best_wcss = None, np.inf
    for _ in range(max(1, restarts)):
        labels, wcss = _kmeans_once(points, k, rng)
        if wcss < best_wcss - 1e-15:
            best_labels, best_wcss = labels, wcss
    return best_labels


def _kmeans_once(points, k, rng):
    n = points.shape[0]
    # k-means++ seeding
    centers = [points[rng.integers(0, n)]]
    for _ in range(1, k):
        d2 = np.min([np.sum((points - c) ** 2, axis=1) for c in centers], axis=0)
        centers.append(points[rng.choice_weighted(d2)])
    centers = np.array(centers)

    labels = None
    for _ in range(300):
        d2 = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(d2, axis=1)  # argmin takes the lowest index on ties
        for j in range(k):
            members = new_labels == j
            if not np.any(members):
                # seize the point farthest from its own centroid
                far = int(np.argmax(d2[np.arange(n), new_labels]))
                new_labels[far] = j
                members = new_labels == j
            centers[j] = points[members].mean(axis=0)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
    wcss = float(np.sum((points - centers[labels]) ** 2))
    return labels, wcss


def spectral_cluster(a: np.ndarray, k: int, rng: Rng, restarts: int = 20) -> np.ndarray:
    """Spectral clustering of a symmetric nonnegative affinity matrix.

    Normalized symmetric Laplacian, eigenvectors of the k smallest
    eigenvalues, unit row normalization (zero rows stay zero), then
    k-means++. Labels are canonicalized by first occurrence order.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"spectral_cluster: square affinity required, got {a.shape}")
    if k < 2 or k > n:
        raise ContractError(f"spectral_cluster: need 2 <= k <= N, got k={k}, N={n}")
    if np.max(np.abs(a - a.T)) > 1e-10 or np.min(a) < -1e-12:
        raise ContractError("spectral_cluster: affinity must be symmetric and nonnegative")
    a = 0.5 * (a + a.T)

    deg = a.sum(axis=1)
    inv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(np.where(deg > 0, deg, 1.0)), 0.0)
    lap = np.eye(n) - inv_sqrt[:, None] * a * inv_sqrt[None, :]
    _, vecs = sym_eigen(lap)
    emb = vecs[:, :k]
    norms = np.linalg.norm(emb, axis=1)
    emb = np.where(norms[:, None] > 0, emb / np.where(norms[:, None] > 0, norms[:, None], 1.0), 0.0)
    labels = kmeans(emb, k, rng, restarts)
    return canonicalize_labels(labels)


def canonicalize_labels(labels: np.ndarray) -> np.ndarray:
    """Relabel so cluster ids appear in first-occurrence order (0, 1, ...)."""
    labels = np.asarray(labels)
    mapping: dict[int, int] = {}
    out = np.empty_like(labels)
    for i, lab in enumerate(labels):
        if int(lab) not in mapping:
            mapping[int(lab)] = len(mapping)
        out[i] = mapping[int(lab)]
    return out
