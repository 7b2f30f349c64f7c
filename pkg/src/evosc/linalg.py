"""Dense matrix primitives, a symmetric eigensolver and seeded randomness.

Matrices are plain float64 numpy arrays throughout the library. Randomness
goes through :class:`Rng`, a thin wrapper over numpy's PCG64 generator, so
that every experiment is reproducible from a single integer seed.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractError, ConvergenceError, DegeneracyError, ShapeError

SYMMETRY_TOL = 1e-12


class Rng:
    """Seeded pseudo-random source (PCG64; identical seed => identical stream)."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def randn(self, rows: int, cols: int | None = None) -> np.ndarray:
        """Standard-normal matrix (or vector when cols is None)."""
        if cols is None:
            return self._gen.standard_normal(rows)
        return self._gen.standard_normal((rows, cols))

    def uniform(self, low: float, high: float) -> float:
        return float(self._gen.uniform(low, high))

    def integers(self, low: int, high: int) -> int:
        return int(self._gen.integers(low, high))

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def choice_weighted(self, weights: np.ndarray) -> int:
        """Index draw proportional to nonnegative weights (used by k-means++)."""
        total = float(weights.sum())
        if total <= 0.0:
            return self.integers(0, len(weights))
        u = self.uniform(0.0, total)
        return int(np.searchsorted(np.cumsum(weights), u, side="right").clip(0, len(weights) - 1))

    def spawn(self, offset: int) -> "Rng":
        """Derived generator with a decorrelated but deterministic seed."""
        return Rng((self.seed * 0x9E3779B97F4A7C15 + offset) % (2**63))


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with an explicit conformability check."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[-1] != b.shape[0]:
        raise ShapeError(f"matmul: inner dimensions differ, {a.shape} @ {b.shape}")
    return a @ b


def sym_eigen(a: np.ndarray, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns (eigenvalues ascending, orthonormal eigenvector columns) and
    verifies the residual ||A v - lambda v|| <= tol * ||A||_F afterwards.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"sym_eigen: square matrix required, got {a.shape}")
    if np.max(np.abs(a - a.T)) > SYMMETRY_TOL:
        raise ContractError("sym_eigen: input is not symmetric within 1e-12")
    a = 0.5 * (a + a.T)
    try:
        vals, vecs = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceError(f"sym_eigen: eigensolver failed: {exc}") from exc
    norm = np.linalg.norm(a)
    if norm > 0:
        resid = np.max(np.linalg.norm(a @ vecs - vecs * vals, axis=0))
        if resid > tol * norm:
            raise ConvergenceError(
                f"sym_eigen: residual {resid:.3e} exceeds tol*||A||_F = {tol * norm:.3e}"
            )
    return vals, vecs


def orth(a: np.ndarray) -> np.ndarray:
    """Orthonormal basis with the same span as the (full column rank) input."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] < a.shape[1]:
        raise ShapeError(f"orth: need rows >= cols, got {a.shape}")
    q, r = np.linalg.qr(a)
    diag = np.diag(r)
    if np.min(np.abs(diag)) <= 1e-12 * max(1.0, np.max(np.abs(diag), initial=0.0)):
        raise DegeneracyError("orth: input is rank deficient within tolerance")
    # fix signs so the basis is unique given the input
    q = q * np.sign(diag)
    return q


def check_finite(a: np.ndarray, what: str = "array") -> np.ndarray:
    if not np.all(np.isfinite(a)):
        raise ContractError(f"{what} contains NaN/Inf")
    return a
