"""Comparison methods: static sparse self-expression (SSC), affinity
smoothing with a fixed forgetting factor (AFFECT), and the linear
convex-combination evolutionary model (CESM).

The sparse solver is proximal gradient (ISTA) with optional backtracking;
with backtracking the objective is monotone non-increasing, which the test
suite asserts on every run.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from .data import TimeSeriesDataset
from .errors import ContractError, DivergenceError


@dataclass
class SscConfig:
    lam: float = 10.0            # weight of the residual term in ||C||_1 + lam ||X - XC||_F^2
    max_iters: int = 2000
    tolerance: float = 1e-8      # relative objective change stopping rule
    step_rule: str = "backtracking"   # backtracking | fixed
    history: list = dc_field(default_factory=list, repr=False)  # objective per iteration

    def __post_init__(self):
        if self.lam <= 0 or self.max_iters < 1 or self.tolerance <= 0:
            raise ContractError("SscConfig: positivity constraints violated")
        if self.step_rule not in ("backtracking", "fixed"):
            raise ContractError(f"SscConfig: unknown step rule '{self.step_rule}'")


@dataclass
class AffectConfig:
    alpha: float = 0.5           # forgetting factor in [0, 1]
    kernel: str = "gaussian"     # gaussian | negative-euclidean
    bandwidth: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.alpha <= 1.0):
            raise ContractError("AffectConfig: alpha must lie in [0, 1]")
        if self.kernel not in ("gaussian", "negative-euclidean"):
            raise ContractError(f"AffectConfig: unknown kernel '{self.kernel}'")
        if self.bandwidth <= 0:
            raise ContractError("AffectConfig: bandwidth must be positive")


@dataclass
class CesmConfig:
    outer_iters: int = 5
    inner: SscConfig = dc_field(default_factory=SscConfig)
    alpha_init: float = 0.5
    alpha_fixed: float | None = None   # pin alpha instead of optimizing it

    def __post_init__(self):
        if self.outer_iters < 1 or not (0.0 <= self.alpha_init <= 1.0):
            raise ContractError("CesmConfig: range constraints violated")
        if self.alpha_fixed is not None and not (0.0 <= self.alpha_fixed <= 1.0):
            raise ContractError("CesmConfig: alpha_fixed must lie in [0, 1]")


def _soft_threshold(a: np.ndarray, thresh: float) -> np.ndarray:
    return np.sign(a) * np.maximum(np.abs(a) - thresh, 0.0)


def ssc_objective(x: np.ndarray, c: np.ndarray, lam: float) -> float:
    return float(np.abs(c).sum() + lam * np.sum((x - x @ c) ** 2))


def _ista(smooth_val, smooth_grad, prox, c0, max_iters, tolerance, step_rule,
          lipschitz, l1_val, history=None):
    """Generic proximal-gradient loop; returns the final iterate.

    With backtracking the composite objective never increases; the fixed
    step uses 1/lipschitz.
    """
    c = c0
    step = 1.0 / lipschitz
    obj = smooth_val(c) + l1_val(c)
    if history is not None:
        history.append(obj)
    for _ in range(max_iters):
        g = smooth_grad(c)
        while True:
            cand = prox(c - step * g, step)
            if step_rule == "fixed":
                break
            # sufficient decrease of the smooth part for the prox step
            diff = cand - c
            bound = smooth_val(c) + np.sum(g * diff) + np.sum(diff * diff) / (2 * step)
            if smooth_val(cand) <= bound + 1e-12 * max(1.0, abs(bound)):
                break
            step *= 0.5
            if step < 1e-18:
                break
        new_obj = smooth_val(cand) + l1_val(cand)
        if not np.isfinite(new_obj):
            raise DivergenceError("ISTA: objective became non-finite")
        c = cand
        if history is not None:
            history.append(new_obj)
        if abs(obj - new_obj) <= tolerance * max(1.0, abs(obj)):
            obj = new_obj
            break
        obj = new_obj
        if step_rule == "backtracking":
            step *= 2.0  # allow recovery after conservative halving
    return c


def ssc_solve(x: np.ndarray, cfg: SscConfig) -> np.ndarray:
    """Sparse self-expression of the columns of x.

    Minimizes ||C||_1 + lam ||X - XC||_F^2 over zero-diagonal C by ISTA.
    Output has an exactly zero diagonal and is not symmetrized.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[1]
    if n < 2:
        raise ContractError("ssc_solve: need at least two columns")
    gram = x.T @ x
    lipschitz = 2.0 * cfg.lam * max(np.linalg.eigvalsh(gram)[-1], 1e-12)

    def smooth_val(c):
        r = x - x @ c
        return cfg.lam * float(np.sum(r * r))

    def smooth_grad(c):
        return 2.0 * cfg.lam * (gram @ c - gram)

    def prox(c, step):
        out = _soft_threshold(c, step)
        np.fill_diagonal(out, 0.0)
        return out

    cfg.history.clear()
    return _ista(smooth_val, smooth_grad, prox, np.zeros((n, n)), cfg.max_iters,
                 cfg.tolerance, cfg.step_rule, lipschitz,
                 lambda c: float(np.abs(c).sum()), cfg.history)


def affinity_kernel(x: np.ndarray, cfg: AffectConfig) -> np.ndarray:
    """Pairwise column similarity matrix for the smoothing baseline."""
    x = np.asarray(x, dtype=float)
    sq = np.sum(x * x, axis=0)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (x.T @ x), 0.0)
    if cfg.kernel == "negative-euclidean":
        return -np.sqrt(d2)
    return np.exp(-d2 / (2.0 * cfg.bandwidth ** 2))


def affect_smooth(prev: np.ndarray | None, x: np.ndarray, cfg: AffectConfig) -> np.ndarray:
    """One smoothing step: the kernel matrix at the first call, then the
    fixed convex combination alpha * prev + (1 - alpha) * current."""
    current = affinity_kernel(x, cfg)
    if prev is None:
        return current
    prev = np.asarray(prev, dtype=float)
    if prev.shape != current.shape or np.max(np.abs(prev - prev.T)) > 1e-10:
        raise ContractError("affect_smooth: prev must be symmetric N x N")
    return cfg.alpha * prev + (1.0 - cfg.alpha) * current


def cesm_objective(x, u, alpha, c_prev, lam) -> float:
    c = alpha * u + (1.0 - alpha) * c_prev
    return float(np.abs(u).sum() + lam * np.sum((x - x @ c) ** 2))


def cesm_fit(data: TimeSeriesDataset, cfg: CesmConfig) -> list:
    """Per-time coefficient matrices from the convex-combination model.

    The first step is plain ssc_solve; afterwards each step alternates an
    ISTA solve for the innovation matrix U (zero diagonal) with an exact
    1-D quadratic update of alpha clipped to [0, 1]. The joint objective
    never increases across the alternating steps.
    """
    if data.n_steps < 2:
        raise ContractError("cesm_fit: need at least two time steps")
    lam = cfg.inner.lam
    coeffs = [ssc_solve(data.snapshots[0], cfg.inner)]
    for j in range(1, data.n_steps):
        x = data.snapshots[j]
        c_prev = coeffs[-1]
        gram = x.T @ x
        alpha = cfg.alpha_fixed if cfg.alpha_fixed is not None else cfg.alpha_init
        u = c_prev.copy()
        np.fill_diagonal(u, 0.0)
        for _ in range(cfg.outer_iters):
            # (i) U-step at fixed alpha
            resid_base = x - (1.0 - alpha) * (x @ c_prev)

            def smooth_val(c, a=alpha, rb=resid_base):
                r = rb - a * (x @ c)
                return lam * float(np.sum(r * r))

            def smooth_grad(c, a=alpha, rb=resid_base):
                return -2.0 * lam * a * (x.T @ (rb - a * (x @ c)))

            def prox(c, step):
                out = _soft_threshold(c, step)
                np.fill_diagonal(out, 0.0)
                return out

            lipschitz = 2.0 * lam * max(alpha, 1e-6) ** 2 * max(np.linalg.eigvalsh(gram)[-1], 1e-12)
            u = _ista(smooth_val, smooth_grad, prox, u, cfg.inner.max_iters,
                      cfg.inner.tolerance, cfg.inner.step_rule, lipschitz,
                      lambda c: float(np.abs(c).sum()))
            # (ii) alpha-step: exact minimizer of the quadratic residual
            if cfg.alpha_fixed is None:
                e = x - x @ c_prev
                mdir = x @ (u - c_prev)
                denom = float(np.sum(mdir * mdir))
                if denom > 0:
                    cand = float(np.sum(e * mdir)) / denom
                    cand = min(1.0, max(0.0, cand))
                    if cesm_objective(x, u, cand, c_prev, lam) <= cesm_objective(x, u, alpha, c_prev, lam):
                        alpha = cand
        coeffs.append(alpha * u + (1.0 - alpha) * c_prev)
    return coeffs
