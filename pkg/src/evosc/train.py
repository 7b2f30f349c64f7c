"""Objective, analytic per-step derivative and the training loop.

The objective couples the self-expression residual of every observed
snapshot with an l1 penalty on the coefficient matrix produced by solving
the learned dynamic. Gradients come from reverse mode through the unrolled
RK4 steps, so they are the exact gradients of the discretized loss.
Optimization is full-batch Adam with a step learning-rate scheduler and an
optional low-rate warmup (large early steps can saturate the sigmoid gate
of the field network beyond recovery).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import autodiff as ad
from .data import TimeSeriesDataset, atomic_write
from .errors import ContractError, DivergenceError
from .field import FieldParams
from .linalg import Rng
from .odesolve import SolveConfig, ode_solve


@dataclass
class TrainConfig:
    lam: float = 1.0                  # l1 weight
    epochs: int = 100
    learning_rate: float = 0.028
    scheduler_gamma: float = 0.0001
    scheduler_step: int = 35          # epochs between learning-rate decays
    warmup_epochs: int = 8            # initial epochs run at warmup_lr instead
    warmup_lr: float = 0.005
    solve: SolveConfig = dc_field(default_factory=SolveConfig)
    h0_mode: str = "zeros"            # zeros | random
    seed: int = 0
    loss_mode: str = "gap"            # gap | irregular | regular

    def __post_init__(self):
        if self.lam < 0 or self.epochs < 1 or self.learning_rate < 0:
            raise ContractError("TrainConfig: lam/epochs/learning_rate out of range")
        if not (0 < self.scheduler_gamma <= 1) or self.scheduler_step < 1:
            raise ContractError("TrainConfig: scheduler parameters out of range")
        if self.warmup_epochs < 0 or self.warmup_lr < 0:
            raise ContractError("TrainConfig: warmup parameters out of range")
        if self.h0_mode not in ("zeros", "random"):
            raise ContractError(f"TrainConfig: unknown h0_mode '{self.h0_mode}'")
        if self.loss_mode not in ("gap", "irregular", "regular"):
            raise ContractError(f"TrainConfig: unknown loss_mode '{self.loss_mode}'")


@dataclass
class TrainReport:
    epochs: list = dc_field(default_factory=list)   # per-epoch dicts
    convergence_epoch: int = 0

    def record(self, epoch, recon, l1_term, total, mse, lr, seconds):
        self.epochs.append({"epoch": epoch, "recon": recon, "l1": l1_term,
                            "total": total, "mse": mse, "lr": lr,
                            "seconds": seconds})

    def finalize(self):
        """Convergence epoch: first epoch whose total loss is within 1% of the final."""
        final = self.epochs[-1]["total"]
        band = 0.01 * abs(final)
        for rec in self.epochs:
            if abs(rec["total"] - final) <= band:
                self.convergence_epoch = rec["epoch"]
                break

    def to_csv(self, path):
        lines = ["epoch,recon,l1,total,mse,lr,seconds"]
        for r in self.epochs:
            lines.append(f"{r['epoch']},{r['recon']:.17g},{r['l1']:.17g},"
                         f"{r['total']:.17g},{r['mse']:.17g},{r['lr']:.17g},"
                         f"{r['seconds']:.6f}")
        atomic_write(path, "\n".join(lines) + "\n")

    def to_json(self, path, config_echo: dict | None = None):
        summary = {
            "final_total": self.epochs[-1]["total"],
            "final_recon": self.epochs[-1]["recon"],
            "final_l1": self.epochs[-1]["l1"],
            "final_mse": self.epochs[-1]["mse"],
            "convergence_epoch": self.convergence_epoch,
            "config": config_echo or {},
        }
        atomic_write(path, json.dumps(summary, indent=2, sort_keys=True) + "\n")


def initial_state(params: FieldParams, cfg: TrainConfig) -> np.ndarray:
    if cfg.h0_mode == "zeros":
        return np.zeros(params.state_dim)
    return 0.1 * Rng(cfg.seed).spawn(1).randn(params.state_dim)  # N(0, 0.01)


def build_loss(params: FieldParams, weights: list | None, data: TimeSeriesDataset,
               cfg: TrainConfig, h0=None):
    """Record the full objective on the tape.

    Returns (total, recon, l1, mse) where the first three are Vars and mse
    is the plain per-entry residual mean sum(|X - XC|^2) / (T * D * N).

    Loss modes weight the per-step terms differently:
      gap       recon 1/2 per step, l1 weighted by the time gap t_j - t_{j-1}
                (the penalty acts as a time integral, so a finer sampling
                grid does not inflate it relative to the residual)
      irregular recon weighted by (t_j - t_{j-1}) / 2, l1 unweighted
      regular   recon weighted by 1 / (2 (T + 1)), l1 unweighted
    """
    n = data.n_points
    path = data.control_path()
    if h0 is None:
        h0 = initial_state(params, cfg)
    states = ode_solve(h0, params, path, data.timestamps, cfg.solve, weights)

    t_count = data.n_steps
    recon_terms, l1_terms = [], []
    sq_residual = 0.0
    prev_t = 0.0
    for j, h in enumerate(states):
        c = ad.lower_to_sym(h, n)
        x = data.snapshots[j]
        resid = ad.sub(x, ad.matmul(x, c))
        gap = data.timestamps[j] - prev_t
        if cfg.loss_mode == "gap":
            rw, lw = 0.5, gap
        elif cfg.loss_mode == "irregular":
            rw, lw = 0.5 * gap, 1.0
        else:
            rw, lw = 1.0 / (2.0 * (t_count + 1)), 1.0
        recon_terms.append(ad.scale(ad.fro2(resid), rw))
        l1_terms.append(ad.scale(ad.l1(c), lw))
        sq_residual += float(np.sum(resid.value ** 2))
        prev_t = data.timestamps[j]
    recon = ad.add(*recon_terms)
    l1_term = ad.add(*l1_terms)
    total = ad.add(recon, ad.scale(l1_term, cfg.lam))
    mse = sq_residual / (t_count * data.n_features * data.n_points)
    return total, recon, l1_term, mse


def loss(params: FieldParams, data: TimeSeriesDataset, cfg: TrainConfig) -> tuple:
    """Objective value at the stored weights: (total, recon_term, l1_term)."""
    total, recon, l1_term, _ = build_loss(params, None, data, cfg)
    return float(total.value), float(recon.value), float(l1_term.value)


def dl_dC(x: np.ndarray, c: np.ndarray, lam: float) -> np.ndarray:
    """Analytic derivative of the per-step loss with respect to C:
    X^T X (C - I) + lam * sign(C), with sign(0) = 0."""
    x = np.asarray(x, dtype=float)
    c = np.asarray(c, dtype=float)
    gram = x.T @ x
    return gram @ (c - np.eye(c.shape[0])) + lam * np.sign(c)


def train(data: TimeSeriesDataset, field_init: FieldParams, cfg: TrainConfig):
    """Run the Adam training loop; returns (final params, TrainReport).

    Bit-deterministic under a fixed seed and config. Aborts with a
    DivergenceError naming the epoch if the solve or loss goes non-finite.
    """
    params = field_init
    mats = [w.copy() for w in params.matrices()]
    m_state = [np.zeros_like(w) for w in mats]
    v_state = [np.zeros_like(w) for w in mats]
    beta1, beta2, eps = 0.9, 0.999, 1e-8
    h0 = initial_state(params, cfg)

    report = TrainReport()
    last_total = None
    for epoch in range(1, cfg.epochs + 1):
        t0 = time.perf_counter()
        if epoch <= cfg.warmup_epochs:
            lr = cfg.warmup_lr
        else:
            lr = cfg.learning_rate * cfg.scheduler_gamma ** ((epoch - 1) // cfg.scheduler_step)
        weights = [ad.leaf(w) for w in mats]
        current = params.with_matrices(mats)
        try:
            total, recon, l1_term, mse = build_loss(current, weights, data, cfg, h0)
        except DivergenceError as exc:
            raise DivergenceError(
                f"training diverged at epoch {epoch} (last finite loss "
                f"{last_total}): {exc}") from exc
        if not np.isfinite(total.value):
            raise DivergenceError(
                f"training diverged at epoch {epoch} (last finite loss {last_total})")
        ad.backward(total)

        step = epoch
        for i, w in enumerate(weights):
            g = w.grad if w.grad is not None else np.zeros_like(mats[i])
            m_state[i] = beta1 * m_state[i] + (1 - beta1) * g
            v_state[i] = beta2 * v_state[i] + (1 - beta2) * g * g
            m_hat = m_state[i] / (1 - beta1 ** step)
            v_hat = v_state[i] / (1 - beta2 ** step)
            mats[i] = mats[i] - lr * m_hat / (np.sqrt(v_hat) + eps)

        last_total = float(total.value)
        report.record(epoch, float(recon.value), float(l1_term.value),
                      last_total, mse, lr, time.perf_counter() - t0)
    report.finalize()
    return params.with_matrices(mats), report
