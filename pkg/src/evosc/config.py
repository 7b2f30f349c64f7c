"""Flat key = value run configuration.

Every tunable in the toolchain is a scalar, so the config file is plain
text, one `key = value` per line, `#` comments allowed. Unknown keys are
rejected and all values are validated on load.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .baselines import AffectConfig, CesmConfig, SscConfig
from .errors import LoadError
from .odesolve import SolveConfig
from .synth import SynthConfig
from .train import TrainConfig


@dataclass
class RunConfig:
    # objective / optimizer
    lam: float = 1.0
    epochs: int = 100
    learning_rate: float = 0.028
    scheduler_gamma: float = 0.0001
    scheduler_step: int = 35
    warmup_epochs: int = 8
    warmup_lr: float = 0.005
    h0_mode: str = "zeros"
    loss_mode: str = "gap"
    seed: int = 0
    # solver
    substeps_per_unit: float = 200.0
    # field network
    hidden: int = 40
    layers: int = 2
    activation: str = "sigmoid"
    init_scheme: str = "zero-output"
    append_time: bool = False
    # clustering
    k: int = 5
    restarts: int = 20
    # synthetic generator
    synth_ambient_dim: int = 30
    synth_subspace_dim: int = 4
    synth_subspaces: int = 5
    synth_points: int = 21
    synth_steps: int = 10
    synth_noise: float = 0.1
    synth_max_angle: float = float(np.pi / 10)
    synth_shuffle: bool = True
    synth_fixed_plane: bool = False
    # baselines
    ssc_lambda: float = 10.0
    ssc_max_iters: int = 2000
    ssc_tolerance: float = 1e-8
    ssc_step_rule: str = "backtracking"
    affect_alpha: float = 0.5
    affect_kernel: str = "gaussian"
    affect_bandwidth: float = 1.0
    cesm_outer_iters: int = 5
    cesm_alpha_init: float = 0.5
    cesm_alpha_fixed: float = -1.0   # < 0 means "optimize alpha"

    def train_config(self) -> TrainConfig:
        return TrainConfig(lam=self.lam, epochs=self.epochs,
                           learning_rate=self.learning_rate,
                           scheduler_gamma=self.scheduler_gamma,
                           scheduler_step=self.scheduler_step,
                           warmup_epochs=self.warmup_epochs,
                           warmup_lr=self.warmup_lr,
                           solve=SolveConfig(self.substeps_per_unit),
                           h0_mode=self.h0_mode, seed=self.seed,
                           loss_mode=self.loss_mode)

    def synth_config(self) -> SynthConfig:
        return SynthConfig(self.synth_ambient_dim, self.synth_subspace_dim,
                           self.synth_subspaces, self.synth_points,
                           self.synth_steps, self.synth_noise,
                           self.synth_max_angle, self.seed,
                           self.synth_shuffle, self.synth_fixed_plane)

    def ssc_config(self) -> SscConfig:
        return SscConfig(self.ssc_lambda, self.ssc_max_iters,
                         self.ssc_tolerance, self.ssc_step_rule)

    def affect_config(self) -> AffectConfig:
        return AffectConfig(self.affect_alpha, self.affect_kernel, self.affect_bandwidth)

    def cesm_config(self) -> CesmConfig:
        fixed = None if self.cesm_alpha_fixed < 0 else self.cesm_alpha_fixed
        return CesmConfig(self.cesm_outer_iters, self.ssc_config(),
                          self.cesm_alpha_init, fixed)

    def echo(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(RunConfig)}


_ALIASES = {"lambda": "lam"}


def _parse_value(kind, raw: str, key: str):
    try:
        if kind is bool:
            if raw.lower() in ("1", "true", "yes", "on"):
                return True
            if raw.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        return kind(raw)
    except ValueError as exc:
        raise LoadError(f"config: bad value for '{key}': {exc}") from exc


def load_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise LoadError(f"config '{path}': {exc}") from exc
    return parse_config(lines)


def parse_config(lines) -> RunConfig:
    types = {f.name: f.type for f in fields(RunConfig)}
    kinds = {"float": float, "int": int, "str": str, "bool": bool}
    cfg = RunConfig()
    for line in lines:
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise LoadError(f"config: line without '=': {line!r}")
        key = key.strip()
        key = _ALIASES.get(key, key)
        if key not in types:
            raise LoadError(f"config: unknown key '{key}'")
        kind = kinds[types[key]] if isinstance(types[key], str) else types[key]
        setattr(cfg, key, _parse_value(kind, value.strip(), key))
    return cfg
