"""The gated vector field defining the affinity dynamic dh/dt.

The field is a bias-free multilayer network of the state h and the
flattened data snapshot: the first layer gates sigma(W11 h) against
sigma(W12 vec(X)) elementwise, any middle layers are square with the same
activation, and the last layer is linear back to the state dimension.
vec() flattens column-major (frozen convention, shared with checkpoints).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import autodiff as ad
from .errors import ContractError, LoadError, ShapeError
from .linalg import Rng

CHECKPOINT_VERSION = 1

_ACTIVATIONS = {
    "relu": ad.relu,
    "sigmoid": ad.sigmoid,
    "tanh": ad.tanh,
}


@dataclass
class FieldParams:
    """All weight matrices of the vector-field network.

    chain holds the layers after the gate: zero or more square hidden
    matrices followed by the final (m x hidden) linear output matrix.
    With layer_count L the chain has L-1 entries.
    """

    w11: np.ndarray            # hidden x m
    w12: np.ndarray            # hidden x input_dim
    chain: list = dc_field(default_factory=list)
    activation: str = "sigmoid"
    append_time: bool = False
    n_points: int = 0          # N, so m = N(N-1)/2
    n_features: int = 0        # D

    def __post_init__(self):
        if self.activation not in _ACTIVATIONS:
            raise ContractError(f"unknown activation '{self.activation}'")
        if not self.chain:
            raise ContractError("chain must end with the output matrix (L >= 2)")
        m = self.n_points * (self.n_points - 1) // 2
        hidden = self.w11.shape[0]
        if self.w11.shape != (hidden, m):
            raise ShapeError(f"w11 shape {self.w11.shape} does not match hidden={hidden}, m={m}")
        in_dim = self.n_features * self.n_points + (1 if self.append_time else 0)
        if self.w12.shape != (hidden, in_dim):
            raise ShapeError(f"w12 shape {self.w12.shape} does not match input dim {in_dim}")
        for w in self.chain[:-1]:
            if w.shape != (hidden, hidden):
                raise ShapeError(f"hidden layer shape {w.shape}, expected {(hidden, hidden)}")
        if self.chain[-1].shape != (m, hidden):
            raise ShapeError(f"output layer shape {self.chain[-1].shape}, expected {(m, hidden)}")

    @property
    def hidden(self) -> int:
        return self.w11.shape[0]

    @property
    def state_dim(self) -> int:
        return self.n_points * (self.n_points - 1) // 2

    @property
    def layer_count(self) -> int:
        return 1 + len(self.chain)

    def matrices(self) -> list:
        return [self.w11, self.w12] + list(self.chain)

    def with_matrices(self, mats: list) -> "FieldParams":
        return FieldParams(mats[0], mats[1], list(mats[2:]), self.activation,
                           self.append_time, self.n_points, self.n_features)


def field_forward(params: FieldParams, h, x, t: float, weights: list | None = None) -> ad.Var:
    """One evaluation of the vector field on the autodiff graph.

    h is the state, x the D x N control snapshot. During training pass
    weights as the tape leaf nodes aligned with params.matrices(); by
    default the stored arrays are used as constants. Returns dh/dt as a
    Var of length m.
    """
    if weights is None:
        weights = params.matrices()
    act = _ACTIVATIONS[params.activation]
    xvec = np.asarray(x, dtype=float).flatten(order="F")
    if params.append_time:
        xvec = np.concatenate([xvec, [float(t)]])
    w11, w12 = weights[0], weights[1]
    gate = ad.mul(act(ad.matmul(w11, h)), act(ad.matmul(w12, xvec)))
    z = gate
    for w in weights[2:-1]:
        z = act(ad.matmul(w, z))
    return ad.matmul(weights[-1], z)


def init_params(rng: Rng, n_points: int, n_features: int, hidden: int, layers: int,
                scheme: str = "zero-output", activation: str = "sigmoid",
                append_time: bool = False) -> FieldParams:
    """Fresh weights, deterministic under the rng seed.

    Schemes:
      zero-output    N(0, 1/fan_in) everywhere except the last layer, which
                     starts at zero so the field (and its early gradients)
                     grow from the identically-zero dynamic. Default: the
                     sigmoid gate saturates quickly when the output layer
                     starts large, which stalls training.
      scaled-normal  N(0, 1/fan_in) entries throughout.
      zeros          the all-zero network (field identically zero).
    """
    if hidden < 1 or layers < 2:
        raise ContractError("need hidden >= 1 and layers >= 2")
    if scheme not in ("zero-output", "scaled-normal", "zeros"):
        raise ContractError(f"unknown init scheme '{scheme}'")
    m = n_points * (n_points - 1) // 2
    in_dim = n_features * n_points + (1 if append_time else 0)

    def draw(rows, cols):
        if scheme == "zeros":
            return np.zeros((rows, cols))
        return rng.randn(rows, cols) / np.sqrt(cols)

    w11 = draw(hidden, m)
    w12 = draw(hidden, in_dim)
    chain = [draw(hidden, hidden) for _ in range(layers - 2)]
    out = np.zeros((m, hidden)) if scheme == "zero-output" else draw(m, hidden)
    chain.append(out)
    return FieldParams(w11, w12, chain, activation, append_time, n_points, n_features)


def save_checkpoint(params: FieldParams, path) -> None:
    """Write params to a text checkpoint with a bit-exact decimal round trip."""
    lines = [
        f"format_version = {CHECKPOINT_VERSION}",
        f"activation = {params.activation}",
        f"append_time = {int(params.append_time)}",
        f"n_points = {params.n_points}",
        f"n_features = {params.n_features}",
    ]
    names = ["W11", "W12"] + [f"W{i + 2}" for i in range(len(params.chain))]
    for name, w in zip(names, params.matrices()):
        lines.append(f"matrix {name} {w.shape[0]} {w.shape[1]}")
        for row in w:
            lines.append(" ".join(f"{v:.17g}" for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_checkpoint(path) -> FieldParams:
    with open(path) as fh:
        lines = fh.read().splitlines()
    header: dict[str, str] = {}
    i = 0
    while i < len(lines) and not lines[i].startswith("matrix "):
        if lines[i].strip():
            key, _, value = lines[i].partition("=")
            header[key.strip()] = value.strip()
        i += 1
    try:
        version = int(header["format_version"])
    except (KeyError, ValueError) as exc:
        raise LoadError("checkpoint: missing or bad format_version") from exc
    if version != CHECKPOINT_VERSION:
        raise LoadError(f"checkpoint: unsupported format_version {version}")

    mats = []
    while i < len(lines):
        parts = lines[i].split()
        if len(parts) != 4 or parts[0] != "matrix":
            raise LoadError(f"checkpoint: bad matrix header at line {i + 1}")
        rows, cols = int(parts[2]), int(parts[3])
        block = lines[i + 1:i + 1 + rows]
        if len(block) != rows:
            raise LoadError(f"checkpoint: truncated matrix {parts[1]}")
        mat = np.array([[float(v) for v in row.split()] for row in block])
        if mat.shape != (rows, cols):
            raise LoadError(f"checkpoint: matrix {parts[1]} shape mismatch")
        mats.append(mat)
        i += 1 + rows
    if len(mats) < 3:
        raise LoadError("checkpoint: expected at least W11, W12 and an output matrix")
    try:
        return FieldParams(mats[0], mats[1], mats[2:], header["activation"],
                           bool(int(header.get("append_time", "0"))),
                           int(header["n_points"]), int(header["n_features"]))
    except (KeyError, ValueError, ContractError, ShapeError) as exc:
        raise LoadError(f"checkpoint: invalid contents: {exc}") from exc
