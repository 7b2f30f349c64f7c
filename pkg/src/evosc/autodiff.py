"""Reverse-mode automatic differentiation over dense matrix operations.

A computation is recorded as a graph of :class:`Var` nodes; ``backward``
replays it in reverse creation order and accumulates exact chain-rule
gradients into every leaf. Only the primitives the library actually needs
are provided (linear maps, elementwise nonlinearities, the symmetric
scatter, and the two norms appearing in the objective).

Constants may be passed as plain numpy arrays anywhere a Var is accepted;
no gradient is tracked through them.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractError, ShapeError

_COUNTER = [0]


class Var:
    """One node of the recorded computation.

    parents is a tuple of (Var, vjp) pairs where vjp maps the output
    adjoint to that parent's adjoint contribution.
    """

    __slots__ = ("value", "parents", "grad", "order")

    def __init__(self, value, parents=()):
        self.value = np.asarray(value, dtype=float)
        self.parents = parents
        self.grad = None
        _COUNTER[0] += 1
        self.order = _COUNTER[0]

    @property
    def shape(self):
        return self.value.shape


def _val(x):
    return x.value if isinstance(x, Var) else np.asarray(x, dtype=float)


def _edges(pairs):
    # drop constant operands: only Var parents carry gradient
    return tuple((p, fn) for p, fn in pairs if isinstance(p, Var))


def leaf(value) -> Var:
    """A differentiable input (weights, probe points)."""
    return Var(value)


def add(*terms) -> Var:
    vals = [_val(t) for t in terms]
    out = vals[0].copy()
    for v in vals[1:]:
        out += v
    return Var(out, _edges((t, lambda g: g) for t in terms))


def sub(a, b) -> Var:
    return Var(_val(a) - _val(b), _edges(((a, lambda g: g), (b, lambda g: -g))))


def scale(a, c: float) -> Var:
    c = float(c)
    return Var(c * _val(a), _edges(((a, lambda g: c * g),)))


def mul(a, b) -> Var:
    """Elementwise (Hadamard) product."""
    av, bv = _val(a), _val(b)
    if av.shape != bv.shape:
        raise ShapeError(f"mul: shapes differ, {av.shape} vs {bv.shape}")
    return Var(av * bv, _edges(((a, lambda g: g * bv), (b, lambda g: g * av))))


def matmul(a, b) -> Var:
    """a @ b for 2-D a and 1-D or 2-D b."""
    av, bv = _val(a), _val(b)
    if av.ndim != 2 or av.shape[1] != bv.shape[0]:
        raise ShapeError(f"matmul: inner dimensions differ, {av.shape} @ {bv.shape}")
    if bv.ndim == 1:
        edges = _edges(((a, lambda g: np.outer(g, bv)), (b, lambda g: av.T @ g)))
    else:
        edges = _edges(((a, lambda g: g @ bv.T), (b, lambda g: av.T @ g)))
    return Var(av @ bv, edges)


def sigmoid(a) -> Var:
    y = 1.0 / (1.0 + np.exp(-_val(a)))
    return Var(y, _edges(((a, lambda g: g * y * (1.0 - y)),)))


def tanh(a) -> Var:
    y = np.tanh(_val(a))
    return Var(y, _edges(((a, lambda g: g * (1.0 - y * y)),)))


def relu(a) -> Var:
    av = _val(a)
    mask = av > 0
    return Var(np.where(mask, av, 0.0), _edges(((a, lambda g: g * mask),)))


def vsum(a) -> Var:
    av = _val(a)
    return Var(av.sum(), _edges(((a, lambda g: g * np.ones_like(av)),)))


def fro2(a) -> Var:
    """Squared Frobenius norm sum(a*a)."""
    av = _val(a)
    return Var((av * av).sum(), _edges(((a, lambda g: 2.0 * g * av),)))


def l1(a) -> Var:
    """Entrywise absolute sum; subgradient uses sign with sign(0) = 0."""
    av = _val(a)
    return Var(np.abs(av).sum(), _edges(((a, lambda g: g * np.sign(av)),)))


def lower_to_sym(h, n: int) -> Var:
    """Scatter a length n(n-1)/2 vector into a symmetric zero-diagonal matrix.

    Uses the frozen column-major ordering of the strict lower triangle
    (see cluster.mat for the plain-array counterpart).
    """
    hv = _val(h)
    if hv.shape != (n * (n - 1) // 2,):
        raise ShapeError(f"lower_to_sym: vector length {hv.shape} does not fit n={n}")
    rows, cols = lower_indices(n)
    out = np.zeros((n, n))
    out[rows, cols] = hv
    out[cols, rows] = hv
    return Var(out, _edges(((h, lambda g: g[rows, cols] + g[cols, rows]),)))


def lower_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Strict lower triangle indices in column-major order (frozen layout)."""
    r, c = np.triu_indices(n, 1)
    return c, r


def backward(output: Var) -> None:
    """Accumulate d(output)/d(node) into .grad for every node reachable below.

    output must be scalar. Gradients are exact under the chain rule and the
    traversal order is deterministic (reverse creation order).
    """
    if output.value.shape != ():
        raise ContractError(f"backward: output must be scalar, got shape {output.value.shape}")

    # collect the subgraph, then sweep in reverse creation order
    seen: dict[int, Var] = {}
    stack = [output]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen[id(node)] = node
        for parent, _ in node.parents:
            if id(parent) not in seen:
                stack.append(parent)

    for node in seen.values():
        node.grad = None
    output.grad = np.array(1.0)

    for node in sorted(seen.values(), key=lambda v: -v.order):
        if node.grad is None:
            continue
        for parent, vjp in node.parents:
            contrib = vjp(node.grad)
            if parent.grad is None:
                parent.grad = np.zeros_like(parent.value)
            parent.grad = parent.grad + contrib
