import numpy as np
import pytest

from evosc.errors import ContractError, DegeneracyError, ShapeError
from evosc.linalg import Rng, matmul, orth, sym_eigen


def test_matmul_identity():
    rng = Rng(1)
    m = rng.randn(3, 3)
    assert np.array_equal(matmul(np.eye(3), m), m)


def test_matmul_hand_checked():
    out = matmul(np.array([[1.0, 2.0], [3.0, 4.0]]), np.array([[0.0], [1.0]]))
    assert np.array_equal(out, np.array([[2.0], [4.0]]))


def test_matmul_against_triple_loop():
    rng = Rng(5)
    a, b = rng.randn(5, 4), rng.randn(4, 6)
    expected = np.zeros((5, 6))
    for i in range(5):
        for j in range(6):
            acc = 0.0
            for k in range(4):
                acc += a[i, k] * b[k, j]
            expected[i, j] = acc
    assert np.max(np.abs(matmul(a, b) - expected)) < 1e-14


def test_matmul_shape_error():
    with pytest.raises(ShapeError):
        matmul(np.zeros((2, 3)), np.zeros((2, 3)))


def test_sym_eigen_diagonal():
    vals, vecs = sym_eigen(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(vals, [1.0, 2.0, 3.0])
    assert np.allclose(np.abs(vecs), np.eye(3)[:, [1, 2, 0]])


def test_sym_eigen_2x2_closed_form():
    vals, _ = sym_eigen(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(vals, [-1.0, 1.0])


def test_sym_eigen_reconstruction():
    rng = Rng(8)
    a = rng.randn(8, 8)
    a = a + a.T
    vals, vecs = sym_eigen(a)
    assert np.max(np.abs(vecs @ np.diag(vals) @ vecs.T - a)) <= 1e-10
    assert np.max(np.abs(vecs.T @ vecs - np.eye(8))) <= 1e-10


def test_sym_eigen_trace_and_det_invariants():
    rng = Rng(11)
    for trial in range(20):
        n = 2 + trial % 3
        a = rng.randn(n, n)
        a = a + a.T
        vals, _ = sym_eigen(a)
        assert abs(vals.sum() - np.trace(a)) <= 1e-10 * max(1.0, np.linalg.norm(a))
        assert abs(np.prod(vals) - np.linalg.det(a)) <= 1e-8 * max(1.0, abs(np.linalg.det(a)))


def test_sym_eigen_rejects_asymmetric():
    with pytest.raises(ContractError):
        sym_eigen(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_orth_already_orthonormal():
    q = orth(np.eye(4)[:, :2])
    assert np.allclose(q, np.eye(4)[:, :2])


def test_orth_gram_identity():
    rng = Rng(3)
    q = orth(rng.randn(30, 4))
    assert np.max(np.abs(q.T @ q - np.eye(4))) <= 1e-12


def test_orth_preserves_span():
    rng = Rng(4)
    a = rng.randn(10, 3)
    q = orth(a)
    # projection of a onto span(q) recovers a
    assert np.max(np.abs(q @ (q.T @ a) - a)) <= 1e-10


def test_orth_rank_deficient():
    a = np.ones((5, 2))
    with pytest.raises(DegeneracyError):
        orth(a)


def test_rng_determinism():
    assert np.array_equal(Rng(7).randn(4, 3), Rng(7).randn(4, 3))


def test_rng_streams_differ_by_seed():
    assert not np.array_equal(Rng(7).randn(4, 3), Rng(8).randn(4, 3))
