import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from steklov.errors import NumericalError
from steklov.linalg import cholesky, gen_sym_eig, is_symmetric, operator_norm_2, sym_eig, tridiagonalize


def _random_sym(rng, n):
    A = rng.standard_normal((n, n))
    return 0.5 * (A + A.T)


def _random_spd(rng, n):
    X = rng.standard_normal((n, n))
    return X @ X.T + n * np.eye(n)


def test_identity():
    w, V = sym_eig(np.eye(5))
    np.testing.assert_allclose(w, 1.0)
    np.testing.assert_allclose(V.T @ V, np.eye(5), atol=1e-14)


def test_two_by_two():
    np.testing.assert_allclose(sym_eig([[2.0, 1.0], [1.0, 2.0]], vectors=False), [1.0, 3.0], atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 7, 50, 120])
def test_reconstruction_and_residual(rng, n):
    A = _random_sym(rng, n)
    w, V = sym_eig(A)
    scale = np.abs(A).max()
    assert np.abs(V @ np.diag(w) @ V.T - A).max() < 1e-9
    assert np.abs(A @ V - V * w).max() < 1e-10 * scale * n
    assert np.abs(V.T @ V - np.eye(n)).max() < 1e-10
    assert np.all(np.diff(w) >= 0)


def test_matches_lapack(rng):
    A = _random_sym(rng, 80)
    np.testing.assert_allclose(sym_eig(A, vectors=False), sym_eig(A, vectors=False, backend="lapack"), atol=1e-12)


def test_clustered_spectrum():
    # graded diagonal plus a rank-one update: many near-equal eigenvalues
    n = 64
    v = np.ones(n) / np.sqrt(n)
    A = np.diag(np.repeat([1.0, 2.0], n // 2)) + 1e-9 * np.outer(v, v)
    w, V = sym_eig(A)
    assert np.abs(A @ V - V * w).max() < 1e-13


@given(arrays(np.float64, (6, 6), elements=st.floats(-10, 10)), st.floats(-100, 100))
def test_shift_invariance(M, c):
    A = 0.5 * (M + M.T)
    w = sym_eig(A, vectors=False)
    ws = sym_eig(A + c * np.eye(6), vectors=False)
    assert np.abs(ws - (w + c)).max() <= 1e-10 * max(1.0, np.abs(A).max() + abs(c))


def test_rejects_nonsymmetric_and_nonfinite():
    with pytest.raises(ValueError):
        sym_eig([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        sym_eig([[np.nan, 0.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        sym_eig(np.ones((2, 3)))
    with pytest.raises(ValueError):
        sym_eig(np.eye(2), backend="magic")


def test_tridiagonalize(rng):
    A = _random_sym(rng, 20)
    d, e, Q = tridiagonalize(A)
    T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    assert np.abs(Q @ T @ Q.T - A).max() < 1e-12


def test_is_symmetric():
    assert is_symmetric(np.eye(3))
    assert not is_symmetric([[1.0, 1.0], [0.0, 1.0]])


def test_gen_equal_matrices(rng):
    B = _random_spd(rng, 10)
    np.testing.assert_allclose(gen_sym_eig(B, B), 1.0, atol=1e-12)


def test_gen_diagonal():
    np.testing.assert_allclose(gen_sym_eig(np.diag([1.0, 4.0]), np.diag([1.0, 2.0])), [1.0, 2.0])


def test_gen_random_pair(rng):
    A, B = _random_sym(rng, 30), _random_spd(rng, 30)
    ref = np.sort(np.linalg.eigvals(np.linalg.solve(B, A)).real)
    np.testing.assert_allclose(gen_sym_eig(A, B), ref, atol=1e-9)
    w, X = gen_sym_eig(A, B, vectors=True)
    assert np.abs(A @ X - B @ X * w).max() < 1e-9
    # B-orthonormal eigenvectors
    assert np.abs(X.T @ B @ X - np.eye(30)).max() < 1e-9


def test_gen_matches_reduced_problem(rng):
    A, B = _random_sym(rng, 25), _random_spd(rng, 25)
    L = cholesky(B)
    Li = np.linalg.inv(L)
    ref = sym_eig(Li @ A @ Li.T, vectors=False, backend="lapack")
    assert np.abs(gen_sym_eig(A, B) - ref).max() < 1e-10


def test_cholesky_failure():
    with pytest.raises(NumericalError):
        cholesky(np.diag([1.0, -1.0]))
    with pytest.raises(NumericalError):
        gen_sym_eig(np.eye(2), np.diag([1.0, 0.0]) - 1e-3 * np.eye(2))


def test_operator_norm_examples(rng):
    assert operator_norm_2(np.zeros((4, 4))) == 0.0
    assert operator_norm_2(np.diag([3.0, -7.0])) == pytest.approx(7.0)
    u, v = rng.standard_normal(6), rng.standard_normal(6)
    u, v = u / np.linalg.norm(u), v / np.linalg.norm(v)
    assert operator_norm_2(np.outer(u, v)) == pytest.approx(1.0, abs=1e-12)
    A = rng.standard_normal((9, 9))
    assert operator_norm_2(A) == pytest.approx(np.linalg.norm(A, 2), rel=1e-12)
