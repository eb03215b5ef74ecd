import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from complex_jacobi.errors import NegativeEigenvalue, NotHermitian
from complex_jacobi.linalg import (
    as_dense_matrix,
    complex_eig,
    complex_schur,
    extended_matmul,
    hermitian_eig,
    normal_spectral_measure,
    psd_sqrt,
    spectral_norm_bound,
)


def rand_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))


def rotation_unitary(rng, n, count=200, dtype=complex):
    """Product of random complex plane rotations (unitary by construction)."""
    U = np.eye(n, dtype=dtype)
    one = dtype(1)
    for _ in range(count):
        p, q = rng.choice(n, 2, replace=False)
        th, ph = (one.real * t for t in rng.uniform(0, 2 * np.pi, 2))
        c, s = np.cos(th), np.sin(th) * np.exp(1j * one * ph)
        rp, rq = U[p].copy(), U[q].copy()
        U[p], U[q] = c * rp + s * rq, -np.conj(s) * rp + c * rq
    return U


def test_input_validation():
    with pytest.raises(ValueError):
        as_dense_matrix(np.ones((2, 3)))
    with pytest.raises(ValueError):
        as_dense_matrix([[np.nan]])
    assert as_dense_matrix([[1]]).dtype == np.complex128
    assert as_dense_matrix(np.eye(2, dtype=np.clongdouble)).dtype == np.clongdouble


def test_hermitian_eig_examples():
    w, _ = hermitian_eig([[0, 1], [1, 0]])
    assert np.allclose(w, [-1, 1], atol=1e-15)
    w, Q = hermitian_eig(np.diag([3.0, 1, 2]))
    assert np.array_equal(w, [1, 2, 3])
    assert np.array_equal(np.abs(Q), np.eye(3)[:, [1, 2, 0]])
    w, _ = hermitian_eig([[2, 1j], [-1j, 2]])
    assert np.allclose(w, [1, 3], atol=1e-14)
    with pytest.raises(NotHermitian):
        hermitian_eig([[0, 1], [0, 0]])


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 20))
def test_hermitian_eig_contract(seed, n):
    rng = np.random.default_rng(seed)
    X = rand_complex(rng, n)
    A = X + X.conj().T
    w, Q = hermitian_eig(A)
    nrm = np.linalg.norm(A, 2)
    assert np.linalg.norm(A @ Q - Q * w) <= 1e-10 * nrm
    assert np.linalg.norm(Q.conj().T @ Q - np.eye(n)) <= 1e-12
    assert np.all(np.diff(w) >= 0)


def test_hermitian_eig_long_double():
    rng = np.random.default_rng(2)
    X = rand_complex(rng, 8).astype(np.clongdouble)
    A = X + X.conj().T
    w, Q = hermitian_eig(A)
    assert w.dtype == np.longdouble
    assert float(np.abs(A @ Q - Q * w).max()) < 1e-16


def test_psd_sqrt_examples():
    assert np.allclose(psd_sqrt([[4, 0], [0, 9]]), [[2, 0], [0, 3]], atol=1e-14)
    assert np.allclose(psd_sqrt(np.eye(3)), np.eye(3), atol=1e-15)
    A = np.array([[2, 1], [1, 2]])
    S = psd_sqrt(A)
    assert np.abs(S @ S - A).max() <= 1e-10
    with pytest.raises(NegativeEigenvalue):
        psd_sqrt([[1, 0], [0, -1]])


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 16))
def test_psd_sqrt_contract(seed, n):
    rng = np.random.default_rng(seed)
    X = rand_complex(rng, n, max(1, n // 2))
    A = X @ X.conj().T
    S = psd_sqrt(A)
    nrm = np.linalg.norm(A, 2)
    assert np.linalg.norm(S @ S - A, 2) <= 1e-9 * nrm
    assert np.allclose(S, S.conj().T)
    assert np.linalg.eigvalsh(S).min() >= -1e-8 * np.sqrt(nrm)


def test_psd_sqrt_of_projection_is_itself():
    rng = np.random.default_rng(5)
    V, _ = np.linalg.qr(rand_complex(rng, 10, 4))
    P = V @ V.conj().T
    assert np.abs(psd_sqrt(P) - P).max() <= 1e-10


def test_complex_eig_examples():
    T = np.triu(rand_complex(np.random.default_rng(1), 6))
    res = complex_eig(T)
    assert np.allclose(np.sort_complex(res.values), np.sort_complex(np.diag(T)), atol=1e-12)
    res = complex_eig([[0, 1], [-1, 0]])
    assert np.allclose(res.values, [-1j, 1j], atol=1e-15) or np.allclose(res.values, [1j, -1j], atol=1e-15)
    assert res.normal


@pytest.mark.parametrize("seed", range(10))
def test_complex_eig_residuals(seed):
    A = rand_complex(np.random.default_rng(seed), 24)
    res = complex_eig(A)
    nrm = np.linalg.norm(A, 2)
    for lam, v in zip(res.values, res.vectors.T):
        assert np.linalg.norm(A @ v - lam * v) <= 1e-8 * nrm
    # real-part ordering for general input
    assert np.all(np.diff(res.values.real) >= 0)


@pytest.mark.parametrize("n", [12, 40])
def test_unitary_eigenvalues_are_unimodular(n):
    U = rotation_unitary(np.random.default_rng(n), n)
    res = complex_eig(U)
    assert res.normal
    assert np.abs(np.abs(res.values) - 1).max() <= 1e-9
    assert np.linalg.norm(res.vectors.conj().T @ res.vectors - np.eye(n)) <= 1e-12
    ang = np.angle(res.values)
    assert np.all(np.diff(ang) >= -1e-12)


def test_normal_path_strict_upper_small():
    rng = np.random.default_rng(3)
    Q, _ = np.linalg.qr(rand_complex(rng, 15))
    A = Q @ np.diag(rand_complex(rng, 15, 1).ravel()) @ Q.conj().T
    res = complex_eig(A)
    nrm = np.linalg.norm(A, 2)
    assert res.normal
    assert np.linalg.norm(np.triu(res.schur, 1)) <= 1e-8 * nrm


def test_schur_reconstructs():
    A = rand_complex(np.random.default_rng(9), 20)
    T, Z = complex_schur(A)
    assert np.abs(np.tril(T, -1)).max() == 0
    assert np.linalg.norm(Z @ T @ Z.conj().T - A) <= 1e-12 * np.linalg.norm(A)


def test_spectral_norm_bound_examples():
    assert spectral_norm_bound(np.zeros((3, 3))) == (0.0, 0.0)
    est, up = spectral_norm_bound(np.diag([1.0, -3.0]))
    assert est == pytest.approx(3, rel=1e-10) and up >= 3
    est, up = spectral_norm_bound(np.eye(8, k=-1), tol=1e-12)
    assert est == pytest.approx(1, rel=1e-10) and up >= 1


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 30))
def test_spectral_norm_bound_brackets_true_norm(seed, n):
    A = rand_complex(np.random.default_rng(seed), n)
    est, up = spectral_norm_bound(A)
    true = np.linalg.norm(A, 2)
    assert est <= true * (1 + 1e-12)
    assert up >= true * (1 - 1e-12)
    absA = np.abs(A)
    assert up <= np.sqrt(absA.sum(0).max() * absA.sum(1).max()) * (1 + 1e-15)


def test_normal_spectral_measure_recovers_weights():
    rng = np.random.default_rng(8)
    n = 30
    U = rotation_unitary(rng, n, dtype=np.clongdouble)
    v = np.zeros(n, dtype=np.clongdouble)
    v[0] = 1
    values, weights, _ = normal_spectral_measure(U, v)
    assert values.dtype == np.clongdouble
    assert abs(float(weights.sum()) - 1) < 1e-17
    # spectral moments reproduce <U^n v, v>
    x = v.copy()
    for k in range(12):
        got = np.sum(weights * values**k)
        assert abs(complex(got - x[0])) < 1e-16
        x = U @ x


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 60), st.integers(1, 60), st.integers(1, 60))
def test_extended_matmul_matches_long_double_product(seed, m, k, n):
    rng = np.random.default_rng(seed)
    A = rand_complex(rng, m, k).astype(np.clongdouble) / np.clongdouble(3)
    B = rand_complex(rng, k, n).astype(np.clongdouble) / np.clongdouble(7)
    A[0] *= np.clongdouble(1e-9)
    B[:, -1] *= np.clongdouble(1e6)
    if m > 1:
        A[1] = 0
    ref = A @ B
    got = extended_matmul(A, B)
    scale = np.abs(A).max(axis=1)[:, None] * np.abs(B).max(axis=0)[None, :]
    scale[scale == 0] = 1
    eps = float(np.finfo(np.longdouble).eps)
    assert got.dtype == np.clongdouble
    assert float((np.abs(got - ref) / scale).max()) <= 4 * k * eps
