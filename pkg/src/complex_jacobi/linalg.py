"""Dense complex linear algebra: Hermitian Jacobi eigensolver, PSD square
roots, Hessenberg/QR Schur decomposition and spectral norm estimates.

Everything is written against numpy arrays.  The Hermitian routines work in
whatever precision they are handed (``complex128`` or ``clongdouble``); the
QR iteration runs compiled in double precision and normal matrices can be
refined afterwards in the input's precision (see
:func:`normal_spectral_measure`).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import EigenFailure, NegativeEigenvalue, NoConvergence, NotHermitian

MAX_SIZE = 4096
HERMITIAN_TOL = 1e-10
NORMAL_TOL = 1e-9
SCHUR_UPPER_TOL = 1e-8


def as_dense_matrix(A) -> np.ndarray:
    """Validate a square complex matrix with finite entries.

    ``clongdouble`` input keeps its precision; anything else becomes
    ``complex128``.  Sizes are capped at 4096 (all routines are O(n^3)).
    """
    arr = np.asarray(A)
    dtype = np.clongdouble if arr.dtype in (np.clongdouble, np.longdouble) else np.complex128
    arr = np.array(arr, dtype=dtype)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] > MAX_SIZE:
        raise ValueError(f"matrix size {arr.shape[0]} exceeds the cap of {MAX_SIZE}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def _real_dtype(dtype):
    return np.longdouble if dtype == np.clongdouble else np.float64


def _fro(A):
    return np.sqrt(np.sum(np.abs(A) ** 2))


def hermitian_eig(A):
    """Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Returns ``(w, Q)`` with real eigenvalues ``w`` ascending and unitary ``Q``
    so that ``A @ Q = Q @ diag(w)``.
    """
    A = as_dense_matrix(A)
    n = A.shape[0]
    nrm = _fro(A)
    if _fro(A - A.conj().T) > HERMITIAN_TOL * nrm:
        raise NotHermitian("matrix is not Hermitian")
    A = (A + A.conj().T) / 2
    rdtype = _real_dtype(A.dtype)
    eps = np.finfo(rdtype).eps
    V = np.eye(n, dtype=A.dtype)
    if nrm == 0 or n == 1:
        return A.diagonal().real.astype(rdtype).copy(), V
    mask = ~np.eye(n, dtype=bool)
    skip = eps * nrm / (100 * n)
    for _ in range(100):
        if np.sqrt(np.sum(np.abs(A[mask]) ** 2)) <= eps * nrm / 10:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                m = abs(apq)
                if m <= skip:
                    continue
                ph = apq / m
                theta = (A[q, q].real - A[p, p].real) / (2 * m)
                t = (1 if theta >= 0 else -1) / (abs(theta) + np.sqrt(1 + theta * theta))
                c = 1 / np.sqrt(1 + t * t)
                s = t * c
                # G = [[c, s], [-s*conj(ph), c*conj(ph)]] zeroes the (p, q) pair
                g21 = -s * np.conj(ph)
                g22 = c * np.conj(ph)
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp + g21 * cq
                A[:, q] = s * cp + g22 * cq
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp + np.conj(g21) * rq
                A[q, :] = s * rp + np.conj(g22) * rq
                A[p, q] = 0
                A[q, p] = 0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp + g21 * vq
                V[:, q] = s * vp + g22 * vq
    w = A.diagonal().real.astype(rdtype)
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def psd_sqrt(A):
    """Hermitian positive semidefinite square root.

    Eigenvalues down to ``-1e-10 * ||A||`` are treated as rounding and set to
    zero, as are positive ones below ``10 n eps ||A||``; anything more
    negative raises :class:`NegativeEigenvalue`.
    """
    A = as_dense_matrix(A)
    w, V = hermitian_eig(A)
    scale = np.max(np.abs(w)) if len(w) else 0
    if len(w) and w[0] < -1e-10 * scale:
        raise NegativeEigenvalue(w[0])
    # eigenvalues at rounding level are zero to working accuracy; their
    # square roots would otherwise inject sqrt(eps)-sized noise
    floor = 10 * len(w) * np.finfo(w.dtype).eps * scale
    w = np.where(w <= floor, 0, w)
    S = (V * np.sqrt(w)) @ V.conj().T
    return (S + S.conj().T) / 2


def complex_schur(A):
    """Complex Schur form ``A = Z T Z^H`` in double precision."""
    A = as_dense_matrix(A).astype(np.complex128)
    n = A.shape[0]
    H = np.ascontiguousarray(A.copy())
    Z = np.eye(n, dtype=np.complex128)
    if n == 0:
        return H, Z
    _kernels.hessenberg(H, Z)
    used = _kernels.schur_qr(H, Z, 30 * n)
    if used < 0:
        raise NoConvergence(f"QR iteration exceeded {30 * n} sweeps", max_sweeps=30 * n)
    return H, Z


@dataclass
class EigResult:
    values: np.ndarray
    vectors: np.ndarray
    normal: bool
    schur: np.ndarray
    schur_vectors: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def _is_normal(A, nrm):
    return _fro(A.conj().T @ A - A @ A.conj().T) <= NORMAL_TOL * nrm**2


def _ordering(values, unitary):
    if unitary:
        ang = np.angle(values)
        return np.lexsort((np.abs(values), np.round(ang, 12)))
    return np.lexsort((values.imag, values.real))


def complex_eig(A) -> EigResult:
    """Eigenvalues and eigenvectors of a general complex matrix.

    Hessenberg reduction followed by shifted QR.  For (numerically) normal
    input the Schur vectors are returned as an orthonormal eigenbasis;
    otherwise eigenvectors come from back substitution on the triangular
    factor.  Unitary inputs are ordered by argument then modulus, all others
    by real part.
    """
    A = as_dense_matrix(A).astype(np.complex128)
    n = A.shape[0]
    nrm = spectral_norm_bound(A)[1] if n else 0.0
    T, Z = complex_schur(A)
    values = T.diagonal().copy()
    normal = bool(n == 0 or nrm == 0 or _is_normal(A, nrm))
    upper = _fro(np.triu(T, 1))
    diagnostics = {"strict_upper": float(upper)}
    if normal:
        if upper > SCHUR_UPPER_TOL * max(nrm, 1e-300) and nrm > 0:
            raise EigenFailure(
                f"normal input but Schur factor has strict upper part {upper:.2e}",
                strict_upper=float(upper),
            )
        vectors = Z.copy()
    else:
        X = _kernels.triangular_eigvecs(T)
        vectors = Z @ X
        vectors /= np.linalg.norm(vectors, axis=0)
    unitary = bool(n and np.max(np.abs(A.conj().T @ A - np.eye(n))) <= NORMAL_TOL)
    order = _ordering(values, unitary)
    return EigResult(values[order], vectors[:, order], normal, T, Z, diagnostics)


def spectral_norm_bound(A, tol=1e-10, max_iter=10000):
    """Power iteration on ``A^H A``.

    Returns ``(estimate, upper)``.  The estimate never exceeds the true norm;
    ``upper = estimate * (1 + 10*tol)`` is capped by the always-valid bound
    ``sqrt(||A||_1 * ||A||_inf)``.
    """
    A = np.asarray(A)
    if A.size == 0 or not np.any(A):
        return 0.0, 0.0
    Ad = A.astype(np.complex128)
    n = Ad.shape[1]
    rng = np.random.default_rng(0)
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        Av = Ad @ v
        new = float(np.vdot(Av, Av).real)
        w = Ad.conj().T @ Av
        wn = np.linalg.norm(w)
        if wn == 0:
            break
        v = w / wn
        if abs(new - lam) <= tol * new:
            lam = new
            break
        lam = new
    estimate = float(np.sqrt(lam))
    absA = np.abs(Ad)
    hard = float(np.sqrt(absA.sum(axis=0).max() * absA.sum(axis=1).max()))
    return estimate, min(estimate * (1 + 10 * tol), hard)


def _slices(X, axis, beta, count):
    """Cut complex ``X`` into integer-valued float64 slices on a per-row/column grid.

    Returns ``(re, im, unit)`` with ``X ~= sum_k (re_k + i im_k) * unit * 2**(-beta k)``,
    every slice entry bounded by ``2**beta`` and ``unit`` a power of two.
    """
    mag = np.maximum(np.abs(X.real), np.abs(X.imag)).max(axis=axis, keepdims=True)
    e = np.frexp(np.where(mag > 0, mag, 1))[1]
    unit = np.ldexp(np.ones(mag.shape, dtype=np.longdouble), e - beta)
    step = np.ldexp(np.longdouble(1), beta)
    re, im = [], []
    # scaling by powers of two is exact, so each pass peels off beta bits
    rest_re, rest_im = X.real * (1 / unit), X.imag * (1 / unit)
    for _ in range(count):
        s_re, s_im = np.round(rest_re), np.round(rest_im)
        rest_re, rest_im = (rest_re - s_re) * step, (rest_im - s_im) * step
        re.append(s_re.astype(np.float64))
        im.append(s_im.astype(np.float64))
    return re, im, unit


def extended_matmul(A, B, count=3):
    """``A @ B`` for ``clongdouble`` operands using float64 BLAS.

    Both operands are cut into integer slices (per row of ``A``, per column
    of ``B``) narrow enough that each slice product is summed exactly in
    double precision; the partial products are accumulated in extended
    precision.  With three slices the result agrees with a plain extended
    matmul to a few units of ``2**-64`` relative to the row and column
    maxima, at BLAS speed.
    """
    A = np.asarray(A, dtype=np.clongdouble)
    B = np.asarray(B, dtype=np.clongdouble)
    n = A.shape[1]
    beta = (53 - int(np.ceil(np.log2(max(2 * n, 2))))) // 2
    ar, ai, ua = _slices(A, 1, beta, count)
    br, bi, ub = _slices(B, 0, beta, count)
    step = np.ldexp(np.longdouble(1), -beta)
    re = np.zeros((A.shape[0], B.shape[1]), dtype=np.longdouble)
    im = np.zeros_like(re)
    for level in range(count):
        lre = np.zeros_like(re)
        lim = np.zeros_like(re)
        for i in range(level + 1):
            j = level - i
            lre += ar[i] @ br[j]
            lre -= ai[i] @ bi[j]
            lim += ar[i] @ bi[j]
            lim += ai[i] @ br[j]
        re += lre * step**level
        im += lim * step**level
    scale = ua * ub
    out = np.empty(re.shape, dtype=np.clongdouble)
    out.real = re * scale
    out.imag = im * scale
    return out


def normal_spectral_measure(A, v, apply=None, gap=1e-6):
    """Eigenvalues of a normal matrix and the spectral weights of ``v``.

    Returns ``(values, weights, diagnostics)`` with ``weights[j] = |<q_j, v>|^2``
    for an orthonormal eigenbasis ``q_j``.  The Schur decomposition is
    computed in double precision and then refined to first order in the
    precision of ``A`` (``clongdouble`` input gives extended-precision
    output).  ``apply(X)`` may supply a structured product ``A @ X``.
    Eigenvalue pairs closer than ``gap`` are not decoupled by the refinement.
    """
    A = as_dense_matrix(A)
    wd = A.dtype
    n = A.shape[0]
    nrm = spectral_norm_bound(A)[1]
    T, Z = complex_schur(A)
    upper = float(_fro(np.triu(T, 1)))
    if upper > SCHUR_UPPER_TOL * max(nrm, 1e-300) and nrm > 0:
        raise EigenFailure(
            f"matrix is not normal to working accuracy (strict upper {upper:.2e})",
            strict_upper=upper,
        )
    Q = Z.astype(wd)
    v = np.asarray(v).astype(wd)
    matmul = extended_matmul if wd == np.clongdouble else np.matmul
    Qh = np.ascontiguousarray(Q.conj().T)
    Hdev = matmul(Qh, Q) - np.eye(n, dtype=wd)
    AQ = apply(Q) if apply is not None else matmul(A, Q)
    E0 = matmul(Qh, AQ)
    lam0 = E0.diagonal().copy()
    # E in the orthonormalized basis Q (I - Hdev/2); second-order terms dropped
    E = E0 - (Hdev * lam0[None, :] + lam0[:, None] * Hdev) / 2
    lam = E.diagonal().copy()
    d = lam[None, :] - lam[:, None]
    coupled = np.abs(d.astype(np.complex128)) > gap
    np.fill_diagonal(coupled, False)
    X = np.zeros_like(E)
    X[coupled] = E[coupled] / d[coupled]
    q = Q.conj().T @ v
    q = q - (Hdev @ q) / 2
    y = q + X.conj().T @ q
    values = lam + np.einsum("ji,ij->j", E, X)
    weights = np.abs(y) ** 2
    offdiag = E.copy()
    np.fill_diagonal(offdiag, 0)
    diagnostics = {
        "schur_strict_upper": upper,
        "basis_orthogonality": float(np.max(np.abs(Hdev))),
        "max_offdiag_before_refinement": float(np.max(np.abs(offdiag))) if n > 1 else 0.0,
        "uncoupled_pairs": int((~coupled).sum() - n) // 2,
    }
    return values, weights, diagnostics
