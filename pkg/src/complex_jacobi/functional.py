"""The linear functional ``S(u) = sum_k c_k s_k`` and the bilinear form
``sigma(u, v) = S(u v)`` determined by a moment sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MomentSequence, Polynomial, QQi, poly_mul
from .errors import InsufficientMoments
from .jacobi import JacobiSpec, compute_moments, generate_polynomials

SINGULAR_RATIO = 1e-10


@dataclass(frozen=True)
class BilinearFunctional:
    """``sigma`` on polynomial pairs; symmetric and shift-compatible by construction."""

    moments: MomentSequence

    @property
    def K(self) -> int:
        return self.moments.K


def eval_S(F: BilinearFunctional, p: Polynomial):
    if p.degree > F.K:
        raise InsufficientMoments(p.degree, F.K)
    s = F.moments.values
    acc = 0
    for k, c in enumerate(p.coeffs):
        acc = acc + c * s[k]
    return acc


def eval_sigma(F: BilinearFunctional, u: Polynomial, v: Polynomial):
    if u.coeffs and v.coeffs and u.degree + v.degree > F.K:
        raise InsufficientMoments(u.degree + v.degree, F.K)
    return eval_S(F, poly_mul(u, v))


@dataclass(frozen=True)
class OrthonormalityReport:
    max_deviation: float
    n_max: int
    tol: float
    passed: bool
    worst: tuple[int, int]


def check_orthonormality(spec: JacobiSpec, n_max: int, tol: float = 1e-9) -> OrthonormalityReport:
    """Max over ``n, m <= n_max`` of ``|S(p_n p_m) - delta_nm|``.

    In exact mode the deviation is computed exactly and reported as a float
    (zero when the identity holds).
    """
    F = BilinearFunctional(compute_moments(spec, 2 * n_max))
    polys = generate_polynomials(spec, n_max + 1)
    worst, where = 0.0, (0, 0)
    for n in range(n_max + 1):
        for m in range(n, n_max + 1):
            dev = eval_sigma(F, polys[n], polys[m]) - (1 if n == m else 0)
            mag = float(np.sqrt(float(dev.abs2()))) if isinstance(dev, QQi) else abs(complex(dev))
            if mag > worst:
                worst, where = mag, (n, m)
    return OrthonormalityReport(worst, n_max, tol, worst <= tol, where)


def hankel_window(F: BilinearFunctional, k: int) -> np.ndarray:
    """``(k+1) x (k+1)`` matrix with entries ``s_{i+j} = sigma(λ^i, λ^j)``."""
    if 2 * k > F.K:
        raise InsufficientMoments(2 * k, F.K)
    s = F.moments.values
    idx = np.add.outer(np.arange(k + 1), np.arange(k + 1))
    return s[idx]


def _exact_det(H) -> QQi:
    M = [[QQi.coerce(x) for x in row] for row in H]
    n = len(M)
    det = QQi(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return QQi(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = -det
        det = det * M[c][c]
        for r in range(c + 1, n):
            f = M[r][c] / M[c][c]
            if f != 0:
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return det


@dataclass(frozen=True)
class HankelReport:
    order: int
    nonsingular: bool
    smin: float | None
    smax: float | None
    determinant: QQi | None = None

    @property
    def ratio(self):
        if self.smin is None or not self.smax:
            return None
        return self.smin / self.smax


def hankel_nonsingular(F: BilinearFunctional, k: int, tol: float = SINGULAR_RATIO) -> HankelReport:
    """Nondegeneracy of ``sigma`` on polynomials of degree ``<= k``.

    Float mode compares the extreme singular values (``smin <= tol * smax``
    means singular); exact mode uses the determinant.  A nonsingular window
    guarantees that every ``u`` of exact degree ``k`` has a degree-``k``
    partner ``û`` with ``sigma(u, û) != 0`` (see :func:`witness_polynomial`).
    """
    H = hankel_window(F, k)
    if F.moments.exact:
        det = _exact_det(H)
        return HankelReport(k, det != 0, None, None, det)
    sv = np.linalg.svd(H.astype(np.complex128), compute_uv=False)
    smax, smin = float(sv[0]), float(sv[-1])
    return HankelReport(k, smax > 0 and smin > tol * smax, smin, smax)


def witness_polynomial(F: BilinearFunctional, u: Polynomial) -> Polynomial:
    """Candidate degree-``k`` partner ``û`` with ``sigma(u, û) != 0``.

    Built from a solve against the order-``k`` Hankel window, so it is only
    available when that window is nonsingular.  This is a constructed
    candidate, not a canonical choice.
    """
    k = u.degree
    if k < 0:
        raise ValueError("the zero polynomial has no witness")
    H = hankel_window(F, k)
    c = np.array([u.coefficient(i) for i in range(k + 1)], dtype=H.dtype)
    Hc = H @ c
    if F.moments.exact:
        if Hc[k] != 0:
            return Polynomial.monomial(k, QQi(1))
        d0 = _exact_solve(H, k)
    else:
        if abs(Hc[k]) > 0:
            return Polynomial.monomial(k, 1 + 0j)
        rhs = np.zeros(k + 1, dtype=np.complex128)
        rhs[k] = 1
        d0 = np.linalg.solve(H.astype(np.complex128), rhs)
    # sigma(u, λ^k + t d0) = Hc[k] + t c_k with Hc[k] = 0 and c_k != 0
    for t in (1, 2, 3):
        cand = [(1 if i == k else 0) + t * d0[i] for i in range(k + 1)]
        if cand[k] != 0:
            return Polynomial(cand)
    raise AssertionError("unreachable: at most one t can cancel the leading coefficient")


def _exact_solve(H, k):
    n = k + 1
    M = [[QQi.coerce(x) for x in row] + [QQi(1 if r == k else 0)] for r, row in enumerate(H)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular Hankel window")
        M[c], M[piv] = M[piv], M[c]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c] / M[c][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [M[r][n] / M[r][r] for r in range(n)]
