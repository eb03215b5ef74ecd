"""Compiled inner loops for the dense complex eigensolver (float64 only)."""

import numba as nb
import numpy as np

EPS = 2.220446049250313e-16
SAFMIN = 2.2250738585072014e-308


@nb.njit(cache=True)
def _givens(f, g):
    # returns real c, complex s with [[c, s], [-conj(s), c]] @ [f, g] = [r, 0]
    af = abs(f)
    ag = abs(g)
    if ag == 0.0:
        return 1.0, 0j
    if af == 0.0:
        return 0.0, np.conj(g) / ag
    r = np.hypot(af, ag)
    return af / r, (f / af) * np.conj(g) / r


@nb.njit(cache=True)
def hessenberg(A, Q):
    """In-place Householder reduction A -> Q^H A Q (upper Hessenberg), Q accumulated."""
    n = A.shape[0]
    for k in range(n - 2):
        m = n - k - 1
        alpha = 0.0
        for i in range(m):
            alpha += abs(A[k + 1 + i, k]) ** 2
        alpha = np.sqrt(alpha)
        if alpha == 0.0:
            continue
        x0 = A[k + 1, k]
        phase = x0 / abs(x0) if abs(x0) > 0.0 else 1.0 + 0j
        v = np.empty(m, dtype=np.complex128)
        for i in range(m):
            v[i] = A[k + 1 + i, k]
        v[0] += phase * alpha
        vn = 0.0
        for i in range(m):
            vn += abs(v[i]) ** 2
        vn = np.sqrt(vn)
        for i in range(m):
            v[i] /= vn
        for j in range(k, n):
            w = 0j
            for i in range(m):
                w += np.conj(v[i]) * A[k + 1 + i, j]
            for i in range(m):
                A[k + 1 + i, j] -= 2.0 * v[i] * w
        for i in range(n):
            w = 0j
            for j in range(m):
                w += A[i, k + 1 + j] * v[j]
            for j in range(m):
                A[i, k + 1 + j] -= 2.0 * w * np.conj(v[j])
        for i in range(n):
            w = 0j
            for j in range(m):
                w += Q[i, k + 1 + j] * v[j]
            for j in range(m):
                Q[i, k + 1 + j] -= 2.0 * w * np.conj(v[j])
        A[k + 1, k] = -phase * alpha
        for i in range(k + 2, n):
            A[i, k] = 0j


@nb.njit(cache=True)
def _wilkinson(a, b, c, d):
    half = 0.5 * (a - d)
    disc = np.sqrt(half * half + b * c)
    m = 0.5 * (a + d)
    e1 = m + disc
    e2 = m - disc
    if abs(e1 - d) <= abs(e2 - d):
        return e1
    return e2


@nb.njit(cache=True)
def schur_qr(H, Z, max_sweeps):
    """Shifted single-shift QR on a Hessenberg matrix, in place.

    On return H is upper triangular and Z is updated with the accumulated
    rotations.  Returns the number of sweeps used, or -1 on failure.
    """
    n = H.shape[0]
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale = max(scale, abs(H[i, j]))
    if scale == 0.0:
        return 0
    hi = n - 1
    sweeps = 0
    stall = 0
    while hi > 0:
        l = hi
        while l > 0:
            s = abs(H[l - 1, l - 1]) + abs(H[l, l])
            if s == 0.0:
                s = scale
            if abs(H[l, l - 1]) <= EPS * s or abs(H[l, l - 1]) < SAFMIN:
                H[l, l - 1] = 0j
                break
            l -= 1
        if l == hi:
            hi -= 1
            stall = 0
            continue
        sweeps += 1
        stall += 1
        if sweeps > max_sweeps:
            return -1
        if stall % 10 == 0:
            mu = H[hi, hi] + 0.75 * abs(H[hi, hi - 1])
        else:
            mu = _wilkinson(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
        x = H[l, l] - mu
        y = H[l + 1, l]
        for k in range(l, hi):
            if k > l:
                x = H[k, k - 1]
                y = H[k + 1, k - 1]
            c, s = _givens(x, y)
            j0 = k - 1 if k > l else l
            for j in range(j0, n):
                t1 = H[k, j]
                t2 = H[k + 1, j]
                H[k, j] = c * t1 + s * t2
                H[k + 1, j] = -np.conj(s) * t1 + c * t2
            if k > l:
                H[k + 1, k - 1] = 0j
            i1 = min(k + 2, hi)
            for i in range(i1 + 1):
                t1 = H[i, k]
                t2 = H[i, k + 1]
                H[i, k] = c * t1 + np.conj(s) * t2
                H[i, k + 1] = -s * t1 + c * t2
            for i in range(n):
                t1 = Z[i, k]
                t2 = Z[i, k + 1]
                Z[i, k] = c * t1 + np.conj(s) * t2
                Z[i, k + 1] = -s * t1 + c * t2
    for i in range(n):
        for j in range(i):
            H[i, j] = 0j
    return sweeps


@nb.njit(cache=True)
def triangular_eigvecs(T):
    """Right eigenvectors of an upper-triangular matrix by back substitution."""
    n = T.shape[0]
    X = np.zeros((n, n), dtype=np.complex128)
    tnorm = 0.0
    for i in range(n):
        for j in range(i, n):
            tnorm = max(tnorm, abs(T[i, j]))
    smin = max(EPS * tnorm, SAFMIN)
    for j in range(n):
        X[j, j] = 1.0
        lam = T[j, j]
        for i in range(j - 1, -1, -1):
            acc = 0j
            for m in range(i + 1, j + 1):
                acc += T[i, m] * X[m, j]
            d = T[i, i] - lam
            if abs(d) < smin:
                d = smin + 0j
            X[i, j] = -acc / d
            if abs(X[i, j]) > 1e150:
                for m in range(i, j + 1):
                    X[m, j] *= 1e-150
    return X
