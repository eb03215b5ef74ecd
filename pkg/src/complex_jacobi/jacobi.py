"""Finite windows of semi-infinite complex Jacobi matrices.

A :class:`JacobiSpec` holds ``b_0..b_{N-1}`` on the diagonal and
``a_0..a_{N-2}`` on both off-diagonals (the matrix is complex symmetric,
not Hermitian).  Every operation states how much of the window it needs and
raises :class:`WindowOverflow` rather than silently truncating.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import MomentSequence, Polynomial, QQi
from .errors import EmptySpec, ValidationError, WindowOverflow, ZeroOffDiagonal


def _entries(values, exact):
    vals = list(values)
    if exact:
        arr = np.empty(len(vals), dtype=object)
        arr[:] = [QQi.coerce(v) for v in vals]
        return arr
    return np.array([complex(v) for v in vals], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class JacobiSpec:
    """Window of a complex Jacobi matrix.

    Entries are ``complex128`` by default.  Passing :class:`QQi` or
    :class:`~fractions.Fraction` entries (or ``exact=True``) switches to exact
    Gaussian-rational arithmetic.
    """

    a: np.ndarray
    b: np.ndarray
    exact: bool = False

    def __post_init__(self):
        a, b = list(self.a), list(self.b)
        exact = self.exact or any(isinstance(v, (QQi, Fraction)) for v in a + b)
        if len(b) == 0:
            raise EmptySpec()
        if len(a) != len(b) - 1:
            raise ValidationError(
                f"window with {len(b)} diagonal entries needs {len(b) - 1} off-diagonal entries, got {len(a)}"
            )
        a_arr, b_arr = _entries(a, exact), _entries(b, exact)
        if not exact and not (np.all(np.isfinite(a_arr)) and np.all(np.isfinite(b_arr))):
            raise ValidationError("entries must be finite")
        for k, ak in enumerate(a_arr):
            if ak == 0:
                raise ZeroOffDiagonal(k)
        a_arr.flags.writeable = False
        b_arr.flags.writeable = False
        object.__setattr__(self, "a", a_arr)
        object.__setattr__(self, "b", b_arr)
        object.__setattr__(self, "exact", exact)

    @property
    def N(self) -> int:
        return len(self.b)

    @classmethod
    def constant(cls, a, b, N, exact=False) -> "JacobiSpec":
        """Window of length ``N`` with constant entries."""
        return cls([a] * (N - 1), [b] * N, exact=exact)

    def to_float(self) -> "JacobiSpec":
        if not self.exact:
            return self
        return JacobiSpec([complex(v) for v in self.a], [complex(v) for v in self.b])

    def __repr__(self):
        return f"JacobiSpec(N={self.N}, exact={self.exact})"


@dataclass(frozen=True)
class ValidationReport:
    N: int
    M: float
    exact: bool


def validate(spec: JacobiSpec) -> ValidationReport:
    """Re-check the window and report the entry bound ``M = max(|a_k|, |b_k|)``."""
    if spec.N == 0:
        raise EmptySpec()
    for k, ak in enumerate(spec.a):
        if ak == 0:
            raise ZeroOffDiagonal(k)
    mags = [abs(complex(v)) for v in list(spec.a) + list(spec.b)]
    return ValidationReport(N=spec.N, M=max(mags), exact=spec.exact)


def apply_window(spec: JacobiSpec, u) -> np.ndarray:
    """Band action ``(Ju)_n = a_{n-1} u_{n-1} + b_n u_n + a_n u_{n+1}``.

    ``u`` has at most ``N - 1`` coordinates and the result one more, so the
    computation is exact: no entry outside the window is ever needed.
    """
    u = np.asarray(u, dtype=object if spec.exact else np.complex128)
    m = len(u)
    if m > spec.N - 1:
        raise WindowOverflow(m + 1, spec.N)
    out = np.zeros(m + 1, dtype=u.dtype)
    if m == 0:
        return out
    out[:m] = out[:m] + spec.b[:m] * u
    out[1:] = out[1:] + spec.a[:m] * u
    out[: m - 1] = out[: m - 1] + spec.a[: m - 1] * u[1:]
    return out


def generate_polynomials(spec: JacobiSpec, n: int) -> list[Polynomial]:
    """``p_0 .. p_{n-1}`` from ``a_{k-1} p_{k-1} + b_k p_k + a_k p_{k+1} = λ p_k``.

    Float specs produce ``clongdouble`` coefficients: the coefficients grow
    geometrically when ``|a_k|`` is small, and identities checked against
    them (orthonormality, intertwining) inherit their rounding.
    """
    if n > spec.N:
        raise WindowOverflow(n, spec.N)
    one = QQi(1) if spec.exact else np.clongdouble(1)
    polys = [Polynomial([one])]
    for k in range(n - 1):
        q = polys[k].times_x() - polys[k] * spec.b[k]
        if k > 0:
            q = q - polys[k - 1] * spec.a[k - 1]
        polys.append(q / spec.a[k])
    return polys[:n]


def compute_moments(spec: JacobiSpec, K: int) -> MomentSequence:
    """``s_n = (J^n e_0, e_0)`` for ``n <= K`` by iterated band action.

    Float specs are iterated in extended precision and the moments are
    returned as ``clongdouble``; later stages amplify moment errors by the
    size of the orthogonal polynomial coefficients.
    """
    if K > spec.N - 1:
        raise WindowOverflow(K + 1, spec.N)
    if spec.exact:
        v = np.array([QQi(1)], dtype=object)
        moments = [QQi(1)]
        for _ in range(K):
            v = apply_window(spec, v)
            moments.append(v[0])
        return MomentSequence(moments)
    a = spec.a.astype(np.clongdouble)
    b = spec.b.astype(np.clongdouble)
    v = np.zeros(K + 1, dtype=np.clongdouble)
    v[0] = 1
    out = np.empty(K + 1, dtype=np.clongdouble)
    out[0] = 1
    for n in range(1, K + 1):
        # support of J^{n-1} e_0 is coordinates 0..n-1
        m = n
        w = np.zeros_like(v)
        w[:m] = b[:m] * v[:m]
        w[1 : m + 1] += a[:m] * v[:m]
        w[: m - 1] += a[: m - 1] * v[1:m]
        v = w
        out[n] = v[0]
    return MomentSequence(out)


def norm_bound(spec: JacobiSpec) -> float:
    """Row-sum bound ``sup_n (|a_{n-1}| + |b_n| + |a_n|)`` on the operator norm.

    The matrix beyond the window is taken to repeat the last entries, so the
    tail rows contribute ``2|a_{N-2}| + |b_{N-1}|``.
    """
    a = np.array([abs(complex(v)) for v in spec.a])
    b = np.array([abs(complex(v)) for v in spec.b])
    if len(a) == 0:
        return float(b[0])
    a_ext = np.concatenate([[0.0], a, [a[-1]]])
    rows = a_ext[:-1] + b + a_ext[1:]
    return float(max(rows.max(), 2 * a[-1] + b[-1]))


def finite_section(spec: JacobiSpec, n: int) -> np.ndarray:
    """Leading ``n x n`` principal submatrix (dense, symmetric)."""
    if n > spec.N:
        raise WindowOverflow(n, spec.N)
    dtype = object if spec.exact else np.complex128
    J = np.zeros((n, n), dtype=dtype)
    for k in range(n):
        J[k, k] = spec.b[k]
    for k in range(n - 1):
        J[k, k + 1] = spec.a[k]
        J[k + 1, k] = spec.a[k]
    return J
