"""Value types shared by every module: exact Gaussian rationals, polynomials,
moment sequences and finitely atomic measures.

Floating-point values are ordinary ``complex`` (two IEEE doubles).  The
Gaussian-rational type :class:`QQi` provides an exact mode in which the
recurrence identities of the Jacobi machinery hold with zero residual.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyMeasure, NegativeWeight, NormalizationError, NotRepresentable

# weights in [-CLAMP_FLOOR, 0) are rounding noise and become 0
CLAMP_FLOOR = 1e-12
S0_TOL = 1e-10


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, numbers.Real):
        if not math.isfinite(float(x)):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(float(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


class QQi:
    """Exact complex rational ``re + i*im`` with :class:`fractions.Fraction` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, QQi):
            re, im = re.re, re.im + _to_fraction(im)
        object.__setattr__(self, "re", _to_fraction(re))
        object.__setattr__(self, "im", _to_fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("QQi is immutable")

    @classmethod
    def coerce(cls, x) -> "QQi":
        if isinstance(x, QQi):
            return x
        if isinstance(x, (complex, np.complexfloating)):
            return cls(x.real, x.imag)
        return cls(x)

    def __add__(self, other):
        try:
            o = QQi.coerce(other)
        except TypeError:
            return NotImplemented
        return QQi(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = QQi.coerce(other)
        except TypeError:
            return NotImplemented
        return QQi(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return QQi.coerce(other) - self

    def __mul__(self, other):
        try:
            o = QQi.coerce(other)
        except TypeError:
            return NotImplemented
        return QQi(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QQi.coerce(other)
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError("QQi division by zero")
        num = self * o.conjugate()
        return QQi(num.re / d, num.im / d)

    def __rtruediv__(self, other):
        return QQi.coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, numbers.Integral) or n < 0:
            raise ValueError("only non-negative integer powers")
        out, base = QQi(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        return QQi(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __abs__(self):
        return math.sqrt(self.abs2())

    def __eq__(self, other):
        try:
            o = QQi.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __repr__(self):
        return f"QQi({self.re}, {self.im})"


def _fraction_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def exact_sqrt(z: QQi) -> QQi:
    """Principal square root of a Gaussian rational that is a perfect square.

    Raises :class:`NotRepresentable` when the root is irrational.
    """
    z = QQi.coerce(z)
    modulus = _fraction_sqrt(z.abs2())
    if modulus is None:
        raise NotRepresentable(f"{z!r} has no rational square root")
    x = _fraction_sqrt((modulus + z.re) / 2)
    y = _fraction_sqrt((modulus - z.re) / 2)
    if x is None or y is None:
        raise NotRepresentable(f"{z!r} has no rational square root")
    if z.im < 0:
        y = -y
    return QQi(x, y)


def is_exact(x) -> bool:
    return isinstance(x, (QQi, Fraction, numbers.Integral)) and not isinstance(x, bool)


class Polynomial:
    """Polynomial in the monomial basis; ``coeffs[k]`` multiplies ``λ**k``.

    Only exact zeros are trimmed from the top, so degree bookkeeping never
    depends on a magnitude threshold.  The zero polynomial has degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def constant(cls, c) -> "Polynomial":
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c=1) -> "Polynomial":
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else 0

    def coefficient(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __call__(self, z):
        return poly_eval(self, z)

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self.coefficient(k) + other.coefficient(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        return self + (-other)

    def __rsub__(self, other):
        return Polynomial([other]) - self

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return poly_mul(self, other)
        return Polynomial(c * other for c in self.coeffs)

    def __rmul__(self, other):
        return Polynomial(other * c for c in self.coeffs)

    def __truediv__(self, scalar):
        return Polynomial(c / scalar for c in self.coeffs)

    def times_x(self) -> "Polynomial":
        """Multiply by the independent variable."""
        if not self.coeffs:
            return self
        return Polynomial((0,) + self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial([other])
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def max_abs_diff(self, other: "Polynomial") -> float:
        n = max(len(self.coeffs), len(other.coeffs))
        if n == 0:
            return 0.0
        return max(abs(complex(self.coefficient(k) - other.coefficient(k))) for k in range(n))

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r})"


def poly_mul(u: Polynomial, v: Polynomial) -> Polynomial:
    """Cauchy product of coefficient lists."""
    if not u.coeffs or not v.coeffs:
        return Polynomial()
    out = [0] * (len(u.coeffs) + len(v.coeffs) - 1)
    for i, a in enumerate(u.coeffs):
        if a == 0:
            continue
        for j, b in enumerate(v.coeffs):
            out[i + j] = out[i + j] + a * b
    return Polynomial(out)


def poly_eval(p: Polynomial, z):
    """Horner evaluation."""
    acc = 0
    for c in reversed(p.coeffs):
        acc = acc * z + c
    return acc


def _as_moment_array(values) -> np.ndarray:
    vals = list(values)
    if any(isinstance(v, (QQi, Fraction)) for v in vals):
        arr = np.empty(len(vals), dtype=object)
        arr[:] = [QQi.coerce(v) for v in vals]
        return arr
    arr = np.asarray(vals)
    if arr.dtype == np.clongdouble or arr.dtype == np.longdouble:
        return arr.astype(np.clongdouble)
    return arr.astype(np.complex128)


@dataclass(frozen=True, eq=False)
class MomentSequence:
    """Moments ``s_0 .. s_K`` with the normalization ``s_0 = 1``.

    ``values`` is a numpy array: ``complex128`` normally, ``clongdouble`` for
    extended-precision results, or ``object`` holding :class:`QQi` in exact
    mode.
    """

    values: np.ndarray

    def __post_init__(self):
        arr = _as_moment_array(self.values)
        if arr.ndim != 1 or len(arr) == 0:
            raise NormalizationError("a moment sequence needs at least s_0")
        if arr.dtype == object:
            if arr[0] != 1:
                raise NormalizationError(f"s_0 must equal 1, got {arr[0]!r}")
        else:
            if not np.all(np.isfinite(arr)):
                raise NormalizationError("moments must be finite")
            if abs(complex(arr[0]) - 1) > S0_TOL:
                raise NormalizationError(f"s_0 must equal 1, got {complex(arr[0])!r}")
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def K(self) -> int:
        return len(self.values) - 1

    @property
    def exact(self) -> bool:
        return self.values.dtype == object

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]

    def __iter__(self):
        return iter(self.values)

    def as_complex(self) -> np.ndarray:
        if self.exact:
            return np.array([complex(v) for v in self.values])
        return self.values.astype(np.complex128)

    def truncate(self, K: int) -> "MomentSequence":
        return MomentSequence(self.values[: K + 1])

    @property
    def growth_radius(self) -> float:
        return growth_radius(self)

    def __repr__(self):
        return f"MomentSequence(K={self.K}, values={list(self.values)!r})"


def growth_radius(s: MomentSequence) -> float:
    """``max_{1<=n<=K} |s_n|**(1/n)``: the smallest R with |s_n| <= R**n on the window."""
    vals = s.as_complex()
    radius = 0.0
    for n in range(1, len(vals)):
        radius = max(radius, abs(vals[n]) ** (1.0 / n))
    return radius


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Finite nonnegative combination of point masses.

    Atoms and weights are stored in extended precision (``clongdouble`` and
    ``longdouble``).  Weights in ``[-1e-12, 0)`` are clamped to zero and
    counted in ``diagnostics``; anything more negative is rejected.
    """

    atoms: np.ndarray
    weights: np.ndarray
    tau: float | None = None
    rho: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        z = np.asarray(self.atoms).astype(np.clongdouble).ravel()
        w = np.asarray(self.weights)
        if np.iscomplexobj(w):
            w = w.real
        w = w.astype(np.longdouble).ravel()
        if len(z) == 0:
            raise EmptyMeasure()
        if len(z) != len(w):
            raise ValueError("atoms and weights differ in length")
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(w))):
            raise NegativeWeight("atoms and weights must be finite")
        if np.any(w < -CLAMP_FLOOR):
            raise NegativeWeight(f"weight {float(w.min()):.3e} is negative beyond the clamp floor")
        diag = dict(self.diagnostics)
        tiny = w < 0
        if np.any(tiny):
            diag["clamped_weights"] = int(tiny.sum())
            diag["most_negative_weight"] = float(w.min())
            w = np.where(tiny, np.longdouble(0), w)
        z.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "atoms", z)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "diagnostics", diag)

    def __len__(self):
        return len(self.atoms)

    @property
    def mass(self):
        return self.weights.sum()

    @property
    def support_radius(self) -> float:
        return float(np.max(np.abs(self.atoms)))

    def moment(self, n: int):
        """``sum_j w_j z_j**n`` in extended precision."""
        return np.sum(self.weights * self.atoms**n)

    def integrate(self, f) -> complex:
        return np.sum(self.weights * np.array([f(z) for z in self.atoms]))


def coerce_scalars(values: Sequence, exact: bool = False) -> list:
    """Turn parsed numbers into ``complex`` (float mode) or :class:`QQi` (exact mode)."""
    if exact:
        return [QQi.coerce(v) for v in values]
    return [complex(v) for v in values]
