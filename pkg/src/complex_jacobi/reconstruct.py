"""Recover Jacobi parameters from moments by formal (bilinear) orthogonalization.

Each step computes ``b_k = sigma(λ p_k, p_k)``, the residual
``q = (λ - b_k) p_k - a_{k-1} p_{k-1}`` and ``c = sigma(q, q)``.  The
off-diagonal entry is a square root of ``c``; which root is taken is the sign
freedom, fixed here by a :class:`SignRule`.  A vanishing ``c`` is a
breakdown: the Hankel form is degenerate at the next order.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .core import MomentSequence, Polynomial, QQi, exact_sqrt
from .errors import Breakdown, InsufficientMoments, WindowOverflow
from .functional import BilinearFunctional, eval_sigma
from .jacobi import JacobiSpec, compute_moments

BREAKDOWN_TOL = 1e-12


@dataclass(frozen=True)
class SignRule:
    """``principal`` or an explicit list of +1/-1 multipliers of the principal root."""

    kind: str = "principal"
    signs: tuple = ()

    def __post_init__(self):
        if self.kind not in ("principal", "explicit"):
            raise ValueError(f"unknown sign rule {self.kind!r}")
        if self.kind == "explicit":
            signs = tuple(int(s) for s in self.signs)
            if any(s not in (1, -1) for s in signs):
                raise ValueError("explicit signs must be +1 or -1")
            object.__setattr__(self, "signs", signs)

    @classmethod
    def principal(cls):
        return cls("principal")

    @classmethod
    def explicit(cls, signs):
        return cls("explicit", tuple(signs))

    def sign(self, k: int) -> int:
        if self.kind == "principal":
            return 1
        return self.signs[k]


def principal_sqrt(c: complex) -> complex:
    """Square root with argument in (-pi/2, pi/2]; negative reals map to ``+i sqrt|c|``."""
    c = complex(c)
    if c.imag == 0 and c.real < 0:
        return 1j * np.sqrt(-c.real)
    return cmath.sqrt(c)


def _magnitude(x) -> float:
    if isinstance(x, QQi):
        return float(x.abs2()) ** 0.5
    return abs(complex(x))


def moments_to_jacobi(s: MomentSequence, n: int, rule: SignRule | None = None) -> JacobiSpec:
    """Window ``(a_0..a_{n-2}, b_0..b_{n-1})`` reproducing ``s_0..s_{2n-2}``.

    Needs moments through ``s_{2n-1}``.  Raises :class:`Breakdown` when
    ``|sigma(q, q)| <= 1e-12 * max(1, max_j |s_j|^2)`` (exactly zero in exact
    mode).
    """
    rule = rule or SignRule.principal()
    if n < 1:
        raise ValueError("n must be at least 1")
    if s.K < 2 * n - 1:
        raise InsufficientMoments(2 * n - 1, s.K)
    if rule.kind == "explicit" and len(rule.signs) < n - 1:
        raise ValueError(f"explicit sign list needs {n - 1} entries, got {len(rule.signs)}")
    F = BilinearFunctional(s)
    exact = s.exact
    used = s.values[: 2 * n]
    scale = max(1.0, max(_magnitude(v) for v in used) ** 2)
    one = QQi(1) if exact else 1 + 0j
    p_prev, p = Polynomial(), Polynomial([one])
    a_list, b_list = [], []
    for k in range(n):
        xp = p.times_x()
        b_k = eval_sigma(F, xp, p)
        b_list.append(b_k)
        if k == n - 1:
            break
        q = xp - p * b_k
        if k > 0:
            q = q - p_prev * a_list[-1]
        c = eval_sigma(F, q, q)
        if exact:
            if c == 0:
                raise Breakdown(k, 0.0)
            a_k = exact_sqrt(c) * rule.sign(k)
        else:
            if abs(c) <= BREAKDOWN_TOL * scale:
                raise Breakdown(k, abs(c))
            a_k = principal_sqrt(c) * rule.sign(k)
        a_list.append(a_k)
        p_prev, p = p, q / a_k
    return JacobiSpec(a_list, b_list, exact=exact)


@dataclass(frozen=True)
class RoundtripReport:
    n: int
    max_b_deviation: float
    max_a2_deviation: float
    signs: list | None
    reconstructed: JacobiSpec


def roundtrip_check(spec: JacobiSpec, n: int, rule: SignRule | None = None) -> RoundtripReport:
    """Moments of ``spec`` fed back through :func:`moments_to_jacobi`.

    Squares of off-diagonal entries are compared because of the sign freedom;
    ``signs`` is the explicit list that reproduces the original ``a_k``
    exactly, or ``None`` if no such list exists.
    """
    if spec.N < 2 * n:
        raise WindowOverflow(2 * n, spec.N)
    s = compute_moments(spec, 2 * n - 1)
    out = moments_to_jacobi(s, n, rule)
    b_dev = max(_magnitude(x - y) for x, y in zip(out.b, spec.b[:n]))
    a2_dev = max((_magnitude(x * x - y * y) for x, y in zip(out.a, spec.a[: n - 1])), default=0.0)
    signs = []
    for a_new, a_old in zip(out.a, spec.a[: n - 1]):
        root = exact_sqrt(a_new * a_new) if spec.exact else principal_sqrt(a_new * a_new)
        tol = 0 if spec.exact else 1e-8 * _magnitude(a_old)
        if _magnitude(root - a_old) <= tol:
            signs.append(1)
        elif _magnitude(root + a_old) <= tol:
            signs.append(-1)
        else:
            signs = None
            break
    return RoundtripReport(n, b_dev, a2_dev, signs, out)
