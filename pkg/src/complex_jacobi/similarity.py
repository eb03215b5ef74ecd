"""The basis map ``T e_k = p_k`` from finite coefficient vectors to polynomials.

Multiplication by ``λ`` on polynomials is intertwined with the Jacobi matrix:
``λ p_k = a_{k-1} p_{k-1} + b_k p_k + a_k p_{k+1}``.  For a positive measure
reproducing the moments, the Gram matrix of ``p_0..p_d`` certifies that ``T``
is injective on vectors of length ``d + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AtomicMeasure, Polynomial, QQi
from .errors import DegreeOverflow, EmptyMeasure, ValidationError, WindowOverflow
from .jacobi import JacobiSpec, generate_polynomials

RECURRENCE_TOL = 1e-9


def _mag(x) -> float:
    if isinstance(x, QQi):
        return float(x.abs2()) ** 0.5
    return abs(complex(x))


def _recurrence_residuals(spec: JacobiSpec, polys, d: int):
    """Per-``k`` max coefficient gap between ``λ p_k`` and the three-term image of ``e_k``."""
    out = []
    for k in range(d + 1):
        image = polys[k] * spec.b[k] + polys[k + 1] * spec.a[k]
        if k > 0:
            image = image + polys[k - 1] * spec.a[k - 1]
        lhs = polys[k].times_x()
        diff = lhs - image
        scale = max([1.0] + [_mag(c) for c in lhs.coeffs])
        out.append((max((_mag(c) for c in diff.coeffs), default=0.0), scale))
    return out


@dataclass(frozen=True, eq=False)
class BasisMap:
    """``T`` restricted to coefficient vectors of length ``d + 1``."""

    spec: JacobiSpec
    d: int

    def __post_init__(self):
        if self.d < 0:
            raise ValueError("d must be nonnegative")
        polys = generate_polynomials(self.spec, self.d + 1)
        object.__setattr__(self, "polys", polys)
        if self.d >= 1:
            for k, (res, scale) in enumerate(_recurrence_residuals(self.spec, polys, self.d - 1)):
                bad = res != 0 if self.spec.exact else res > RECURRENCE_TOL * scale
                if bad:
                    raise ValidationError(f"polynomial p_{k + 1} violates the recurrence by {res:.3e}")


def apply_T(tmap: BasisMap, xi) -> Polynomial:
    """``sum_k xi_k p_k``."""
    xi = list(xi)
    if len(xi) > tmap.d + 1:
        raise DegreeOverflow(f"{len(xi)} coefficients but the map stops at degree {tmap.d}", d=tmap.d)
    zero = QQi(0) if tmap.spec.exact else 0j
    out = Polynomial([zero])
    for c, p in zip(xi, tmap.polys):
        if tmap.spec.exact:
            c = QQi.coerce(c)
        out = out + p * c
    return out


def check_intertwining(tmap: BasisMap, d: int) -> float:
    """``max_{k <= d}`` coefficient residual of ``T J e_k = λ T e_k``.

    Needs ``p_0..p_{d+1}``, i.e. ``d + 2 <= N``.  Exactly zero for
    rational specs.
    """
    if d + 2 > tmap.spec.N:
        raise WindowOverflow(d + 2, tmap.spec.N)
    polys = tmap.polys if d + 1 <= tmap.d else generate_polynomials(tmap.spec, d + 2)
    return max(res for res, _ in _recurrence_residuals(tmap.spec, polys, d))


def evaluate_basis(spec: JacobiSpec, d: int, z) -> np.ndarray:
    """``p_0..p_d`` at the points ``z`` by the recurrence, in extended precision.

    Row ``k`` holds ``p_k(z)``.
    """
    if d + 1 > spec.N:
        raise WindowOverflow(d + 1, spec.N)
    z = np.asarray(z).astype(np.clongdouble)
    a = np.array([complex(v) for v in spec.a], dtype=np.clongdouble)
    b = np.array([complex(v) for v in spec.b], dtype=np.clongdouble)
    P = np.zeros((d + 1, len(z)), dtype=np.clongdouble)
    P[0] = 1
    for k in range(d):
        q = (z - b[k]) * P[k]
        if k > 0:
            q = q - a[k - 1] * P[k - 1]
        P[k + 1] = q / a[k]
    return P


def gram_matrix(tmap: BasisMap, mu: AtomicMeasure, d: int):
    """``G_jk = sum_i w_i p_j(z_i) conj(p_k(z_i))`` and its smallest singular value.

    Meaningful when ``mu`` reproduces the Jacobi window's moments through degree
    ``2d``; that is the caller's responsibility.
    """
    if len(mu) == 0:
        raise EmptyMeasure()
    if d > tmap.d:
        raise DegreeOverflow(f"degree {d} exceeds the map's {tmap.d}", d=tmap.d)
    P = evaluate_basis(tmap.spec, d, mu.atoms)
    G = (P * mu.weights) @ P.conj().T
    sv = np.linalg.svd(G.astype(np.complex128), compute_uv=False)
    return G, float(sv[-1])


def bilinear_gram(tmap: BasisMap, mu: AtomicMeasure, d: int) -> np.ndarray:
    """``sum_i w_i p_j(z_i) p_k(z_i)``; the identity matrix when ``mu`` represents the window's functional."""
    if d > tmap.d:
        raise DegreeOverflow(f"degree {d} exceeds the map's {tmap.d}", d=tmap.d)
    P = evaluate_basis(tmap.spec, d, mu.atoms)
    return (P * mu.weights) @ P.T


@dataclass(frozen=True)
class SimilarityReport:
    intertwining_residual: float
    gram_min_sv: float
    degree: int

    def to_dict(self):
        return {
            "intertwining_residual": self.intertwining_residual,
            "gram_min_sv": self.gram_min_sv,
            "degree": self.degree,
        }
