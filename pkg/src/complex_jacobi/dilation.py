"""Positive measures on the complex plane with prescribed power moments.

Pipeline for moments ``s_0..s_K`` with ``s_0 = 1``:

1. rescale ``s~_n = s_n / tau**n`` with ``tau`` above the growth radius;
2. form the shift-plus-rank-two matrix ``M`` whose powers satisfy
   ``(M^n e_0)_0 = s~_n``;
3. divide by a certified norm bound ``rho`` to get a contraction ``B``;
4. embed ``B`` in a unitary ``U`` of size ``(K+2) L`` whose compressed
   powers are ``B^n`` for ``n <= K``;
5. the spectral measure of ``U`` at ``e_0``, stretched by ``tau * rho``,
   is a finitely atomic positive measure with moments ``s_0..s_K``.

Steps 2-5 run in extended precision (``clongdouble``).  All atoms sit on the
circle of radius ``tau * rho``, so reproducing ``s_n`` involves cancellation
of size ``(tau * rho)**n``; double precision is not enough for that.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import AtomicMeasure, MomentSequence, growth_radius
from .errors import (
    EigenFailure,
    IdentityCheckFailed,
    InsufficientMoments,
    NonpositiveTau,
    NotAContraction,
)
from .linalg import hermitian_eig, normal_spectral_measure, psd_sqrt, spectral_norm_bound

__all__ = [
    "DilationModel",
    "build_M",
    "build_dilation_model",
    "build_f_g",
    "contraction_bound",
    "growth_radius",
    "measure_moments",
    "power_dilation",
    "scale_moments",
    "solve_moment_problem",
    "verify_moment_identity",
]

TAU_FACTOR = 1.25
TAU_FLOOR = 1e-3
RHO_SAFETY = 1e-6
IDENTITY_TOL = 1e-11
PRUNE_WEIGHT = 1e-14

EXT = np.clongdouble


def _values(s: MomentSequence) -> np.ndarray:
    return s.as_complex() if s.exact else s.values


def build_f_g(s: MomentSequence, L: int):
    """Vectors ``g = (0, conj s_1, .., conj s_{L-1})`` and ``f = conj(s_1..s_L) - conj(s_1) g``."""
    if s.K < L:
        raise InsufficientMoments(L, s.K)
    v = _values(s)
    g = np.zeros(L, dtype=v.dtype)
    g[1:] = np.conj(v[1:L])
    # same operand order as row 0 of build_M, so the two agree bit for bit
    f = np.conj(v[1 : L + 1]) - g * np.conj(v[1])
    return f, g


def _rank_two_form(f, g):
    # matrix of  u -> S u + (u, f) e_0 - (u, g) e_1  in the standard basis
    L = len(f)
    M = np.eye(L, k=-1, dtype=f.dtype)
    M[0, :] += np.conj(f)
    if L > 1:
        M[1, :] -= np.conj(g)
    return M


def build_M(s: MomentSequence, L: int) -> np.ndarray:
    """``L x L`` truncation of the shift-plus-rank-two matrix.

    Row 0 is ``(s_1, s_2 - s_1^2, s_3 - s_2 s_1, ...)``, row 1 is
    ``(1, -s_1, -s_2, ...)`` and rows ``j >= 2`` carry a single 1 in column
    ``j - 1``.  The result is checked entrywise against the operator form
    ``S + (., f) e_0 - (., g) e_1``.
    """
    if s.K < L:
        raise InsufficientMoments(L, s.K)
    v = _values(s)
    M = np.zeros((L, L), dtype=v.dtype)
    M[0, 0] = v[1]
    M[0, 1:] = v[2 : L + 1] - v[1:L] * v[1]
    if L > 1:
        M[1, 0] = 1
        M[1, 1:] = -v[1:L]
    for j in range(2, L):
        M[j, j - 1] = 1
    f, g = build_f_g(s, L)
    if not np.array_equal(M, _rank_two_form(f, g)):
        raise IdentityCheckFailed("displayed matrix and rank-two operator form disagree")
    return M


def verify_moment_identity(matL, s: MomentSequence, n_max: int) -> float:
    """``max_{n <= n_max} |(M^n e_0)_0 - s_n|``.

    Exact for ``n_max <= L - 1``: the iterates ``M^n e_0 = e_n + s_n e_0``
    never reach the truncated edge.
    """
    L = matL.shape[0]
    if n_max > L - 1:
        raise ValueError(f"n_max={n_max} exceeds L-1={L - 1}; truncation would be inexact")
    v = _values(s)
    x = np.zeros(L, dtype=np.result_type(matL.dtype, v.dtype))
    x[0] = 1
    worst = 0.0
    for n in range(n_max + 1):
        worst = max(worst, float(abs(x[0] - v[n])))
        x = matL @ x
    return worst


def scale_moments(s: MomentSequence, tau) -> MomentSequence:
    """``s~_n = s_n / tau**n``."""
    if not tau > 0:
        raise NonpositiveTau(f"tau must be positive, got {tau}")
    v = _values(s)
    real = np.longdouble if v.dtype == EXT else np.float64
    powers = real(tau) ** np.arange(len(v), dtype=real)
    return MomentSequence(v / powers)


def _shift_rank_two_bound(matL):
    L = matL.shape[0]
    if L < 2:
        return None
    shift = np.eye(L - 1, dtype=matL.dtype)
    if not (np.array_equal(matL[2:, : L - 1], shift[1:]) and not np.any(matL[2:, L - 1])):
        return None
    if matL[1, 0] != 1:
        return None
    return 1.0 + float(np.linalg.norm(matL[0].astype(np.complex128))) + float(
        np.linalg.norm(matL[1, 1:].astype(np.complex128))
    )


def contraction_bound(matL) -> float:
    """Certified upper bound ``rho`` on the spectral norm of ``matL``.

    ``min(power estimate * (1 + 1e-6), 1 + ||f|| + ||g||)``; the triangle
    bound applies when ``matL`` has the shift-plus-rank-two layout.  The
    result is certified by checking ``I - B^H B >= 0`` for ``B = matL / rho``
    with the Hermitian eigensolver and enlarged if that fails.
    """
    matL = np.asarray(matL)
    if not np.any(matL):
        return 0.0
    est, hard = spectral_norm_bound(matL, tol=1e-12)
    rho = est * (1 + RHO_SAFETY)
    tri = _shift_rank_two_bound(matL)
    rho = min(rho, tri if tri is not None else hard)
    B = matL / matL.real.dtype.type(rho)
    top = hermitian_eig(B.conj().T @ B)[0][-1]
    if top > 1:
        # power iteration stalled below the top singular value
        rho = float(np.sqrt(float(top))) * rho * (1 + RHO_SAFETY)
    return float(rho)


def power_dilation(contraction, K: int) -> np.ndarray:
    """Unitary on ``K + 2`` block coordinates compressing to ``B^n`` for ``n <= K``.

    Block row 0: ``[B, 0, .., 0, D_*]``; block row 1: ``[D, 0, .., 0, -B^H]``;
    block rows ``2..K+1``: identity one step below the diagonal.  Here
    ``D = (I - B^H B)^{1/2}`` and ``D_* = (I - B B^H)^{1/2}``.
    """
    B = np.asarray(contraction)
    dtype = EXT if B.dtype in (EXT, np.longdouble) else np.complex128
    B = B.astype(dtype)
    L = B.shape[0]
    if K < 1:
        raise ValueError("K must be at least 1")
    I = np.eye(L, dtype=dtype)
    # ||B|| <= 1 + 1e-12  iff  the smallest eigenvalue of I - B^H B is >= 1 - (1 + 1e-12)^2
    w, V = hermitian_eig(I - B.conj().T @ B)
    if L and w[0] < 1 - (1 + 1e-12) ** 2:
        norm = float(np.sqrt(1 - float(w[0])))
        raise NotAContraction(f"norm {norm:.15g} exceeds 1", norm=norm)
    w = np.where(w <= 10 * L * np.finfo(w.dtype).eps, 0, w)
    D = ((V * np.sqrt(w)) @ V.conj().T).astype(dtype)
    D = (D + D.conj().T) / 2
    Dstar = psd_sqrt(I - B @ B.conj().T).astype(dtype)
    nb = K + 2
    U = np.zeros((nb * L, nb * L), dtype=dtype)
    U[:L, :L] = B
    U[:L, -L:] = Dstar
    U[L : 2 * L, :L] = D
    U[L : 2 * L, -L:] = -B.conj().T
    for k in range(2, nb):
        U[k * L : (k + 1) * L, (k - 1) * L : k * L] = I
    return U


def _block_apply(U, L):
    B = U[:L, :L]
    Dstar = U[:L, -L:]
    D = U[L : 2 * L, :L]
    negBh = U[L : 2 * L, -L:]

    def apply(X):
        out = np.empty_like(X)
        first, last = X[:L], X[-L:]
        out[:L] = B @ first + Dstar @ last
        out[L : 2 * L] = D @ first + negBh @ last
        out[2 * L :] = X[L:-L]
        return out

    return apply


@dataclass
class DilationModel:
    """Intermediate objects of the construction, kept for inspection."""

    s: MomentSequence
    K: int
    tau: float
    rho: float
    scaled: MomentSequence
    f: np.ndarray
    g: np.ndarray
    matL: np.ndarray
    contraction: np.ndarray
    U: np.ndarray
    x0: np.ndarray
    identity_deviation: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def L(self) -> int:
        return self.matL.shape[0]


def build_dilation_model(s: MomentSequence, K: int, tau=None) -> DilationModel:
    """Stages 1-4 of the pipeline (everything up to the unitary)."""
    if K < 1:
        raise ValueError("K must be at least 1")
    if K > s.K:
        raise InsufficientMoments(K, s.K)
    window = s.truncate(K)
    R = growth_radius(window)
    if tau is None:
        tau = TAU_FACTOR * max(R, TAU_FLOOR)
    if not tau > 0:
        raise NonpositiveTau(f"tau must be positive, got {tau}")
    tau = float(tau)
    diagnostics = {"growth_radius": float(R)}
    if tau <= R:
        diagnostics["tau_not_above_growth_radius"] = True
    # moments beyond s_K are not consumed: extend by zero so M is L x L with L = K + 1
    ext = np.concatenate([_values(window).astype(EXT), np.zeros(1, dtype=EXT)])
    scaled = scale_moments(MomentSequence(ext), tau)
    L = K + 1
    matL = build_M(scaled, L)
    f, g = build_f_g(scaled, L)
    ident = verify_moment_identity(matL, scaled, K)
    sc = np.abs(scaled.values[: K + 1].astype(np.complex128))
    if ident > IDENTITY_TOL * max(1.0, float(sc.max())):
        raise IdentityCheckFailed(f"(M^n e_0)_0 misses s~_n by {ident:.3e}", deviation=ident)
    rho = contraction_bound(matL)
    if rho == 0:
        rho = 1.0
    B = matL / np.longdouble(rho)
    U = power_dilation(B, K)
    x0 = np.zeros(U.shape[0], dtype=EXT)
    x0[0] = 1
    return DilationModel(s, K, tau, rho, scaled, f, g, matL, B, U, x0, ident, diagnostics)


def _deviations(z, w, target):
    K = len(target) - 1
    out = np.empty(K + 1, dtype=np.longdouble)
    zn = np.ones_like(z)
    for n in range(K + 1):
        out[n] = abs(np.sum(w * zn) - target[n])
        zn = zn * z
    return out


def solve_moment_problem(s: MomentSequence, K: int | None = None, tau=None, tol: float = 1e-8) -> AtomicMeasure:
    """Finitely atomic positive measure with ``∫ z^n dmu = s_n`` for ``n <= K``.

    Parameters
    ----------
    s : MomentSequence
        Moments with ``s_0 = 1``; only ``s_0..s_K`` are used.
    K : int, optional
        Highest moment to match (default ``s.K``).
    tau : float, optional
        Scale above the growth radius; default ``1.25 * max(R, 1e-3)``.
    tol : float
        Postcondition tolerance on ``|∫ z^n dmu - s_n|``, relative to
        ``max(1, |s_n|)``.

    Returns
    -------
    AtomicMeasure
        Atoms on the circle of radius ``tau * rho``, extended-precision
        weights summing to one.
    """
    if K is None:
        K = s.K
    model = build_dilation_model(s, K, tau)
    return atomize(model, tol=tol)


def atomize(model: DilationModel, tol: float = 1e-8) -> AtomicMeasure:
    """Stage 5: spectral measure of the unitary at ``x0``, stretched by ``tau * rho``."""
    L, K = model.L, model.K
    values, weights, eig_diag = normal_spectral_measure(
        model.U, model.x0, apply=_block_apply(model.U, L)
    )
    radius = np.longdouble(model.tau) * np.longdouble(model.rho)
    atoms = radius * values
    target = _values(model.s)[: K + 1].astype(EXT)
    mass = weights.sum()
    if abs(float(mass) - 1) > 1e-10:
        raise EigenFailure(f"spectral weights sum to {float(mass)!r}", mass=float(mass))
    dev = _deviations(atoms, weights, target)
    allowed = tol * np.maximum(1.0, np.abs(target.astype(np.complex128)))
    if np.any(dev > allowed):
        raise EigenFailure(
            f"spectral measure misses the moments by {float(dev.max()):.3e}",
            deviation=float(dev.max()),
        )
    small = weights < PRUNE_WEIGHT
    pruned = 0
    if np.any(small) and not np.all(small):
        # dropping mass m moves the n-th moment by at most m * radius**n
        dropped = weights[small].sum()
        if float(dropped * max(np.longdouble(1), radius) ** K) <= 1e-3 * tol:
            atoms, weights = atoms[~small], weights[~small]
            pruned = int(small.sum())
            dev = _deviations(atoms, weights, target)
    diagnostics = dict(model.diagnostics)
    diagnostics.update(eig_diag)
    diagnostics.update(
        {
            "dilation_size": int(model.U.shape[0]),
            "identity_deviation": model.identity_deviation,
            "moment_deviation": float(dev.max()),
            "pruned_atoms": pruned,
        }
    )
    return AtomicMeasure(atoms, weights, tau=model.tau, rho=model.rho, diagnostics=diagnostics)


def measure_moments(mu: AtomicMeasure, K: int) -> MomentSequence:
    """``s_n = sum_j w_j z_j**n`` for ``n <= K``, in extended precision."""
    out = np.empty(K + 1, dtype=EXT)
    zn = np.ones_like(mu.atoms)
    for n in range(K + 1):
        out[n] = np.sum(mu.weights * zn)
        zn = zn * mu.atoms
    return MomentSequence(out)
