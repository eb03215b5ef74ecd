import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from complex_jacobi.core import MomentSequence, QQi
from complex_jacobi.errors import Breakdown, InsufficientMoments, WindowOverflow
from complex_jacobi.functional import BilinearFunctional, hankel_nonsingular
from complex_jacobi.jacobi import JacobiSpec, compute_moments, generate_polynomials
from complex_jacobi.reconstruct import SignRule, moments_to_jacobi, principal_sqrt, roundtrip_check
from test_jacobi import random_spec


def test_principal_sqrt_branch():
    assert principal_sqrt(4) == 2
    assert principal_sqrt(-4) == 2j
    assert principal_sqrt(-1 + 0j) == 1j
    for c in (1 + 1j, -3 - 0.5j, 2j, -2j, 0.1 - 7j):
        r = principal_sqrt(c)
        assert abs(r * r - c) < 1e-14
        assert -np.pi / 2 < cmath.phase(r) <= np.pi / 2


def test_catalan_reconstruction():
    s = MomentSequence([1, 0, 1, 0, 2, 0, 5, 0, 14])
    spec = moments_to_jacobi(s, 3)
    assert np.allclose(spec.a, [1, 1], atol=1e-10, rtol=0)
    assert np.allclose(spec.b, [0, 0, 0], atol=1e-10, rtol=0)
    exact = moments_to_jacobi(MomentSequence([QQi(v) for v in (1, 0, 1, 0, 2, 0, 5, 0, 14)]), 4)
    assert list(exact.a) == [QQi(1)] * 3 and list(exact.b) == [QQi(0)] * 4


def test_b0_is_first_moment():
    s = MomentSequence([1, 0.3 - 0.2j, 2, 1j])
    assert moments_to_jacobi(s, 2).b[0] == 0.3 - 0.2j


def test_needs_enough_moments():
    with pytest.raises(InsufficientMoments):
        moments_to_jacobi(MomentSequence([1, 0, 1, 0]), 3)


@pytest.mark.parametrize("c", [0, 1, 1j, -2 + 0.5j])
def test_dirac_breaks_down_at_step_zero(c):
    s = MomentSequence([c**n for n in range(8)])
    with pytest.raises(Breakdown) as err:
        moments_to_jacobi(s, 3)
    assert err.value.k == 0


def _atomic_moments(points, weights, K):
    return MomentSequence([sum(w * z**n for z, w in zip(points, weights)) for n in range(K + 1)])


BREAKDOWN_CORPUS = [
    # (sequence, step at which the orthogonalization must stop)
    (_atomic_moments([0.5], [1], 9), 0),
    (_atomic_moments([1, -1], [0.5, 0.5], 9), 1),
    (_atomic_moments([1j, 2, -0.5], [0.2, 0.3, 0.5], 9), 2),
    (_atomic_moments([1, 1j, -0.5, 0.3 - 0.6j], [0.1, 0.2, 0.3, 0.4], 9), 3),
    (_atomic_moments([1, 1j, -1, -1j], [0.25, 0.25, 0.25, 0.25], 9), 0),
    # complex "weights": a rank-2 functional that is not a measure
    (_atomic_moments([0.3 + 0.4j, -0.7j], [1.5 - 1j, -0.5 + 1j], 9), 1),
    (MomentSequence([1, 0, 0, 1, 0, 0, 1, 0, 0, 1]), 0),
]


@pytest.mark.parametrize("s, k", BREAKDOWN_CORPUS)
def test_breakdown_iff_hankel_degenerate(s, k):
    with pytest.raises(Breakdown) as err:
        moments_to_jacobi(s, 5)
    assert err.value.k == k
    F = BilinearFunctional(s)
    first_singular = next(j for j in range(5) if not hankel_nonsingular(F, j).nonsingular)
    assert first_singular == k + 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_regular_sequences_do_not_break_down(seed):
    spec = random_spec(np.random.default_rng(seed), 12, amin=0.5)
    s = compute_moments(spec, 9)
    out = moments_to_jacobi(s, 5)
    F = BilinearFunctional(s)
    assert all(hankel_nonsingular(F, j).nonsingular for j in range(5))
    assert out.N == 5


def test_roundtrip_examples():
    rep = roundtrip_check(JacobiSpec.constant(1, 0, 8), 4)
    assert rep.max_b_deviation <= 1e-10 and rep.max_a2_deviation <= 1e-10
    assert rep.signs == [1, 1, 1]
    rep = roundtrip_check(JacobiSpec.constant(1j, 0, 6), 3)
    assert all(abs(complex(a) ** 2 + 1) < 1e-12 for a in rep.reconstructed.a)
    with pytest.raises(WindowOverflow):
        roundtrip_check(JacobiSpec.constant(1, 0, 7), 4)


def test_roundtrip_exact():
    spec = JacobiSpec([QQi(2, 1), QQi(-1), QQi(0, 3)], [QQi(1), QQi(0, 1), QQi(-2), QQi(1, 1)])
    rep = roundtrip_check(spec, 2)
    assert rep.max_b_deviation == 0 and rep.max_a2_deviation == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_explicit_signs_reproduce_spec(seed):
    spec = random_spec(np.random.default_rng(seed), 16, amin=0.5)
    first = roundtrip_check(spec, 8)
    assert first.signs is not None
    s = compute_moments(spec, 15)
    out = moments_to_jacobi(s, 8, SignRule.explicit(first.signs))
    assert np.max(np.abs(out.a - spec.a[:7])) <= 1e-8
    assert np.max(np.abs(out.b - spec.b[:8])) <= 1e-8


def test_sign_flip_invariance():
    spec = random_spec(np.random.default_rng(11), 12, amin=0.5)
    s = compute_moments(spec, 9)
    base = moments_to_jacobi(s, 5)
    flipped = moments_to_jacobi(s, 5, SignRule.explicit([1, -1, 1, 1]))
    assert np.max(np.abs(base.b - flipped.b)) < 1e-12
    assert np.max(np.abs(base.a**2 - flipped.a**2)) < 1e-12
    assert np.allclose(flipped.a, base.a * [1, -1, 1, 1], atol=1e-12)
    p = generate_polynomials(base, 5)
    q = generate_polynomials(flipped, 5)
    assert q[2].max_abs_diff(-p[2]) < 1e-10
    assert q[1].max_abs_diff(p[1]) < 1e-12


def test_sign_rule_validation():
    with pytest.raises(ValueError):
        SignRule.explicit([1, 2])
    with pytest.raises(ValueError):
        moments_to_jacobi(MomentSequence([1, 0, 1, 0, 2, 0]), 3, SignRule.explicit([1]))
