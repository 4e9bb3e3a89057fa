import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from bltransform.finsler import ellipsoid_gauge, euclidean, hermitian_norm, lq_norm, max_combination, max_norm
from bltransform.hermitian import block_diag, congruence, random_invertible, random_pd, relative_error
from bltransform.quadrature import QuadratureRule
from bltransform.transform import (
    TransformError,
    complex_bl,
    complex_bl_dual,
    dualize,
    product_bl,
    real_bl,
    real_complex_consistency,
    realify,
)


@pytest.mark.parametrize("n", [1, 2])
def test_ball_gives_identity(n):
    m = complex_bl_dual(euclidean(n))
    assert relative_error(m.gram_dual, np.eye(n)) < 1e-13
    assert m.volume == pytest.approx(math.pi**n / math.factorial(n), rel=1e-13)


def test_ball_three_dimensions_monte_carlo():
    m = complex_bl_dual(euclidean(3))
    assert 0 < m.error_estimate < 1e-2
    assert relative_error(m.gram_dual, np.eye(3)) < 5 * m.error_estimate


@pytest.mark.parametrize("s", [1e-2, 1e-5])
def test_strongly_anisotropic_gauge(s):
    # congruence: euclidean(diag(1, s) v) has transform diag(1, s^2)
    g = complex_bl(euclidean(2).compose(np.diag([1.0, s])))
    assert np.allclose(g.gram.diagonal().real / [1.0, s * s], 1.0, rtol=1e-9)


def test_bidisc_dual_gram():
    # (n+1)/vol * int_{D^2} z z^*: vol = pi^2, int |z_1|^2 = pi * pi/2
    m = complex_bl_dual(max_norm(2))
    assert np.allclose(m.gram_dual.gram, 1.5 * np.eye(2), atol=2e-4)
    assert m.volume == pytest.approx(math.pi**2, rel=1e-4)


def _ellipsoid_oracle(p1, p2):
    # polar coordinates r1, r2 on {r1^(2 p1) + r2^(2 p2) < 1}; angular factors (2 pi)^2
    top = lambda r1: (1 - r1 ** (2 * p1)) ** (1 / (2 * p2))  # noqa: E731
    vol = integrate.dblquad(lambda r2, r1: r1 * r2, 0, 1, 0, top, epsabs=1e-14, epsrel=1e-13)[0]
    m1 = integrate.dblquad(lambda r2, r1: r1**3 * r2, 0, 1, 0, top, epsabs=1e-14, epsrel=1e-13)[0]
    m2 = integrate.dblquad(lambda r2, r1: r1 * r2**3, 0, 1, 0, top, epsabs=1e-14, epsrel=1e-13)[0]
    vol, m1, m2 = (4 * math.pi**2 * x for x in (vol, m1, m2))
    return vol, np.diag([vol / (3 * m1), vol / (3 * m2)])


def test_ellipsoid_2_1_against_quadrature_oracle():
    vol, primal = _ellipsoid_oracle(2.0, 1.0)
    assert vol == pytest.approx(2 * math.pi**2 / 3, rel=1e-10)
    assert np.allclose(primal, np.diag([8 / 9, 5 / 6]), atol=1e-10)
    m = complex_bl_dual(ellipsoid_gauge([2.0, 1.0]))
    assert m.volume == pytest.approx(vol, rel=1e-9)
    assert relative_error(dualize(m), primal) < 1e-9


def test_hermitian_norm_is_fixed(rng):
    H = random_pd(2, rng, 50.0)
    assert relative_error(complex_bl(hermitian_norm(H)), H) < 1e-12


def test_congruence_invariance(rng):
    F = lq_norm(3, 2)
    A = random_invertible(2, rng, 5.0)
    assert relative_error(complex_bl(F.compose(A)), congruence(complex_bl(F), A)) < 1e-8


def test_homogeneity_of_degree_two():
    F = ellipsoid_gauge([2.0, 1.0])
    assert relative_error(complex_bl(F.scaled(3.0)), complex_bl(F).scaled(9.0)) < 1e-12


def test_product_blocks():
    F1, F2 = euclidean(1), euclidean(2)
    direct = complex_bl(max_combination([F1, F2]), QuadratureRule("mc", 3, samples=400_000, seed=3))
    blocks = product_bl([F1, F2])
    assert relative_error(blocks, block_diag(complex_bl(F1).scaled(2 / 4), complex_bl(F2).scaled(3 / 4))) < 1e-13
    assert relative_error(direct, blocks) < 5e-3


def test_real_version_on_square():
    # (d+2)/|Q| * int_Q x^2 over [-1,1]^2 = 4/4 * 4/3, inverse 3/4; the kinks limit the phase rule to ~1e-4
    g = real_bl(lambda x: np.max(np.abs(x), axis=-1), 2)
    assert np.allclose(g, 0.75 * np.eye(2), atol=2e-4)


def test_real_complex_consistency():
    assert real_complex_consistency(lq_norm(3, 2)) < 1e-6


def test_degenerate_gauge_fails_cleanly():
    flat = euclidean(2).compose(np.diag([1.0, 1e-7]))
    with pytest.raises(TransformError):
        complex_bl(flat, QuadratureRule("sphere-product", 2, radial=64, phase=16))


@settings(max_examples=15)
@given(st.integers(0, 2**31), st.floats(1.0, 200.0))
def test_inverse_of_dual_is_hermitian_positive(seed, cond):
    H = random_pd(2, np.random.default_rng(seed), cond)
    F = hermitian_norm(H)
    g = complex_bl(F)
    assert np.all(g.eigvalsh() > 0)
    assert relative_error(g, H) < 1e-9
