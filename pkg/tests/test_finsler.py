import numpy as np
import pytest
from hypothesis import given, strategies as st

from bltransform.finsler import (
    DualConfig,
    Pseudonorm,
    busemann_convexify,
    dual_norm,
    ellipsoid_gauge,
    euclidean,
    hermitian_norm,
    lq_norm,
    max_combination,
    max_norm,
    triangle_defect,
)
from bltransform.hermitian import random_pd

from conftest import cvec


def test_ellipsoid_gauge_solves_defining_equation(rng):
    p = np.array([2.0, 1.0, 0.75])
    v = cvec(rng, (200, 3))
    t = ellipsoid_gauge(p)(v)
    assert np.allclose(np.sum((np.abs(v) / t[:, None]) ** (2 * p), axis=1), 1.0, atol=1e-13)


def test_ellipsoid_with_unit_exponents_is_euclidean(rng):
    v = cvec(rng, (50, 2))
    assert np.allclose(ellipsoid_gauge([1, 1])(v), np.linalg.norm(v, axis=1), rtol=1e-14)
    assert ellipsoid_gauge([2, 1])(np.zeros(2)) == 0.0


def test_wrong_length_rejected():
    with pytest.raises(ValueError):
        euclidean(2)(np.ones(3))
    with pytest.raises(ValueError):
        ellipsoid_gauge([1.0, -1.0])
    with pytest.raises(ValueError):
        hermitian_norm(np.diag([1.0, -1.0]))


def test_max_combination_matches_polydisc():
    F = max_combination([euclidean(1), euclidean(1)])
    v = np.array([[0.3 + 0.4j, 0.2], [0.1, -2j]])
    assert np.allclose(F(v), [0.5, 2.0])
    assert F.n == 2 and F.satisfies_triangle and F.reinhardt


def test_triangle_defect_flags_nonconvex():
    assert triangle_defect(lq_norm(2, 3)) <= 1e-12
    assert triangle_defect(lq_norm(0.5, 2)) > 0.1


def test_dual_of_max_is_l1(rng):
    th = cvec(rng, (100, 2))
    assert np.allclose(dual_norm(max_norm(2))(th), np.abs(th).sum(axis=1), rtol=1e-6)


def test_dual_of_hermitian_norm_is_inverse_form(rng):
    # F(v)^2 = v G v*, F*(theta) = sup |theta . w| / F(w) = sqrt(theta conj(G)^{-1} theta*)
    H = random_pd(2, rng, 8.0)
    F = hermitian_norm(H)
    th = cvec(rng, (40, 2))
    Gi = np.linalg.inv(H.gram.conj())
    expected = np.sqrt(np.einsum("ij,jk,ik->i", th, Gi, th.conj()).real)
    got = dual_norm(F, DualConfig())(th)
    assert np.allclose(got, expected, rtol=1e-6)


def test_convexify_passes_norms_through():
    F = lq_norm(3, 2)
    assert busemann_convexify(F) is F


def test_convexify_l_half_is_l1(rng):
    v = cvec(rng, (300, 2))
    hull = busemann_convexify(lq_norm(0.5, 2))
    assert np.allclose(hull(v), np.abs(v).sum(axis=1), rtol=1e-7)
    assert triangle_defect(hull) <= 1e-9


def test_convexify_is_idempotent_and_below_input(rng):
    F = ellipsoid_gauge([0.25, 2.0])
    hull = busemann_convexify(F)
    v = cvec(rng, (300, 2))
    # profile vertices sit on the true boundary; edges are chords, so the error is O(h^2)
    assert np.all(hull(v) <= F(v) * (1 + 1e-7))
    again = busemann_convexify(Pseudonorm(hull.func, 2, False, reinhardt=True))
    assert np.allclose(again(v), hull(v), rtol=1e-7)


def test_generic_convexify_of_nonreinhardt_gauge(rng):
    # l_{1/2} after a unitary change of variables is not Reinhardt; its hull is l1 after the same change
    U = np.array([[1, 1j], [1j, 1]]) / np.sqrt(2)
    F = lq_norm(0.5, 2).compose(U)
    assert not F.reinhardt
    hull = busemann_convexify(F)
    v = cvec(rng, (6, 2))
    # inner suprema are direct searches; the hull value is a lower estimate
    assert np.allclose(hull(v), np.abs(v @ U.T).sum(axis=1), rtol=5e-5)


finite = st.floats(min_value=-3, max_value=3, allow_nan=False)


@given(st.lists(finite, min_size=4, max_size=4), finite, finite)
def test_complex_homogeneity(xs, cr, ci):
    v = np.array([xs[0] + 1j * xs[1], xs[2] + 1j * xs[3]])
    c = cr + 1j * ci
    for F in (euclidean(2), max_norm(2, [1.0, 2.0]), lq_norm(0.5, 2), ellipsoid_gauge([2.0, 0.3])):
        assert F(c * v) == pytest.approx(abs(c) * F(v), rel=1e-11, abs=1e-12)
