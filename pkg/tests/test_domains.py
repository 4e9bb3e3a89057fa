import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar
from hypothesis import given, strategies as st

from bltransform.domains import (
    DomainError,
    DomainSpec,
    TangentSample,
    UnsupportedError,
    ball,
    ball_automorphism,
    disc,
    ellipsoid,
    halfplane,
    indicatrix,
    kobayashi_busemann,
    kobayashi_distance_ball,
    kobayashi_royden,
    polydisc,
    product,
    punctured_disc,
)

from conftest import cvec


def test_spec_normalization_and_names():
    assert disc() == ball(1)
    assert DomainSpec("disc").kind == "ball"
    assert str(ellipsoid(2, 1)) == "E(2,1)"
    assert str(ball(2)) == "ball(2)"
    assert product(disc(), ball(2)).n == 3
    assert not ellipsoid(0.25, 1).convex_indicatrix
    for bad in (lambda: DomainSpec("torus"), lambda: ellipsoid(1, 0), lambda: DomainSpec("product")):
        with pytest.raises(DomainError):
            bad()


@pytest.mark.parametrize("spec", [ball(3), polydisc(2), ellipsoid(2, 1), product(disc(), ellipsoid(1, 3)), punctured_disc(), halfplane()])
def test_json_roundtrip(spec):
    assert DomainSpec.from_json(spec.to_json()) == spec


def test_contains():
    assert ball(2).contains([0.6, 0.7j]) and not ball(2).contains([0.8, 0.7])
    assert polydisc(2).contains([0.8, 0.7]) and not polydisc(2).contains([1.0, 0.0])
    assert ellipsoid(2, 1).contains([0.9, 0.1]) and not ellipsoid(2, 1).contains([0.9, 0.6])
    assert not punctured_disc().contains([0.0]) and punctured_disc().contains([0.5j])
    assert halfplane().contains([-0.1 + 5j]) and not halfplane().contains([0.1])
    assert not ball(2).contains([0.1])


def test_ball_automorphism_properties(rng):
    a = np.array([0.3 + 0.1j, -0.4j])
    phi, jac = ball_automorphism(a)
    assert np.allclose(phi(a), 0) and np.allclose(phi(np.zeros(2)), a)
    z = np.array([-0.2 + 0.5j, 0.3])
    assert np.allclose(phi(phi(z)), z)
    assert np.vdot(phi(z), phi(z)).real < 1
    # holomorphic: complex finite difference in each coordinate
    h = 1e-6
    fd = np.stack([(phi(z + h * e) - phi(z - h * e)) / (2 * h) for e in np.eye(2)], axis=1)
    assert np.allclose(jac(z), fd, atol=1e-8)
    with pytest.raises(DomainError):
        ball_automorphism([1.0, 0.0])


def test_disc_royden_metric():
    z, v = 0.3 + 0.4j, 2.0 - 1j
    assert kobayashi_royden(disc(), TangentSample(np.array([z]), np.array([v]))) == pytest.approx(abs(v) / (1 - abs(z) ** 2))


def test_ball_royden_metric_closed_form(rng):
    # k(z; v)^2 = |v|^2/(1-|z|^2) + |<v,z>|^2/(1-|z|^2)^2
    z = np.array([0.4 - 0.2j, 0.1 + 0.5j])
    s = np.vdot(z, z).real
    F = indicatrix(ball(2), z)
    v = cvec(rng, (30, 2))
    expected = np.sqrt(np.sum(np.abs(v) ** 2, 1) / (1 - s) + np.abs(v @ z.conj()) ** 2 / (1 - s) ** 2)
    assert np.allclose(F(v), expected, rtol=1e-12)


def test_polydisc_and_product_metric():
    z = np.array([0.5, 0.2j])
    F = indicatrix(polydisc(2), z)
    assert F(np.array([1.0, 1.0])) == pytest.approx(max(1 / 0.75, 1 / 0.96))
    G = indicatrix(product(disc(), disc()), z)
    assert G(np.array([0.3, 1j])) == pytest.approx(F(np.array([0.3, 1j])))


def test_ellipsoid_axis_metric_matches_disc_in_axis_direction():
    # the axis slice of E(2,1) is the unit disc, and it is a holomorphic retract
    a = 0.6j
    F = indicatrix(ellipsoid(2, 1), np.array([0, a]))
    assert F(np.array([0, 1.0])) == pytest.approx(1 / (1 - abs(a) ** 2))


def test_ellipsoid_unsupported_points():
    with pytest.raises(UnsupportedError):
        indicatrix(ellipsoid(2, 1), np.array([0.3, 0]))
    with pytest.raises(UnsupportedError):
        indicatrix(ellipsoid(2, 1), np.array([0.1, 0.1]))
    with pytest.raises(DomainError):
        indicatrix(ball(2), np.array([0.9, 0.9]))
    with pytest.raises(DomainError):
        indicatrix(ball(2), np.array([0.1]))


def test_covering_relation():
    # exp: halfplane -> punctured disc is a local isometry
    w = np.array([-0.7 + 0.3j])
    lhs = indicatrix(halfplane(), w)(np.array([1.0]))
    rhs = indicatrix(punctured_disc(), np.exp(w))(np.exp(w))
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_busemann_factorwise_for_products():
    spec = product(ellipsoid(0.25, 1), disc())
    F = kobayashi_busemann(spec, np.zeros(3))
    # oracle by support functions: hull gauge(x) = max_theta theta.x / max_{b in profile} theta.b
    r1 = np.linspace(0, 1, 400_001)
    prof = np.stack([r1, np.sqrt(1 - np.sqrt(r1))], axis=1)
    x = np.array([0.5, 0.5])

    def ratio(t):
        d = np.array([np.cos(t), np.sin(t)])
        return -(d @ x) / np.max(prof @ d)

    grid = np.linspace(0, np.pi / 2, 201)
    t0 = grid[np.argmin([ratio(t) for t in grid])]
    best = minimize_scalar(ratio, bounds=(t0 - 0.01, t0 + 0.01), method="bounded", options={"xatol": 1e-10})
    expected = -best.fun
    assert F(np.array([0.5, 0.5j, 0])) == pytest.approx(expected, rel=1e-6)
    assert F(np.array([0, 0, 0.5])) == pytest.approx(0.5)


def test_distance_ball_radial():
    assert kobayashi_distance_ball([0, 0], [0.5, 0]) == pytest.approx(math.atanh(0.5))
    with pytest.raises(DomainError):
        kobayashi_distance_ball([1.0, 0], [0, 0])


coord = st.floats(min_value=-0.45, max_value=0.45)


@given(coord, coord, coord, coord)
def test_distance_is_automorphism_invariant(a, b, c, d):
    z, w = np.array([a + 1j * b, c]), np.array([d, a * 1j])
    phi, _ = ball_automorphism(np.array([0.2 - 0.1j, 0.3]))
    assert kobayashi_distance_ball(phi(z), phi(w)) == pytest.approx(kobayashi_distance_ball(z, w), abs=1e-9)
    assert kobayashi_distance_ball(z, z) == pytest.approx(0.0, abs=1e-7)
