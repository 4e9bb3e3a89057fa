import math

import numpy as np
import pytest

from bltransform.domains import DomainError, UnsupportedError, ball, disc, ellipsoid, halfplane, polydisc, product, punctured_disc
from bltransform.field import (
    CurveSpec,
    NoisyFieldError,
    StageError,
    StepTooLargeError,
    config_hash,
    field_sweep,
    fmt,
    hsc_estimate,
    integrated_length,
    kappa_at,
    parse_complex,
    parse_grid,
    parse_point,
    pullback,
)
from bltransform.hermitian import DimensionError, HermitianForm, relative_error
from bltransform.quadrature import QuadratureRule


def ball_oracle(z):
    z = np.asarray(z, dtype=complex)
    s = np.vdot(z, z).real
    return np.conj(np.eye(len(z)) / (1 - s) + np.outer(z, z.conj()) / (1 - s) ** 2)


@pytest.mark.parametrize("z", [[0, 0], [0.3, -0.2j], [0.5 + 0.5j, 0.1]])
def test_ball_kappa_matches_closed_form(z):
    assert relative_error(kappa_at(ball(2), z).kappa, ball_oracle(z)) < 1e-10


def test_ellipsoid_axis_kappa():
    # origin value diag(8/9, 5/6) moved by the axis automorphism with scales (1-s)^(-1/4), 1/(1-s)
    a = 0.5
    s = a * a
    k = kappa_at(ellipsoid(2, 1), [0, a]).kappa
    assert np.allclose(k.gram, np.diag([8 / 9 / math.sqrt(1 - s), 5 / 6 / (1 - s) ** 2]), rtol=1e-8)


def test_product_kappa_is_blockwise():
    k = kappa_at(product(disc(), disc()), [0.5, 0]).kappa
    poly = kappa_at(polydisc(2), [0.5, 0]).kappa
    assert relative_error(k, poly) < 1e-12
    assert k.gram[0, 0].real / k.gram[1, 1].real == pytest.approx(1 / 0.75**2, rel=1e-8)


def test_stage_errors():
    with pytest.raises(StageError) as info:
        kappa_at(ellipsoid(2, 1), [0.3, 0])
    assert info.value.stage == "indicatrix" and isinstance(info.value.cause, UnsupportedError)
    with pytest.raises(StageError) as info:
        kappa_at(ball(2), [0.9, 0.9])
    assert isinstance(info.value.cause, DomainError)


def test_pullback_convention():
    H = HermitianForm(np.array([[2.0, 1j], [-1j, 3.0]]))
    J = np.array([[1.0], [1j]])
    u = np.array([0.7 - 0.2j])
    assert pullback(J, H).quadratic(u) == pytest.approx(H.quadratic(J @ u))
    with pytest.raises(DimensionError):
        pullback(np.ones((3, 1)), H)


def test_radial_length_is_kobayashi_distance():
    r = 0.6
    curve = CurveSpec(lambda t: np.array([r * t]), lambda t: np.array([r]))
    assert integrated_length(disc(), curve, rtol=1e-7) == pytest.approx(math.atanh(r), rel=1e-5)


def test_ball_radial_length_and_constant_curve():
    r = 0.5
    seg = CurveSpec(lambda t: np.array([r * t, 0]), lambda t: np.array([r, 0]))
    assert integrated_length(ball(2), seg) == pytest.approx(math.atanh(r), rel=1e-3)
    still = CurveSpec(lambda t: np.array([0.1, 0.2j]), lambda t: np.zeros(2))
    assert integrated_length(ball(2), still) == 0.0


def test_polydisc_kappa_pointwise():
    z = np.array([0.3 - 0.4j, 0.6j])
    expected = (2 / 3) * np.diag((1 - np.abs(z) ** 2) ** -2.0)
    assert relative_error(kappa_at(polydisc(2), z).kappa, expected) < 1e-3


def test_curvature_of_disc_and_ball():
    assert hsc_estimate(disc(), [0], [1]) == pytest.approx(-4.0, abs=1e-6)
    assert hsc_estimate(ball(2), [0, 0], [1, 0]) == pytest.approx(-4.0, abs=1e-6)
    # away from the centre, on the exact ball metric
    m = lambda z: HermitianForm(ball_oracle(z))  # noqa: E731
    assert hsc_estimate(ball(2), [0.3, 0.1j], [0, 1], metric=m) == pytest.approx(-4.0, abs=1e-5)


def test_curvature_of_flat_metric_is_zero():
    assert hsc_estimate(ball(2), [0, 0], [1, 1], metric=lambda z: HermitianForm.identity(2)) == pytest.approx(0.0, abs=1e-12)


def test_curvature_guards():
    with pytest.raises(StepTooLargeError):
        hsc_estimate(disc(), [0.95], [1], step=0.05)
    with pytest.raises(NoisyFieldError):
        hsc_estimate(ball(3), [0, 0, 0], [1, 0, 0])
    with pytest.raises(DimensionError):
        hsc_estimate(ball(2), [0, 0], [1])


def test_parsing():
    assert parse_complex("0.1+0.2i") == 0.1 + 0.2j
    assert np.allclose(parse_point("0.1+0.2i, -3", 2), [0.1 + 0.2j, -3])
    with pytest.raises(ValueError):
        parse_point("1,2", 3)


def test_grids():
    assert len(parse_grid(ball(2), "origin")) == 1
    pts = parse_grid(ball(2), "radial:4x3")
    assert len(pts) == 12 and all(ball(2).contains(p) for p in pts)
    assert np.allclose(pts[0], 0)
    rand = parse_grid(ellipsoid(2, 1), "random:5:3")
    assert len(rand) == 5 and all(ellipsoid(2, 1).contains(p) for p in rand)
    assert np.allclose(rand, parse_grid(ellipsoid(2, 1), "random:5:3"))
    assert len(parse_grid(ball(2), "0,0; 0.1,0.2i")) == 2
    for spec in (punctured_disc(), halfplane()):
        assert all(spec.contains(p) for p in parse_grid(spec, "radial:3x2"))


def test_sweep_records_failures_and_is_deterministic():
    spec = ellipsoid(2, 1)
    table = field_sweep(spec, parse_grid(spec, "0,0; 0,0.5; 0.3,0"))
    assert [r.ok for r in table.rows] == [True, True, False]
    assert table.rows[2].status.startswith("error[indicatrix]")
    csv1 = table.to_csv()
    assert csv1 == field_sweep(spec, parse_grid(spec, "0,0; 0,0.5; 0.3,0"), workers=3).to_csv()
    lines = csv1.splitlines()
    assert lines[0].startswith("# conventions") and f"config_hash={config_hash(table.config)}" in lines[0]
    assert lines[1].split(",") == table.header()
    assert len(lines) == 5


def test_sweep_with_wu_and_json():
    table = field_sweep(ball(2), [np.zeros(2)], with_wu=True)
    lo, hi = table.rows[0].kappa_wu_ratios
    assert lo == pytest.approx(1.0, abs=1e-6) and hi == pytest.approx(1.0, abs=1e-6)
    js = table.to_json()
    assert js["rows"][0]["status"] == "ok" and js["config"]["with_wu"] is True


def test_monte_carlo_sweep_uses_distinct_reproducible_streams():
    rule = QuadratureRule("mc", 3, samples=20_000, seed=1)
    pts = [np.zeros(3), np.zeros(3)]
    a = field_sweep(ball(3), pts, rule)
    b = field_sweep(ball(3), pts, rule, workers=2)
    assert a.to_csv() == b.to_csv()
    assert not np.array_equal(a.rows[0].kappa.gram, a.rows[1].kappa.gram)


def test_fmt_roundtrip():
    x = 0.1 + 1e-17
    assert float(fmt(x)) == x and fmt(None) == "" and fmt(float("nan")) == "nan"
