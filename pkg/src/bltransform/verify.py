"""Registry of numerical claims, each producing rows of measured value vs bound.

Every claim is a function ``(rng) -> list[ClaimRow]``.  Random inputs come
from a generator seeded by the root seed and the claim name, so a claim's
rows do not depend on which other claims run.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass

import numpy as np

from . import domains as D
from .field import hsc_estimate, kappa_at, pullback
from .finsler import (
    busemann_convexify,
    dual_norm,
    ellipsoid_gauge,
    euclidean,
    hermitian_norm,
    lq_norm,
    max_combination,
    max_norm,
)
from .hermitian import (
    HermitianForm,
    congruence,
    evaluate,
    generalized_eigvals,
    invert,
    random_invertible,
    random_pd,
    random_unitary,
    relative_error,
)
from .maps import catalog, covering_map, distance_decreasing_check
from .quadrature import default_rule
from .transform import complex_bl, complex_bl_dual, product_bl, real_complex_consistency
from .wu import kappa_wu_bounds, mvee_balanced, sample_directions, wu_sandwich_report


@dataclass(frozen=True)
class ClaimRow:
    claim: str
    case: str
    measured: float
    bound: float
    sense: str = "<="  # "<=", ">=" or "info"

    @property
    def margin(self) -> float:
        if self.sense == "info":
            return math.nan
        return self.bound - self.measured if self.sense == "<=" else self.measured - self.bound

    @property
    def passed(self) -> bool:
        return self.sense == "info" or self.margin >= 0


def _row(claim, case, measured, bound, sense="<="):
    return ClaimRow(claim, case, float(measured), float(bound), sense)


def _cvec(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _ball_point(rng, n, rmax=0.9):
    z = _cvec(rng, n)
    return z / np.linalg.norm(z) * rmax * rng.uniform(0, 1) ** (1.0 / (2 * n))


def _ball_oracle(z):
    """Gram (in the v^T G conj(w) convention) of the squared ball metric at z."""
    z = np.asarray(z, dtype=complex)
    s = np.vdot(z, z).real
    return (np.eye(z.size) / (1 - s) + np.outer(z, z.conj()) / (1 - s) ** 2).conj()


# ---------------------------------------------------------------------------
# hermitian-linalg


def claim_hermitian(rng):
    H = random_pd(3, rng, 50.0)
    v = _cvec(rng, (1000, 3))
    q = evaluate(H, v, v)
    rows = [_row("hermitian", "evaluate(H,v,v) real, 1e3 v", np.max(np.abs(q.imag) / np.abs(q.real)), 1e-12)]
    worst_c = worst_i = 0.0
    for _ in range(20):
        H = random_pd(3, rng, 100.0)
        A = random_invertible(3, rng, 10.0)
        worst_c = max(worst_c, relative_error(congruence(congruence(H, A), np.linalg.inv(A)), H))
        worst_i = max(worst_i, relative_error(invert(invert(H)), H))
    rows.append(_row("hermitian", "congruence round trip, 20 A", worst_c, 1e-9))
    rows.append(_row("hermitian", "invert involution, 20 H", worst_i, 1e-9))
    return rows


# ---------------------------------------------------------------------------
# finsler


def claim_dual_triangle(rng):
    rows = []
    for F in (lq_norm(0.5, 2), max_norm(2, [1.0, 3.0]), ellipsoid_gauge([2.0, 1.0])):
        G = dual_norm(F)
        a, b = _cvec(rng, (1000, 2)), _cvec(rng, (1000, 2))
        lhs, rhs = G(a + b), G(a) + G(b)
        rows.append(_row("dual-triangle", f"dual of {F.name}", np.max((lhs - rhs) / rhs), 1e-9))
    return rows


def _nonconvex_gauges(rng, count):
    out = []
    for k in range(count):
        p = rng.uniform(0.2, 0.45, 2)
        out.append(ellipsoid_gauge(p, rng.uniform(0.5, 2.0, 2)) if k % 2 else lq_norm(rng.uniform(0.3, 0.9), 2))
    return out


def claim_convexify(rng):
    worst_idem = worst_hom = worst_below = 0.0
    for F in _nonconvex_gauges(rng, 10):
        Fh = busemann_convexify(F)
        Fhh = busemann_convexify(Fh)
        v = _cvec(rng, (20, 2))
        c = _cvec(rng, (20, 1))
        a, b, f = Fh(v), Fhh(v), F(v)
        worst_idem = max(worst_idem, np.max(np.abs(a - b) / a))
        worst_hom = max(worst_hom, np.max(np.abs(Fh(c * v) - np.abs(c[:, 0]) * a) / (np.abs(c[:, 0]) * a)))
        worst_below = max(worst_below, np.max(a / f - 1.0))
    return [
        _row("convexify", "idempotent, 10 gauges", worst_idem, 1e-6),
        _row("convexify", "homogeneous |c|-scaling", worst_hom, 1e-9),
        _row("convexify", "hull below gauge (F_hat/F - 1)", worst_below, 1e-6),
    ]


def claim_convexify_hull(rng):
    """E(1/4,1/4) has the l1 ball as convex hull."""
    Fh = D.kobayashi_busemann(D.ellipsoid(0.25, 0.25), [0, 0])
    v = _cvec(rng, (50, 2))
    l1 = np.sum(np.abs(v), axis=1)
    return [_row("convexify-hull", "E(1/4,1/4) hull = l1 norm, 50 v", np.max(np.abs(Fh(v) - l1) / l1), 1e-6)]


# ---------------------------------------------------------------------------
# bl-transform


def _rule(n):
    return default_rule(n)


def claim_basic_1(rng):
    rows = []
    for n, tol in ((1, 0.02), (2, 0.02), (3, 0.05)):
        worst = 0.0
        for _ in range(100):
            h = random_pd(n, rng, rng.uniform(1.0, 100.0))
            worst = max(worst, relative_error(complex_bl(hermitian_norm(h), _rule(n)), h))
        rows.append(_row("basic-1", f"reproducing sqrt(h) -> h, n={n}, 100 h", worst, tol))
    return rows


def claim_basic_2(rng):
    worst = 0.0
    F = max_norm(2)
    g = complex_bl(F)
    for _ in range(20):
        A = random_invertible(2, rng, 10.0)
        worst = max(worst, relative_error(complex_bl(F.compose(A)), congruence(g, A)))
    return [_row("basic-2", "equivariance, max norm, 20 A", worst, 0.02)]


def _comparability_pairs(rng):
    pairs = []
    for k in range(10):
        n = 1 + k % 2
        if k < 6:
            h1, h2 = random_pd(n, rng, 10.0), random_pd(n, rng, 10.0)
            lam = generalized_eigvals(h2, h1)
            pairs.append((hermitian_norm(h1), hermitian_norm(h2), math.sqrt(lam.min()), math.sqrt(lam.max())))
        else:
            s = rng.uniform(0.5, 2.0, 2)
            pairs.append((euclidean(2), max_norm(2, s), 1.0 / math.sqrt(np.sum(1.0 / s**2)), float(s.max())))
    return pairs


def claim_basic_3(rng):
    lo = hi = math.inf
    for F1, F2, a, b in _comparability_pairs(rng):
        n = F1.n
        g1, g2 = complex_bl(F1), complex_bl(F2)
        v = _cvec(rng, (1000, n))
        r = np.sqrt(g2.quadratic(v) / g1.quadratic(v))
        lo = min(lo, np.min(r / (a ** (n + 1) / b**n)))
        hi = min(hi, np.min((b ** (n + 1) / a**n) / r))
    return [
        _row("basic-3", "lower comparability, 10 pairs", lo, 0.99, ">="),
        _row("basic-3", "upper comparability, 10 pairs", hi, 0.99, ">="),
    ]


def claim_basic_4(rng):
    rows = []
    for F in (max_norm(2), ellipsoid_gauge([2.0, 1.0])):
        beta = float(rng.uniform(0.2, 5.0))
        err = relative_error(complex_bl(F.scaled(beta)), complex_bl(F).scaled(beta**2))
        rows.append(_row("basic-4", f"scaling by {beta:.3f}, {F.name}", err, 1e-9))
    return rows


def _sandwich_gauges(rng):
    return [
        euclidean(2),
        max_norm(2),
        lq_norm(1.0, 2),
        ellipsoid_gauge([2.0, 1.0]),
        hermitian_norm(random_pd(2, rng, 20.0)),
        max_norm(3, [1.0, 2.0, 0.5]),
    ]


def claim_basic_5(rng):
    rows = []
    for F in _sandwich_gauges(rng):
        n = F.n
        g = complex_bl(F)
        v = _cvec(rng, (1000, n))
        r = np.sqrt(g.quadratic(v)) / F(v)
        c = n ** ((n + 1) / 2)
        rows.append(_row("basic-5", f"{F.name} (n={n}) lower: min r*n^((n+1)/2)", r.min() * c, 0.99, ">="))
        rows.append(_row("basic-5", f"{F.name} (n={n}) upper: max r/n^((n+1)/2)", r.max() / c, 1.01))
    return rows


def claim_normalization(rng):
    rows = []
    for n in (1, 2, 3):
        M = complex_bl_dual(euclidean(n)).gram_dual
        rows.append(_row("normalization", f"Euclidean dual Gram = I, n={n}", relative_error(M, np.eye(n)), 0.01))
    return rows


def claim_product(rng):
    e1, e2 = euclidean(1), euclidean(2)
    k = kappa_at(D.polydisc(2), [0, 0]).kappa
    direct = complex_bl(max_combination([e1, e2]))
    target = np.diag([0.5, 0.75, 0.75])
    return [
        _row("product", "bidisc kappa(0) = (2/3) I", relative_error(k, np.eye(2) * 2 / 3), 0.02),
        _row("product", "C1 x C2 Euclidean = blockdiag(1/2, 3/4 I)", relative_error(direct, target), 0.02),
        _row("product", "product_bl vs direct, C1 x C2", relative_error(product_bl([e1, e2]), direct), 0.02),
        _row("product", "product_bl vs direct, C1 x C1 max", relative_error(product_bl([e1, e1]), complex_bl(max_norm(2))), 0.02),
    ]


def claim_real_complex(rng):
    rows = []
    for F in (max_norm(2), ellipsoid_gauge([2.0, 1.0]), hermitian_norm(random_pd(2, rng, 10.0))):
        rows.append(_row("real-complex", F.name, real_complex_consistency(F, seed=int(rng.integers(2**31))), 0.02))
    return rows


# ---------------------------------------------------------------------------
# kobayashi-domains


def _sample_sites(rng):
    sites = [(D.ball(2), _ball_point(rng, 2)) for _ in range(3)]
    sites += [(D.polydisc(2), 0.8 * _cvec(rng, 2) / 2.0) for _ in range(2)]
    sites += [(D.ellipsoid(2, 1), np.zeros(2)), (D.ellipsoid(2, 1), np.array([0, 0.4 - 0.2j]))]
    sites += [(D.product(D.disc(), D.ball(2)), np.array([0.3j, 0.2, -0.1]))]
    return [(s, p) for s, p in sites if s.contains(p)]


def claim_kobayashi(rng):
    worst_le = worst_hom = worst_max = 0.0
    for spec, p in _sample_sites(rng):
        F, Fh = D.indicatrix(spec, p), D.kobayashi_busemann(spec, p)
        v = _cvec(rng, (200, spec.n))
        c = _cvec(rng, (200, 1))
        worst_le = max(worst_le, np.max(Fh(v) / F(v) - 1.0))
        for G in (F, Fh):
            worst_hom = max(worst_hom, np.max(np.abs(G(c * v) - np.abs(c[:, 0]) * G(v)) / (np.abs(c[:, 0]) * G(v))))
        if spec.kind == "product":
            parts = spec.split(v)
            ref = np.maximum(D.kobayashi_busemann(spec.factors[0], p[:1])(parts[0]),
                             D.kobayashi_busemann(spec.factors[1], p[1:])(parts[1]))
            worst_max = max(worst_max, np.max(np.abs(Fh(v) - ref)))
    # non-convex indicatrix
    spec = D.ellipsoid(0.25, 0.25)
    v = _cvec(rng, (30, 2))
    worst_le = max(worst_le, np.max(D.kobayashi_busemann(spec, [0, 0])(v) / D.indicatrix(spec, [0, 0])(v) - 1.0))
    worst_ball = 0.0
    for _ in range(20):
        z = _ball_point(rng, 2)
        v = _cvec(rng, 2)
        s = np.vdot(z, z).real
        exact = math.sqrt(np.vdot(v, v).real / (1 - s) + abs(np.vdot(z, v)) ** 2 / (1 - s) ** 2)
        worst_ball = max(worst_ball, abs(D.kobayashi_royden(D.ball(2), D.TangentSample(z, v)) - exact) / exact)
    return [
        _row("kobayashi", "Busemann <= Royden (k_hat/k - 1)", worst_le, 1e-6),
        _row("kobayashi", "homogeneity of both providers", worst_hom, 1e-9),
        _row("kobayashi", "product Busemann = max of factors", worst_max, 0.0),
        _row("kobayashi", "ball pullback vs closed form, 20 points", worst_ball, 1e-8),
    ]


def claim_ball(rng):
    worst = 0.0
    for _ in range(20):
        z = _ball_point(rng, 2)
        worst = max(worst, relative_error(kappa_at(D.ball(2), z).kappa, _ball_oracle(z)))
    origin = relative_error(kappa_at(D.ball(2), [0, 0]).kappa, np.eye(2))
    return [
        _row("ball", "kappa_B2 vs squared ball metric, 20 points", worst, 0.02),
        _row("ball", "kappa_B2(0) = I", origin, 0.01),
    ]


# ---------------------------------------------------------------------------
# wu


def _wu_sites():
    return [(D.ellipsoid(2, 1), np.zeros(2)), (D.polydisc(2), np.zeros(2)), (D.ball(2), np.array([0.3, 0.2j]))]


def claim_wu(rng):
    rows = []
    for spec, p in _wu_sites():
        F = D.indicatrix(spec, p)
        E = mvee_balanced(F)
        name = f"{spec} at {_fmt_point(p)}"
        v = _cvec(rng, (10_000, spec.n))
        v /= F(v)[:, None]
        rows.append(_row("wu", f"{name}: gap", E.gap, 1e-7))
        rows.append(_row("wu", f"{name}: containment max E(v,v), F(v)=1", np.max(E.form.quadratic(v)), 1 + 1e-6))
        rep = wu_sandwich_report(D.kobayashi_busemann(spec, p), E.form, 1000, int(rng.integers(2**31)))
        m = spec.n
        rows.append(_row("wu", f"{name}: John spread ratio_high/ratio_low", rep.ratio_high / rep.ratio_low, math.sqrt(m) * 1.001))
        rows.append(_row("wu", f"{name}: ratio_low of sqrt(w)/k_hat", rep.ratio_low, 1 / math.sqrt(m) - 1e-3, ">="))
        rows.append(_row("wu", f"{name}: ratio_high of sqrt(w)/k_hat", rep.ratio_high, 1 + 1e-3))
        rows.append(_row("wu", f"{name}: printed direction 1 <= sqrt(w)/k_hat holds (1=yes)", float(rep.reversed_holds), 0, "info"))
        shrunk = mvee_balanced(F.scaled(1.1))
        rows.append(_row("wu", f"{name}: log det grows when the body shrinks", np.linalg.slogdet(shrunk.form.gram)[1] - np.linalg.slogdet(E.form.gram)[1], 0.0, ">="))
        lo, hi = kappa_wu_bounds(kappa_at(spec, p).kappa, E.form)
        rows.append(_row("wu-kappa", f"{name}: min sqrt(kappa/w) * m^((m+2)/2)", lo * m ** ((m + 2) / 2), 0.99, ">="))
        rows.append(_row("wu-kappa", f"{name}: max sqrt(kappa/w) / m^((m+1)/2)", hi / m ** ((m + 1) / 2), 1.01))
    return rows


# ---------------------------------------------------------------------------
# metric-field


def _fmt_point(p):
    return "(" + ",".join(f"{complex(c).real:g}{complex(c).imag:+g}i" for c in np.atleast_1d(p)) + ")"


def claim_invariance(rng):
    worst = 0.0
    for _ in range(5):
        U = random_unitary(2, rng)
        z = _ball_point(rng, 2)
        worst = max(worst, relative_error(congruence(kappa_at(D.ball(2), U @ z).kappa, U), kappa_at(D.ball(2), z).kappa))
    return [_row("invariance", "unitary transport on B2, 5 (U, z)", worst, 0.02)]


def claim_distance_decreasing(rng):
    rows = []
    for fmap in catalog():
        worst, bound, sharp = 0.0, None, None
        for p in fmap.points:
            c = distance_decreasing_check(fmap, p)
            worst, bound, sharp = max(worst, c.ratio), c.bound, c.sharp_bound
        rows.append(_row("distance-decreasing", f"{fmap.name}: f*kappa_N / kappa_M vs C", worst, bound * 1.01))
        if sharp is not None:
            rows.append(_row("distance-decreasing", f"{fmap.name}: sharp bound", worst, sharp * 1.01))
    return rows


def claim_covering(rng):
    cov = covering_map()
    worst = 0.0
    for _ in range(10):
        w = np.array([-rng.uniform(0.05, 3.0) + 1j * rng.uniform(-np.pi, np.pi)])
        pb = pullback(cov.jacobian(w), kappa_at(cov.target, cov.f(w)).kappa)
        worst = max(worst, relative_error(pb, kappa_at(cov.source, w).kappa))
    return [_row("covering", "exp cover of punctured disc, 10 points", worst, 0.01)]


def claim_kappa_sandwich(rng):
    rows = []
    sites = [(D.ball(2), np.array([0.4, -0.3j])), (D.polydisc(2), np.array([0.2, 0.5j])),
             (D.ellipsoid(2, 1), np.zeros(2)), (D.ellipsoid(0.25, 0.25), np.zeros(2))]
    for spec, p in sites:
        m = spec.n
        k = kappa_at(spec, p).kappa
        Fh = D.kobayashi_busemann(spec, p)
        v = sample_directions(m, 1000 if spec.convex_indicatrix else 100, int(rng.integers(2**31)))
        r = np.sqrt(k.quadratic(v)) / Fh(v)
        c = m ** ((m + 1) / 2)
        rows.append(_row("kappa-sandwich", f"{spec} at {_fmt_point(p)} lower", r.min() * c, 0.99, ">="))
        rows.append(_row("kappa-sandwich", f"{spec} at {_fmt_point(p)} upper", r.max() / c, 1.01))
    return rows


def claim_curvature(rng):
    K_disc = hsc_estimate(D.disc(), [0], [1], 1e-2)
    K_flat = hsc_estimate(D.ball(2), [0, 0], [1, 0], 1e-2, metric=lambda z: HermitianForm.identity(2))
    K_ball = hsc_estimate(D.ball(2), [0, 0], [1, 0], 1e-2)
    K_e = hsc_estimate(D.ellipsoid(2, 1), [0, 0], [0, 1], 1e-2)
    return [
        _row("curvature", "disc at 0: |K + 4|", abs(K_disc + 4), 0.05),
        _row("curvature", "flat injected field: |K|", abs(K_flat), 1e-6),
        _row("curvature", "B2 at 0 along e1: |K + 4|", abs(K_ball + 4), 0.2),
        _row("curvature", "E(2,1) at 0 along e2: proxy K", K_e, 0, "info"),
    ]


CLAIMS = {
    "hermitian": claim_hermitian,
    "dual-triangle": claim_dual_triangle,
    "convexify": claim_convexify,
    "convexify-hull": claim_convexify_hull,
    "basic-1": claim_basic_1,
    "basic-2": claim_basic_2,
    "basic-3": claim_basic_3,
    "basic-4": claim_basic_4,
    "basic-5": claim_basic_5,
    "normalization": claim_normalization,
    "product": claim_product,
    "real-complex": claim_real_complex,
    "kobayashi": claim_kobayashi,
    "ball": claim_ball,
    "wu": claim_wu,
    "invariance": claim_invariance,
    "distance-decreasing": claim_distance_decreasing,
    "covering": claim_covering,
    "kappa-sandwich": claim_kappa_sandwich,
    "curvature": claim_curvature,
}


def claim_rng(seed: int, name: str):
    return np.random.default_rng(np.random.SeedSequence([seed, zlib.crc32(name.encode())]))


def run_claims(names=None, seed: int = 0):
    """Run the named claims (all by default); returns the list of rows."""
    names = list(CLAIMS) if not names else list(names)
    unknown = [n for n in names if n not in CLAIMS]
    if unknown:
        raise KeyError(f"unknown claims {unknown}; available: {', '.join(CLAIMS)}")
    rows = []
    for name in names:
        rows.extend(CLAIMS[name](claim_rng(seed, name)))
    return rows


def format_table(rows) -> str:
    def f(x):
        return "" if math.isnan(x) else format(x, ".6g")

    lines = ["claim | case | measured | bound | margin | status"]
    for r in rows:
        status = "info" if r.sense == "info" else ("PASS" if r.passed else "FAIL")
        lines.append(f"{r.claim} | {r.case} | {format(r.measured, '.9g')} | {r.sense} {f(r.bound)} | {f(r.margin)} | {status}")
    return "\n".join(lines) + "\n"
