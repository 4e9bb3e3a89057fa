"""Pointwise kappa fields, pullbacks, curve lengths and a curvature proxy."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .domains import DomainSpec, indicatrix, kobayashi_busemann
from .finsler import DualConfig
from .hermitian import DimensionError, HermitianForm, generalized_eigvals
from .quadrature import QuadratureRule, default_rule
from .transform import MomentMatrix, complex_bl_dual, dualize
from .wu import WuConfig, mvee_balanced


class StageError(RuntimeError):
    """Failure inside the kappa pipeline, tagged with the stage that raised it."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


class StepTooLargeError(ValueError):
    pass


class NoisyFieldError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MetricSample:
    point: np.ndarray
    kappa: HermitianForm | None
    wu: HermitianForm | None = None
    busemann_gauge_values: np.ndarray | None = None
    error_estimate: float = math.nan
    status: str = "ok"
    moment: MomentMatrix | None = None
    wu_gap: float = math.nan

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def kappa_wu_ratios(self):
        """(min, max) of kappa(v,v) / w(v,v) over v != 0, or None without a Wu form."""
        if self.kappa is None or self.wu is None:
            return None
        lam = generalized_eigvals(self.kappa, self.wu)
        return float(lam.min()), float(lam.max())


@dataclass(frozen=True)
class CurveSpec:
    """Curve t -> gamma(t) on [0, 1] with its derivative."""

    gamma: object
    dgamma: object
    segments: int = 8


def _rule_for(spec: DomainSpec, rule):
    if rule is None:
        return default_rule(spec.n)
    if rule.n != spec.n:
        return replace(rule, n=spec.n)
    return rule


def kappa_at(
    spec: DomainSpec,
    point,
    rule: QuadratureRule | None = None,
    with_wu: bool = False,
    dual_config: DualConfig = DualConfig(),
    wu_config: WuConfig = WuConfig(),
) -> MetricSample:
    """kappa at ``point``: indicatrix, convex hull, then the complex BL transform."""
    z = np.asarray(point, dtype=complex).reshape(-1)
    stage = "indicatrix"
    try:
        F = indicatrix(spec, z)
        stage = "convexify"
        Fh = kobayashi_busemann(spec, z, dual_config)
        stage = "transform"
        moment = complex_bl_dual(Fh, _rule_for(spec, rule))
        kappa = dualize(moment)
        wu, gap = None, math.nan
        if with_wu:
            stage = "wu"
            ell = mvee_balanced(F, wu_config)
            wu, gap = ell.form, ell.gap
    except Exception as exc:  # noqa: BLE001 - re-raised with the stage attached
        raise StageError(getattr(exc, "stage", stage), exc) from exc
    return MetricSample(z, kappa, wu, error_estimate=moment.error_estimate, moment=moment, wu_gap=gap)


def pullback(J, H) -> HermitianForm:
    """``(u, v) -> H(J u, J v)`` for a Jacobian J of shape (n_target, n_source)."""
    H = H if isinstance(H, HermitianForm) else HermitianForm(H)
    J = np.asarray(J, dtype=complex)
    if J.ndim == 1:
        J = J[:, None]
    if J.ndim != 2 or J.shape[0] != H.dim:
        raise DimensionError(f"Jacobian of shape {J.shape} does not map into C^{H.dim}")
    return HermitianForm(J.T @ H.gram @ J.conj())


def integrated_length(spec: DomainSpec, curve: CurveSpec, rule=None, rtol: float = 1e-4, max_segments: int = 4096) -> float:
    """kappa-length of a curve by composite midpoint sums, doubling until two agree to ``rtol``."""
    cache = {}

    def speed(t):
        if t not in cache:
            v = np.asarray(curve.dgamma(t), dtype=complex).reshape(-1)
            if not np.any(v):
                cache[t] = 0.0
            else:
                k = kappa_at(spec, curve.gamma(t), rule).kappa
                cache[t] = float(np.sqrt(k.quadratic(v)))
            if not math.isfinite(cache[t]):
                raise ArithmeticError(f"metric is not finite at t={t}")
        return cache[t]

    def midpoint(m):
        return sum(speed((k + 0.5) / m) for k in range(m)) / m

    m = max(int(curve.segments), 1)
    prev = midpoint(m)
    while m < max_segments:
        m *= 2
        cur = midpoint(m)
        if abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
    raise ArithmeticError(f"length did not settle to rtol={rtol} with {m} segments")


def hsc_estimate(spec: DomainSpec, point, direction, step: float = 1e-2, rule=None, metric=None) -> float:
    """Gauss curvature at 0 of lambda(zeta) = kappa(point + zeta*direction)(direction, direction).

    K = -Laplacian(log lambda) / (2 lambda), the Laplacian taken by the
    five-point stencil with one Richardson step.  On discs of a Hermitian
    metric through a totally geodesic direction this is the holomorphic
    sectional curvature; elsewhere it is a proxy.  ``metric`` replaces the
    kappa pipeline (a callable point -> HermitianForm).
    """
    p = np.asarray(point, dtype=complex).reshape(-1)
    d = np.asarray(direction, dtype=complex).reshape(-1)
    if p.size != spec.n or d.size != spec.n:
        raise DimensionError(f"point and direction must lie in C^{spec.n}")
    if metric is None:
        rule = _rule_for(spec, rule)
        if not rule.deterministic:
            raise NoisyFieldError("curvature needs a deterministic quadrature rule; Monte Carlo noise is amplified by 1/step^2")
        metric = lambda z: kappa_at(spec, z, rule).kappa  # noqa: E731
    ring = 2.0 * step * np.exp(2j * np.pi * np.arange(32) / 32)
    if not all(spec.contains(p + c * d) for c in ring) or not spec.contains(p):
        raise StepTooLargeError(f"the disc of radius {2 * step:g} around the point leaves {spec}")

    def loglam(c):
        return math.log(float(metric(p + c * d).quadratic(d)))

    f0 = loglam(0.0)

    def lap(h):
        return (loglam(h) + loglam(-h) + loglam(1j * h) + loglam(-1j * h) - 4.0 * f0) / h**2

    L = (4.0 * lap(step / 2.0) - lap(step)) / 3.0
    return -L / (2.0 * math.exp(f0))


# ---------------------------------------------------------------------------
# grids and sweeps


def parse_complex(text: str) -> complex:
    return complex(text.strip().replace(" ", "").replace("i", "j"))


def parse_point(text, n: int | None = None) -> np.ndarray:
    """``"0.1+0.2i,0"`` or a sequence of numbers -> complex vector."""
    if isinstance(text, str):
        z = np.array([parse_complex(t) for t in text.split(",") if t.strip()], dtype=complex)
    else:
        z = np.asarray(text, dtype=complex).reshape(-1)
    if n is not None and z.size != n:
        raise ValueError(f"expected a point in C^{n}, got {z.size} coordinates")
    return z


def _boundary_radius(spec: DomainSpec, u) -> float:
    """Distance to the boundary along the unit direction u from 0, for balanced domains."""
    if spec.kind == "product":
        return min(_boundary_radius(f, part) if np.any(part) else math.inf for f, part in zip(spec.factors, spec.split(u)))
    F = indicatrix(spec, np.zeros(spec.n))
    return 1.0 / float(F(u))


def _radial_grid(spec: DomainSpec, radii: int, angles: int):
    n = spec.n
    pts = []
    for a in range(angles):
        th = 0.5 * math.pi * a / angles
        if spec.kind in ("punctured-disc", "halfplane") or n == 1:
            u = np.array([np.exp(1j * th)])
        else:
            u = np.zeros(n, dtype=complex)
            u[0], u[-1] = math.cos(th), math.sin(th)
        for k in range(radii):
            if spec.kind == "punctured-disc":
                pts.append(u * 0.9 * (k + 1) / (radii + 1))
            elif spec.kind == "halfplane":
                pts.append(np.array([-(k + 1) / radii + 1j * math.tan(th) * (k + 1) / radii]))
            else:
                pts.append(u * 0.9 * _boundary_radius(spec, u) * k / radii)
    return pts


def _random_points(spec: DomainSpec, count: int, seed: int):
    rng = np.random.default_rng(np.random.SeedSequence([seed, 7]))
    out = []
    while len(out) < count:
        if spec.kind == "halfplane":
            z = np.array([-rng.uniform(0.05, 2.0) + 1j * rng.uniform(-1.0, 1.0)])
        else:
            r = 0.95 * np.sqrt(rng.uniform(0, 1, spec.n))
            z = r * np.exp(2j * np.pi * rng.uniform(0, 1, spec.n))
        if spec.contains(z):
            out.append(z)
    return out


def parse_grid(spec: DomainSpec, grid: str, seed: int = 0):
    """Grid mini-language.

    ``origin``; ``radial:R`` (R radii along the first axis, from 0 to 0.9 of
    the boundary distance); ``radial:RxA`` (R radii times A directions between
    the first and last axis); ``random:N[:seed]``; or explicit points
    separated by ``;``.
    """
    g = grid.strip()
    if g == "origin":
        return [np.zeros(spec.n, dtype=complex)]
    if g.startswith("radial:"):
        body = g.split(":", 1)[1]
        r, _, a = body.partition("x")
        return _radial_grid(spec, int(r), int(a) if a else 1)
    if g.startswith("random:"):
        parts = g.split(":")
        return _random_points(spec, int(parts[1]), int(parts[2]) if len(parts) > 2 else seed)
    return [parse_point(t, spec.n) for t in g.split(";") if t.strip()]


def _point_rule(spec, rule, index):
    rule = _rule_for(spec, rule)
    if rule.deterministic:
        return rule
    # independent, reproducible substream per grid point
    seed = int(np.random.SeedSequence([rule.seed, index]).generate_state(1)[0])
    return replace(rule, seed=seed)


def field_sweep(
    spec: DomainSpec, points, rule=None, with_wu: bool = False, workers: int = 1, config=None, wu_config: WuConfig = WuConfig()
) -> "FieldTable":
    """kappa (and optionally Wu) at each point; failures are recorded in the row's status."""
    points = [parse_point(p, spec.n) for p in points]

    def one(item):
        i, z = item
        try:
            return kappa_at(spec, z, _point_rule(spec, rule, i), with_wu=with_wu, wu_config=wu_config)
        except StageError as exc:
            return MetricSample(z, None, status=f"error[{exc.stage}]: {exc.cause}")

    items = list(enumerate(points))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(one, items))
    else:
        rows = [one(it) for it in items]
    cfg = {"domain": spec.to_json(), "rule": _rule_for(spec, rule).to_json(), "with_wu": with_wu}
    cfg.update(config or {})
    return FieldTable(spec, rows, cfg)


# ---------------------------------------------------------------------------
# output


def fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def config_hash(config) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


CONVENTIONS = (
    "# conventions: form(v,w) = v^T G conj(w); G entries are dimensionless Gram coefficients "
    "in the standard basis of C^n; ratios are kappa(v,v)/wu(v,v) extremes"
)


@dataclass(eq=False)
class FieldTable:
    spec: DomainSpec
    rows: list
    config: dict = field(default_factory=dict)

    def _pairs(self):
        n = self.spec.n
        return [(j, k) for j in range(n) for k in range(j, n)]

    def header(self):
        n = self.spec.n
        cols = ["index"]
        cols += [f"z{j}_{part}" for j in range(n) for part in ("re", "im")]
        for name in ("kappa", "wu"):
            cols += [f"{name}_{j}{k}_{part}" for j, k in self._pairs() for part in ("re", "im")]
        return cols + ["ratio_min", "ratio_max", "error_estimate", "status"]

    def _row(self, i, s: MetricSample):
        out = [str(i)]
        for c in s.point:
            out += [fmt(c.real), fmt(c.imag)]
        for form in (s.kappa, s.wu):
            for j, k in self._pairs():
                if form is None:
                    out += ["", ""]
                else:
                    out += [fmt(form.gram[j, k].real), fmt(form.gram[j, k].imag)]
        r = s.kappa_wu_ratios
        out += [fmt(r[0]) if r else "", fmt(r[1]) if r else "", fmt(s.error_estimate), s.status]
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        from . import __version__

        buf.write(f"{CONVENTIONS}; version={__version__}; config_hash={config_hash(self.config)}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        for i, s in enumerate(self.rows):
            w.writerow(self._row(i, s))
        return buf.getvalue()

    def to_json(self):
        from . import __version__

        rows = []
        for s in self.rows:
            rows.append(
                {
                    "point": [[float(c.real), float(c.imag)] for c in s.point],
                    "kappa": s.kappa.to_json() if s.kappa is not None else None,
                    "wu": s.wu.to_json() if s.wu is not None else None,
                    "ratios": list(s.kappa_wu_ratios) if s.kappa_wu_ratios else None,
                    "error_estimate": s.error_estimate,
                    "status": s.status,
                }
            )
        return {"version": __version__, "config_hash": config_hash(self.config), "config": self.config, "rows": rows}
