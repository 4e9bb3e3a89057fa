"""Pseudonorms on C^n, their duals and convex hulls.

A pseudonorm is a function F with F(cv) = |c| F(v) for complex c, positive
away from 0, but not necessarily convex.  The convexification used here is
the double dual: the gauge of the convex hull of {F < 1} is

    F_hat(v) = sup_theta |theta(v)| / F*(theta),   F*(theta) = sup_w |theta(w)| / F(w),

with both suprema taken over unit spheres by batched direct search.  For
Reinhardt gauges (values depending only on |v_1|, ..., |v_n|) the hull is
the hull of the modulus profile: in C^2 it is computed directly as a planar
convex hull of densely sampled profile points, in higher dimension both
suprema run over the positive orthant of the real sphere S^{n-1}.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.spatial import ConvexHull

from .hermitian import HermitianForm
from .optimize import SearchConfig, complex_to_real, maximize_on_sphere, real_to_complex, top_k


@dataclass(frozen=True, eq=False)
class Pseudonorm:
    """Vectorized gauge ``func: (..., n) complex -> (...) real``.

    ``satisfies_triangle`` is a claim made by whoever built the gauge; it is
    spot-checked by :func:`busemann_convexify` before being relied on.
    """

    func: Callable
    n: int
    satisfies_triangle: bool = False
    positive_definite: bool = True
    reinhardt: bool = False
    name: str = "F"

    def __call__(self, v):
        v = np.asarray(v, dtype=complex)
        if v.shape[-1] != self.n:
            raise ValueError(f"{self.name} acts on C^{self.n}, got vectors of length {v.shape[-1]}")
        out = np.asarray(self.func(v), dtype=float)
        return out[()] if out.ndim == 0 else out

    def compose(self, A, name=None) -> "Pseudonorm":
        """``v -> F(A v)``."""
        A = np.asarray(A, dtype=complex)
        diagonal = np.count_nonzero(A - np.diag(np.diag(A))) == 0
        return replace(
            self,
            func=lambda v, f=self.func, At=A.T: f(v @ At),
            reinhardt=self.reinhardt and diagonal,
            name=name or f"{self.name}∘A",
        )

    def scaled(self, beta: float) -> "Pseudonorm":
        return replace(self, func=lambda v, f=self.func: beta * f(v), name=f"{beta:g}·{self.name}")


def euclidean(n: int) -> Pseudonorm:
    return Pseudonorm(lambda v: np.linalg.norm(v, axis=-1), n, True, reinhardt=True, name="euclidean")


def hermitian_norm(H) -> Pseudonorm:
    """``sqrt(H(v, v))``."""
    H = H if isinstance(H, HermitianForm) else HermitianForm(H)
    if np.linalg.eigvalsh(H.gram).min() <= 0:
        raise ValueError("hermitian_norm needs a positive definite form")
    diagonal = np.count_nonzero(H.gram - np.diag(np.diag(H.gram))) == 0
    return Pseudonorm(
        lambda v: np.sqrt(np.maximum(H.quadratic(v), 0.0)), H.dim, True, reinhardt=diagonal, name="hermitian"
    )


def max_norm(n: int, scales=None) -> Pseudonorm:
    """``max_j |v_j| * scales_j``."""
    s = np.ones(n) if scales is None else np.asarray(scales, dtype=float)
    return Pseudonorm(lambda v: np.max(np.abs(v) * s, axis=-1), n, True, reinhardt=True, name="max")


def lq_norm(q: float, n: int) -> Pseudonorm:
    """``(sum |v_j|^q)^(1/q)``; a norm only for q >= 1."""

    def f(v):
        a = np.abs(v)
        m = a.max(axis=-1, keepdims=True)
        safe = np.where(m > 0, m, 1.0)
        return m[..., 0] * np.sum((a / safe) ** q, axis=-1) ** (1.0 / q)

    return Pseudonorm(f, n, q >= 1.0, reinhardt=True, name=f"l{q:g}")


def ellipsoid_gauge(p, scales=None) -> Pseudonorm:
    """Minkowski gauge of E(p) = {sum |v_j|^(2 p_j) < 1}, optionally precomposed with diag(scales).

    Solves ``sum (|v_j| / t)^(2 p_j) = 1`` for t by monotone Newton iteration
    in log t, started at the lower end of the bracket [max|v_j|, n^(1/(2 min p)) max|v_j|].
    """
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0):
        raise ValueError("ellipsoid exponents must be positive")
    s = np.ones(len(p)) if scales is None else np.asarray(scales, dtype=float)

    def f(v):
        a = np.abs(v) * s
        m = a.max(axis=-1)
        safe = np.where(m > 0, m, 1.0)
        x = (a / safe[..., None]) ** (2.0 * p)
        x[..., 0] = np.where(m > 0, x[..., 0], 1.0)  # zero rows: any solvable placeholder
        u = np.zeros_like(m)
        for _ in range(100):
            terms = x * np.exp(-2.0 * p * u[..., None])
            g = terms.sum(axis=-1) - 1.0
            dg = -(2.0 * p * terms).sum(axis=-1)
            step = -g / dg
            u = u + step
            if np.all(np.abs(step) < 1e-15):
                break
        return np.where(m > 0, m * np.exp(u), 0.0)

    return Pseudonorm(f, len(p), bool(np.all(p >= 0.5)), reinhardt=True, name=f"E{tuple(p.tolist())}")


def max_combination(factors) -> Pseudonorm:
    """``v -> max_j F_j(pi_j v)`` on the direct sum of the factor spaces."""
    dims = [F.n for F in factors]
    cuts = np.cumsum([0] + dims)

    def f(v):
        return np.max(np.stack([F(v[..., a:b]) for F, a, b in zip(factors, cuts[:-1], cuts[1:])]), axis=0)

    return Pseudonorm(
        f,
        int(cuts[-1]),
        all(F.satisfies_triangle for F in factors),
        all(F.positive_definite for F in factors),
        all(F.reinhardt for F in factors),
        name="max(" + ", ".join(F.name for F in factors) + ")",
    )


def triangle_defect(F: Pseudonorm, trials: int = 1000, seed: int = 0) -> float:
    """Largest relative violation of F(a + b) <= F(a) + F(b) on random pairs."""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((trials, F.n)) + 1j * rng.standard_normal((trials, F.n))
    b = rng.standard_normal((trials, F.n)) + 1j * rng.standard_normal((trials, F.n))
    # near-collinear pairs probe flat directions
    b[: trials // 2] = a[: trials // 2] * rng.uniform(0.1, 2.0, (trials // 2, 1)) + 0.05 * b[: trials // 2]
    lhs, rhs = F(a + b), F(a) + F(b)
    return float(np.max((lhs - rhs) / rhs))


# ---------------------------------------------------------------------------
# duals and hulls


@dataclass(frozen=True)
class DualConfig:
    search: SearchConfig = SearchConfig()
    inner_starts: int = 2
    inner_step: float = 0.02
    outer_starts: int = 3
    outer_step: float = 0.02
    outer_tol: float = 1e-9
    atoms: int = 40
    claim_trials: int = 400


def _complex_atoms(n, m, seed):
    """Points of S^{2n-1}, one per phase orbit, roughly uniform."""
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    if n == 2:
        t = (np.arange(m + 1) / m) ** 1.0
        t = 0.5 - 0.5 * np.cos(np.pi * t)
        phi = 2 * np.pi * np.arange(2 * m) / (2 * m)
        T, P = np.meshgrid(t, phi, indexing="ij")
        pts = np.stack([np.sqrt(1 - T), np.sqrt(T) * np.exp(1j * P)], axis=-1).reshape(-1, 2)
        return np.unique(np.round(pts, 14), axis=0)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((40 * m * n, n)) + 1j * rng.standard_normal((40 * m * n, n))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    return np.concatenate([np.eye(n, dtype=complex), z])


def _orthant_atoms(n, m, seed):
    """Points of the positive orthant of S^{n-1}."""
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        a = 0.5 * np.pi * np.arange(8 * m + 1) / (8 * m)
        return np.stack([np.cos(a), np.sin(a)], axis=1)
    rng = np.random.default_rng(seed)
    x = np.abs(rng.standard_normal((40 * m * n, n)))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return np.concatenate([np.eye(n), x])


class _Geometry:
    """Parametrization of a support-function problem on a real sphere."""

    def __init__(self, F: Pseudonorm, reinhardt: bool, config: DualConfig):
        self.F = F
        self.reinhardt = reinhardt
        n = F.n
        self.d = n if reinhardt else 2 * n
        seed = config.search.seed
        self.atoms = _orthant_atoms(n, config.atoms, seed) if reinhardt else complex_to_real(
            _complex_atoms(n, config.atoms, seed)
        )

    def point(self, x):
        """Real search variable -> complex vector."""
        return np.abs(x).astype(complex) if self.reinhardt else real_to_complex(x)

    def pair(self, a, b):
        """|a(b)| for real search variables, broadcast over leading axes."""
        if self.reinhardt:
            return np.sum(np.abs(a) * np.abs(b), axis=-1)
        za, zb = real_to_complex(a), real_to_complex(b)
        return np.abs(np.sum(za * zb, axis=-1))

    def canonical(self, v):
        """Unit representative of v's orbit (phases removed where irrelevant)."""
        norm = np.linalg.norm(v, axis=-1)
        safe = np.where(norm > 0, norm, 1.0)[..., None]
        u = v / safe
        if self.reinhardt:
            return np.abs(u), norm
        weights = 1.0 / (np.arange(u.shape[-1]) + np.pi)
        s = np.sum(u * weights, axis=-1, keepdims=True)
        s = np.where(np.abs(s) > 1e-300, s, 1.0)
        return complex_to_real(u * (np.abs(s) / s)), norm


def _support(geom: _Geometry, targets, gauge, atom_values, starts, step, config: SearchConfig):
    """sup over the sphere of pair(target, x) / gauge(x), for each target row.

    ``atom_values`` are ``gauge`` evaluated on ``geom.atoms`` and seed the
    starting points.
    """
    targets = np.atleast_2d(targets)
    scores = geom.pair(targets[:, None, :], geom.atoms[None, :, :]) / atom_values[None, :]
    idx = top_k(scores, starts)
    k = idx.shape[1]
    x0 = geom.atoms[idx].reshape(-1, geom.d)
    rep = np.repeat(targets, k, axis=0)

    def objective(x, rows):
        return geom.pair(rep[rows][:, None, :], x) / gauge(x)

    _, val, _ = maximize_on_sphere(objective, x0, replace(config, tol=config.tol), step=step)
    val = val.reshape(-1, k).max(axis=1)
    return np.maximum(val, scores.max(axis=1))


class _DualGauge:
    """F* evaluated by atom scan plus local search."""

    def __init__(self, geom: _Geometry, config: DualConfig):
        self.geom = geom
        self.config = config
        F = geom.F
        self.primal = lambda x: F(geom.point(x))
        self.primal_atoms = self.primal(geom.atoms)
        if np.any(self.primal_atoms <= 0):
            raise ValueError(f"{F.name} vanishes on the unit sphere; it is not positive definite")

    def on_sphere(self, theta, starts=None, step=None, search=None):
        c = self.config
        return _support(
            self.geom,
            theta,
            self.primal,
            self.primal_atoms,
            starts or c.search.starts,
            step or c.search.step,
            search or c.search,
        )


class _Bidual:
    """F_hat evaluated as the support-function dual of F*."""

    def __init__(self, geom: _Geometry, config: DualConfig):
        self.geom = geom
        self.config = config
        self.dual = _DualGauge(geom, config)
        self.dual_atoms = self.dual.on_sphere(geom.atoms)
        self._cache = {}

    def _inner(self, x):
        shape = x.shape[:-1]
        c = self.config
        flat = x.reshape(-1, self.geom.d)
        vals = self.dual.on_sphere(flat, starts=c.inner_starts, step=c.inner_step)
        return vals.reshape(shape)

    def on_sphere(self, u):
        c = self.config
        outer = replace(c.search, tol=c.outer_tol)
        return _support(self.geom, u, self._inner, self.dual_atoms, c.outer_starts, c.outer_step, outer)

    def __call__(self, v):
        u, norm = self.geom.canonical(v)
        flat = u.reshape(-1, self.geom.d)
        keys = np.round(flat, 12)
        uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
        todo = [i for i, row in enumerate(map(bytes, uniq)) if row not in self._cache]
        if todo:
            vals = self.on_sphere(uniq[todo])
            for i, val in zip(todo, vals):
                self._cache[bytes(uniq[i])] = val
        vals = np.array([self._cache[bytes(row)] for row in uniq])
        out = vals[inverse.reshape(-1)].reshape(norm.shape) * norm
        bound = self.geom.F(v)
        return np.minimum(out, bound)


class _ProfilePolygon:
    """Convex hull of a Reinhardt body in C^2 through its modulus profile.

    For a Reinhardt set the hull is again Reinhardt, and its modulus profile
    is the convex hull of the profile reflected through both axes.  The
    boundary points b(t) = (cos t, sin t) / F(cos t, sin t) are sampled
    densely, reflected, and hulled in the plane; the hull gauge is then the
    edge functional hit by the ray through (|v_1|, |v_2|).  Vertices lie on
    the true boundary, so the error is second order in the sampling step.
    """

    def __init__(self, F: Pseudonorm, samples: int = 1 << 14):
        t = 0.5 * np.pi * np.arange(samples + 1) / samples
        w = np.stack([np.cos(t), np.sin(t)], axis=1)
        b = w / F(w.astype(complex))[:, None]
        if not np.all(np.isfinite(b)):
            raise ValueError(f"{F.name} vanishes on the unit sphere; it is not positive definite")
        pts = np.concatenate([b * np.array(s) for s in ((1, 1), (-1, 1), (-1, -1), (1, -1))])
        V = pts[ConvexHull(pts).vertices]
        ang = np.arctan2(V[:, 1], V[:, 0])
        order = np.argsort(ang)
        V, ang = V[order], ang[order]
        self.vertices = V
        self.angles = np.append(ang, ang[0] + 2 * np.pi)
        nxt = np.roll(V, -1, axis=0)
        normal = np.stack([nxt[:, 1] - V[:, 1], V[:, 0] - nxt[:, 0]], axis=1)
        self.edges = normal / np.sum(normal * V, axis=1, keepdims=True)

    def gauge(self, x):
        """Hull gauge at nonnegative moduli x of shape (..., 2)."""
        a = np.arctan2(x[..., 1], x[..., 0])
        idx = np.clip(np.searchsorted(self.angles, a, side="right") - 1, 0, len(self.edges) - 1)
        return np.sum(self.edges[idx] * x, axis=-1)

    def support(self, theta):
        """Support function max_k theta . V_k at nonnegative theta of shape (..., 2)."""
        return np.max(theta @ self.vertices.T, axis=-1)


def dual_norm(F: Pseudonorm, config: DualConfig = DualConfig()) -> Pseudonorm:
    """``F*(theta) = sup_{|w|=1} |theta(w)| / F(w)`` with ``theta(w) = sum theta_j w_j``.

    The result is a supremum of moduli of linear functionals, hence a norm.
    """
    if not F.positive_definite:
        raise ValueError("dual_norm needs a positive definite pseudonorm")
    if F.reinhardt and F.n == 2:
        poly = _ProfilePolygon(F)
        return Pseudonorm(lambda t: poly.support(np.abs(t)), 2, True, True, True, name=f"{F.name}*")
    geom = _Geometry(F, F.reinhardt, config)
    dual = _DualGauge(geom, config)

    def f(theta):
        u, norm = geom.canonical(theta)
        flat = u.reshape(-1, geom.d)
        return dual.on_sphere(flat).reshape(norm.shape) * norm

    return Pseudonorm(f, F.n, True, True, F.reinhardt, name=f"{F.name}*")


def busemann_convexify(F: Pseudonorm, config: DualConfig = DualConfig()) -> Pseudonorm:
    """Gauge of the convex hull of {F < 1}, computed as the double dual of F.

    A claimed-convex input is returned unchanged once a randomized triangle
    check fails to refute the claim.
    """
    if not F.positive_definite:
        raise ValueError("busemann_convexify needs a positive definite pseudonorm")
    if F.satisfies_triangle and triangle_defect(F, config.claim_trials, config.search.seed) <= 1e-9:
        return F
    if F.reinhardt and F.n == 2:
        poly = _ProfilePolygon(F)
        return Pseudonorm(lambda v: poly.gauge(np.abs(v)), 2, True, True, True, name=f"hull({F.name})")
    bidual = _Bidual(_Geometry(F, F.reinhardt, config), config)
    return Pseudonorm(bidual, F.n, True, True, F.reinhardt, name=f"hull({F.name})")
