"""Holomorphic test maps between model domains, with analytic Jacobians."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import DomainSpec, ball, ball_automorphism, disc, ellipsoid, halfplane, polydisc, punctured_disc
from .field import kappa_at, pullback
from .hermitian import generalized_eigvals


@dataclass(frozen=True)
class HolomorphicMap:
    name: str
    source: DomainSpec
    target: DomainSpec
    f: object
    jacobian: object  # point -> (n_target, n_source) complex matrix
    points: tuple


def hermitian_kobayashi(spec: DomainSpec) -> bool:
    """True where the Kobayashi-Royden metric is itself Hermitian (balls, planar domains)."""
    return spec.kind == "ball" or spec.n == 1


def catalog():
    """Ten maps spanning slices, inclusions, projections and automorphisms."""
    u = np.array([1.0, 1.0j]) / math.sqrt(2.0)
    a, th = 0.4 - 0.3j, 0.7
    phi, dphi = ball_automorphism(np.array([0.3 + 0.1j, -0.2j]))
    col = lambda v: np.asarray(v, dtype=complex).reshape(-1, 1)  # noqa: E731
    return [
        HolomorphicMap("slice disc->B2", disc(), ball(2), lambda z: z[0] * u, lambda z: col(u),
                       ((0j,), (0.3 + 0.2j,), (-0.6,))),
        HolomorphicMap("curve disc->B2", disc(), ball(2), lambda z: np.array([z[0] / 2, z[0] ** 2 / 2]),
                       lambda z: col([0.5, z[0]]), ((0j,), (0.5j,), (-0.7 + 0.1j,))),
        HolomorphicMap("diagonal disc->D2", disc(), polydisc(2), lambda z: np.array([z[0], z[0]]),
                       lambda z: col([1.0, 1.0]), ((0j,), (0.4 - 0.4j,))),
        HolomorphicMap("moebius disc->disc", disc(), disc(),
                       lambda z: np.exp(1j * th) * (z - a) / (1 - np.conj(a) * z),
                       lambda z: np.array([[np.exp(1j * th) * (1 - abs(a) ** 2) / (1 - np.conj(a) * z[0]) ** 2]]),
                       ((0j,), (0.5,), (-0.3 + 0.6j,))),
        HolomorphicMap("projection B2->disc", ball(2), disc(), lambda z: z[:1], lambda z: np.array([[1.0, 0.0]]),
                       ((0j, 0j), (0.3, 0.4j), (-0.5 + 0.2j, 0.1))),
        HolomorphicMap("scaling D2->B2", polydisc(2), ball(2), lambda z: z / math.sqrt(2.0),
                       lambda z: np.eye(2) / math.sqrt(2.0), ((0j, 0j), (0.5, -0.3j))),
        HolomorphicMap("inclusion B2->D2", ball(2), polydisc(2), lambda z: z, lambda z: np.eye(2),
                       ((0j, 0j), (0.4, 0.4j), (0.6 + 0.2j, -0.1))),
        HolomorphicMap("inclusion E(2,1)->D2", ellipsoid(2, 1), polydisc(2), lambda z: z, lambda z: np.eye(2),
                       ((0j, 0j), (0j, 0.5), (0j, -0.3j))),
        HolomorphicMap("axis disc->E(2,1)", disc(), ellipsoid(2, 1), lambda z: np.array([0.0, z[0]]),
                       lambda z: col([0.0, 1.0]), ((0j,), (0.5,), (0.2 - 0.6j,))),
        HolomorphicMap("automorphism B2->B2", ball(2), ball(2), phi, dphi,
                       ((0j, 0j), (0.3 + 0.1j, -0.2j), (-0.4, 0.5j))),
    ]


def covering_map():
    """exp: left half-plane -> punctured disc."""
    return HolomorphicMap("exp halfplane->punctured disc", halfplane(), punctured_disc(),
                          lambda w: np.exp(w), lambda w: np.array([[np.exp(w[0])]]), ())


@dataclass(frozen=True)
class PullbackCheck:
    map_name: str
    point: tuple
    ratio: float  # largest eigenvalue of f*kappa_N relative to kappa_M
    bound: float
    sharp_bound: float | None

    @property
    def passed(self) -> bool:
        ok = self.ratio <= self.bound * 1.01
        if self.sharp_bound is not None:
            ok = ok and self.ratio <= self.sharp_bound * 1.01
        return ok


def distance_decreasing_check(fmap: HolomorphicMap, point, rule=None) -> PullbackCheck:
    """Compare pullback(J, kappa_N(f(p))) with kappa_M(p); bound n^(n+1) m^(m+1), n = dim N, m = dim M."""
    z = np.asarray(point, dtype=complex)
    kM = kappa_at(fmap.source, z, rule).kappa
    kN = kappa_at(fmap.target, fmap.f(z), rule).kappa
    pb = pullback(fmap.jacobian(z), kN)
    ratio = float(generalized_eigvals(pb, kM).max())
    n, m = fmap.target.n, fmap.source.n
    sharp = float(n ** (n + 1)) if hermitian_kobayashi(fmap.source) else None
    return PullbackCheck(fmap.name, tuple(point), ratio, float(n ** (n + 1) * m ** (m + 1)), sharp)
