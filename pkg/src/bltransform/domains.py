"""Kobayashi-Royden and Kobayashi-Busemann metrics of model domains.

Supported (domain, point) pairs are exactly those where the metric is known
in closed form or through an automorphism:

* ball: every point, by pulling back the origin's Euclidean indicatrix along
  the automorphism exchanging z and 0;
* polydisc, and products of supported factors: every point (max formula);
* E(p) = {sum |z_j|^(2 p_j) < 1}: the origin, where the indicatrix is the
  domain itself, and points on a coordinate axis k with p_k = 1, reached by the
  automorphism ``z_k -> (z_k - a)/(1 - conj(a) z_k)``,
  ``z_j -> z_j (sqrt(1 - |a|^2) / (1 - conj(a) z_k))^(1/p_j)``;
* punctured disc and left half-plane (dimension one, closed forms).

Anything else raises :class:`UnsupportedError`; nothing is extrapolated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .finsler import (
    DualConfig,
    Pseudonorm,
    busemann_convexify,
    ellipsoid_gauge,
    euclidean,
    max_combination,
    max_norm,
)

KINDS = ("ball", "disc", "polydisc", "ellipsoid", "product", "punctured-disc", "halfplane")


class UnsupportedError(ValueError):
    pass


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class DomainSpec:
    kind: str
    n: int = 1
    p: tuple = ()
    factors: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown domain kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "disc":
            object.__setattr__(self, "kind", "ball")
            object.__setattr__(self, "n", 1)
        if self.kind == "ellipsoid":
            p = tuple(float(x) for x in self.p)
            if not p or any(x <= 0 for x in p):
                raise DomainError("ellipsoid exponents must be positive")
            object.__setattr__(self, "p", p)
            object.__setattr__(self, "n", len(p))
        elif self.kind == "product":
            if not self.factors:
                raise DomainError("a product needs at least one factor")
            object.__setattr__(self, "n", sum(f.n for f in self.factors))
        elif self.kind in ("punctured-disc", "halfplane"):
            object.__setattr__(self, "n", 1)
        if self.n < 1:
            raise DomainError("dimension must be positive")

    @property
    def convex_indicatrix(self) -> bool:
        if self.kind == "ellipsoid":
            return all(x >= 0.5 for x in self.p)
        if self.kind == "product":
            return all(f.convex_indicatrix for f in self.factors)
        return True

    def contains(self, z) -> bool:
        z = np.asarray(z, dtype=complex)
        if z.shape != (self.n,):
            return False
        if self.kind == "ball":
            return bool(np.vdot(z, z).real < 1.0)
        if self.kind == "polydisc":
            return bool(np.all(np.abs(z) < 1.0))
        if self.kind == "ellipsoid":
            return bool(np.sum(np.abs(z) ** (2 * np.array(self.p))) < 1.0)
        if self.kind == "punctured-disc":
            return bool(0.0 < abs(z[0]) < 1.0)
        if self.kind == "halfplane":
            return bool(z[0].real < 0.0)
        return all(f.contains(part) for f, part in zip(self.factors, self.split(z)))

    def split(self, z):
        z = np.asarray(z)
        cuts = np.cumsum([0] + [f.n for f in self.factors])
        return [z[..., a:b] for a, b in zip(cuts[:-1], cuts[1:])]

    def to_json(self):
        d = {"kind": self.kind, "n": self.n}
        if self.kind == "ellipsoid":
            d["p"] = list(self.p)
        if self.kind == "product":
            d["factors"] = [f.to_json() for f in self.factors]
        return d

    @classmethod
    def from_json(cls, d) -> "DomainSpec":
        if not isinstance(d, dict) or "kind" not in d:
            raise DomainError(f"domain spec must be an object with a 'kind', got {d!r}")
        factors = tuple(cls.from_json(f) for f in d.get("factors", ()))
        return cls(d["kind"], int(d.get("n", 1)), tuple(d.get("p", ())), factors)

    def __str__(self):
        if self.kind == "ellipsoid":
            return "E(" + ",".join(f"{x:g}" for x in self.p) + ")"
        if self.kind == "product":
            return " x ".join(str(f) for f in self.factors)
        if self.kind in ("punctured-disc", "halfplane"):
            return self.kind
        return f"{self.kind}({self.n})"


def ball(n=2):
    return DomainSpec("ball", n)


def disc():
    return DomainSpec("ball", 1)


def polydisc(n=2):
    return DomainSpec("polydisc", n)


def ellipsoid(*p):
    return DomainSpec("ellipsoid", p=tuple(p))


def product(*factors):
    return DomainSpec("product", factors=tuple(factors))


def punctured_disc():
    return DomainSpec("punctured-disc")


def halfplane():
    return DomainSpec("halfplane")


@dataclass(frozen=True)
class TangentSample:
    point: np.ndarray
    vector: np.ndarray


# ---------------------------------------------------------------------------
# automorphisms


def ball_automorphism(a):
    """The involution of the unit ball exchanging ``a`` and 0, with its Jacobian.

    Returns ``(phi, jacobian)``; both act on points of shape (n,).
    """
    a = np.asarray(a, dtype=complex)
    n = a.size
    s = float(np.vdot(a, a).real)
    if s >= 1.0:
        raise DomainError("automorphism center must lie in the open ball")
    P = np.outer(a, a.conj()) / s if s > 0 else np.zeros((n, n), dtype=complex)
    L = P + np.sqrt(1.0 - s) * (np.eye(n) - P)

    def phi(z):
        z = np.asarray(z, dtype=complex)
        return (a - L @ z) / (1.0 - np.vdot(a, z))

    def jacobian(z):
        z = np.asarray(z, dtype=complex)
        D = 1.0 - np.vdot(a, z)
        N = a - L @ z
        return (-L * D + np.outer(N, a.conj())) / D**2

    return phi, jacobian


def _ball_pullback_matrix(z):
    z = np.asarray(z, dtype=complex)
    return ball_automorphism(z)[1](z)


def _thullen_axis(p, z):
    """Axis k and the diagonal Jacobian at z of the automorphism sending z to 0, for E(p)."""
    nz = np.flatnonzero(np.abs(z) > 0)
    if nz.size == 0:
        return None, np.ones(len(p))
    if nz.size > 1 or p[nz[0]] != 1.0:
        raise UnsupportedError(
            f"E{p} metrics are available at the origin and on axes with exponent 1; got point {z}"
        )
    k = nz[0]
    s = abs(z[k]) ** 2
    scales = (1.0 - s) ** (-1.0 / (2.0 * np.asarray(p)))
    scales[k] = 1.0 / (1.0 - s)
    return k, scales


# ---------------------------------------------------------------------------
# metrics


def _check_point(spec: DomainSpec, z):
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.size != spec.n:
        raise DomainError(f"{spec} lives in C^{spec.n}, got point of length {z.size}")
    if not spec.contains(z):
        raise DomainError(f"point {z} is not inside {spec}")
    return z


def indicatrix(spec: DomainSpec, point) -> Pseudonorm:
    """The Kobayashi-Royden metric at ``point`` as a pseudonorm on the tangent space."""
    z = _check_point(spec, point)
    if spec.kind == "ball":
        if not np.any(z):
            return euclidean(spec.n)
        D = _ball_pullback_matrix(z)
        F = euclidean(spec.n).compose(D, name=f"k_ball({spec.n})")
        return F
    if spec.kind == "polydisc":
        return max_norm(spec.n, 1.0 / (1.0 - np.abs(z) ** 2))
    if spec.kind == "ellipsoid":
        _, scales = _thullen_axis(spec.p, z)
        return ellipsoid_gauge(spec.p, scales)
    if spec.kind == "punctured-disc":
        r = abs(z[0])
        c = 1.0 / (2.0 * r * np.log(1.0 / r))
        return euclidean(1).scaled(c)
    if spec.kind == "halfplane":
        return euclidean(1).scaled(1.0 / (2.0 * abs(z[0].real)))
    return max_combination([indicatrix(f, part) for f, part in zip(spec.factors, spec.split(z))])


def kobayashi_royden(spec: DomainSpec, sample: TangentSample) -> float:
    F = indicatrix(spec, sample.point)
    return float(F(np.asarray(sample.vector, dtype=complex)))


def kobayashi_busemann(spec: DomainSpec, point, config: DualConfig = DualConfig()) -> Pseudonorm:
    """Convexified indicatrix.  Products convexify factorwise (hull of a product is the product of hulls)."""
    if spec.kind == "product":
        z = _check_point(spec, point)
        return max_combination([kobayashi_busemann(f, part, config) for f, part in zip(spec.factors, spec.split(z))])
    return busemann_convexify(indicatrix(spec, point), config)


def kobayashi_distance_ball(z, w) -> float:
    """Kobayashi distance on the unit ball: artanh |phi_z(w)|."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    sz, sw = np.vdot(z, z).real, np.vdot(w, w).real
    if sz >= 1.0 or sw >= 1.0:
        raise DomainError("points must lie in the open ball")
    # |phi_z(w)| directly: the 1 - (1-|z|^2)(1-|w|^2)/|1-<w,z>|^2 form cancels badly near the diagonal
    rho = float(np.linalg.norm(ball_automorphism(z)[0](w))) if sz > 0 else float(np.sqrt(sw))
    return float(np.arctanh(min(rho, 1.0)))
