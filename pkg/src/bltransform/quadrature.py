"""Quadrature on unit spheres.

Complex spheres S^{2n-1} in C^n use nested Hopf coordinates
``w = (sqrt(1-t) w', sqrt(t) e^{i phi})`` with Gauss-Jacobi nodes in ``t`` and the
trapezoidal rule in each phase.  Real spheres S^{d-1} use the analogous
Gegenbauer recursion.  Surface measure is the one induced by Lebesgue measure,
so ``integrate(1) = 2 pi^n / (n-1)!`` on S^{2n-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.special import gamma, roots_gegenbauer, roots_jacobi

SPHERE_PRODUCT = "sphere-product"
MONTE_CARLO = "monte-carlo"
KIND_ALIASES = {"mc": MONTE_CARLO, "monte-carlo": MONTE_CARLO, "sphere-product": SPHERE_PRODUCT, "product": SPHERE_PRODUCT}


class QuadratureError(ArithmeticError):
    pass


def sphere_measure(d: int) -> float:
    """Surface measure of S^{d-1} in R^d."""
    return 2.0 * math.pi ** (d / 2) / gamma(d / 2)


@dataclass(frozen=True)
class QuadratureRule:
    """Sphere quadrature configuration.

    ``n`` is the complex dimension (sphere S^{2n-1}) unless ``real`` is set, in
    which case it is the real dimension d (sphere S^{d-1}).  ``reduced`` drops
    the overall phase (one node at phase 0, weight 2 pi); it is only valid for
    integrands invariant under ``w -> e^{i s} w``.
    """

    kind: str
    n: int
    radial: int = 160
    phase: int = 64
    samples: int = 200_000
    seed: int = 0
    batches: int = 8
    reduced: bool = False
    real: bool = False

    def __post_init__(self):
        kind = KIND_ALIASES.get(self.kind)
        if kind is None:
            raise ValueError(f"unknown quadrature kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.n < 1:
            raise ValueError("sphere dimension must be positive")
        if self.reduced and self.real:
            raise ValueError("phase reduction needs a complex sphere")

    @property
    def deterministic(self) -> bool:
        return self.kind == SPHERE_PRODUCT

    @property
    def real_dim(self) -> int:
        return self.n if self.real else 2 * self.n

    @property
    def measure(self) -> float:
        return sphere_measure(self.real_dim)

    def coarse(self) -> "QuadratureRule":
        """Half-resolution companion used for refinement error estimates."""
        return replace(self, radial=max(self.radial // 2, 2), phase=max(self.phase // 2, 2))

    def nodes(self):
        """All nodes and weights; for Monte Carlo the concatenated substreams."""
        if self.deterministic:
            if self.real:
                return _real_product_nodes(self.n, self.radial, self.phase)
            return _complex_product_nodes(self.n, self.radial, self.phase, self.reduced)
        parts = list(self.substreams())
        return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])

    def substreams(self):
        """Independent Monte Carlo batches, each seeded from the root seed."""
        if self.deterministic:
            raise ValueError("substreams only exist for Monte Carlo rules")
        counts = np.full(self.batches, self.samples // self.batches)
        counts[: self.samples % self.batches] += 1
        total = counts.sum()
        for child, m in zip(np.random.SeedSequence(self.seed).spawn(self.batches), counts):
            rng = np.random.default_rng(child)
            x = rng.standard_normal((m, self.real_dim))
            x /= np.linalg.norm(x, axis=1, keepdims=True)
            if not self.real:
                x = x[:, : self.n] + 1j * x[:, self.n :]
            yield x, np.full(m, self.measure / total)

    def node_count(self) -> int:
        return len(self.nodes()[1]) if self.deterministic else self.samples

    def to_json(self):
        d = {"kind": self.kind, "n": self.n, "real": self.real}
        if self.deterministic:
            d.update(radial=self.radial, phase=self.phase, reduced=self.reduced)
        else:
            d.update(samples=self.samples, seed=self.seed, batches=self.batches)
        return d


def default_rule(n: int, seed: int = 0, samples: int = 200_000) -> QuadratureRule:
    """Deterministic product rule for n <= 2, seeded Monte Carlo above."""
    if n == 1:
        return QuadratureRule(SPHERE_PRODUCT, 1, radial=2, phase=64)
    if n == 2:
        return QuadratureRule(SPHERE_PRODUCT, 2, radial=160, phase=64)
    return QuadratureRule(MONTE_CARLO, n, samples=samples, seed=seed)


def _jacobi01(m: int, alpha: int):
    """Gauss-Jacobi on [0, 1] with weight (1 - t)^alpha."""
    x, w = roots_jacobi(m, alpha, 0.0)
    return (1.0 + x) / 2.0, w / 2.0 ** (alpha + 1)


@lru_cache(maxsize=32)
def _complex_product_nodes(n: int, radial: int, phase: int, reduced: bool):
    if reduced:
        nodes, weights = np.ones((1, 1), dtype=complex), np.array([2.0 * math.pi])
    else:
        phi = 2.0 * math.pi * np.arange(phase) / phase
        nodes, weights = np.exp(1j * phi)[:, None], np.full(phase, 2.0 * math.pi / phase)
    phi = 2.0 * math.pi * np.arange(phase) / phase
    for k in range(2, n + 1):
        t, wt = _jacobi01(radial, k - 2)
        wt = 0.5 * wt
        a = np.sqrt(1.0 - t)[:, None, None, None] * nodes[None, :, None, :]
        b = (np.sqrt(t)[:, None, None] * np.exp(1j * phi)[None, None, :])
        b = np.broadcast_to(b, (radial, len(weights), phase))[..., None]
        nodes = np.concatenate([np.broadcast_to(a, (radial, len(weights), phase, k - 1)), b], axis=-1)
        nodes = nodes.reshape(-1, k)
        weights = np.broadcast_to(
            wt[:, None, None] * weights[None, :, None] * (2.0 * math.pi / phase), (radial, len(weights), phase)
        ).reshape(-1)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=32)
def _real_product_nodes(d: int, radial: int, phase: int):
    if d == 1:
        nodes, weights = np.array([[1.0], [-1.0]]), np.ones(2)
    else:
        phi = 2.0 * math.pi * np.arange(phase) / phase
        nodes = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        weights = np.full(phase, 2.0 * math.pi / phase)
        for k in range(3, d + 1):
            t, wt = roots_gegenbauer(radial, (k - 2) / 2.0)
            c = np.sqrt(1.0 - t * t)
            a = c[:, None, None] * nodes[None, :, :]
            b = np.broadcast_to(t[:, None, None], (radial, len(weights), 1))
            nodes = np.concatenate([a, b], axis=-1).reshape(-1, k)
            weights = (wt[:, None] * weights[None, :]).reshape(-1)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _weighted_sum(f, nodes, weights):
    vals = np.asarray(f(nodes))
    if not np.all(np.isfinite(vals)):
        raise QuadratureError("integrand is not finite at some quadrature nodes")
    return np.tensordot(weights, vals, axes=(0, 0))


def sphere_integrate(f, rule: QuadratureRule):
    """Integrate ``f`` over the unit sphere.

    ``f`` maps an (N, n) array of nodes to an array whose first axis has
    length N.  Returns ``(value, error_estimate)``: the refinement delta
    against ``rule.coarse()`` for product rules, the standard error for
    Monte Carlo.
    """
    if rule.deterministic:
        value = _weighted_sum(f, *rule.nodes())
        coarse = _weighted_sum(f, *rule.coarse().nodes())
        return value, float(np.max(np.abs(value - coarse)))
    total, sq, count = 0.0, 0.0, 0
    for nodes, weights in rule.substreams():
        vals = np.asarray(f(nodes))
        if not np.all(np.isfinite(vals)):
            raise QuadratureError("integrand is not finite at some sample points")
        total = total + vals.sum(axis=0)
        sq = sq + (np.abs(vals) ** 2).sum(axis=0)
        count += len(weights)
    mean = total / count
    var = np.maximum(sq / count - np.abs(mean) ** 2, 0.0)
    err = rule.measure * np.sqrt(var / count)
    return rule.measure * mean, float(np.max(err))
