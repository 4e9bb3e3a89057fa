"""Real and complex Binet-Legendre transforms of pseudonorms.

Dual Gram of a pseudonorm F on C^n (unit ball Omega = {F < 1}):

    gram_dual[j, k] = (n + 1) / |Omega| * int_Omega eta_j conj(eta_k) d eta

Both integrals reduce to the unit sphere along rays:

    int_Omega eta eta^* = 1/(2n+2) int_S w w^* F(w)^-(2n+2) d sigma,
    |Omega|             = 1/(2n)   int_S F(w)^-2n d sigma.

The primal form is ``conj(inv(gram_dual))`` so that a Hermitian gauge
``sqrt(h)`` is sent back to ``h`` under the ``v @ G @ conj(w)`` convention.

Integration is preceded by whitening: a pilot estimate ``M0`` of the dual Gram
gives ``A = M0^(1/2)``, the body ``A^-1 Omega`` is nearly round, and the
result is mapped back with ``M = A M' A^*``.  This is exact algebra (the
Jacobian cancels in the normalized moment) and removes the F^-(2n+2) dynamic
range that otherwise dominates the quadrature error for anisotropic gauges.
Pilot passes repeat (up to ``MAX_WHITEN``) until the pilot moment of the
whitened body is within ``ROUND_ENOUGH`` of the identity in condition number.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .finsler import Pseudonorm
from .hermitian import HermitianForm, block_diag, evaluate, sqrtm_psd, symmetrize
from .quadrature import QuadratureError, QuadratureRule, default_rule

MAX_CONDITION = 1e12
MAX_WHITEN = 16
ROUND_ENOUGH = 1.5

# test hook: names of deliberately broken stages (used by the verify command)
FAULTS: set = set()


class TransformError(ArithmeticError):
    def __init__(self, message, stage="bl-transform", condition=None):
        super().__init__(message)
        self.stage = stage
        self.condition = condition


@dataclass(frozen=True, eq=False)
class MomentMatrix:
    """Dual Gram of a gauge, with the ball volume and a relative error estimate."""

    gram_dual: HermitianForm
    volume: float
    error_estimate: float

    @property
    def condition(self) -> float:
        lam = self.gram_dual.eigvalsh()
        return float(lam.max() / lam.min())

    def to_json(self):
        return {
            "gram_dual": self.gram_dual.to_json(),
            "volume": self.volume,
            "condition": self.condition,
            "error_estimate": self.error_estimate,
        }


def _moments(values, nodes, weights, n):
    """Normalized moment matrix and volume from gauge values on sphere nodes."""
    if not np.all(np.isfinite(values)) or np.any(values <= 0):
        raise QuadratureError("gauge vanishes or is not finite on the sphere; the ball is unbounded")
    wv = weights * values ** (-(2 * n + 2))
    S = np.einsum("i,ij,ik->jk", wv, nodes, nodes.conj()) / (2 * n + 2)
    vol = np.sum(weights * values ** (-2 * n)) / (2 * n)
    return (n + 1) * S / vol, vol


def _pilot_seed(rule, k):
    return int(np.random.SeedSequence([rule.seed, 101, k]).generate_state(1)[0])


def _whitener(M, reinhardt):
    if reinhardt:
        return np.diag(np.sqrt(np.diag(M).real)).astype(complex)
    return sqrtm_psd(M)


def _round(M):
    lam = np.linalg.eigvalsh(M)
    return lam.min() > 0 and lam.max() / lam.min() < ROUND_ENOUGH


def _estimate(F, A, rule):
    """Moments of F∘A on ``rule``; returns (M, volume, error)."""
    n = F.n
    if rule.deterministic:
        out = []
        for r in (rule, rule.coarse()):
            nodes, weights = r.nodes()
            out.append(_moments(F(nodes @ A.T), nodes, weights, n))
        (M, vol), (Mc, _) = out
        err = np.linalg.norm(M - Mc) / np.linalg.norm(M)
        return M, vol, float(err)
    parts = []
    for nodes, weights in rule.substreams():
        vals = F(nodes @ A.T)
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise QuadratureError("gauge vanishes or is not finite on the sphere; the ball is unbounded")
        wv = weights * vals ** (-(2 * n + 2))
        parts.append(
            (np.einsum("i,ij,ik->jk", wv, nodes, nodes.conj()) / (2 * n + 2), np.sum(weights * vals ** (-2 * n)) / (2 * n))
        )
    B = len(parts)
    S = sum(p[0] for p in parts)
    vol = sum(p[1] for p in parts)
    M = (n + 1) * S / vol
    per_batch = np.array([(n + 1) * p[0] / p[1] for p in parts])
    err = np.sqrt(np.sum(np.abs(per_batch - M) ** 2) / (B * (B - 1))) / np.linalg.norm(M)
    return M, vol, float(err)


def complex_bl_dual(F: Pseudonorm, rule: QuadratureRule | None = None, whiten: int = 2) -> MomentMatrix:
    """Dual complex Binet-Legendre Gram of ``F`` (see module docstring)."""
    if not F.positive_definite:
        raise TransformError("the transform needs a positive definite gauge", stage="complex_bl_dual")
    n = F.n
    rule = default_rule(n) if rule is None else rule
    if rule.real or rule.n != n:
        raise ValueError(f"rule is for S^{rule.real_dim - 1}, gauge lives on C^{n}")
    if rule.deterministic:
        rule = replace(rule, reduced=True)
    A = np.eye(n, dtype=complex)
    for k in range(MAX_WHITEN):
        pilot = rule.coarse() if rule.deterministic else replace(rule, samples=max(rule.samples // 8, 4000), seed=_pilot_seed(rule, k))
        M0, _, _ = _estimate(F, A, pilot)
        if k >= whiten and _round(M0):
            break
        A = A @ _whitener(M0, F.reinhardt)
    Mw, volw, err = _estimate(F, A, rule)
    M = symmetrize(A @ Mw @ A.conj().T)
    vol = float(volw * abs(np.linalg.det(A)) ** 2)
    return MomentMatrix(HermitianForm(M), vol, err)


def dualize(moment: MomentMatrix) -> HermitianForm:
    """Primal Gram ``conj(inv(gram_dual))``."""
    G = moment.gram_dual.gram
    lam = np.linalg.eigvalsh(G)
    cond = lam.max() / lam.min() if lam.min() > 0 else np.inf
    if not cond < MAX_CONDITION:
        raise TransformError(f"dual Gram is near singular (condition {cond:.3g})", stage="dualize", condition=cond)
    if "dualization" in FAULTS:
        return HermitianForm(G)
    return HermitianForm(np.linalg.inv(G).conj())


def complex_bl(F: Pseudonorm, rule: QuadratureRule | None = None, whiten: int = 2) -> HermitianForm:
    """Complex Binet-Legendre form of ``F``."""
    return dualize(complex_bl_dual(F, rule, whiten))


def product_bl(factors, rules=None) -> HermitianForm:
    """Transform of ``max_j F_j(pi_j v)`` assembled blockwise.

    ``factors`` is a list of pseudonorms (or ``(pseudonorm, dim)`` pairs);
    block j is ``(n_j + 1) / (n + 1)`` times the transform of F_j.
    """
    factors = [f[0] if isinstance(f, tuple) else f for f in factors]
    n = sum(F.n for F in factors)
    rules = rules or [None] * len(factors)
    blocks = [complex_bl(F, r).scaled((F.n + 1) / (n + 1)) for F, r in zip(factors, rules)]
    return block_diag(*blocks)


# ---------------------------------------------------------------------------
# real version


def realify(F: Pseudonorm):
    """View a gauge on C^n as a function on R^2n with coordinates (Re v, Im v)."""
    n = F.n
    return lambda x: F(x[..., :n] + 1j * x[..., n:])


def default_real_rule(d: int, seed: int = 0) -> QuadratureRule:
    if d <= 2:
        return QuadratureRule("sphere-product", d, radial=2, phase=512, real=True)
    if d <= 4:
        return QuadratureRule("sphere-product", d, radial=64, phase=128, real=True)
    return QuadratureRule("monte-carlo", d, samples=200_000, seed=seed, real=True)


def _real_estimate(f, A, rule, d):
    def moments(nodes, weights):
        vals = f(nodes @ A.T)
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise QuadratureError("gauge vanishes or is not finite on the sphere; the ball is unbounded")
        wv = weights * vals ** (-(d + 2))
        return np.einsum("i,ij,ik->jk", wv, nodes, nodes) / (d + 2), np.sum(weights * vals ** (-d)) / d

    if rule.deterministic:
        (S, vol), (Sc, volc) = moments(*rule.nodes()), moments(*rule.coarse().nodes())
        M, Mc = (d + 2) * S / vol, (d + 2) * Sc / volc
        return M, vol, float(np.linalg.norm(M - Mc) / np.linalg.norm(M))
    parts = [moments(nodes, weights) for nodes, weights in rule.substreams()]
    S, vol = sum(p[0] for p in parts), sum(p[1] for p in parts)
    M = (d + 2) * S / vol
    per_batch = np.array([(d + 2) * p[0] / p[1] for p in parts])
    B = len(parts)
    return M, vol, float(np.sqrt(np.sum((per_batch - M) ** 2) / (B * (B - 1))) / np.linalg.norm(M))


def real_bl(f, d: int, rule: QuadratureRule | None = None, whiten: int = 2) -> np.ndarray:
    """Real Binet-Legendre Gram (d x d symmetric) of an even gauge ``f`` on R^d.

    The dual Gram is ``(d + 2) / |Omega| * int_Omega x x^T dx``; the result is its inverse.
    """
    rule = default_real_rule(d) if rule is None else rule
    if not rule.real or rule.n != d:
        raise ValueError("real_bl needs a real sphere rule of matching dimension")
    A = np.eye(d)
    for k in range(MAX_WHITEN):
        pilot = rule.coarse() if rule.deterministic else replace(rule, samples=max(rule.samples // 8, 4000), seed=_pilot_seed(rule, k))
        M0, _, _ = _real_estimate(f, A, pilot, d)
        if k >= whiten and _round(M0):
            break
        A = A @ sqrtm_psd(M0).real
    Mw, _, _ = _real_estimate(f, A, rule, d)
    M = A @ Mw @ A.T
    M = 0.5 * (M + M.T)
    return np.linalg.inv(M)


def real_complex_consistency(F: Pseudonorm, rule=None, real_rule=None, pairs: int = 200, seed: int = 0) -> float:
    """Max of |g_C(v, w) - (g_R(v, w) - i g_R(iv, w))| / sqrt(g_C(v,v) g_C(w,w)) on random pairs."""
    n = F.n
    gc = complex_bl(F, rule)
    gr = real_bl(realify(F), 2 * n, real_rule)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((pairs, n)) + 1j * rng.standard_normal((pairs, n))
    w = rng.standard_normal((pairs, n)) + 1j * rng.standard_normal((pairs, n))

    def real_form(a, b):
        ra = np.concatenate([a.real, a.imag], axis=-1)
        rb = np.concatenate([b.real, b.imag], axis=-1)
        return np.einsum("...i,ij,...j->...", ra, gr, rb)

    lhs = evaluate(gc, v, w)
    rhs = real_form(v, w) - 1j * real_form(1j * v, w)
    scale = np.sqrt(gc.quadratic(v) * gc.quadratic(w))
    return float(np.max(np.abs(lhs - rhs) / scale))
