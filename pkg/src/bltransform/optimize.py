"""Batched derivative-free maximization on unit spheres.

Gauges of polydiscs and products have kinks exactly where the suprema we need
are attained, so gradient steps stall there.  A pattern search polling a
freshly rotated coordinate frame each iteration handles both smooth and
max-type objectives and vectorizes over many independent problems.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


class ConvergenceWarning(UserWarning):
    """Some searches hit the iteration cap; the best values found are used."""


@dataclass(frozen=True)
class SearchConfig:
    starts: int = 8
    step: float = 0.05
    tol: float = 1e-10
    max_iter: int = 1000
    patience: int = 3
    seed: int = 12345


def _random_frame(rng, d):
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    return Q * np.sign(np.diag(R))


def maximize_on_sphere(objective, x0, config: SearchConfig = SearchConfig(), step=None):
    """Maximize independent problems ``objective(x, rows)`` over unit spheres.

    ``x0`` is an (M, d) real array of starting points, one row per problem.
    ``objective(x, rows)`` receives candidates of shape (len(rows), P, d) for
    the problems indexed by ``rows`` and returns values of shape (len(rows), P).
    Returns ``(x, value, converged)``.
    """
    x = np.array(x0, dtype=float)
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    M, d = x.shape
    rng = np.random.default_rng(config.seed)
    val = objective(x[:, None, :], np.arange(M))[:, 0]
    s = np.full(M, config.step if step is None else step, dtype=float)
    active = np.ones(M, dtype=bool)
    fails = np.zeros(M, dtype=int)
    anchor = x.copy()
    for _ in range(config.max_iter):
        rows = np.flatnonzero(active)
        if rows.size == 0:
            break
        Q = _random_frame(rng, d)
        # drift since the last shrink approximates the direction of a ridge
        drift = x[rows] - anchor[rows]
        dn = np.linalg.norm(drift, axis=1, keepdims=True)
        drift = np.where(dn > 0, drift / np.where(dn > 0, dn, 1.0), Q[0])
        dirs = np.concatenate([np.broadcast_to(np.concatenate([Q, -Q]), (rows.size, 2 * d, d)),
                               drift[:, None, :], 0.5 * drift[:, None, :]], axis=1)
        cand = x[rows, None, :] + s[rows, None, None] * dirs
        cand /= np.linalg.norm(cand, axis=2, keepdims=True)
        cv = objective(cand, rows)
        best = np.argmax(cv, axis=1)
        bv = cv[np.arange(rows.size), best]
        up = bv > val[rows]
        moved = rows[up]
        x[moved] = cand[up, best[up]]
        val[moved] = bv[up]
        fails[moved] = 0
        s[moved] *= 1.5
        stay = rows[~up]
        fails[stay] += 1
        shrink = stay[fails[stay] >= config.patience]
        s[shrink] *= 0.25
        fails[shrink] = 0
        anchor[shrink] = x[shrink]
        active[shrink] = s[shrink] >= config.tol
    converged = ~active
    if not converged.all():
        warnings.warn(
            f"{(~converged).sum()} of {M} sphere searches hit the iteration cap",
            ConvergenceWarning,
            stacklevel=2,
        )
    return x, val, converged


def complex_to_real(z):
    z = np.asarray(z)
    return np.concatenate([z.real, z.imag], axis=-1)


def real_to_complex(x):
    x = np.asarray(x)
    n = x.shape[-1] // 2
    return x[..., :n] + 1j * x[..., n:]


def top_k(values, k):
    """Indices of the k largest entries along the last axis, best first."""
    k = min(k, values.shape[-1])
    idx = np.argpartition(-values, k - 1, axis=-1)[..., :k]
    order = np.argsort(-np.take_along_axis(values, idx, axis=-1), axis=-1, kind="stable")
    return np.take_along_axis(idx, order, axis=-1)


def golden_max(f, lo, hi, tol=1e-13, max_iter=200):
    """Vectorized golden-section maximization of unimodal ``f`` on [lo, hi]."""
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    g = (np.sqrt(5.0) - 1.0) / 2.0
    for _ in range(max_iter):
        if np.all(hi - lo < tol):
            break
        a = hi - g * (hi - lo)
        b = lo + g * (hi - lo)
        left = f(a) >= f(b)
        hi = np.where(left, b, hi)
        lo = np.where(left, lo, a)
    xm = 0.5 * (lo + hi)
    return xm, f(xm)
