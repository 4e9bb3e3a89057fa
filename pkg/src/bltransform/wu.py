"""Wu metric: the minimum-volume circled ellipsoid containing a balanced body.

For a balanced body Omega = {F < 1} in C^n the John (Loewner) ellipsoid is
centered at 0 and invariant under the circle action, so it is a complex
ellipsoid {y^* E y <= 1}.  On a finite witness set of boundary points this is
log det maximization under linear constraints in the real coordinates of E,
solved by a barrier method.  It alternates with searches over the whole
sphere for the boundary point most outside the current ellipsoid; witnesses
found by the search join the set and the problem is re-solved.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .finsler import Pseudonorm, _complex_atoms
from .hermitian import HermitianForm, generalized_eigvals, symmetrize
from .optimize import ConvergenceWarning, SearchConfig, complex_to_real, maximize_on_sphere, real_to_complex, top_k


@dataclass(frozen=True)
class WuConfig:
    tol: float = 1e-7
    random_witnesses: int = 64
    seed: int = 2024
    max_rounds: int = 60
    atoms: int = 40
    search: SearchConfig = SearchConfig(starts=8, step=0.02, tol=1e-11)


@dataclass(frozen=True, eq=False)
class EllipsoidForm:
    """Circled ellipsoid {y : form(y, y) <= 1}; ``form`` is the Wu form."""

    form: HermitianForm
    log_volume: float
    gap: float
    iterations: int
    witnesses: int

    def to_json(self):
        return {
            "form": self.form.to_json(),
            "log_volume": self.log_volume,
            "gap": self.gap,
            "iterations": self.iterations,
            "witnesses": self.witnesses,
        }


def _hermitian_basis(n):
    """Real basis of n x n Hermitian matrices."""
    out = []
    for j in range(n):
        for k in range(j, n):
            B = np.zeros((n, n), dtype=complex)
            if j == k:
                B[j, j] = 1.0
                out.append(B)
                continue
            B[j, k] = B[k, j] = 1.0
            out.append(B)
            C = np.zeros((n, n), dtype=complex)
            C[j, k], C[k, j] = 1j, -1j
            out.append(C)
    return np.array(out)


def _john(x, gap_tol):
    """Maximize log det E subject to x_i^* E x_i <= 1 by a barrier method.

    The constraints are linear in the real coordinates of E, so this is a
    small self-concordant problem; Newton's method on the central path
    reaches double precision in a few dozen steps.  Returns (E, newton_steps).
    """
    n = x.shape[1]
    basis = _hermitian_basis(n)
    A = np.einsum("ij,kjl,il->ik", x.conj(), basis, x).real
    coords = lambda E: np.array([np.real(np.trace(B.conj().T @ E)) / np.real(np.trace(B.conj().T @ B)) for B in basis])
    theta = coords(np.eye(n) * 0.5 / np.max(np.sum(np.abs(x) ** 2, axis=1)))
    N = len(x)
    t, steps = 1.0, 0

    def value(th):
        E = np.einsum("k,kab->ab", th, basis)
        slack = 1.0 - A @ th
        if np.any(slack <= 0):
            return np.inf
        try:
            L = np.linalg.cholesky(E)
        except np.linalg.LinAlgError:
            return np.inf
        return -2.0 * t * np.sum(np.log(np.diag(L).real)) - np.sum(np.log(slack))

    while True:
        for _ in range(200):
            E = np.einsum("k,kab->ab", theta, basis)
            Ei = np.linalg.inv(E)
            C = np.einsum("ab,kbc->kac", Ei, basis)
            slack = 1.0 - A @ theta
            grad = -t * np.einsum("kaa->k", C).real + A.T @ (1.0 / slack)
            hess = t * np.einsum("kab,lba->kl", C, C).real + (A / slack[:, None] ** 2).T @ A
            d = -np.linalg.solve(hess, grad)
            dec = -grad @ d
            if dec < 1e-20:
                break
            f0, s = value(theta), 1.0
            while value(theta + s * d) > f0 - 0.25 * s * dec and s > 1e-12:
                s *= 0.5
            theta = theta + s * d
            steps += 1
            if dec < 1e-14 * max(t, 1.0):
                break
        if N / t < gap_tol:
            return symmetrize(np.einsum("k,kab->ab", theta, basis)), steps
        t *= 20.0


def _boundary(F, w):
    return w / F(w)[..., None]


def mvee_balanced(F: Pseudonorm, config: WuConfig = WuConfig()) -> EllipsoidForm:
    """Minimum-volume circled ellipsoid containing the balanced body {F < 1}.

    The returned ellipsoid always contains every boundary point found by the
    final search (it is scaled by the worst one), and ``gap`` is the relative
    excess ``max_q / n - 1`` of that worst point over the optimality level.
    """
    n = F.n
    rng = np.random.default_rng(config.seed)
    axes = np.concatenate([np.eye(n), 1j * np.eye(n)]).astype(complex)
    rand = rng.standard_normal((config.random_witnesses, n)) + 1j * rng.standard_normal((config.random_witnesses, n))
    rand /= np.linalg.norm(rand, axis=1, keepdims=True)
    x = _boundary(F, np.concatenate([axes, rand]))
    atoms = _complex_atoms(n, config.atoms, config.seed + 1)
    total = 0
    for _ in range(config.max_rounds):
        E, it = _john(x, config.tol * 1e-4)
        total += it

        def q(w):
            b = _boundary(F, w)
            return np.einsum("...j,jk,...k->...", b.conj(), E, b).real

        qa = q(atoms)
        starts = atoms[top_k(qa, config.search.starts)]
        with warnings.catch_warnings():
            # unconverged searches only delay termination; the outer loop re-searches
            warnings.simplefilter("ignore", ConvergenceWarning)
            xs, vals, _ = maximize_on_sphere(
                lambda c, rows: q(real_to_complex(c)), complex_to_real(starts), config.search
            )
        qmax = max(float(vals.max()), float(qa.max()))
        if qmax <= 1.0 + config.tol:
            break
        new = real_to_complex(xs[vals > 1.0 + config.tol * 1e-2])
        x = np.concatenate([x, _boundary(F, new / np.linalg.norm(new, axis=1, keepdims=True))])
    else:
        warnings.warn("Wu ellipsoid search hit the round cap", ConvergenceWarning, stacklevel=2)
    E = symmetrize(E / max(qmax, 1.0))
    sign, logdet = np.linalg.slogdet(E)
    log_vol = n * math.log(math.pi) - math.lgamma(n + 1) - logdet
    return EllipsoidForm(HermitianForm(E.conj()), float(log_vol), qmax - 1.0, total, len(x))


def wu_metric(spec, point, config: WuConfig = WuConfig()) -> HermitianForm:
    """Wu form at ``point``: the John form of the Kobayashi-Royden indicatrix."""
    from .domains import indicatrix

    return mvee_balanced(indicatrix(spec, point), config).form


@dataclass(frozen=True)
class WuSandwich:
    """Range of sqrt(w(v,v)) / k_hat(v) over sampled directions."""

    ratio_low: float
    ratio_high: float
    m: int
    directions: int

    @property
    def containment_holds(self) -> bool:
        """1/sqrt(m) <= sqrt(w)/k_hat <= 1: the direction implied by E containing the hull."""
        tol = 1e-3
        return self.ratio_low >= 1.0 / math.sqrt(self.m) - tol and self.ratio_high <= 1.0 + tol

    @property
    def reversed_holds(self) -> bool:
        """1 <= sqrt(w)/k_hat <= sqrt(m)."""
        tol = 1e-3
        return self.ratio_low >= 1.0 - tol and self.ratio_high <= math.sqrt(self.m) + tol

    def to_json(self):
        return {
            "ratio_low": self.ratio_low,
            "ratio_high": self.ratio_high,
            "m": self.m,
            "directions": self.directions,
            "containment_holds": self.containment_holds,
            "reversed_holds": self.reversed_holds,
        }


def sample_directions(n, count, seed):
    """``count`` random unit directions plus the coordinate axes and the diagonal."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    extra = np.concatenate([np.eye(n), np.ones((1, n))]).astype(complex)
    v = np.concatenate([v, extra])
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def wu_sandwich_report(busemann: Pseudonorm, wu: HermitianForm, directions: int = 1000, seed: int = 0) -> WuSandwich:
    v = sample_directions(busemann.n, directions, seed)
    r = np.sqrt(wu.quadratic(v)) / busemann(v)
    return WuSandwich(float(r.min()), float(r.max()), busemann.n, len(v))


def kappa_wu_bounds(kappa: HermitianForm, wu: HermitianForm):
    """Extremes of sqrt(kappa(v,v) / w(v,v)) over all v != 0."""
    lam = generalized_eigvals(kappa, wu)
    return float(np.sqrt(lam.min())), float(np.sqrt(lam.max()))
