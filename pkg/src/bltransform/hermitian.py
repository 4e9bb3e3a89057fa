"""Hermitian forms on C^n.

Convention used throughout the package: a form ``H`` with Gram matrix ``G``
evaluates as ``H(v, w) = v @ G @ conj(w)``, i.e. linear in the first slot and
antilinear in the second.  ``H(v, v)`` is then real and nonnegative for a
positive semidefinite ``G``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITIAN_RTOL = 1e-12


class DimensionError(ValueError):
    pass


class NotPositiveDefiniteError(ValueError):
    pass


def symmetrize(gram):
    gram = np.asarray(gram, dtype=complex)
    return 0.5 * (gram + gram.conj().T)


@dataclass(frozen=True, eq=False)
class HermitianForm:
    """A Hermitian sesquilinear form given by its Gram matrix."""

    gram: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gram, dtype=complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1] or g.shape[0] == 0:
            raise DimensionError(f"Gram matrix must be square, got shape {g.shape}")
        scale = max(np.abs(g).max(), 1.0)
        if np.abs(g - g.conj().T).max() > HERMITIAN_RTOL * scale * 1e3:
            raise ValueError("Gram matrix is not Hermitian")
        object.__setattr__(self, "gram", symmetrize(g))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    @classmethod
    def identity(cls, n: int) -> "HermitianForm":
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def diag(cls, entries) -> "HermitianForm":
        return cls(np.diag(np.asarray(entries, dtype=complex)))

    def __call__(self, v, w=None):
        return evaluate(self, v, v if w is None else w)

    def quadratic(self, v) -> np.ndarray:
        """Vectorized ``H(v, v)`` over the last axis of ``v``."""
        v = np.asarray(v, dtype=complex)
        return np.einsum("...j,jk,...k->...", v, self.gram, v.conj()).real

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.gram)

    def scaled(self, c: float) -> "HermitianForm":
        return HermitianForm(c * self.gram)

    def __add__(self, other: "HermitianForm") -> "HermitianForm":
        return HermitianForm(self.gram + other.gram)

    def __repr__(self):
        return f"HermitianForm(dim={self.dim}, gram={np.array2string(self.gram, precision=6)})"

    def to_json(self):
        return matrix_to_json(self.gram)

    @classmethod
    def from_json(cls, rows) -> "HermitianForm":
        return cls(matrix_from_json(rows))


def _as_form(H) -> HermitianForm:
    return H if isinstance(H, HermitianForm) else HermitianForm(H)


def evaluate(H, v, w):
    """``v @ gram @ conj(w)``; antilinear in ``w``."""
    H = _as_form(H)
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if v.shape[-1] != H.dim or w.shape[-1] != H.dim:
        raise DimensionError(f"vectors of length {v.shape[-1]}, {w.shape[-1]} for a form of dim {H.dim}")
    out = np.einsum("...j,jk,...k->...", v, H.gram, w.conj())
    return out[()] if out.ndim == 0 else out


def is_positive_definite(H, tol: float = 1e-9) -> bool:
    return bool(np.linalg.eigvalsh(_as_form(H).gram).min() > tol)


def invert(H, tol: float = 1e-12) -> HermitianForm:
    H = _as_form(H)
    lam = np.linalg.eigvalsh(H.gram)
    if lam.min() <= tol * max(lam.max(), 1.0):
        raise NotPositiveDefiniteError(f"cannot invert form with eigenvalues {lam}")
    return HermitianForm(np.linalg.inv(H.gram))


def congruence(H, A) -> HermitianForm:
    """Pullback ``A*H`` with ``A*H(u, v) = H(Au, Av)``; Gram is ``A^T G conj(A)``."""
    H = _as_form(H)
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != H.dim:
        raise DimensionError(f"matrix of shape {A.shape} cannot act into a form of dim {H.dim}")
    return HermitianForm(A.T @ H.gram @ A.conj())


def sqrtm_psd(M) -> np.ndarray:
    """Hermitian square root of a positive semidefinite matrix."""
    lam, U = np.linalg.eigh(symmetrize(M))
    return (U * np.sqrt(np.clip(lam, 0.0, None))) @ U.conj().T


def relative_error(A, B) -> float:
    """Frobenius ``|A - B| / |B|`` for forms or matrices."""
    a = A.gram if isinstance(A, HermitianForm) else np.asarray(A)
    b = B.gram if isinstance(B, HermitianForm) else np.asarray(B)
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def generalized_eigvals(H, K) -> np.ndarray:
    """Eigenvalues of ``K^{-1} H``: the range of ``H(v,v)/K(v,v)`` over v != 0."""
    H, K = _as_form(H), _as_form(K)
    L = np.linalg.cholesky(K.gram)
    Li = np.linalg.inv(L)
    return np.linalg.eigvalsh(symmetrize(Li @ H.gram @ Li.conj().T))


def block_diag(*forms) -> HermitianForm:
    n = sum(f.dim for f in forms)
    out = np.zeros((n, n), dtype=complex)
    k = 0
    for f in forms:
        out[k : k + f.dim, k : k + f.dim] = f.gram
        k += f.dim
    return HermitianForm(out)


def random_pd(n: int, rng, cond: float = 10.0) -> HermitianForm:
    """Random Hermitian PD form with condition number exactly ``cond``."""
    U = random_unitary(n, rng)
    if n == 1:
        lam = np.array([rng.uniform(0.5, 2.0)])
    else:
        lam = np.exp(rng.uniform(0.0, np.log(cond), size=n))
        lam[0], lam[-1] = 1.0, cond
        lam *= rng.uniform(0.5, 2.0)
    return HermitianForm((U * lam) @ U.conj().T)


def random_unitary(n: int, rng) -> np.ndarray:
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_invertible(n: int, rng, cond: float = 10.0) -> np.ndarray:
    U = random_unitary(n, rng)
    V = random_unitary(n, rng)
    s = np.exp(rng.uniform(0.0, np.log(cond), size=n))
    return (U * s) @ V


def matrix_to_json(M):
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def matrix_from_json(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
