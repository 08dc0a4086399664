"""Dense complex linear algebra shared by every dilation step.

All matrices are plain ``numpy`` arrays of dtype ``complex128``.  Nothing here
knows about algebras or states; the functions are small, pure and safe to call
concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from cstar.errors import NotHermitian, NotPSD

#: Relative eigenvalue cut used when deciding the rank of a Gram matrix.
RANK_TOL = 1e-10
#: Default threshold for residual certificates.
CHECK_TOL = 1e-9


def as_cmatrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or min(m.shape) < 1:
        raise ValueError(f"expected a non-empty 2-d array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def hermitize(m: np.ndarray) -> np.ndarray:
    return (m + dagger(m)) / 2


def fro(m) -> float:
    """Frobenius norm; dominates the operator norm, so it is used for residuals."""
    return float(np.linalg.norm(np.asarray(m).ravel()))


def op_norm(m) -> float:
    """Largest singular value of ``m``."""
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return 0.0
    if m.ndim == 1:
        return float(np.linalg.norm(m))
    return float(np.linalg.norm(m, 2))


@dataclass(frozen=True, eq=False)
class HermEig:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ dagger(q)


def herm_eig(m, tol: float = RANK_TOL) -> HermEig:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises :class:`NotHermitian` when ``||M - M*|| > tol ||M||`` (Frobenius).
    The solve itself runs on the explicitly Hermitized matrix.
    """
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotHermitian(f"matrix is not square: {m.shape}")
    scale = fro(m)
    asym = fro(m - dagger(m))
    if asym > tol * scale:
        raise NotHermitian(f"asymmetry {asym:.3e} exceeds {tol:.1e} * {scale:.3e}")
    w, q = np.linalg.eigh(hermitize(m))
    return HermEig(w, q)


@dataclass(frozen=True, eq=False)
class QuotientBasis:
    """Orthonormal coordinates on the quotient of C^n by the null space of a Gram form.

    ``coisometry`` (rank x n) satisfies ``C G C* = I``: its conjugate-transposed
    columns are ambient lifts of an orthonormal basis of the quotient.
    ``reducer`` (rank x n) sends an ambient coefficient vector ``v`` to the
    quotient coordinates of its class, so ``|reducer v|^2 = v* G v``.
    """

    ambient_dim: int
    rank: int
    coisometry: np.ndarray
    reducer: np.ndarray
    tol_used: float

    @property
    def lift(self) -> np.ndarray:
        """n x rank matrix of ambient representatives of the orthonormal basis."""
        return dagger(self.coisometry)

    def reduce(self, v) -> np.ndarray:
        return self.reducer @ np.asarray(v, dtype=complex)

    def range_projector(self) -> np.ndarray:
        """Orthogonal projector (in ambient coordinates) onto the Gram range."""
        return self.lift @ self.reducer


def gram_quotient(g, tol: float = RANK_TOL, rng: np.random.Generator | None = None) -> QuotientBasis:
    """Quotient a positive semidefinite Gram matrix by its null space.

    Eigenvalues ``<= tol * lambda_max`` are treated as zero.  Passing ``rng``
    rotates the quotient basis by a Haar-random unitary; the result is an
    equally valid coordinate system and is used to exercise basis-independence.
    """
    g = as_cmatrix(g)
    eig = herm_eig(g, tol=max(tol, 1e-12))
    w, q = eig.eigenvalues, eig.eigenvectors
    top = float(w[-1]) if w.size else 0.0
    if top <= 0:
        return QuotientBasis(g.shape[0], 0, np.zeros((0, g.shape[0]), complex),
                             np.zeros((0, g.shape[0]), complex), tol)
    if w[0] < -tol * top:
        raise NotPSD(f"Gram matrix has eigenvalue {w[0]:.3e} below -{tol:.1e} * {top:.3e}")
    keep = w > tol * top
    # largest eigenvalues first keeps the coordinate order stable under perturbation
    w_r = w[keep][::-1]
    q_r = q[:, keep][:, ::-1]
    # fix the phase of each eigenvector: first entry of significant size is real positive
    for k in range(q_r.shape[1]):
        col = q_r[:, k]
        idx = int(np.argmax(np.abs(col) > 1e-8 * np.abs(col).max()))
        ph = col[idx] / abs(col[idx])
        q_r[:, k] = col / ph
    coiso = (q_r / np.sqrt(w_r)).conj().T
    red = (q_r * np.sqrt(w_r)).conj().T
    if rng is not None and w_r.size > 1:
        r = unitary_group.rvs(w_r.size, random_state=rng)
        coiso = r @ coiso
        red = r @ red
    return QuotientBasis(g.shape[0], int(w_r.size), coiso, red, tol)


def null_space(m, tol: float = CHECK_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the kernel of ``m``.

    Singular values ``<= tol * max(1, s_max)`` count as zero: the maps fed here
    (commutators, multiplicativity defects of ucp maps) have entries of order one.
    """
    m = np.asarray(m, dtype=complex)
    n = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(n, dtype=complex)
    if m.shape[0] > 4 * n:
        # tall system: R of a QR factorisation has the same right singular vectors
        m = np.linalg.qr(m, mode="r")
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    s_full = np.zeros(n)
    s_full[: s.size] = s
    smax = s.max() if s.size else 0.0
    return dagger(vh)[:, s_full <= tol * max(1.0, smax)]


def orthonormalize(vectors, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the span of the given columns.

    Directions with singular value ``<= tol * s_max`` are dropped.
    """
    v = np.asarray(vectors, dtype=complex)
    if v.ndim == 1:
        v = v[:, None]
    if v.shape[1] == 0:
        return np.zeros((v.shape[0], 0), complex)
    u, s, _ = np.linalg.svd(v, full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((v.shape[0], 0), complex)
    return u[:, s > tol * s[0]]


def rank(m, tol: float = RANK_TOL) -> int:
    s = np.linalg.svd(np.asarray(m, dtype=complex), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def psd_sqrt(m) -> np.ndarray:
    w, q = np.linalg.eigh(hermitize(np.asarray(m, complex)))
    return (q * np.sqrt(np.clip(w, 0, None))) @ dagger(q)


def herm_power(m, p: complex) -> np.ndarray:
    """``m ** p`` for a positive definite Hermitian ``m`` (complex ``p`` allowed)."""
    w, q = np.linalg.eigh(hermitize(np.asarray(m, complex)))
    if np.any(w <= 0):
        raise NotPSD("herm_power needs a positive definite matrix")
    return (q * w.astype(complex) ** p) @ dagger(q)


def is_unitary(u, tol: float = CHECK_TOL) -> bool:
    u = np.asarray(u, complex)
    if u.shape[0] != u.shape[1]:
        return False
    i = np.eye(u.shape[0])
    return fro(dagger(u) @ u - i) <= tol and fro(u @ dagger(u) - i) <= tol


def isometry_defect(v) -> float:
    v = np.asarray(v, complex)
    return fro(dagger(v) @ v - np.eye(v.shape[1]))
