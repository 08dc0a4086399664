"""Stinespring dilation of a ucp map ``A -> B(H)`` given by its basis images.

The dilation space is the quotient of ``A (x) H`` by the null space of the
semi-inner product ``<a (x) h, b (x) k> = <h, Phi(a* b) k>``.  Ambient
coordinates are ordered with the algebra index major and the space index
minor, so ``vec(a (x) h) = kron(vec(a), h)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from cstar.algebra import Algebra, Element, Subspace
from cstar.errors import CertificationError, GramNotPSD, IllDefined, NotHermitian, NotPSD, NotUcp
from cstar.numerics import CHECK_TOL, RANK_TOL, QuotientBasis, dagger, fro, gram_quotient
from cstar.report import Check, check, flag


@dataclass(frozen=True, eq=False)
class StinespringData:
    algebra: Algebra
    images: np.ndarray  # (n, h, h): Phi(x_k)
    coords: QuotientBasis
    sigma_basis: np.ndarray  # (n, L, L): sigma(x_k)
    V: np.ndarray  # (L, h)

    @property
    def source_dim(self) -> int:
        return self.images.shape[1]

    @property
    def dilation_dim(self) -> int:
        return self.coords.rank

    def sigma(self, a: Element) -> np.ndarray:
        return np.tensordot(self.algebra.to_vec(a), self.sigma_basis, axes=1)

    def phi(self, a: Element) -> np.ndarray:
        return np.tensordot(self.algebra.to_vec(a), self.images, axes=1)

    def tensor_class(self, a: Element, psi) -> np.ndarray:
        """Coordinates of the class of ``a (x) psi``."""
        return self.coords.reducer @ np.kron(self.algebra.to_vec(a), np.asarray(psi, complex))

    @cached_property
    def range_projector(self) -> np.ndarray:
        return self.V @ dagger(self.V)

    def well_defined_residual(self) -> float:
        n, h = self.images.shape[:2]
        t, c = self.coords.reducer, self.coords.lift
        defect = np.eye(n * h) - c @ t
        worst = 0.0
        mult = self.algebra.structure_constants
        for k in range(n):
            lk = mult[k].T  # L_{x_k}[l, j] = mult[k, j, l]
            worst = max(worst, fro(t @ np.kron(lk, np.eye(h)) @ defect))
        return worst

    def certificates(self, tol: float = 1e-10) -> list:
        alg = self.algebra
        sig = self.sigma_basis
        v = self.V
        stine = fro(dagger(v) @ sig @ v - self.images)
        iso = fro(dagger(v) @ v - np.eye(v.shape[1]))
        prod = np.einsum("iab,jbc->ijac", sig, sig, optimize=True)
        target = np.einsum("ijk,kac->ijac", alg.structure_constants, sig, optimize=True)
        mres = fro(prod - target) / max(1, alg.total_dim)
        sres = fro(np.einsum("lk,lab->kab", alg.star_matrix, sig, optimize=True) - dagger(sig))
        return [
            check("stinespring.factorization", "Phi(a) = V* sigma(a) V", stine, tol,
                  "Stinespring factorization of a ucp map"),
            check("stinespring.isometry", "V* V = 1", iso, tol, "Stinespring operator V is an isometry"),
            check("stinespring.multiplicative", "sigma(ab) = sigma(a) sigma(b)", mres, tol * 10,
                  "Stinespring representation is multiplicative"),
            check("stinespring.star", "sigma(a*) = sigma(a)*", sres, tol * 10,
                  "Stinespring representation is *-preserving"),
            check("stinespring.well_defined", "left multiplication preserves the Gram null space",
                  self.well_defined_residual(), tol * 10, "semi-inner product quotient of A (x) H"),
        ]


def stinespring_gram(algebra: Algebra, images: np.ndarray) -> np.ndarray:
    """Gram matrix ``G[(i,p),(j,q)] = <e_p, Phi(x_i* x_j) e_q>``."""
    n, h = images.shape[:2]
    g = np.einsum("ijk,kpq->ipjq", algebra.adjoint_products, images, optimize=True)
    return g.reshape(n * h, n * h)


def stinespring(algebra: Algebra, images, tol: float = RANK_TOL, check_tol: float = CHECK_TOL,
                rng: np.random.Generator | None = None, certify: bool = True) -> StinespringData:
    """Minimal Stinespring dilation of the map with ``Phi(x_k) = images[k]``."""
    images = np.asarray(images, dtype=complex)
    n = algebra.total_dim
    if images.ndim != 3 or images.shape[0] != n or images.shape[1] != images.shape[2]:
        raise ValueError(f"images must have shape ({n}, h, h)")
    h = images.shape[1]
    unit_img = np.tensordot(algebra.unit_vec, images, axes=1)
    if fro(unit_img - np.eye(h)) > check_tol:
        raise NotUcp(f"map is not unital (defect {fro(unit_img - np.eye(h)):.3e})")
    g = stinespring_gram(algebra, images)
    try:
        q = gram_quotient(g, tol, rng)
    except (NotPSD, NotHermitian) as exc:
        raise GramNotPSD(f"Stinespring Gram matrix is not positive: {exc}") from exc
    t, c = q.reducer, q.lift
    mult = algebra.structure_constants
    eye_h = np.eye(h)
    sig = np.array([t @ np.kron(mult[k].T, eye_h) @ c for k in range(n)])
    v = t @ np.kron(algebra.unit_vec[:, None], eye_h)
    s = StinespringData(algebra, images, q, sig, v)
    if certify:
        bad = [x for x in s.certificates(max(check_tol, 1e-10)) if not x.passed]
        if bad:
            raise CertificationError("; ".join(f"{x.id} residual {x.residual:.3e}" for x in bad))
    return s


def induced_isometry(next_level: StinespringData, cur_lift: np.ndarray, prev: np.ndarray) -> np.ndarray:
    """Matrix of ``class(a (x) psi) -> class(a (x) prev psi)``.

    ``cur_lift`` (ambient x L) lifts orthonormal coordinates of the current
    space to ``A (x) K`` and ``prev`` maps ``K`` into the source of ``next_level``.
    """
    n = next_level.algebra.total_dim
    amb = np.kron(np.eye(n), prev)
    return next_level.coords.reducer @ amb @ cur_lift


def induced_isometry_residual(next_level: StinespringData, cur: QuotientBasis, prev: np.ndarray) -> float:
    """Failure of the assignment to respect the null space of the current quotient."""
    n = next_level.algebra.total_dim
    amb = np.kron(np.eye(n), prev)
    defect = np.eye(cur.ambient_dim) - cur.lift @ cur.reducer
    return fro(next_level.coords.reducer @ amb @ defect)


def lambda0(g, s: StinespringData, u: np.ndarray | None = None, tol: float = 1e-10) -> np.ndarray:
    """Isometry ``pi(a) Omega -> class(a (x) Omega)`` from the GNS space into the first level."""
    om = g.omega[:, None]
    ill = induced_isometry_residual(s, g.quotient, om)
    lam = induced_isometry(s, g.lift, om)
    if ill > 1e-8 or fro(dagger(lam) @ lam - np.eye(lam.shape[1])) > 1e-8:
        raise IllDefined("the assignment pi(a)Omega -> a (x) Omega is not isometric; is the state invariant?")
    return lam


def lambda0_certificates(g, s: StinespringData, lam: np.ndarray, u: np.ndarray, tol: float = 1e-10) -> list:
    iso = fro(dagger(lam) @ lam - np.eye(lam.shape[1]))
    inter = max(fro(s.sigma_basis[k] @ lam - lam @ g.rep_basis[k]) for k in range(g.algebra.total_dim))
    fact = fro(u - dagger(s.V) @ lam)
    return [
        check("lambda0.isometry", "Lambda0* Lambda0 = 1", iso, tol, "Lambda0 is an isometry"),
        check("lambda0.intertwines", "sigma1(a) Lambda0 = Lambda0 pi(a)", inter, tol,
              "Lambda0 intertwines the GNS and first Stinespring representations"),
        check("lambda0.factorization", "U = V0* Lambda0", fact, tol,
              "factorization of the transfer contraction through the first level"),
    ]


def check_md_commutation(s: StinespringData, domain: Subspace, tol: float = CHECK_TOL) -> list:
    """``sigma(x)`` commutes with ``V V*`` on the multiplicative domain; ``V`` unitary iff homomorphism."""
    p = s.range_projector
    worst = 0.0
    for x in domain.elements():
        sx = s.sigma(x)
        worst = max(worst, fro(sx @ p - p @ sx))
    unitary = fro(p - np.eye(p.shape[0])) <= tol
    full = domain.is_full()
    return [
        check("md.commutes_with_range", "sigma(x) V V* = V V* sigma(x) on the multiplicative domain",
              worst, tol, "range projection of V commutes with the multiplicative domain"),
        flag("md.unitary_iff_homomorphism", "V V* = 1 exactly when the map is a homomorphism",
             unitary == full, "V is unitary iff the map is a homomorphism"),
    ]
