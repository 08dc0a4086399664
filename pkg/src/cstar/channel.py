"""Unital completely positive maps of a finite-dimensional C*-algebra.

A map is stored as its superoperator ``S`` on algebra coordinates, so that
``vec(Phi(a)) = S vec(a)``.  The Choi matrices (one per pair of blocks) and a
Kraus decomposition are derived from it on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from cstar.algebra import Algebra, Element, Subspace, generated_star_algebra
from cstar.errors import (AlgebraMismatch, NotAnAlgebra, NotCP, NotUnital,
                          SchwarzViolation)
from cstar.numerics import (CHECK_TOL, RANK_TOL, dagger, fro, hermitize,
                            null_space, orthonormalize)


@dataclass(frozen=True, eq=False)
class LinearMap:
    """A linear self-map of ``algebra`` given by its superoperator."""

    algebra: Algebra
    superop: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.superop, dtype=complex)
        n = self.algebra.total_dim
        if s.shape != (n, n):
            raise ValueError(f"superoperator of shape {s.shape}, expected {(n, n)}")
        if not np.all(np.isfinite(s)):
            raise ValueError("superoperator has non-finite entries")
        object.__setattr__(self, "superop", s)

    def __call__(self, a: Element) -> Element:
        return self.algebra.from_vec(self.superop @ self.algebra.to_vec(a))

    def on(self, algebra: Algebra) -> "LinearMap":
        """Same map expressed in the coordinates of ``algebra`` (a reordering)."""
        if algebra == self.algebra:
            return self
        if not algebra.same_as(self.algebra):
            raise AlgebraMismatch("cannot move a map to a different algebra")
        s = algebra.superop_of(lambda a: self(Element(self.algebra, a.blocks)))
        return type(self)(algebra, s)

    @cached_property
    def choi_blocks(self) -> dict:
        """Choi matrix of each block component ``M_dj -> M_di``.

        ``C_ij = sum_pq E_pq (x) Phi(E_pq)_i`` with ``E_pq`` the matrix units of
        block ``j``.  The map is completely positive iff every ``C_ij`` is PSD.
        """
        alg = self.algebra
        dims = alg.block_dims
        out = {}
        for j, dj in enumerate(dims):
            images = {}
            for p in range(dj):
                for q in range(dj):
                    blocks = [np.zeros((d, d), complex) for d in dims]
                    blocks[j][p, q] = 1.0
                    images[p, q] = self(Element(alg, tuple(blocks)))
            for i, di in enumerate(dims):
                c = np.zeros((dj * di, dj * di), complex)
                for (p, q), img in images.items():
                    c[p * di:(p + 1) * di, q * di:(q + 1) * di] = img.blocks[i]
                out[i, j] = c
        return out

    @property
    def choi(self) -> np.ndarray:
        """Block-diagonal assembly of the per-block-pair Choi matrices."""
        mats = [self.choi_blocks[k] for k in sorted(self.choi_blocks)]
        n = sum(m.shape[0] for m in mats)
        out = np.zeros((n, n), complex)
        pos = 0
        for m in mats:
            out[pos:pos + m.shape[0], pos:pos + m.shape[0]] = m
            pos += m.shape[0]
        return out

    def kraus(self, tol: float = RANK_TOL) -> list:
        """Kraus operators on the dense space C^D, each supported on one block pair.

        Ordered by block pair and ascending eigenvalue of the Choi matrix; the
        first significant entry of every operator is made real positive.
        """
        alg = self.algebra
        dims = alg.block_dims
        offs = np.concatenate([[0], np.cumsum(dims)]).astype(int)
        big = max((np.abs(c).max() for c in self.choi_blocks.values()), default=0.0)
        ops = []
        for (i, j), c in sorted(self.choi_blocks.items()):
            w, v = np.linalg.eigh(hermitize(c))
            di, dj = dims[i], dims[j]
            for lam, vec in zip(w, v.T):
                if lam <= tol * max(big, w.max(initial=0.0)):
                    continue
                k_small = np.sqrt(lam) * vec.reshape(dj, di).T
                flat = k_small.reshape(-1)
                idx = int(np.argmax(np.abs(flat) > 1e-8 * np.abs(flat).max()))
                k_small = k_small * (abs(flat[idx]) / flat[idx])
                k = np.zeros((alg.dense_dim, alg.dense_dim), complex)
                k[offs[i]:offs[i + 1], offs[j]:offs[j + 1]] = k_small
                ops.append(k)
        return ops

    def images(self) -> np.ndarray:
        """Array (n, D, D) of the images of the basis as dense operators."""
        alg = self.algebra
        return np.array([alg.dense(alg.from_vec(self.superop[:, k])) for k in range(alg.total_dim)])


class UcpMap(LinearMap):
    """A validated unital completely positive map; build with :func:`verify_ucp`."""

    @classmethod
    def from_kraus(cls, algebra: Algebra, kraus: Sequence, tol: float = CHECK_TOL) -> "UcpMap":
        """``Phi(a) = sum K a K*`` with each ``K`` acting on the dense space C^D."""
        ks = [np.asarray(k, dtype=complex) for k in kraus]
        dd = algebra.dense_dim
        if any(k.shape != (dd, dd) for k in ks):
            raise ValueError(f"Kraus operators must be {dd}x{dd}")

        def apply(a):
            x = algebra.dense(a)
            return algebra.from_dense(sum(k @ x @ dagger(k) for k in ks), tol=tol)

        return verify_ucp(LinearMap(algebra, algebra.superop_of(apply)), tol)

    @classmethod
    def from_stochastic(cls, p, algebra: Algebra | None = None) -> "UcpMap":
        """Classical Markov dynamics ``f -> P f`` on C^n for a row-stochastic ``P``."""
        p = np.asarray(p, dtype=float)
        n = p.shape[0]
        if p.shape != (n, n):
            raise ValueError("stochastic matrix must be square")
        if np.any(p < -1e-12) or not np.allclose(p.sum(axis=1), 1.0, atol=1e-12):
            raise ValueError("matrix is not row-stochastic")
        algebra = algebra or Algebra((1,) * n)
        if not algebra.is_commutative or algebra.total_dim != n:
            raise AlgebraMismatch("stochastic dynamics needs the diagonal algebra C^n")

        def apply(f):
            vals = np.array([b[0, 0] for b in f.blocks])
            return algebra.diagonal(p @ vals)

        return verify_ucp(LinearMap(algebra, algebra.superop_of(apply)))


def verify_ucp(m, tol: float = CHECK_TOL, algebra: Algebra | None = None) -> UcpMap:
    """Check unitality and complete positivity and return a :class:`UcpMap`.

    ``m`` is a :class:`LinearMap`, or a callable ``Element -> Element`` together
    with ``algebra``.
    """
    if callable(m) and not isinstance(m, LinearMap):
        if algebra is None:
            raise ValueError("a callable needs its algebra")
        m = LinearMap(algebra, algebra.superop_of(m))
    alg = m.algebra
    one = alg.unit()
    defect = fro(alg.to_vec(m(one) - one))
    if defect > tol:
        raise NotUnital(f"||Phi(1) - 1|| = {defect:.3e}")
    blocks = m.choi_blocks
    scale = max(max(np.linalg.norm(c, 2) for c in blocks.values()), 1e-300)
    for key, c in blocks.items():
        asym = fro(c - dagger(c))
        if asym > tol * scale:
            raise NotCP(f"Choi block {key} is not Hermitian (defect {asym:.3e})")
        low = float(np.linalg.eigvalsh(hermitize(c)).min())
        if low < -tol * scale:
            raise NotCP(f"Choi block {key} has eigenvalue {low:.3e}")
    return UcpMap(alg, m.superop)


# -- standard maps -------------------------------------------------------------

def identity_map(algebra: Algebra) -> UcpMap:
    return UcpMap(algebra, np.eye(algebra.total_dim, dtype=complex))


def conjugation(algebra: Algebra, u) -> UcpMap:
    """``ad_U(a) = U a U*`` for a unitary ``U`` given blockwise or densely."""
    u = np.asarray(u, dtype=complex)
    if u.ndim == 2 and u.shape == (algebra.dense_dim,) * 2:
        dense = u
    else:
        dense = algebra.dense(algebra.element(list(u) if u.ndim == 3 else [u]))
    return UcpMap.from_kraus(algebra, [dense])


def depolarizing(algebra: Algebra, p: float = 1.0) -> UcpMap:
    """``a -> (1-p) a + p tau(a) 1`` with ``tau`` the normalised trace."""
    dd = algebra.dense_dim

    def apply(a):
        tau = sum(np.trace(b) for b in a.blocks) / dd
        return (1 - p) * a + p * tau * algebra.unit()

    return verify_ucp(apply, algebra=algebra)


def dephasing(algebra: Algebra) -> UcpMap:
    """Keep the diagonal of every block."""
    return verify_ucp(lambda a: algebra.element([np.diag(np.diag(b)) for b in a.blocks]),
                      algebra=algebra)


def averaging(n: int) -> UcpMap:
    """``f -> mean(f) 1`` on C^n."""
    return UcpMap.from_stochastic(np.full((n, n), 1.0 / n))


def permutation(perm: Sequence[int]) -> UcpMap:
    """Classical dynamics ``(Pf)_i = f_{perm[i]}`` on C^n."""
    n = len(perm)
    p = np.zeros((n, n))
    p[np.arange(n), list(perm)] = 1.0
    return UcpMap.from_stochastic(p)


def copy_endomorphism(d: int) -> UcpMap:
    """``x + y -> x + x`` on M_d + M_d, a unital injective-on-the-first-block homomorphism."""
    alg = Algebra((d, d))
    return verify_ucp(lambda a: alg.element([a.blocks[0], a.blocks[0]]), algebra=alg)


def random_ucp(algebra: Algebra, seed: int, kraus_rank: int = 2) -> UcpMap:
    """Random unital channel: ``sum K a K*`` with ``sum K K* = 1``, blockwise normalised."""
    rng = np.random.default_rng(seed)
    dd = algebra.dense_dim
    offs = np.concatenate([[0], np.cumsum(algebra.block_dims)]).astype(int)
    ks = [rng.standard_normal((dd, dd)) + 1j * rng.standard_normal((dd, dd)) for _ in range(kraus_rank)]
    # keep only block-compatible pieces: K maps block j into block i, and sum K K* = 1
    # forces the image of a to be block diagonal only if each K is block-supported
    pieces = []
    for k in ks:
        for i in range(len(algebra.block_dims)):
            for j in range(len(algebra.block_dims)):
                z = np.zeros_like(k)
                z[offs[i]:offs[i + 1], offs[j]:offs[j + 1]] = k[offs[i]:offs[i + 1], offs[j]:offs[j + 1]]
                pieces.append(z)
    total = sum(p @ dagger(p) for p in pieces)
    w, q = np.linalg.eigh(hermitize(total))
    inv_sqrt = (q / np.sqrt(w)) @ dagger(q)
    return UcpMap.from_kraus(algebra, [inv_sqrt @ p for p in pieces])


# -- operations ------------------------------------------------------------------

def _align(phi: LinearMap, psi: LinearMap) -> LinearMap:
    if not phi.algebra.same_as(psi.algebra):
        raise AlgebraMismatch(f"maps on {phi.algebra.block_dims} and {psi.algebra.block_dims}")
    return psi.on(phi.algebra)


def compose(phi: LinearMap, psi: LinearMap) -> LinearMap:
    """``phi o psi``; the result is a :class:`UcpMap` when both inputs are."""
    psi = _align(phi, psi)
    cls = UcpMap if isinstance(phi, UcpMap) and isinstance(psi, UcpMap) else LinearMap
    return cls(phi.algebra, phi.superop @ psi.superop)


def power(phi: LinearMap, n: int) -> LinearMap:
    if n < 0:
        raise ValueError("negative powers are not defined for ucp maps")
    return type(phi)(phi.algebra, np.linalg.matrix_power(phi.superop, n))


def trace_dual(phi: LinearMap) -> LinearMap:
    """The map ``Phi*`` with ``tr(Phi(a) X) = tr(a Phi*(X))`` (block trace)."""
    t = phi.algebra.transpose_matrix
    # tr(a X) = vec(a) . T vec(X), so S_dual = T S^T T
    return LinearMap(phi.algebra, t @ phi.superop.T @ t)


def multiplicative_domain_of(algebra: Algebra, images: np.ndarray, tol: float = CHECK_TOL) -> Subspace:
    """Multiplicative domain of a linear map ``algebra -> B(C^m)``.

    ``images[k]`` is the image of basis element ``x_k``.  The domain is the kernel
    of ``a -> (Phi(a x) - Phi(a)Phi(x), Phi(x a) - Phi(x)Phi(a))`` over the basis.
    """
    mult = algebra.structure_constants
    n = algebra.total_dim
    # defect_left[k, j] = Phi(x_k x_j) - Phi(x_k) Phi(x_j)
    left = np.einsum("kjl,lpq->kjpq", mult, images, optimize=True) - np.einsum("kpr,jrq->kjpq", images, images, optimize=True)
    right = np.einsum("jkl,lpq->kjpq", mult, images, optimize=True) - np.einsum("jpr,krq->kjpq", images, images, optimize=True)
    cols = np.concatenate([left.reshape(n, -1), right.reshape(n, -1)], axis=1).T
    ker = null_space(cols, tol)
    return Subspace(algebra, orthonormalize(ker) if ker.shape[1] else ker)


def multiplicative_domain(phi: UcpMap, tol: float = CHECK_TOL) -> Subspace:
    """The largest subalgebra on which ``phi`` is multiplicative."""
    alg = phi.algebra
    dom = multiplicative_domain_of(alg, phi.images(), tol)
    # closure certificate: the kernel must be a unital *-subalgebra
    if dom.dim == 0 or not dom.contains(alg.unit(), 1e-7):
        raise NotAnAlgebra("multiplicative domain misses the unit")
    elems = dom.elements()
    for x in elems:
        if not dom.contains(x.star(), 1e-7):
            raise NotAnAlgebra("multiplicative domain is not *-closed")
        lhs = phi(x.star() @ x)
        rhs = phi(x.star()) @ phi(x)
        if fro(alg.to_vec(lhs - rhs)) > 1e-7:
            raise NotAnAlgebra("quadratic identity fails on the computed domain")
        for y in elems:
            if not dom.contains(x @ y, 1e-7):
                raise NotAnAlgebra("multiplicative domain is not product-closed")
    return dom


def is_homomorphism(phi: UcpMap, tol: float = CHECK_TOL) -> bool:
    return multiplicative_domain(phi, tol).is_full()


def kadison_defect(phi: UcpMap, a: Element, tol: float = CHECK_TOL) -> Element:
    """``Phi(a* a) - Phi(a*) Phi(a)``, certified positive semidefinite."""
    d = phi(a.star() @ a) - phi(a.star()) @ phi(a)
    scale = max(1.0, a.norm() ** 2)
    for b in d.blocks:
        low = float(np.linalg.eigvalsh(hermitize(b)).min())
        if low < -tol * scale:
            raise SchwarzViolation(f"Kadison-Schwarz defect has eigenvalue {low:.3e}")
    return d


def fixed_point_density(phi: LinearMap) -> list:
    """Densities of a state invariant under ``phi`` (a fixed point of the trace dual).

    Picks the eigenvector of ``Phi*`` at eigenvalue 1 with the largest trace and
    normalises it; meaningful when that fixed point is unique.
    """
    dual = trace_dual(phi)
    w, v = np.linalg.eig(dual.superop)
    k = int(np.argmin(np.abs(w - 1)))
    x = phi.algebra.from_vec(v[:, k])
    tr = sum(np.trace(b) for b in x.blocks)
    x = x / tr
    return [hermitize(b) for b in x.blocks]


def section_residual(phi: LinearMap, psi: LinearMap) -> tuple:
    """Largest ``||Phi(Psi(x)) - x||`` over the basis, and the basis index reaching it."""
    alg = phi.algebra
    comp = compose(phi, psi)
    worst, arg = 0.0, 0
    for k, x in enumerate(alg.basis_elements()):
        r = (comp(x) - x).norm()
        if r > worst:
            worst, arg = r, k
    return worst, arg


def star_algebra_of_images(phi: UcpMap) -> Subspace:
    """*-algebra generated by the range of ``phi``."""
    return generated_star_algebra([phi(x) for x in phi.algebra.basis_elements()])


CallableMap = Callable[[Element], Element]
