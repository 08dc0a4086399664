"""Finite-dimensional C*-algebras as direct sums of full matrix blocks.

An :class:`Algebra` ``M_{d1} + ... + M_{dk}`` carries a coordinate basis of
matrix units, Hilbert-Schmidt orthonormal, flattened block by block in
row-major order.  An optional ``order`` permutes that basis; everything
downstream (Gram matrices, superoperators, towers) is expressed in the
algebra's own coordinates, so a permuted algebra is a convenient way to build
the same object twice in different bases.

Elements are stored blockwise and never as one big block-diagonal matrix,
except through :meth:`Algebra.dense` when an honest operator is wanted.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from cstar.errors import AlgebraMismatch, NoConvergence
from cstar.numerics import RANK_TOL, dagger, fro, null_space, orthonormalize


@dataclass(frozen=True)
class Algebra:
    block_dims: tuple
    order: tuple | None = None

    def __post_init__(self):
        dims = tuple(int(d) for d in self.block_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"block dimensions must be positive, got {self.block_dims}")
        object.__setattr__(self, "block_dims", dims)
        if self.order is not None:
            order = tuple(int(i) for i in self.order)
            if sorted(order) != list(range(sum(d * d for d in dims))):
                raise ValueError("order must be a permutation of the coordinate indices")
            object.__setattr__(self, "order", order)

    # -- shape ---------------------------------------------------------------

    @property
    def total_dim(self) -> int:
        return sum(d * d for d in self.block_dims)

    @property
    def dense_dim(self) -> int:
        return sum(self.block_dims)

    @property
    def is_commutative(self) -> bool:
        return all(d == 1 for d in self.block_dims)

    def same_as(self, other: "Algebra") -> bool:
        """True when both describe the same algebra, whatever the coordinate order."""
        return self.block_dims == other.block_dims

    def permuted(self, seed: int) -> "Algebra":
        perm = np.random.default_rng(seed).permutation(self.total_dim)
        return Algebra(self.block_dims, tuple(int(i) for i in perm))

    @cached_property
    def _offsets(self):
        out, pos = [], 0
        for d in self.block_dims:
            out.append(pos)
            pos += d * d
        return out

    @cached_property
    def _dense_offsets(self):
        return np.concatenate([[0], np.cumsum(self.block_dims)]).astype(int)

    @cached_property
    def _order_array(self):
        if self.order is None:
            return np.arange(self.total_dim)
        return np.asarray(self.order)

    # -- coordinates ---------------------------------------------------------

    def to_vec(self, a: "Element") -> np.ndarray:
        self._check(a)
        canon = np.concatenate([b.reshape(-1) for b in a.blocks])
        return canon[self._order_array]

    def from_vec(self, v) -> "Element":
        v = np.asarray(v, dtype=complex).reshape(-1)
        if v.size != self.total_dim:
            raise ValueError(f"coordinate vector of length {v.size}, expected {self.total_dim}")
        canon = np.empty(self.total_dim, dtype=complex)
        canon[self._order_array] = v
        blocks = []
        for d, off in zip(self.block_dims, self._offsets):
            blocks.append(canon[off:off + d * d].reshape(d, d))
        return Element(self, tuple(blocks))

    def basis(self, k: int) -> "Element":
        e = np.zeros(self.total_dim, complex)
        e[k] = 1.0
        return self.from_vec(e)

    def basis_elements(self) -> list:
        return [self.basis(k) for k in range(self.total_dim)]

    def element(self, blocks) -> "Element":
        if isinstance(blocks, np.ndarray) and len(self.block_dims) == 1 and blocks.ndim == 2:
            blocks = [blocks]
        if len(self.block_dims) > 1 and all(d == 1 for d in self.block_dims) and np.ndim(blocks) == 1:
            blocks = [np.array([[x]]) for x in blocks]
        out = tuple(np.array(b, dtype=complex).reshape(d, d) for b, d in zip(blocks, self.block_dims))
        if len(out) != len(self.block_dims):
            raise ValueError("wrong number of blocks")
        return Element(self, out)

    def diagonal(self, values) -> "Element":
        """Element of a commutative algebra C^n from its n values."""
        if not self.is_commutative:
            raise ValueError("diagonal() needs a commutative algebra")
        return self.element([np.array([[v]]) for v in values])

    def unit(self) -> "Element":
        return Element(self, tuple(np.eye(d, dtype=complex) for d in self.block_dims))

    def zero(self) -> "Element":
        return Element(self, tuple(np.zeros((d, d), complex) for d in self.block_dims))

    def dense(self, a: "Element") -> np.ndarray:
        self._check(a)
        n = self.dense_dim
        out = np.zeros((n, n), complex)
        o = self._dense_offsets
        for i, b in enumerate(a.blocks):
            out[o[i]:o[i + 1], o[i]:o[i + 1]] = b
        return out

    def from_dense(self, m, tol: float = 1e-9) -> "Element":
        """Extract the diagonal blocks of ``m``; off-block mass above ``tol`` is an error."""
        m = np.asarray(m, dtype=complex)
        o = self._dense_offsets
        blocks = tuple(m[o[i]:o[i + 1], o[i]:o[i + 1]].copy() for i in range(len(self.block_dims)))
        rest = m.copy()
        for i in range(len(self.block_dims)):
            rest[o[i]:o[i + 1], o[i]:o[i + 1]] = 0
        if fro(rest) > tol * max(1.0, fro(m)):
            raise ValueError("matrix has entries outside the diagonal blocks")
        return Element(self, blocks)

    def _check(self, a: "Element"):
        if not self.same_as(a.algebra):
            raise AlgebraMismatch(f"element of {a.algebra.block_dims} used in {self.block_dims}")

    # -- structure -----------------------------------------------------------

    @cached_property
    def dense_basis(self) -> np.ndarray:
        """Array (n, D, D) of the basis elements as block-diagonal matrices."""
        return np.array([self.dense(self.basis(k)) for k in range(self.total_dim)])

    @cached_property
    def structure_constants(self) -> np.ndarray:
        """``mult[i, j, k]`` = coefficient of ``x_k`` in ``x_i x_j``."""
        n = self.total_dim
        xs = self.basis_elements()
        mult = np.zeros((n, n, n), complex)
        for i in range(n):
            for j in range(n):
                mult[i, j] = self.to_vec(xs[i] @ xs[j])
        return mult

    @cached_property
    def star_matrix(self) -> np.ndarray:
        """``P`` with ``vec(a*) = P conj(vec(a))``."""
        n = self.total_dim
        p = np.zeros((n, n), complex)
        for k in range(n):
            p[:, k] = self.to_vec(self.basis(k).star())
        return p

    @cached_property
    def transpose_matrix(self) -> np.ndarray:
        """``T`` with ``vec(a^T) = T vec(a)`` (blockwise transpose)."""
        n = self.total_dim
        t = np.zeros((n, n), complex)
        for k in range(n):
            b = self.basis(k)
            t[:, k] = self.to_vec(Element(self, tuple(x.T for x in b.blocks)))
        return t

    @cached_property
    def adjoint_products(self) -> np.ndarray:
        """``c[i, j, k]`` = coefficient of ``x_k`` in ``x_i* x_j``."""
        # x_i* = sum_l P[l, i] x_l for real matrix units
        return np.einsum("li,ljk->ijk", self.star_matrix, self.structure_constants, optimize=True)

    @cached_property
    def unit_vec(self) -> np.ndarray:
        return self.to_vec(self.unit())

    def left_mult(self, a: "Element") -> np.ndarray:
        """Matrix of ``x -> a x`` on coordinates."""
        return np.einsum("i,ijk->kj", self.to_vec(a), self.structure_constants, optimize=True)

    def right_mult(self, a: "Element") -> np.ndarray:
        """Matrix of ``x -> x a`` on coordinates."""
        return np.einsum("j,ijk->ki", self.to_vec(a), self.structure_constants, optimize=True)

    def superop_of(self, fn) -> np.ndarray:
        """Matrix of a linear map ``Element -> Element`` in these coordinates."""
        n = self.total_dim
        s = np.zeros((n, n), complex)
        for k in range(n):
            s[:, k] = self.to_vec(fn(self.basis(k)))
        return s

    def hs_inner(self, a: "Element", b: "Element") -> complex:
        """Hilbert-Schmidt inner product tr(a* b)."""
        return complex(np.vdot(self.to_vec(a), self.to_vec(b)))


@dataclass(frozen=True, eq=False)
class Element:
    algebra: Algebra
    blocks: tuple

    def __post_init__(self):
        if len(self.blocks) != len(self.algebra.block_dims):
            raise ValueError("block count does not match the algebra")
        for b, d in zip(self.blocks, self.algebra.block_dims):
            if np.shape(b) != (d, d):
                raise ValueError(f"block of shape {np.shape(b)}, expected {(d, d)}")

    def _same(self, other: "Element"):
        if not self.algebra.same_as(other.algebra):
            raise AlgebraMismatch("elements of different algebras")

    def __add__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.algebra, tuple(x + y for x, y in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.algebra, tuple(x - y for x, y in zip(self.blocks, other.blocks)))

    def __neg__(self) -> "Element":
        return Element(self.algebra, tuple(-x for x in self.blocks))

    def __mul__(self, c) -> "Element":
        return Element(self.algebra, tuple(c * x for x in self.blocks))

    __rmul__ = __mul__

    def __truediv__(self, c) -> "Element":
        return Element(self.algebra, tuple(x / c for x in self.blocks))

    def __matmul__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.algebra, tuple(x @ y for x, y in zip(self.blocks, other.blocks)))

    def star(self) -> "Element":
        return Element(self.algebra, tuple(dagger(x) for x in self.blocks))

    def norm(self) -> float:
        """C*-norm: the largest operator norm over the blocks."""
        return max(float(np.linalg.norm(b, 2)) for b in self.blocks)

    def vec(self) -> np.ndarray:
        return self.algebra.to_vec(self)

    def dense(self) -> np.ndarray:
        return self.algebra.dense(self)

    def allclose(self, other: "Element", tol: float = 1e-9) -> bool:
        self._same(other)
        return all(fro(x - y) <= tol for x, y in zip(self.blocks, other.blocks))

    def __repr__(self):
        inner = ", ".join(np.array2string(b, precision=4, suppress_small=True) for b in self.blocks)
        return f"Element({self.algebra.block_dims}: {inner})"


def star(a: Element) -> Element:
    return a.star()


def random_element(algebra: Algebra, seed: int, hermitian: bool = False) -> Element:
    """Deterministic pseudo-random element with standard complex Gaussian entries."""
    rng = np.random.default_rng(seed)
    blocks = []
    for d in algebra.block_dims:
        b = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        if hermitian:
            b = (b + dagger(b)) / 2
        blocks.append(b)
    return Element(algebra, tuple(blocks))


# -- subspaces ---------------------------------------------------------------

Ambient = Union[Algebra, int]


@dataclass(frozen=True, eq=False)
class Subspace:
    """Linear subspace of an algebra or of the operators on C^m.

    ``basis`` holds Hilbert-Schmidt orthonormal coordinate vectors as columns;
    for operators on C^m the coordinates are the row-major flattening.
    """

    ambient: Ambient
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def ambient_dim(self) -> int:
        if isinstance(self.ambient, Algebra):
            return self.ambient.total_dim
        return self.ambient * self.ambient

    def coords(self, x) -> np.ndarray:
        if isinstance(self.ambient, Algebra):
            return self.ambient.to_vec(x)
        return np.asarray(x, dtype=complex).reshape(-1)

    def unflatten(self, v):
        if isinstance(self.ambient, Algebra):
            return self.ambient.from_vec(v)
        return np.asarray(v).reshape(self.ambient, self.ambient)

    def elements(self) -> list:
        return [self.unflatten(self.basis[:, k]) for k in range(self.dim)]

    def project(self, x):
        v = self.coords(x)
        return self.unflatten(self.basis @ (dagger(self.basis) @ v))

    def residual(self, x) -> float:
        v = self.coords(x)
        return float(np.linalg.norm(v - self.basis @ (dagger(self.basis) @ v)))

    def contains(self, x, tol: float = 1e-9) -> bool:
        """Relative membership test; vectors at roundoff level (the zero element) always belong."""
        v = self.coords(x)
        nv = float(np.linalg.norm(v))
        return nv <= 1e-12 or self.residual(x) <= tol * nv

    def contains_subspace(self, other: "Subspace", tol: float = 1e-9) -> bool:
        if other.dim == 0:
            return True
        rest = other.basis - self.basis @ (dagger(self.basis) @ other.basis)
        return fro(rest) <= tol * np.sqrt(other.dim)

    def is_full(self) -> bool:
        return self.dim == self.ambient_dim


def _as_dense_seed(seed: Sequence) -> tuple:
    """Return (matrices, algebra-or-None) for a seed of elements or matrices."""
    seed = list(seed)
    if not seed:
        raise ValueError("seed must be nonempty")
    if isinstance(seed[0], Element):
        alg = seed[0].algebra
        return [alg.dense(s) for s in seed], alg
    mats = [np.asarray(s, dtype=complex) for s in seed]
    m = mats[0].shape[0]
    if any(x.shape != (m, m) for x in mats):
        raise ValueError("all seed matrices must be square of the same size")
    return mats, None


def _dense_to_algebra_basis(alg: Algebra, basis_dense: np.ndarray) -> np.ndarray:
    d = alg.dense_dim
    cols = [alg.to_vec(alg.from_dense(basis_dense[:, k].reshape(d, d))) for k in range(basis_dense.shape[1])]
    if not cols:
        return np.zeros((alg.total_dim, 0), complex)
    return np.array(cols).T


def generated_star_algebra(seed: Sequence, tol: float = RANK_TOL) -> Subspace:
    """Smallest unital *-closed product-closed subspace containing ``seed``.

    Alternates span-closure with multiplication by the generators and their
    adjoints until the dimension stops growing.
    """
    mats, alg = _as_dense_seed(seed)
    m = mats[0].shape[0]
    gens = mats + [dagger(x) for x in mats]
    vecs = [np.eye(m, dtype=complex).reshape(-1)] + [g.reshape(-1) for g in gens]
    basis = orthonormalize(np.array(vecs).T, tol)
    for _ in range(m * m + 1):
        elems = [basis[:, k].reshape(m, m) for k in range(basis.shape[1])]
        prods = [(b @ g).reshape(-1) for b in elems for g in gens]
        new = orthonormalize(np.concatenate([basis, np.array(prods).T], axis=1), tol)
        if new.shape[1] == basis.shape[1]:
            basis = new
            break
        basis = new
    else:
        raise NoConvergence("generated *-algebra did not stabilise; check the tolerance")
    if alg is not None:
        return Subspace(alg, orthonormalize(_dense_to_algebra_basis(alg, basis), tol))
    return Subspace(m, basis)


def commutant(reps: Sequence, tol: float = 1e-9) -> Subspace:
    """All X on C^m with ``X A = A X`` for every ``A`` in ``reps``."""
    mats = [np.asarray(a, dtype=complex) for a in reps]
    if not mats:
        raise ValueError("need at least one operator")
    m = mats[0].shape[0]
    eye = np.eye(m)
    # row-major vec: vec(X A) = (I kron A^T) vec X, vec(A X) = (A kron I) vec X
    blocks = [np.kron(eye, a.T) - np.kron(a, eye) for a in mats]
    ker = null_space(np.vstack(blocks), tol)
    return Subspace(m, orthonormalize(ker) if ker.shape[1] else ker)


def double_commutant(reps: Sequence, tol: float = 1e-9) -> Subspace:
    first = commutant(reps, tol)
    return commutant(first.elements(), tol)
