"""States, GNS triples, the transfer contraction and modular theory.

GNS coordinates: the algebra modulo the left ideal ``{a : phi(a*a) = 0}``,
with an orthonormal basis produced by :func:`gram_quotient` from the Gram
matrix ``G[i, j] = phi(x_i* x_j)``.  In those coordinates

* ``embed(a) = T vec(a)`` is the class of ``a`` (that is, ``pi(a) Omega``),
* ``pi(a) = T L_a C*`` with ``L_a`` left multiplication on coordinates,
* ``U = T S C*`` is the transfer contraction of a map with superoperator ``S``,

where ``T`` and ``C`` are the reducer and coisometry of the quotient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.linalg import polar

from cstar.algebra import Algebra, Element, Subspace, commutant, double_commutant
from cstar.channel import LinearMap, UcpMap, trace_dual, verify_ucp
from cstar.errors import (CertificationError, DegenerateState, EquivalenceFailure,
                          InvalidState, ModularObstruction, NotCP, NotFaithful,
                          NotInvariant, NotSeparating, NotUnital)
from cstar.numerics import (CHECK_TOL, RANK_TOL, QuotientBasis, dagger, fro,
                            gram_quotient, herm_power, hermitize, op_norm, orthonormalize,
                            rank)
from cstar.report import Check, all_passed, check


@dataclass(frozen=True, eq=False)
class State:
    """``phi(a) = sum_i tr(rho_i a_i)`` for blockwise densities ``rho_i``."""

    algebra: Algebra
    densities: tuple
    tol: float = 1e-10

    def __post_init__(self):
        alg = self.algebra
        if len(self.densities) != len(alg.block_dims):
            raise InvalidState("one density per block is required")
        rhos = []
        for k, (r, d) in enumerate(zip(self.densities, alg.block_dims)):
            r = np.asarray(r, dtype=complex).reshape(d, d) if np.ndim(r) else np.array([[r]], complex)
            if r.shape != (d, d):
                raise InvalidState(f"density {k} has shape {r.shape}, expected {(d, d)}")
            if fro(r - dagger(r)) > self.tol * max(1.0, fro(r)):
                raise InvalidState(f"density {k} is not Hermitian")
            r = hermitize(r)
            low = float(np.linalg.eigvalsh(r).min())
            if low < -self.tol:
                raise InvalidState(f"density {k} is not positive semidefinite (eigenvalue {low:.3e})")
            rhos.append(r)
        total = sum(np.trace(r).real for r in rhos)
        if abs(total - 1) > max(self.tol, 1e-12) * 10:
            raise InvalidState(f"densities have total trace {total}, expected 1")
        object.__setattr__(self, "densities", tuple(rhos))

    @classmethod
    def tracial(cls, algebra: Algebra) -> "State":
        """Normalised trace of the dense representation: ``tr(a) / sum d_i``."""
        dd = algebra.dense_dim
        return cls(algebra, tuple(np.eye(d) / dd for d in algebra.block_dims))

    @classmethod
    def from_probabilities(cls, algebra: Algebra, p: Sequence[float]) -> "State":
        """State on C^n with point masses ``p``."""
        if not algebra.is_commutative:
            raise InvalidState("probability vectors describe states of C^n only")
        return cls(algebra, tuple(np.array([[x]], complex) for x in p))

    def __call__(self, a: Element) -> complex:
        return complex(sum(np.sum(r.T * b) for r, b in zip(self.densities, a.blocks)))

    @cached_property
    def functional(self) -> np.ndarray:
        """Row vector ``f`` with ``phi(a) = f . vec(a)``."""
        alg = self.algebra
        return np.array([self(alg.basis(k)) for k in range(alg.total_dim)])

    @property
    def density(self) -> Element:
        return Element(self.algebra, self.densities)

    @property
    def faithful(self) -> bool:
        return all(np.linalg.eigvalsh(r).min() > self.tol for r in self.densities)

    @property
    def support(self) -> Element:
        """Projection onto the support of every density."""
        blocks = []
        for r in self.densities:
            w, q = np.linalg.eigh(r)
            keep = q[:, w > self.tol]
            blocks.append(keep @ dagger(keep))
        return Element(self.algebra, tuple(blocks))

    def on(self, algebra: Algebra) -> "State":
        """The same state viewed on a reordered copy of its algebra."""
        if not algebra.same_as(self.algebra):
            raise InvalidState("cannot move a state to a different algebra")
        return State(algebra, self.densities, self.tol)


def check_invariance(phi_map: LinearMap, state: State, tol: float = CHECK_TOL) -> Check:
    """Largest ``|phi(Phi(a)) - phi(a)|`` over the basis."""
    f = state.functional
    s = phi_map.on(state.algebra).superop
    res = float(np.max(np.abs(f @ s - f))) if f.size else 0.0
    return check("invariance", "phi(Phi(a)) = phi(a) on the basis", res, tol,
                 "invariant state: phi o Phi = phi")


@dataclass(frozen=True, eq=False)
class GnsData:
    """GNS triple of a state in orthonormal quotient coordinates."""

    algebra: Algebra
    state: State
    quotient: QuotientBasis

    @property
    def dim(self) -> int:
        return self.quotient.rank

    @property
    def reducer(self) -> np.ndarray:
        return self.quotient.reducer

    @property
    def lift(self) -> np.ndarray:
        return self.quotient.lift

    def embed(self, a: Element) -> np.ndarray:
        """Coordinates of ``pi(a) Omega``."""
        return self.reducer @ self.algebra.to_vec(a)

    @cached_property
    def omega(self) -> np.ndarray:
        return self.reducer @ self.algebra.unit_vec

    def rep(self, a: Element) -> np.ndarray:
        return self.reducer @ self.algebra.left_mult(a) @ self.lift

    @cached_property
    def rep_basis(self) -> np.ndarray:
        """Array (n, dim, dim) of ``pi(x_k)``."""
        mult = self.algebra.structure_constants
        # L_{x_k}[l, j] = mult[k, j, l]
        lk = np.transpose(mult, (0, 2, 1))
        return self.reducer @ lk @ self.lift

    def rep_vec(self, v) -> np.ndarray:
        """``pi`` applied to the element with coordinates ``v``."""
        return np.tensordot(np.asarray(v, complex), self.rep_basis, axes=1)

    def well_defined_residual(self) -> float:
        """How far left multiplication is from preserving the null space."""
        n = self.algebra.total_dim
        defect = np.eye(n) - self.lift @ self.reducer
        return max((fro(self.reducer @ self.algebra.left_mult(x) @ defect)
                    for x in self.algebra.basis_elements()), default=0.0)

    def certificates(self, tol: float = 1e-10) -> list:
        alg = self.algebra
        f = self.state.functional
        reps = self.rep_basis
        om = self.omega
        repro = float(np.max(np.abs((reps @ om) @ om.conj() - f)))
        mult = alg.structure_constants
        prod = np.einsum("iab,jbc->ijac", reps, reps, optimize=True)
        target = np.einsum("ijk,kac->ijac", mult, reps, optimize=True)
        mres = fro(prod - target) / max(1, alg.total_dim)
        star = np.einsum("lk,lab->kab", alg.star_matrix, reps, optimize=True)
        sres = fro(star - dagger(reps))
        embeds = self.reducer
        cyc = rank(embeds, RANK_TOL) == self.dim
        return [
            check("gns.reproduction", "<Omega, pi(a) Omega> = phi(a)", repro, tol,
                  "GNS representation reproduces the state"),
            check("gns.multiplicative", "pi(ab) = pi(a) pi(b)", mres, tol * 10,
                  "GNS representation is multiplicative"),
            check("gns.star", "pi(a*) = pi(a)*", sres, tol * 10,
                  "GNS representation is *-preserving"),
            check("gns.well_defined", "left ideal is invariant under left multiplication",
                  self.well_defined_residual(), tol * 10, "GNS quotient by the left kernel"),
            Check("gns.cyclic", "{pi(a) Omega} spans the GNS space", 0.0 if cyc else 1.0, 0.5,
                  "Omega is cyclic for the GNS representation"),
        ]


def gns_construct(algebra: Algebra, state: State, tol: float = RANK_TOL,
                  rng: np.random.Generator | None = None, certify: bool = True) -> GnsData:
    """Build the GNS triple of ``state``.

    ``rng`` rotates the orthonormal basis of the GNS space (see
    :func:`gram_quotient`); all derived objects are covariant under it.
    """
    if not algebra.same_as(state.algebra):
        raise InvalidState("state lives on a different algebra")
    state = state.on(algebra)
    g0 = np.einsum("ijk,k->ij", algebra.adjoint_products, state.functional, optimize=True)
    q = gram_quotient(g0, tol, rng)
    if q.rank == 0:
        raise DegenerateState("the GNS space is zero-dimensional")
    g = GnsData(algebra, state, q)
    if certify:
        bad = [c for c in g.certificates() if not c.passed]
        if bad:
            raise CertificationError("; ".join(f"{c.id} residual {c.residual:.3e}" for c in bad))
    return g


# -- transfer contraction --------------------------------------------------------

def transfer_contraction(g: GnsData, phi_map: LinearMap, state: State | None = None,
                         tol: float = CHECK_TOL) -> np.ndarray:
    """Matrix of ``pi(a) Omega -> pi(Phi(a)) Omega`` on the GNS space."""
    state = state or g.state
    inv = check_invariance(phi_map, state, tol)
    if not inv.passed:
        raise NotInvariant(f"phi o Phi != phi (residual {inv.residual:.3e})")
    s = phi_map.on(g.algebra).superop
    t, c = g.reducer, g.lift
    u = t @ s @ c
    n = g.algebra.total_dim
    ill = fro(t @ s @ (np.eye(n) - c @ t))
    if ill > 1e-8:
        raise NotInvariant(f"Phi does not preserve the GNS null space (residual {ill:.3e})")
    if op_norm(u) > 1 + 1e-8:
        raise CertificationError(f"transfer operator has norm {op_norm(u):.6f} > 1")
    return u


def contraction_certificates(g: GnsData, phi_map: LinearMap, u: np.ndarray,
                             tol: float = 1e-10) -> list:
    t = g.reducer
    s = phi_map.on(g.algebra).superop
    eq = fro(u @ t - t @ s)
    return [
        check("transfer.intertwines", "U embed(a) = embed(Phi(a))", eq, tol,
              "transfer contraction U pi(a)Omega = pi(Phi(a))Omega"),
        check("transfer.norm", "||U|| - 1", max(0.0, op_norm(u) - 1), tol,
              "transfer operator is a contraction"),
        check("transfer.fixes_omega", "U Omega = Omega", fro(u @ g.omega - g.omega), tol,
              "Omega is fixed by the transfer contraction"),
    ]


# -- induced W*-system -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class WSystem:
    """Von Neumann algebra generated by the GNS representation, with induced dynamics."""

    gns: GnsData
    vn_basis: Subspace
    phi_dot: np.ndarray  # matrix on vn_basis coordinates
    transfer: np.ndarray

    @property
    def dim(self) -> int:
        return self.vn_basis.dim

    def coords(self, x: np.ndarray) -> np.ndarray:
        return dagger(self.vn_basis.basis) @ np.asarray(x, complex).reshape(-1)

    def operator(self, c) -> np.ndarray:
        m = self.gns.dim
        return (self.vn_basis.basis @ np.asarray(c, complex)).reshape(m, m)

    def apply(self, x: np.ndarray, power: int = 1) -> np.ndarray:
        """``Phi_dot^power(X)`` for ``X`` in the von Neumann algebra."""
        c = self.coords(x)
        return self.operator(np.linalg.matrix_power(self.phi_dot, power) @ c)

    def state_dot(self, x: np.ndarray) -> complex:
        om = self.gns.omega
        return complex(om.conj() @ np.asarray(x) @ om)

    def certificates(self, tol: float = 1e-10) -> list:
        om = self.gns.omega
        worst = 0.0
        for k, x in enumerate(self.vn_basis.elements()):
            y = self.operator(self.phi_dot[:, k])
            worst = max(worst, fro(y @ om - self.transfer @ x @ om))
        return [check("wsystem.dynamics", "Phi_dot(X) Omega = U X Omega", worst, tol,
                      "induced normal ucp map on the generated von Neumann algebra")]


def omega_cyclic_for_commutant(g: GnsData, tol: float = 1e-9) -> bool:
    reps = list(g.rep_basis)
    comm = commutant(reps, tol)
    vecs = np.array([x @ g.omega for x in comm.elements()]).T
    return rank(vecs, 1e-8) == g.dim


def induce_w_system(g: GnsData, u: np.ndarray, tol: float = 1e-9) -> WSystem:
    """Normal dynamics ``Phi_dot`` on ``pi(A)''`` defined by ``Phi_dot(X) Omega = U X Omega``."""
    if not omega_cyclic_for_commutant(g, tol):
        raise NotSeparating("Omega is not cyclic for the commutant, so it does not separate pi(A)''")
    reps = list(g.rep_basis)
    vn = double_commutant(reps, tol)
    om = g.omega
    xs = vn.elements()
    m = np.array([x @ om for x in xs]).T
    rhs = np.array([u @ x @ om for x in xs]).T
    coef, *_ = np.linalg.lstsq(m, rhs, rcond=None)
    res = fro(m @ coef - rhs)
    if res > 1e-8:
        raise CertificationError(f"induced dynamics does not exist (residual {res:.3e})")
    return WSystem(g, vn, coef, u)


# -- modular theory ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ModularPair:
    """Modular operator ``Delta`` and conjugation ``J xi = conj_unitary @ conj(xi)``."""

    delta: np.ndarray
    conj_unitary: np.ndarray

    def apply_j(self, xi) -> np.ndarray:
        return self.conj_unitary @ np.conj(np.asarray(xi, complex))

    def delta_power(self, z: complex) -> np.ndarray:
        return herm_power(self.delta, z)

    def j_matrix_conj(self, x: np.ndarray) -> np.ndarray:
        """``J X J`` for a complex-linear ``X``."""
        return self.conj_unitary @ np.conj(x) @ np.conj(self.conj_unitary)


def _modular_superops(g: GnsData):
    alg = g.algebra
    rho = g.state.density
    rho_inv = Element(alg, tuple(np.linalg.inv(r) for r in rho.blocks))
    rho_h = Element(alg, tuple(herm_power(r, 0.5) for r in rho.blocks))
    rho_mh = Element(alg, tuple(herm_power(r, -0.5) for r in rho.blocks))
    d = alg.superop_of(lambda a: rho @ a @ rho_inv)
    k = alg.superop_of(lambda a: rho_h @ a @ rho_mh)
    return d, k


def modular_pair(g: GnsData, tol: float = CHECK_TOL, certify: bool = True) -> ModularPair:
    """Closed form ``Delta a = rho a rho^-1``, ``J a = rho^1/2 a* rho^-1/2`` blockwise."""
    if not g.state.faithful:
        raise NotFaithful("modular theory is only built for faithful states")
    d, k = _modular_superops(g)
    t, c = g.reducer, g.lift
    delta = t @ d @ c
    ju = t @ k @ g.algebra.star_matrix @ np.conj(c)
    mp = ModularPair(delta, ju)
    if certify:
        bad = [x for x in modular_certificates(g, mp, tol) if not x.passed]
        if bad:
            raise CertificationError("; ".join(f"{x.id} residual {x.residual:.3e}" for x in bad))
    return mp


def modular_certificates(g: GnsData, mp: ModularPair, tol: float = CHECK_TOL) -> list:
    n = g.dim
    eye = np.eye(n)
    ju = mp.conj_unitary
    j2 = fro(ju @ np.conj(ju) - eye)
    jdj = fro(mp.j_matrix_conj(mp.delta) - np.linalg.inv(mp.delta))
    half = mp.delta_power(0.5)
    worst = 0.0
    for x in g.algebra.basis_elements():
        lhs = mp.apply_j(half @ g.embed(x))
        worst = max(worst, fro(lhs - g.embed(x.star())))
    return [
        check("modular.j_involution", "J^2 = 1", j2, tol, "modular conjugation is an involution"),
        check("modular.j_delta_j", "J Delta J = Delta^-1", jdj, tol, "modular relation J Delta J = Delta^-1"),
        check("modular.tomita", "J Delta^1/2 pi(a) Omega = pi(a*) Omega", worst, tol,
              "polar decomposition S = J Delta^1/2 of the Tomita map"),
    ]


def _realify_antilinear(a: np.ndarray) -> np.ndarray:
    """Real matrix of ``xi -> a conj(xi)`` acting on ``(Re xi, Im xi)``."""
    re, im = a.real, a.imag
    return np.block([[re, im], [im, -re]])


def modular_oracle(g: GnsData) -> ModularPair:
    """Independent computation of ``(Delta, J)`` from the polar decomposition of
    the realified Tomita map ``pi(a) Omega -> pi(a*) Omega``."""
    if not g.state.faithful:
        raise NotFaithful("modular theory is only built for faithful states")
    s_u = g.reducer @ g.algebra.star_matrix @ np.conj(g.lift)
    u, p = polar(_realify_antilinear(s_u), side="right")
    n = g.dim
    half = p[:n, :n] + 1j * p[n:, :n]
    ju = u[:n, :n] + 1j * u[n:, :n]
    return ModularPair(hermitize(half @ half), ju)


DEFAULT_T_SAMPLES = (0.5, 1.0, math.sqrt(2.0))


def modular_commutation_check(u: np.ndarray, mp: ModularPair,
                              t_samples: Sequence[float] = DEFAULT_T_SAMPLES,
                              tol: float = CHECK_TOL) -> list:
    """Residuals of ``U`` against ``Delta^it``, ``J`` and ``Delta`` itself."""
    out = []
    scale = max(1.0, op_norm(mp.delta))
    for t in t_samples:
        dit = mp.delta_power(1j * t)
        out.append(check(f"modular.commute.delta_it[{t:.4g}]", f"U Delta^it = Delta^it U at t={t:.4g}",
                         fro(u @ dit - dit @ u), tol, "U commutes with the modular group"))
    out.append(check("modular.commute.j", "U J = J U", fro(u @ mp.conj_unitary - mp.conj_unitary @ np.conj(u)),
                     tol, "U commutes with the modular conjugation"))
    out.append(check("modular.commute.delta", "U Delta = Delta U",
                     fro(u @ mp.delta - mp.delta @ u) / scale, tol,
                     "U commutes with the modular operator"))
    return out


# -- phi-adjoint -------------------------------------------------------------------

def adjoint_candidate(phi_map: LinearMap, state: State) -> LinearMap:
    """``b -> Phi*(b rho) rho^-1`` (blockwise), the only possible phi-adjoint."""
    alg = state.algebra
    phi_map = phi_map.on(alg)
    dual = trace_dual(phi_map)
    rho = state.density
    rho_inv = Element(alg, tuple(np.linalg.inv(r) for r in rho.blocks))
    return LinearMap(alg, alg.superop_of(lambda b: dual(b @ rho) @ rho_inv))


def adjunction_residual(phi_map: LinearMap, adj: LinearMap, state: State) -> float:
    """Largest ``|phi(a Phi#(b)) - phi(Phi(a) b)|`` over basis pairs."""
    alg = state.algebra
    f = state.functional
    mult = alg.structure_constants
    s = phi_map.on(alg).superop
    sa = adj.on(alg).superop
    # phi(x_i y) for y with coordinates v: f . mult[i, :, :]^T v
    pair = np.einsum("ijk,k->ij", mult, f, optimize=True)  # phi(x_i x_j)
    lhs = pair @ sa  # [i, b] = phi(x_i Phi#(x_b))
    rhs = s.T @ pair  # [a, b] = phi(Phi(x_a) x_b)
    return float(np.max(np.abs(lhs - rhs)))


def phi_adjoint(phi_map: UcpMap, state: State, tol: float = CHECK_TOL,
                g: GnsData | None = None) -> UcpMap:
    """The phi-adjoint ``Phi#`` with ``phi(a Phi#(b)) = phi(Phi(a) b)``.

    Raises :class:`ModularObstruction` when the candidate is not ucp.  When it is,
    the transfer contraction must commute with the modular operator; a failure
    there raises :class:`EquivalenceFailure`.
    """
    if not state.faithful:
        raise NotFaithful("the phi-adjoint is only built for faithful states")
    inv = check_invariance(phi_map, state, tol)
    if not inv.passed:
        raise NotInvariant(f"phi o Phi != phi (residual {inv.residual:.3e})")
    cand = adjoint_candidate(phi_map, state)
    try:
        adj = verify_ucp(cand, tol)
    except (NotCP, NotUnital) as exc:
        raise ModularObstruction(f"no phi-adjoint: {exc}") from exc
    g = g or gns_construct(state.algebra, state)
    u = transfer_contraction(g, phi_map, state, tol)
    mp = modular_pair(g, tol)
    comm = modular_commutation_check(u, mp, tol=max(tol, 1e-8))
    if not all_passed(comm):
        raise EquivalenceFailure("phi-adjoint exists but U does not commute with Delta")
    return adj


def adjoint_exists(phi_map: UcpMap, state: State, tol: float = CHECK_TOL) -> bool:
    try:
        phi_adjoint(phi_map, state, tol)
    except ModularObstruction:
        return False
    return True
