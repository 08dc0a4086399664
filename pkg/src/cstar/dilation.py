"""Reversible dilation of a multiplicative C*-dynamical system.

For a homomorphism ``Phi`` with a phi-adjoint the truncated covariant GNS
representation collapses onto a finite space on which ``V_inf`` is unitary.
The dilated system is ``(B'', X -> V* X V, <Omega_inf, . Omega_inf>)`` with
the embedding ``i(pi_phi(a)) = pi_inf(a)`` and the conditional expectation
``E(X) = Z_0* X Z_0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from cstar.algebra import Element, Subspace, double_commutant, generated_star_algebra
from cstar.cgns import CgnsData, build_tower, cgns_operators
from cstar.channel import (LinearMap, UcpMap, compose, kadison_defect, multiplicative_domain,
                           power)
from cstar.errors import (BudgetExceeded, NoAdjoint, NotASection, NotFaithful,
                          NotMultiplicative, NotSeparating, ModularObstruction)
from cstar.gns import (State, WSystem, adjunction_residual, check_invariance, induce_w_system,
                       omega_cyclic_for_commutant, phi_adjoint)
from cstar.numerics import CHECK_TOL, dagger, fro, hermitize, orthonormalize
from cstar.report import Check, all_passed, check, flag


@dataclass(eq=False)
class DilationData:
    cgns: CgnsData
    adjoint: UcpMap
    wsystem: WSystem
    big_algebra: Subspace
    i_coeffs: np.ndarray  # column j: coefficients over pi_phi(x_l) of the j-th vn basis element

    @property
    def budget(self) -> int:
        return self.cgns.depth

    @property
    def ambient_dim(self) -> int:
        return self.cgns.ambient_dim

    def i_map(self, a: np.ndarray) -> np.ndarray:
        """Embedding of an operator in ``pi_phi(A)''`` into the ambient algebra."""
        c = self.i_coeffs @ self.wsystem.coords(a)
        return np.tensordot(c, self.cgns.pi_basis, axes=1)

    def E(self, x: np.ndarray) -> np.ndarray:
        z0 = self.cgns.Z[0]
        return dagger(z0) @ x @ z0

    def phi_hat(self, x: np.ndarray) -> complex:
        om = self.cgns.omega
        return complex(om.conj() @ x @ om)

    def _budget(self, k: int):
        if abs(k) > self.budget:
            raise BudgetExceeded(f"|k| = {abs(k)} exceeds the budget {self.budget}")

    def dynamics(self, x: np.ndarray, k: int = 1) -> np.ndarray:
        """``Phi_hat^k(X) = V*^k X V^k``; negative ``k`` uses the inverse automorphism."""
        self._budget(k)
        c = self.cgns
        if k >= 0:
            return c.vstar_power(k) @ x @ c.v_power(k)
        return c.v_power(-k) @ x @ c.vstar_power(-k)

    def partial(self, k: int, a: Element) -> np.ndarray:
        self._budget(k)
        return self.cgns.partial(k, a)

    @cached_property
    def big_basis(self) -> list:
        return self.big_algebra.elements()


def _budgeted_generators(c: CgnsData, budget: int) -> list:
    return [op for k in range(budget + 1) for op in c.partial_basis(k)]


def build_dilation(c: CgnsData, adj: UcpMap | None = None, tol: float = CHECK_TOL) -> DilationData:
    """Reversible dilation of a multiplicative system with a phi-adjoint."""
    t = c.tower
    phi, state, g = t.ucp, t.state, t.gns
    if not multiplicative_domain(phi, tol).is_full():
        raise NotMultiplicative("the dynamics is not a homomorphism")
    if not omega_cyclic_for_commutant(g):
        raise NotSeparating("Omega_phi is not cyclic for the commutant of pi_phi(A)")
    if adj is None:
        try:
            adj = phi_adjoint(phi, state, tol, g)
        except (ModularObstruction, NotFaithful) as exc:
            raise NoAdjoint(str(exc)) from exc
    else:
        adj = adj.on(t.algebra)
        res = adjunction_residual(phi, adj, state)
        if res > max(tol, 1e-9):
            raise NoAdjoint(f"supplied map is not a phi-adjoint (residual {res:.3e})")
    w = induce_w_system(g, t.transfer)
    gens = _budgeted_generators(c, c.depth)
    big = double_commutant(generated_star_algebra(gens).elements())
    reps = g.rep_basis.reshape(t.algebra.total_dim, -1).T
    targets = w.vn_basis.basis
    coeffs, *_ = np.linalg.lstsq(reps, targets, rcond=None)
    return DilationData(c, adj, w, big, coeffs)


def dilation_certificates(d: DilationData, tol: float = 1e-9) -> list:
    """Embedding, expectation and the three compatibility conditions of the dilation."""
    c = d.cgns
    g = c.gns
    alg = c.algebra
    w = d.wsystem
    vn = w.vn_basis.elements()
    out = []
    out.append(check("dilation.E_i", "E(i(A)) = A on pi_phi(A)''",
                     max(fro(d.E(d.i_map(a)) - a) for a in vn), tol, "E is a left inverse of i"))
    hom = 0.0
    for a in vn:
        ia = d.i_map(a)
        hom = max(hom, fro(d.i_map(dagger(a)) - dagger(ia)))
        for b in vn:
            hom = max(hom, fro(d.i_map(a @ b) - ia @ d.i_map(b)))
    out.append(check("dilation.i_homomorphism", "i(AB) = i(A) i(B), i(A*) = i(A)*", hom, tol,
                     "i is an injective *-homomorphism"))
    m = c.ambient_dim
    out.append(check("dilation.E_unital", "E(1) = 1", fro(d.E(np.eye(m)) - np.eye(g.dim)), tol,
                     "conditional expectation is unital"))
    big = d.big_basis
    pos = 0.0
    rng = np.random.default_rng(0)
    samples = big + [sum(complex(*rng.standard_normal(2)) * x for x in big) for _ in range(5)]
    for x in samples:
        e = d.E(dagger(x) @ x)
        pos = max(pos, -float(np.linalg.eigvalsh(hermitize(e)).min()))
    out.append(check("dilation.E_positive", "E(X* X) >= 0", max(pos, 0.0), tol, "conditional expectation is positive"))
    mod = 0.0
    st = 0.0
    for x in big:
        ex = d.E(x)
        for k in range(alg.total_dim):
            mod = max(mod, fro(d.E(c.pi_basis[k] @ x) - g.rep_basis[k] @ ex))
        st = max(st, abs(w.state_dot(ex) - d.phi_hat(x)))
    out.append(check("dilation.module", "E(pi_inf(a) X) = pi_phi(a) E(X)", mod, tol,
                     "module property of the conditional expectation"))
    out.append(check("dilation.state", "<Omega_phi, E(X) Omega_phi> = <Omega_inf, X Omega_inf>", st, tol,
                     "E preserves the state"))
    e1 = 0.0
    for k in range(d.budget + 1):
        adj_k = power(d.adjoint, k)
        for j, x in enumerate(alg.basis_elements()):
            lhs = d.E(d.partial(k, x))
            rhs = g.rep(adj_k(x))
            e1 = max(e1, fro(lhs - rhs))
    out.append(check("dilation.expectation_dynamics", "E(V^k pi_inf(a) V^k*) = pi_phi(Phi#^k(a)) for k <= budget", e1, tol,
                     "expectation of the dilated dynamics is the phi-adjoint"))
    return out


def verify_dilation_diagram(d: DilationData, n: int, tol: float = 1e-9) -> list:
    """``E(Phi_hat^n(i(A))) = Phi_dot^n(A)``, ``phi_hat o Phi_hat = phi_hat``, ``phi_hat = phi_dot o E``."""
    if n > d.budget:
        raise BudgetExceeded(f"n = {n} exceeds the budget {d.budget}")
    w = d.wsystem
    diag = max(fro(d.E(d.dynamics(d.i_map(a), n)) - w.apply(a, n)) for a in w.vn_basis.elements())
    inv = max(abs(d.phi_hat(d.dynamics(x, 1)) - d.phi_hat(x)) for x in d.big_basis) if d.budget else 0.0
    comp = max(abs(d.phi_hat(x) - w.state_dot(d.E(x))) for x in d.big_basis)
    return [
        check(f"diagram.dynamics[{n}]", f"E(Phi_hat^{n}(i(A))) = Phi_dot^{n}(A)", diag, tol,
              "dilation diagram commutes"),
        check("diagram.invariance", "phi_hat(Phi_hat(X)) = phi_hat(X)", inv, tol, "dilated state is invariant"),
        check("diagram.state", "phi_hat = phi_dot o E", comp, tol, "dilated state factors through E"),
    ]


def separating_value(d: DilationData, vector: np.ndarray | None = None) -> float:
    """Smallest singular value of ``X -> X xi`` on the dilated algebra (``xi = Omega_inf`` by default)."""
    xi = d.cgns.omega if vector is None else np.asarray(vector, complex)
    cols = np.array([x @ xi for x in d.big_basis]).T
    return float(np.linalg.svd(cols, compute_uv=False).min())


def non_separating_vector(d: DilationData) -> np.ndarray:
    """An eigenvector of a non-scalar Hermitian element: some nonzero ``X - lambda`` kills it."""
    m = d.ambient_dim
    eye = np.eye(m).reshape(-1)
    for x in d.big_basis:
        h = hermitize(x)
        hv = h.reshape(-1)
        if fro(hv - eye * (np.vdot(eye, hv) / m)) > 1e-6:
            return np.linalg.eigh(h)[1][:, 0]
        h = hermitize(1j * x)
        hv = h.reshape(-1)
        if fro(hv - eye * (np.vdot(eye, hv) / m)) > 1e-6:
            return np.linalg.eigh(h)[1][:, 0]
    raise ValueError("the dilated algebra is scalar; every nonzero vector separates it")


def minimality_and_separating(d: DilationData, vector: np.ndarray | None = None,
                              threshold: float = 1e-6) -> list:
    """Budgeted orbit of ``i(pi_phi(A))`` generates the dilated algebra; the vector separates it."""
    K = d.budget
    gens = [d.dynamics(d.i_map(a), k) for k in range(-K, K + 1) for a in d.wsystem.vn_basis.elements()]
    gen = double_commutant(generated_star_algebra(gens).elements())
    big = d.big_algebra
    same = gen.dim == big.dim and big.contains_subspace(gen, 1e-7)
    smin = separating_value(d, vector)
    return [
        flag("minimality.span", f"orbit of i(pi_phi(A)) generates the dilated algebra (dim {big.dim})", same,
             "minimal reversible dilation"),
        check("separating.min_singular", "1 / sigma_min of X -> X xi on the dilated algebra",
              1.0 / max(smin, 1e-300), 1.0 / threshold, "Omega_inf separates the dilated algebra"),
    ]


# -- right inverses ---------------------------------------------------------------------

@dataclass(eq=False)
class RightInverseReport:
    checks: list
    dilation: DilationData | None = None
    dilation_checks: list | None = None

    @property
    def passed(self) -> bool:
        return all_passed(self.checks) and (self.dilation_checks is None or all_passed(self.dilation_checks))


def section_residual(phi: LinearMap, psi: LinearMap) -> tuple:
    """Largest ``||Phi(Psi(x)) - x||`` over the basis and the basis index attaining it."""
    alg = phi.algebra
    psi = psi.on(alg)
    worst, arg = -1.0, 0
    for k, x in enumerate(alg.basis_elements()):
        r = (phi(psi(x)) - x).norm()
        if r > worst:
            worst, arg = r, k
    return worst, arg


def right_inverse_analyzer(phi: UcpMap, psi: UcpMap, state: State, depth: int = 2,
                           tol: float = CHECK_TOL) -> RightInverseReport:
    """Certify the consequences of ``Phi o Psi = id`` and dilate ``(A, Psi, phi)``."""
    alg = phi.algebra
    psi = psi.on(alg)
    state = state.on(alg)
    res, k = section_residual(phi, psi)
    if res > tol:
        raise NotASection(f"Phi(Psi(x)) != x: residual {res:.3e} at basis element {k}",
                          residual=res, witness=alg.basis(k))
    checks = [check("right_inverse.section", "Phi(Psi(a)) = a", res, tol, "Psi is a right inverse of Phi")]
    dom = multiplicative_domain(phi, tol)
    md = max(dom.residual(psi(x)) for x in alg.basis_elements())
    checks.append(check("right_inverse.in_domain", "Psi(a) lies in D_Phi", md, tol * 10,
                        "range of a right inverse lies in the multiplicative domain"))
    kd = max(kadison_defect(phi, psi(x)).norm() for x in alg.basis_elements())
    checks.append(check("right_inverse.kadison", "Phi(Psi(a)* Psi(a)) - Phi(Psi(a))* Phi(Psi(a)) = 0", kd, tol * 10,
                        "Kadison defect vanishes on the range of Psi"))
    checks.append(check("right_inverse.adjunction", "phi(a Psi(b)) = phi(Phi(a) b)",
                        adjunction_residual(phi, psi, state), tol, "Psi is the phi-adjoint of Phi"))
    checks.append(check("right_inverse.invariance", "phi o Psi = phi", check_invariance(psi, state, tol).residual, tol,
                        "Psi preserves the state"))
    smin = float(np.linalg.svd(psi.superop, compute_uv=False).min())
    checks.append(check("right_inverse.invertible", "1 / sigma_min of the superoperator of Psi",
                        1.0 / max(smin, 1e-300), 1e8, "a ucp section is bijective at finite dimension"))
    if state.faithful:
        mult = alg.structure_constants
        s = psi.superop
        hom = 0.0
        xs = alg.basis_elements()
        for i, x in enumerate(xs):
            for j, y in enumerate(xs):
                hom = max(hom, (psi(x @ y) - psi(x) @ psi(y)).norm())
        checks.append(check("right_inverse.homomorphism", "Psi(ab) = Psi(a) Psi(b)", hom, tol,
                            "faithful state forces Psi to be a homomorphism"))
    out = RightInverseReport(checks)
    if all_passed(checks):
        c = cgns_operators(build_tower(psi, state, depth))
        d = build_dilation(c, adj=phi, tol=tol)
        out.dilation = d
        out.dilation_checks = dilation_certificates(d) + verify_dilation_diagram(d, d.budget) \
            + minimality_and_separating(d)
    return out
