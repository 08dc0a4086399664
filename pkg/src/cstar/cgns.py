"""Iterated Stinespring tower and its depth-N truncated inductive limit.

Level 0 is the GNS space ``L_0 = H_phi`` with ``sigma_0 = pi_phi``.  Level
``n + 1`` is the Stinespring space of ``Phi_n(a) = sigma_n(Phi(a))``, with
isometries ``V_n`` (Stinespring) and ``Lambda_n`` (``a (x) psi -> a (x)
Lambda_{n-1} psi``) from ``L_n`` into ``L_{n+1}``.  ``Lambda_{-1}`` is the
map ``1 -> Omega`` from C into ``H_phi``, which makes the recursion uniform.

The truncated limit lives on ``L_N``: ``Z_n = Xi_{N,n}``, ``pi_inf = sigma_N``
and the isometry ``V_inf`` is represented by ``V_{N-1} Lambda_{N-1}*``, which
agrees with the true dilation on the range of ``Z_{N-1}``.  Its adjoint
``Lambda_{N-1} V_{N-1}*`` is correct on all of ``L_N``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.linalg import qr

from cstar.algebra import Algebra, Element, Subspace
from cstar.channel import UcpMap, multiplicative_domain, multiplicative_domain_of
from cstar.errors import (BudgetExceeded, DimensionCap, IllDefined, NotEquivalent,
                          NotInvariant, PreconditionFailed)
from cstar.gns import (GnsData, State, check_invariance, gns_construct,
                       omega_cyclic_for_commutant, transfer_contraction)
from cstar.numerics import (CHECK_TOL, RANK_TOL, dagger, fro, null_space, op_norm,
                            orthonormalize, rank)
from cstar.report import Check, check, flag
from cstar.stinespring import (StinespringData, induced_isometry,
                               induced_isometry_residual, stinespring)

DEFAULT_CAP = 8192


@dataclass(frozen=True, eq=False)
class TowerLevel:
    index: int
    dim: int
    sigma_basis: np.ndarray  # (n_alg, dim, dim)
    lift: np.ndarray  # ambient lift of the orthonormal coordinates
    reducer: np.ndarray
    V: np.ndarray | None = None  # L_n -> L_{n+1}
    Lambda: np.ndarray | None = None  # L_n -> L_{n+1}
    stinespring: StinespringData | None = None  # dilation producing L_{n+1}


@dataclass(eq=False)
class Tower:
    algebra: Algebra
    ucp: UcpMap
    state: State
    gns: GnsData
    transfer: np.ndarray
    levels: list = field(default_factory=list)
    cap: int = DEFAULT_CAP
    tol: float = RANK_TOL
    rng: np.random.Generator | None = None

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def dims(self) -> list:
        return [lv.dim for lv in self.levels]

    def sigma(self, n: int, a: Element) -> np.ndarray:
        return np.tensordot(self.algebra.to_vec(a), self.levels[n].sigma_basis, axes=1)

    def phi_images(self, n: int) -> np.ndarray:
        """``Phi_n(x_k) = sigma_n(Phi(x_k))`` for every basis element."""
        return np.einsum("lk,lab->kab", self.ucp.superop, self.levels[n].sigma_basis, optimize=True)

    def V(self, n: int) -> np.ndarray:
        return self.levels[n].V

    def Lam(self, n: int) -> np.ndarray:
        return self.levels[n].Lambda

    def xi(self, n: int, m: int) -> np.ndarray:
        """``Xi_{n,m} = Lambda_{n-1} ... Lambda_m`` for ``m <= n``."""
        if m > n:
            raise ValueError("Xi_{n,m} needs m <= n")
        key = (n, m)
        cache = self.__dict__.setdefault("_xi_cache", {})
        if key not in cache:
            out = np.eye(self.levels[m].dim, dtype=complex)
            for k in range(m, n):
                out = self.levels[k].Lambda @ out
            cache[key] = out
        return cache[key]

    def deepen(self, extra: int = 1) -> "Tower":
        """Append ``extra`` levels in place and return the tower."""
        for _ in range(extra):
            self._add_level()
        self.__dict__.pop("_xi_cache", None)
        return self

    def _add_level(self):
        n = self.depth
        cur = self.levels[n]
        projected = self.algebra.total_dim * cur.dim
        if projected > self.cap:
            raise DimensionCap(f"level {n + 1} could reach dimension {projected} > cap {self.cap}")
        s = stinespring(self.algebra, self.phi_images(n), self.tol, rng=self.rng)
        prev = self.gns.omega[:, None] if n == 0 else self.levels[n - 1].Lambda
        ill = induced_isometry_residual_from(s, cur, prev)
        if ill > 1e-8:
            raise IllDefined(f"Lambda_{n} is not well defined (residual {ill:.3e})")
        lam = induced_isometry(s, cur.lift, prev)
        self.levels[n] = TowerLevel(cur.index, cur.dim, cur.sigma_basis, cur.lift, cur.reducer,
                                    s.V, lam, s)
        self.levels.append(TowerLevel(n + 1, s.dilation_dim, s.sigma_basis, s.coords.lift,
                                      s.coords.reducer))


def induced_isometry_residual_from(s: StinespringData, cur: TowerLevel, prev: np.ndarray) -> float:
    n = s.algebra.total_dim
    amb = np.kron(np.eye(n), prev)
    defect = np.eye(cur.lift.shape[0]) - cur.lift @ cur.reducer
    return fro(s.coords.reducer @ amb @ defect)


def build_tower(ucp: UcpMap, state: State, depth: int, tol: float = RANK_TOL,
                cap: int = DEFAULT_CAP, rng: np.random.Generator | None = None,
                algebra: Algebra | None = None) -> Tower:
    """Build levels ``L_0 .. L_depth`` of the Stinespring tower."""
    if depth < 1:
        raise ValueError("depth must be at least 1")
    algebra = algebra or ucp.algebra
    ucp = ucp.on(algebra)
    state = state.on(algebra)
    inv = check_invariance(ucp, state)
    if not inv.passed:
        raise NotInvariant(f"phi o Phi != phi (residual {inv.residual:.3e})")
    g = gns_construct(algebra, state, tol, rng)
    u = transfer_contraction(g, ucp, state)
    lv0 = TowerLevel(0, g.dim, g.rep_basis, g.lift, g.reducer)
    t = Tower(algebra, ucp, state, g, u, [lv0], cap, tol, rng)
    return t.deepen(depth)


# -- tower certificates -------------------------------------------------------------

def tower_certificates(t: Tower, tol: float = 1e-9) -> list:
    """Residuals of every tower relation at every level."""
    N = t.depth
    nb = t.algebra.total_dim
    sig = [lv.sigma_basis for lv in t.levels]
    out = []

    def worst(fn):
        return max((fn(k) for k in range(nb)), default=0.0)

    for n in range(N):
        V, L = t.V(n), t.Lam(n)
        img = t.phi_images(n)
        out.append(check(f"tower.stine[{n}]", f"Phi_{n}(a) = V_{n}* sigma_{n + 1}(a) V_{n}",
                         worst(lambda k: fro(img[k] - dagger(V) @ sig[n + 1][k] @ V)), tol,
                         "Stinespring factorization at each level"))
        out.append(check(f"tower.V_isometry[{n}]", f"V_{n}* V_{n} = 1",
                         fro(dagger(V) @ V - np.eye(V.shape[1])), tol, "V_n is an isometry"))
        out.append(check(f"tower.Lambda_isometry[{n}]", f"Lambda_{n}* Lambda_{n} = 1",
                         fro(dagger(L) @ L - np.eye(L.shape[1])), tol, "Lambda_n is an isometry"))
    for n in range(1, N + 1):
        L = t.Lam(n - 1)
        out.append(check(f"tower.lambda_intertwines[{n}]", f"sigma_{n}(a) Lambda_{n - 1} = Lambda_{n - 1} sigma_{n - 1}(a)",
                         worst(lambda k: fro(sig[n][k] @ L - L @ sig[n - 1][k])), tol,
                         "Lambda intertwines consecutive representations"))
        out.append(check(f"tower.lambda_compression[{n}]", f"Lambda_{n - 1}* sigma_{n}(a) Lambda_{n - 1} = sigma_{n - 1}(a)",
                         worst(lambda k: fro(dagger(L) @ sig[n][k] @ L - sig[n - 1][k])), tol,
                         "compression by Lambda recovers the previous representation"))
    for n in range(1, N):
        out.append(check(f"tower.square[{n}]", f"V_{n} Lambda_{n - 1} = Lambda_{n} V_{n - 1}",
                         fro(t.V(n) @ t.Lam(n - 1) - t.Lam(n) @ t.V(n - 1)), tol,
                         "the tower diagram commutes"))
        out.append(check(f"tower.adjoint_square[{n}]", f"Lambda_{n - 1} V_{n - 1}* = V_{n}* Lambda_{n}",
                         fro(t.Lam(n - 1) @ dagger(t.V(n - 1)) - dagger(t.V(n)) @ t.Lam(n)), tol,
                         "adjoint square of the tower diagram"))
    comp = 0.0
    xi_iso = 0.0
    for n in range(N + 1):
        for m in range(n + 1):
            x = t.xi(n, m)
            xi_iso = max(xi_iso, fro(dagger(x) @ x - np.eye(x.shape[1])))
            for h in range(m + 1):
                comp = max(comp, fro(x @ t.xi(m, h) - t.xi(n, h)))
    out.append(check("tower.xi_composition", "Xi_{n,m} Xi_{m,h} = Xi_{n,h}", comp, tol,
                     "directed system of Hilbert spaces"))
    out.append(check("tower.xi_isometry", "Xi_{n,m}* Xi_{n,m} = 1", xi_iso, tol,
                     "connecting maps are isometries"))
    e = f = g = 0.0
    for n in range(N + 1):
        for m in range(n + 1):
            x = t.xi(n, m)
            e = max(e, worst(lambda k: fro(sig[n][k] @ x - x @ sig[m][k])))
            if n < N:
                f = max(f, fro(t.V(n) @ x - t.xi(n + 1, m + 1) @ t.V(m)))
    for n in range(N):
        for m in range(1, n + 2):
            g = max(g, fro(dagger(t.V(n)) @ t.xi(n + 1, m) - t.xi(n, m - 1) @ dagger(t.V(m - 1))))
    out.append(check("tower.xi_intertwines", "sigma_n(a) Xi_{n,m} = Xi_{n,m} sigma_m(a)", e, tol,
                     "connecting maps intertwine the representations"))
    out.append(check("tower.xi_V", "V_n Xi_{n,m} = Xi_{n+1,m+1} V_m", f, tol,
                     "V commutes with the directed system"))
    out.append(check("tower.xi_Vstar", "V_n* Xi_{n+1,m} = Xi_{n,m-1} V_{m-1}*", g, tol,
                     "adjoint compatibility of V with the directed system"))
    return out


def md_nesting_certificates(t: Tower, tol: float = CHECK_TOL) -> list:
    """The multiplicative domain of ``Phi`` sits inside that of every ``Phi_n``."""
    d = multiplicative_domain(t.ucp, tol)
    out = []
    for n in range(t.depth + 1):
        dn = multiplicative_domain_of(t.algebra, t.phi_images(n), tol)
        out.append(flag(f"tower.md_nesting[{n}]", f"D_Phi is contained in D_Phi_{n}",
                        dn.contains_subspace(d, 1e-7), "multiplicative domain is the intersection over levels"))
    return out


# -- truncated inductive limit ----------------------------------------------------------

@dataclass(eq=False)
class CgnsData:
    """Depth-N truncation of the covariant GNS representation."""

    tower: Tower

    @property
    def depth(self) -> int:
        return self.tower.depth

    @property
    def ambient_dim(self) -> int:
        return self.tower.levels[-1].dim

    @property
    def algebra(self) -> Algebra:
        return self.tower.algebra

    @property
    def gns(self) -> GnsData:
        return self.tower.gns

    @property
    def U(self) -> np.ndarray:
        return self.tower.transfer

    @cached_property
    def Z(self) -> list:
        N = self.depth
        return [self.tower.xi(N, n) for n in range(N + 1)]

    @property
    def pi_basis(self) -> np.ndarray:
        return self.tower.levels[-1].sigma_basis

    def pi(self, a: Element) -> np.ndarray:
        return self.tower.sigma(self.depth, a)

    @cached_property
    def omega(self) -> np.ndarray:
        return self.Z[0] @ self.gns.omega

    @cached_property
    def V(self) -> np.ndarray:
        """``V_inf`` on ``L_N``; exact on the range of ``Z_{N-1}`` (everywhere when collapsed)."""
        N = self.depth
        return self.tower.V(N - 1) @ dagger(self.tower.Lam(N - 1))

    @cached_property
    def Vstar(self) -> np.ndarray:
        """``V_inf*``, exact on all of ``L_N``."""
        N = self.depth
        return self.tower.Lam(N - 1) @ dagger(self.tower.V(N - 1))

    @cached_property
    def collapsed(self) -> bool:
        """True when ``Lambda_{N-1}`` is unitary, so ``L_N`` already is the whole limit."""
        lam = self.tower.Lam(self.depth - 1)
        return lam.shape[0] == lam.shape[1] and fro(lam @ dagger(lam) - np.eye(lam.shape[0])) < 1e-8

    @property
    def budget(self) -> int | None:
        """How many applications of ``V_inf`` starting from ``Z_0`` stay exact (``None``: unbounded)."""
        return None if self.collapsed else self.depth

    def require(self, k: int):
        if self.budget is not None and k > self.budget:
            raise BudgetExceeded(f"{k} applications of V_inf need depth {k}, tower has {self.budget}")

    def v_power(self, k: int) -> np.ndarray:
        """``V_inf^k``; exact on ``Z_n`` ranges with ``n + k <= N``."""
        return np.linalg.matrix_power(self.V, k)

    def vstar_power(self, k: int) -> np.ndarray:
        return np.linalg.matrix_power(self.Vstar, k)

    def partial(self, k: int, a: Element) -> np.ndarray:
        """``d_k(a) = V^k pi(a) V^{k*}``, exact on all of ``L_N`` for ``k <= N``."""
        self.require(k)
        return self.v_power(k) @ self.pi(a) @ self.vstar_power(k)

    def partial_basis(self, k: int) -> np.ndarray:
        self.require(k)
        vk, vsk = self.v_power(k), self.vstar_power(k)
        return vk @ self.pi_basis @ vsk


def cgns_operators(t: Tower) -> CgnsData:
    return CgnsData(t)


def verify_cgns(c: CgnsData, tol: float = 1e-9, domain: Subspace | None = None) -> list:
    """Residual table for the covariant GNS representation at truncation."""
    N = c.depth
    t = c.tower
    g = c.gns
    Z = c.Z
    U = c.U
    V, Vs = c.V, c.Vstar
    pib = c.pi_basis
    nb = c.algebra.total_dim
    out = []
    # alpha, beta, gamma
    out.append(check("cgns.Z0_isometry", "Z_0* Z_0 = 1", fro(dagger(Z[0]) @ Z[0] - np.eye(g.dim)), tol,
                     "H_phi embeds isometrically"))
    out.append(check("cgns.pi_Z0", "pi_inf(a) Z_0 = Z_0 pi_phi(a)",
                     max(fro(pib[k] @ Z[0] - Z[0] @ g.rep_basis[k]) for k in range(nb)), tol,
                     "pi_inf extends the GNS representation"))
    out.append(check("cgns.omega", "Omega_inf = Z_0 Omega_phi", fro(c.omega - Z[0] @ g.omega), tol,
                     "Omega_inf is the image of Omega_phi"))
    # embeddings
    zz = 0.0
    zxi = 0.0
    for n in range(N + 1):
        for m in range(N + 1):
            want = t.xi(n, m) if m <= n else dagger(t.xi(m, n))
            zz = max(zz, fro(dagger(Z[n]) @ Z[m] - want))
            if m <= n:
                zxi = max(zxi, fro(Z[n] @ t.xi(n, m) - Z[m]))
    out.append(check("cgns.Z_star_Z", "Z_n* Z_m = Xi_{n,m} or Xi_{m,n}*", zz, tol, "embedding maps of the limit"))
    out.append(check("cgns.Z_Xi", "Z_n Xi_{n,m} = Z_m", zxi, tol, "embedding maps are compatible"))
    # compatibility of the limit operators with each level
    h = max(fro(pib[k] @ Z[n] - Z[n] @ t.levels[n].sigma_basis[k]) for n in range(N + 1) for k in range(nb))
    i = max((fro(V @ Z[n] - Z[n + 1] @ t.V(n)) for n in range(N)), default=0.0)
    ll = max((fro(Vs @ Z[n] - Z[n - 1] @ dagger(t.V(n - 1))) for n in range(1, N + 1)), default=0.0)
    out.append(check("cgns.pi_Z", "pi_inf(a) Z_n = Z_n sigma_n(a)", h, tol, "pi_inf extends each sigma_n"))
    out.append(check("cgns.V_Z", "V_inf Z_n = Z_{n+1} V_n", i, tol, "V_inf extends each V_n"))
    out.append(check("cgns.Vstar_Z", "V_inf* Z_n = Z_{n-1} V_{n-1}*", ll, tol, "V_inf* extends each V_n*"))
    out.append(check("cgns.Vstar_Z0", "V_inf* Z_0 = Z_0 U", fro(Vs @ Z[0] - Z[0] @ U), tol,
                     "adjoint of V_inf on the GNS range"))
    dil = 0.0
    for k in range(N + 1):
        uk = np.linalg.matrix_power(dagger(U), k)
        dil = max(dil, fro(uk - dagger(Z[0]) @ c.v_power(k) @ Z[0]))
    out.append(check("cgns.dilation", "U^k* = Z_0* V_inf^k Z_0 for k <= N", dil, tol,
                     "V_inf is an isometry dilation of U*"))
    out.append(check("cgns.fixed_omega", "V_inf Omega_inf = Omega_inf", fro(V @ c.omega - c.omega), tol,
                     "Omega_inf is fixed by V_inf"))
    zt = Z[N - 1]
    phib = np.einsum("lk,lab->kab", t.ucp.superop, pib, optimize=True)
    cov = max(fro((phib[k] - Vs @ pib[k] @ V) @ zt) for k in range(nb))
    out.append(check("cgns.covariance", "pi_inf(Phi(a)) = V_inf* pi_inf(a) V_inf on the range of Z_{N-1}",
                     cov, tol, "covariance of pi_inf"))
    f = c.tower.state.functional
    rep = float(np.max(np.abs((pib @ c.omega) @ c.omega.conj() - f)))
    out.append(check("cgns.state", "<Omega_inf, pi_inf(a) Omega_inf> = phi(a)", rep, tol,
                     "Omega_inf reproduces the state"))
    # range projection of V_inf on the multiplicative domain
    d = domain if domain is not None else multiplicative_domain(t.ucp)
    p = c.tower.V(N - 1) @ dagger(c.tower.V(N - 1))
    rb1 = rb2 = 0.0
    for x in d.elements():
        px = c.pi(x)
        pfx = c.pi(t.ucp(x))
        rb1 = max(rb1, fro(p @ px - px @ p))
        rb2 = max(rb2, fro(Vs @ px - pfx @ Vs))
    out.append(check("cgns.md_range", "V V* commutes with pi_inf(D_Phi)", rb1, tol,
                     "range projection of V_inf lies in the commutant of the multiplicative domain"))
    out.append(check("cgns.md_adjoint", "V* pi_inf(x) = pi_inf(Phi(x)) V* on D_Phi", rb2, tol,
                     "V_inf* intertwines on the multiplicative domain"))
    return out


def cyclic_span_dimension(c: CgnsData, n: int, tol: float = 1e-9) -> int:
    """Dimension of the span of ``d_0(a_0) ... d_n(a_n) Omega_inf`` over basis elements."""
    if n > c.depth:
        raise BudgetExceeded(f"span at level {n} needs depth {n}, tower has {c.depth}")
    span = c.omega[:, None]
    for k in range(n, -1, -1):
        ops = c.partial_basis(k)
        cand = np.concatenate([op @ span for op in ops], axis=1)
        span = orthonormalize(cand, tol)
    return span.shape[1]


def _independent_words(c1: CgnsData, c2: CgnsData, tol: float):
    """Matching generating vectors of both limits: same words, independent in the first."""
    v1 = c1.omega[:, None]
    v2 = c2.omega[:, None]
    N = c1.depth
    for k in range(N, -1, -1):
        o1 = c1.partial_basis(k)
        alg1 = c1.algebra
        # same abstract element in the second tower's coordinates
        o2 = np.array([c2.partial(k, alg1.basis(j)) for j in range(alg1.total_dim)])
        cand1 = np.concatenate([op @ v1 for op in o1], axis=1)
        cand2 = np.concatenate([op @ v2 for op in o2], axis=1)
        _, r, piv = qr(cand1, mode="economic", pivoting=True)
        diag = np.abs(np.diag(r))
        keep = piv[: int(np.sum(diag > tol * max(diag[0], 1e-300)))]
        v1, v2 = cand1[:, keep], cand2[:, keep]
    return v1, v2


@dataclass(frozen=True, eq=False)
class Equivalence:
    W: np.ndarray
    checks: list


def unitary_equivalence(c1: CgnsData, c2: CgnsData, tol: float = 1e-8) -> Equivalence:
    """Unitary ``W`` matching the generating vectors of two truncated limits."""
    if c1.depth != c2.depth or not c1.algebra.same_as(c2.algebra):
        raise NotEquivalent("towers of different depth or algebra")
    if c1.ambient_dim != c2.ambient_dim:
        raise NotEquivalent(f"ambient dimensions {c1.ambient_dim} != {c2.ambient_dim}")
    m1, m2 = _independent_words(c1, c2, 1e-9)
    if m1.shape[1] != c1.ambient_dim:
        raise NotEquivalent("generating vectors do not span the first ambient space")
    w = m2 @ np.linalg.pinv(m1)
    alg = c1.algebra
    N = c1.depth
    unit = fro(dagger(w) @ w - np.eye(w.shape[0]))
    inter = max(fro(w @ c1.pi(x) - c2.pi(x) @ w) for x in alg.basis_elements())
    om = fro(w @ c1.omega - c2.omega)
    z = c1.Z[N - 1]
    vv = fro((w @ c1.V - c2.V @ w) @ z)
    vs = fro(w @ c1.Vstar - c2.Vstar @ w)
    checks = [
        check("equiv.unitary", "W* W = 1", unit, tol, "uniqueness up to unitary equivalence"),
        check("equiv.pi", "W pi1(a) = pi2(a) W", inter, tol, "W intertwines the representations"),
        check("equiv.omega", "W Omega1 = Omega2", om, tol, "W maps the cyclic vectors"),
        check("equiv.V", "W V1 = V2 W on the range of Z_{N-1}", vv, tol, "W intertwines the isometries"),
        check("equiv.Vstar", "W V1* = V2* W", vs, tol, "W intertwines the adjoint isometries"),
    ]
    bad = [x for x in checks if not x.passed]
    if bad:
        raise NotEquivalent("; ".join(f"{x.id} residual {x.residual:.3e}" for x in bad))
    return Equivalence(w, checks)


# -- multiplicative dynamics ------------------------------------------------------------

def _kernel_of_rep(basis: np.ndarray, tol: float) -> np.ndarray:
    n = basis.shape[0]
    return null_space(basis.reshape(n, -1).T, tol)


def norm_compare(c: CgnsData, a: Element, tol: float = CHECK_TOL) -> tuple:
    """``(||pi_inf(a)||, ||pi_phi(a)||)`` for multiplicative dynamics."""
    _require_multiplicative_cyclic(c, tol)
    return op_norm(c.pi(a)), op_norm(c.gns.rep(a))


def _require_multiplicative_cyclic(c: CgnsData, tol: float):
    if not multiplicative_domain(c.tower.ucp, tol).is_full():
        raise PreconditionFailed("the dynamics is not multiplicative")
    if not omega_cyclic_for_commutant(c.gns):
        raise PreconditionFailed("Omega_phi is not cyclic for the commutant of pi_phi(A)")


def multiplicative_limit_certificates(c: CgnsData, samples: Sequence[Element] = (), tol: float = 1e-9) -> list:
    """Kernels agree, Omega_inf separates pi_inf(A), and norms agree."""
    _require_multiplicative_cyclic(c, tol)
    alg = c.algebra
    k_inf = _kernel_of_rep(c.pi_basis, 1e-9)
    k_phi = _kernel_of_rep(c.gns.rep_basis, 1e-9)
    same = k_inf.shape[1] == k_phi.shape[1] and (
        k_inf.shape[1] == 0 or fro(k_inf @ dagger(k_inf) - k_phi @ dagger(k_phi)) < 1e-7)
    # Omega_inf separates the algebra pi_inf(A)
    span = orthonormalize(c.pi_basis.reshape(alg.total_dim, -1).T, 1e-10)
    m = c.ambient_dim
    vecs = np.array([span[:, j].reshape(m, m) @ c.omega for j in range(span.shape[1])]).T
    smin = float(np.linalg.svd(vecs, compute_uv=False).min()) if vecs.size else 0.0
    elems = list(alg.basis_elements()) + list(samples)
    gap = max(abs(op_norm(c.pi(x)) - op_norm(c.gns.rep(x))) for x in elems)
    return [
        flag("mult_limit.kernel", "pi_inf(a) = 0 exactly when pi_phi(a) = 0", same,
             "representations share their kernel"),
        check("mult_limit.separating", "1 / sigma_min of X -> X Omega_inf on pi_inf(A)",
              1.0 / max(smin, 1e-300), 1e6, "Omega_inf is separating"),
        check("mult_limit.norm", "| ||pi_inf(a)|| - ||pi_phi(a)|| |", gap, tol, "norm equality"),
    ]


def unitary_dilation_certificates(c: CgnsData, tol: float = 1e-9) -> list:
    """Checks for multiplicative dynamics: unitary tower, minimal unitary dilation at truncation."""
    t = c.tower
    N = c.depth
    Z0 = c.Z[0]
    out = []
    vu = max(fro(t.V(n) @ dagger(t.V(n)) - np.eye(t.V(n).shape[0])) +
             abs(t.V(n).shape[0] - t.V(n).shape[1]) for n in range(N))
    out.append(check("unitary_dilation.V_unitary", "every V_n is unitary", vu, tol, "multiplicative dynamics gives unitary V_n"))
    iso = 0.0
    rng_eq = 0.0
    vecs = []
    for k in range(N + 1):
        vk = c.v_power(k) @ Z0
        vecs.append(vk)
        iso = max(iso, fro(dagger(vk) @ vk - np.eye(Z0.shape[1])))
        pk = vk @ dagger(vk)
        zk = c.Z[k]
        rng_eq = max(rng_eq, fro(pk - zk @ dagger(zk)))
    out.append(check("unitary_dilation.isometric_orbit", "||V^k Z_0 h|| = ||h||", iso, tol, "V_inf is isometric on the orbit"))
    out.append(check("unitary_dilation.range", "V^k Z_0 H_phi = Z_k L_k", rng_eq, tol * 10, "orbit of the GNS range"))
    full = rank(np.concatenate(vecs, axis=1), 1e-9) == c.ambient_dim
    out.append(flag("unitary_dilation.minimal", "ambient space is spanned by V^k Z_0 H_phi", full,
                    "minimal unitary dilation at truncation"))
    return out


def faithful_injectivity(c: CgnsData) -> Check:
    """For a faithful state ``pi_inf`` has trivial kernel."""
    k = _kernel_of_rep(c.pi_basis, 1e-9)
    return flag("cgns.faithful_injective", "pi_inf is injective", k.shape[1] == 0,
                "faithful state gives a faithful representation")
