"""Ergodicity and weak mixing of ucp dynamics, and their transfer to dilations.

Classification is spectral: ergodic iff the fixed space of ``Phi`` is the
scalars; weakly mixing iff moreover 1 is the only eigenvalue on the unit
circle.  A brute-force Cesaro average over basis correlations serves as an
oracle.  Its resolution at horizon N is about ``1 / (N * gap)``, so instances
whose spectrum approaches the circle closer than ``RESOLUTION_FACTOR / N`` are
reported inconclusive instead of being cross-checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from cstar.algebra import Element, generated_star_algebra
from cstar.channel import LinearMap, UcpMap
from cstar.errors import BudgetExceeded, NotInvariant
from cstar.gns import State, check_invariance
from cstar.numerics import dagger, fro, null_space, op_norm, rank
from cstar.report import check, flag

PERIPHERAL_TOL = 1e-8
CESARO_N = 10_000
RESOLUTION_FACTOR = 100.0


def _require_invariant(phi: LinearMap, state: State):
    inv = check_invariance(phi, state)
    if not inv.passed:
        raise NotInvariant(f"phi o Phi != phi (residual {inv.residual:.3e})")


def correlation_sequence(phi: LinearMap, state: State, a: Element, b: Element, n: int) -> np.ndarray:
    """``c_k = phi(a Phi^k(b))`` for ``0 <= k <= n``."""
    alg = state.algebra
    phi = phi.on(alg)
    _require_invariant(phi, state)
    row = state.functional @ alg.left_mult(a)
    v = alg.to_vec(b)
    out = np.empty(n + 1, complex)
    for k in range(n + 1):
        out[k] = row @ v
        v = phi.superop @ v
    return out


@dataclass
class ErgodicReport:
    ergodic: bool
    weakly_mixing: bool
    fixed_space_dim: int
    peripheral_eigenvalues: list
    cesaro_residuals: list  # [plain average, absolute average] at the horizon
    cesaro_ergodic: bool | None = None
    cesaro_weakly_mixing: bool | None = None
    inconclusive: bool = False
    semisimple_peripheral: bool = True
    eigenvalues: list = field(default_factory=list)

    @property
    def agree(self) -> bool | None:
        """Spectral and Cesaro verdicts coincide (``None`` when inconclusive)."""
        if self.inconclusive:
            return None
        return self.ergodic == self.cesaro_ergodic and self.weakly_mixing == self.cesaro_weakly_mixing


def _cesaro(s: np.ndarray, pair: np.ndarray, f: np.ndarray, n: int) -> tuple:
    """Max over basis pairs of the plain and absolute Cesaro averages of centred correlations."""
    centred = np.outer(f, f)
    acc = np.zeros_like(pair)
    acc_abs = np.zeros(pair.shape)
    m = np.eye(s.shape[0], dtype=complex)
    for _ in range(n):
        c = pair @ m - centred
        acc += c
        acc_abs += np.abs(c)
        m = s @ m
    return float(np.abs(acc / n).max()), float((acc_abs / n).max())


def classify(phi: LinearMap, state: State, tol: float = PERIPHERAL_TOL, n: int = CESARO_N) -> ErgodicReport:
    alg = state.algebra
    phi = phi.on(alg)
    _require_invariant(phi, state)
    s = phi.superop
    dim = s.shape[0]
    w = np.linalg.eigvals(s)
    fixed = null_space(s - np.eye(dim), 1e-8).shape[1]
    periph = [complex(x) for x in w if abs(1 - abs(x)) <= tol]
    others = [x for x in periph if abs(x - 1) > tol]
    ergodic = fixed == 1
    weak = ergodic and not others
    semisimple = True
    for lam in periph:
        a = s - lam * np.eye(dim)
        if rank(a, 1e-8) != rank(a @ a, 1e-8):
            semisimple = False
    pair = np.einsum("ijk,k->ij", alg.structure_constants, state.functional, optimize=True)
    f = state.functional
    plain, absolute = _cesaro(s, pair, f, n)
    res = RESOLUTION_FACTOR / n
    near = [x for x in w if abs(x - 1) > tol and abs(x - 1) < res] + \
           [x for x in w if tol < 1 - abs(x) < res]
    return ErgodicReport(
        ergodic=ergodic, weakly_mixing=weak, fixed_space_dim=fixed,
        peripheral_eigenvalues=periph, cesaro_residuals=[plain, absolute],
        cesaro_ergodic=plain <= res, cesaro_weakly_mixing=absolute <= res,
        inconclusive=bool(near), semisimple_peripheral=semisimple,
        eigenvalues=[complex(x) for x in w])


def classification_checks(rep: ErgodicReport) -> list:
    out = [
        flag("ergodic.fixed_contains_unit", "fixed space contains the unit", rep.fixed_space_dim >= 1,
             "unit is always fixed"),
        flag("ergodic.mixing_implies_ergodic", "weak mixing implies ergodicity",
             rep.ergodic or not rep.weakly_mixing, "weak mixing is stronger than ergodicity"),
        flag("ergodic.semisimple", "peripheral eigenvalues have trivial Jordan blocks", rep.semisimple_peripheral,
             "peripheral spectrum of a ucp map with faithful invariant state is semisimple"),
    ]
    if not rep.inconclusive:
        out.append(flag("ergodic.cesaro_agrees", "spectral and Cesaro classifications agree", bool(rep.agree),
                        "ergodic and weakly mixing averages"))
    return out


# -- transfer to the dilation --------------------------------------------------------------

@dataclass
class TransferReport:
    checks: list
    dilated_cesaro: list  # [plain, absolute] over the horizon
    horizon: int


def dilation_transfer_check(d, samples: int = 4, horizon: int | None = None, tol: float = 1e-9,
                            seed: int = 0) -> TransferReport:
    """Certify the finite identities behind ergodicity transfer to the reversible dilation.

    (i) ``phi_hat(X Phi_hat^k(d_j(y))) = <Omega, E(X) pi(Phi^(k-j)(y)) Omega>`` for ``j <= k <= budget``;
    (ii) Cesaro averages of dilated correlations follow the original classification;
    (iii) approximating ``Y`` by ``Y_eps`` in the generated algebra perturbs correlations by at most ``2 eps ||X||``.
    """
    c = d.cgns
    g = c.gns
    t = c.tower
    alg = c.algebra
    K = d.budget
    rng = np.random.default_rng(seed)
    big = d.big_basis
    xs = [big[i] for i in rng.choice(len(big), size=min(samples, len(big)), replace=False)]
    ys = list(alg.basis_elements())
    red = 0.0
    for x in xs:
        ex = d.E(x)
        for y in ys:
            for j in range(K + 1):
                yj = d.partial(j, y)
                for k in range(j, K + 1):
                    lhs = d.phi_hat(x @ d.dynamics(yj, k))
                    pk = np.linalg.matrix_power(t.ucp.superop, k - j) @ alg.to_vec(y)
                    rhs = complex(g.omega.conj() @ ex @ g.rep_vec(pk) @ g.omega)
                    red = max(red, abs(lhs - rhs))
    checks = [check("transfer.reduction", "phi_hat(X Phi_hat^k(d_j(y))) = phi_dot(E(X) Phi_dot^(k-j)(pi(y)))",
                    red, tol, "reduction of dilated correlations to the original system")]
    # Cesaro trend: exact for every k when the tower has collapsed
    if horizon is None:
        horizon = 1000 if c.collapsed else K + 1
    if not c.collapsed and horizon > K + 1:
        raise BudgetExceeded(f"horizon {horizon} needs an exact V_inf beyond the budget {K}")
    vs, v = c.Vstar, c.V
    om = c.omega
    plain = absolute = 0.0
    for x in xs:
        for y in ys:
            py = c.pi(y)
            base = (om.conj() @ x @ om) * (om.conj() @ py @ om)
            acc = 0.0
            acc_abs = 0.0
            cur = py
            for _ in range(horizon):
                val = om.conj() @ x @ cur @ om - base
                acc += val
                acc_abs += abs(val)
                cur = vs @ cur @ v
            plain = max(plain, abs(acc) / horizon)
            absolute = max(absolute, acc_abs / horizon)
    rep = classify(t.ucp, t.state, n=horizon) if horizon >= 1 else None
    res = RESOLUTION_FACTOR / horizon
    if rep is not None and not rep.inconclusive:
        if rep.ergodic:
            checks.append(check("transfer.ergodic_trend", "dilated Cesaro average vanishes like the original",
                                plain, res, "ergodicity passes to the dilation"))
        else:
            checks.append(flag("transfer.nonergodic_trend", "dilated Cesaro average stays away from zero",
                               plain > res, "non-ergodic system has non-ergodic dilation"))
        if rep.weakly_mixing:
            checks.append(check("transfer.mixing_trend", "dilated absolute Cesaro average vanishes",
                                absolute, res, "weak mixing passes to the dilation"))
    # epsilon approximation by the generated (not yet closed) algebra
    gens = [op for k in range(K + 1) for op in c.partial_basis(k)]
    small = generated_star_algebra(gens)
    m = c.ambient_dim
    worst = 0.0
    for x in xs:
        for ybig in big[: samples]:
            yeps = small.project(ybig)
            eps = op_norm(ybig - yeps)
            for k in range(K + 1):
                a = d.phi_hat(x @ d.dynamics(ybig, k)) - d.phi_hat(x) * d.phi_hat(ybig)
                b = d.phi_hat(x @ d.dynamics(yeps, k)) - d.phi_hat(x) * d.phi_hat(yeps)
                worst = max(worst, abs(a - b) - 2 * eps * op_norm(x))
    checks.append(check("transfer.eps_approximation", "|corr(X, Y) - corr(X, Y_eps)| - 2 eps ||X||",
                        max(worst, 0.0), tol, "approximation by the generated algebra"))
    return TransferReport(checks, [plain, absolute], horizon)
