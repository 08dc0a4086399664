"""Named C*-dynamical systems and seeded instance families."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from cstar.algebra import Algebra
from cstar.channel import (UcpMap, averaging, conjugation, copy_endomorphism, dephasing,
                           depolarizing, fixed_point_density, identity_map, permutation,
                           random_ucp)
from cstar.gns import State
from cstar.numerics import dagger, hermitize

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True, eq=False)
class System:
    name: str
    algebra: Algebra
    ucp: UcpMap
    state: State
    right_inverse: UcpMap | None = None
    tol: float = 1e-10
    seed: int = 0


def qubit_automorphism(u=HADAMARD) -> System:
    m2 = Algebra((2,))
    return System("qubit-automorphism", m2, conjugation(m2, u), State.tracial(m2))


def irrational_rotation() -> System:
    """``ad_U`` with ``U = diag(1, exp(i sqrt(2) pi))``: ergodic on no nontrivial level, phases incommensurate."""
    m2 = Algebra((2,))
    u = np.diag([1.0, np.exp(1j * np.sqrt(2) * np.pi)])
    return System("irrational-rotation", m2, conjugation(m2, u), State.tracial(m2))


def qubit_depolarizing() -> System:
    m2 = Algebra((2,))
    return System("qubit-depolarizing", m2, depolarizing(m2), State.tracial(m2))


def qubit_dephasing(p: float = 2 / 3) -> System:
    m2 = Algebra((2,))
    return System("qubit-dephasing", m2, dephasing(m2), State(m2, (np.diag([p, 1 - p]),)))


def classical_identity(n: int = 2) -> System:
    alg = Algebra((1,) * n)
    return System("classical-identity", alg, identity_map(alg), State.tracial(alg))


def classical_swap() -> System:
    alg = Algebra((1, 1))
    return System("classical-swap", alg, permutation([1, 0]), State.tracial(alg))


def classical_averaging(n: int = 2) -> System:
    alg = Algebra((1,) * n)
    return System("classical-averaging", alg, averaging(n), State.tracial(alg))


def classical_cycle(n: int = 3) -> System:
    alg = Algebra((1,) * n)
    return System("classical-cycle", alg, permutation([(i + 1) % n for i in range(n)]), State.tracial(alg))


def copy_endomorphism_system(d: int = 2) -> System:
    """``x + y -> x + x`` on ``M_d + M_d`` with ``phi(x + y) = tr(x) / d``."""
    phi = copy_endomorphism(d)
    st = State(phi.algebra, (np.eye(d) / d, np.zeros((d, d))))
    return System("copy-endomorphism", phi.algebra, phi, st)


def automorphism_with_inverse(u=HADAMARD) -> System:
    m2 = Algebra((2,))
    u = np.asarray(u, complex)
    return System("automorphism-right-inverse", m2, conjugation(m2, u), State.tracial(m2),
                  right_inverse=conjugation(m2, dagger(u)))


def unitary_mixture(algebra: Algebra, seed: int, terms: int = 2) -> UcpMap:
    """``sum p_i ad_{U_i}`` with Haar-random blockwise unitaries and random weights."""
    rng = np.random.default_rng(seed)
    p = rng.dirichlet(np.ones(terms))
    dd = algebra.dense_dim
    kraus = []
    offs = np.concatenate([[0], np.cumsum(algebra.block_dims)]).astype(int)
    for w in p:
        u = np.zeros((dd, dd), complex)
        for i, d in enumerate(algebra.block_dims):
            u[offs[i]:offs[i + 1], offs[i]:offs[i + 1]] = unitary_group.rvs(d, random_state=rng) if d > 1 \
                else np.exp(2j * np.pi * rng.random())
        kraus.append(np.sqrt(w) * u)
    return UcpMap.from_kraus(algebra, kraus)


def random_state(algebra: Algebra, seed: int, faithful: bool = True) -> State:
    rng = np.random.default_rng(seed)
    blocks = []
    for i, d in enumerate(algebra.block_dims):
        if faithful:
            g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            blocks.append(g @ dagger(g) + 0.1 * np.eye(d))
        elif i == len(algebra.block_dims) - 1 and i > 0:
            blocks.append(np.zeros((d, d), complex))
        else:
            # rank one in every block: a vector state on each block
            g = rng.standard_normal((d, 1)) + 1j * rng.standard_normal((d, 1))
            blocks.append(g @ dagger(g))
    total = sum(np.trace(b).real for b in blocks)
    return State(algebra, tuple(b / total for b in blocks))


def random_invariant_system(algebra: Algebra, seed: int, kraus_rank: int = 2) -> System:
    """Random unital channel with the state given by its (generically unique, faithful) fixed point."""
    phi = random_ucp(algebra, seed, kraus_rank)
    rho = fixed_point_density(phi)
    return System(f"random-{seed}", algebra, phi, State(algebra, tuple(rho), tol=1e-9))


def random_stochastic_system(n: int, seed: int) -> System:
    """Random irreducible Markov chain with its stationary distribution."""
    rng = np.random.default_rng(seed)
    p = rng.random((n, n)) + 0.1
    p /= p.sum(axis=1, keepdims=True)
    phi = UcpMap.from_stochastic(p)
    # stationary distribution: left eigenvector of P at 1
    w, v = np.linalg.eig(p.T)
    pi = np.real(v[:, np.argmin(np.abs(w - 1))])
    pi /= pi.sum()
    return System(f"stochastic-{seed}", phi.algebra, phi, State.from_probabilities(phi.algebra, pi))


def diagonal_automorphism_system(seed: int) -> System:
    """``ad_U`` with ``U`` diagonal and a non-tracial diagonal state: commutes with the modular operator."""
    rng = np.random.default_rng(seed)
    m2 = Algebra((2,))
    u = np.diag(np.exp(2j * np.pi * rng.random(2)))
    p = 0.2 + 0.6 * rng.random()
    return System(f"diagonal-automorphism-{seed}", m2, conjugation(m2, u), State(m2, (np.diag([p, 1 - p]),)))


def modular_family(count: int = 60, seed: int = 0) -> list:
    """Seeded instances mixing systems with and without a phi-adjoint.

    Even members commute with the modular group by construction (tracial
    unitary mixtures, diagonal automorphisms, classical chains); odd members
    are random channels paired with their invariant state, which generically
    have no phi-adjoint.
    """
    out = []
    algebras = [Algebra((2,)), Algebra((1, 2)), Algebra((3,))]
    for i in range(count):
        s = seed + i
        kind = i % 6
        if kind == 0:
            alg = algebras[(i // 6) % len(algebras)]
            out.append(System(f"tracial-mixture-{s}", alg, unitary_mixture(alg, s), State.tracial(alg)))
        elif kind == 2:
            out.append(diagonal_automorphism_system(s))
        elif kind == 4:
            out.append(random_stochastic_system(3, s))
        else:
            alg = algebras[(i // 2) % len(algebras)]
            out.append(random_invariant_system(alg, s))
    return out


def gns_family(seed: int = 0) -> list:
    """Twenty seeded (algebra, state) pairs over M2, C2, C3 and M2 + M2."""
    algebras = [Algebra((2,)), Algebra((1, 1)), Algebra((1, 1, 1)), Algebra((2, 2))]
    out = []
    for i in range(20):
        alg = algebras[i % 4]
        out.append((alg, random_state(alg, seed + i, faithful=(i % 8) < 4)))
    return out


def bundled_names() -> list:
    from importlib import resources
    files = resources.files("cstar.data")
    return sorted(p.name for p in files.iterdir() if p.name.endswith(".json"))
