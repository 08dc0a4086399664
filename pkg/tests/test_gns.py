import numpy as np
import pytest
from hypothesis import given, strategies as st

from cstar.algebra import Algebra, random_element
from cstar.channel import (averaging, conjugation, dephasing, depolarizing, identity_map, random_ucp,
                           trace_dual)
from cstar.errors import InvalidState, ModularObstruction, NotFaithful, NotInvariant
from cstar.gns import (State, adjunction_residual, check_invariance, contraction_certificates, gns_construct,
                       induce_w_system, modular_certificates, modular_commutation_check, modular_oracle,
                       modular_pair, omega_cyclic_for_commutant, phi_adjoint, transfer_contraction)
from cstar.report import all_passed
from cstar.systems import HADAMARD, gns_family, modular_family, random_state, unitary_mixture

from conftest import PAULI_X

M2 = Algebra((2,))
seeds = st.integers(0, 2 ** 31 - 1)
block_dims = st.lists(st.integers(1, 3), min_size=1, max_size=2).map(tuple)
RHO = np.diag([2 / 3, 1 / 3])


def test_state_validation():
    with pytest.raises(InvalidState):
        State(M2, (np.diag([1.0, 1.0]),))
    with pytest.raises(InvalidState):
        State(M2, (np.diag([1.5, -0.5]),))
    with pytest.raises(InvalidState):
        State(M2, (np.array([[0.5, 1], [0, 0.5]]),))


@given(block_dims, seeds, st.booleans(), seeds)
def test_state_is_positive_and_normalized(dims, s, faithful, s2):
    alg = Algebra(dims)
    st_ = random_state(alg, s, faithful)
    a = random_element(alg, s2)
    assert abs(st_(alg.unit()) - 1) < 1e-12
    assert st_(a.star() @ a).real > -1e-12
    p = st_.support
    assert (p @ p).allclose(p) and p.star().allclose(p)


def test_invariance_examples():
    st_ = State(M2, (RHO,))
    assert check_invariance(identity_map(M2), st_).residual == 0
    assert check_invariance(unitary_mixture(M2, 3), State.tracial(M2)).passed
    inv = check_invariance(conjugation(M2, PAULI_X), st_)
    assert not inv.passed and inv.residual == pytest.approx(1 / 3)


def test_gns_dimensions():
    assert gns_construct(M2, State.tracial(M2)).dim == 4
    c2 = Algebra((1, 1))
    assert gns_construct(c2, State.from_probabilities(c2, [1, 0])).dim == 1
    alg = Algebra((2, 2))
    st_ = State(alg, (np.eye(2) / 2, np.zeros((2, 2))))
    g = gns_construct(alg, st_)
    assert g.dim == 4
    assert st_.support.allclose(alg.element([np.eye(2), np.zeros((2, 2))]))
    assert omega_cyclic_for_commutant(g)


@pytest.mark.parametrize("k", range(20))
def test_gns_family_certificates(k):
    alg, st_ = gns_family()[k]
    g = gns_construct(alg, st_)
    assert all_passed(g.certificates(1e-10))
    for s in range(5):
        a = random_element(alg, 100 * k + s)
        assert abs(st_(a) - g.omega.conj() @ g.rep(a) @ g.omega) <= 1e-10


def test_gns_family_has_both_kinds():
    fam = gns_family()
    assert {s.faithful for _, s in fam} == {True, False}


def test_transfer_examples():
    g = gns_construct(M2, State.tracial(M2))
    assert np.allclose(transfer_contraction(g, identity_map(M2)), np.eye(4))
    u = transfer_contraction(g, conjugation(M2, HADAMARD))
    assert np.allclose(u.conj().T @ u, np.eye(4)) and np.allclose(u @ u.conj().T, np.eye(4))
    c2 = Algebra((1, 1))
    g2 = gns_construct(c2, State.tracial(c2))
    u2 = transfer_contraction(g2, averaging(2))
    assert np.allclose(u2 @ u2, u2) and np.allclose(u2 @ g2.omega, g2.omega)
    with pytest.raises(NotInvariant):
        transfer_contraction(gns_construct(M2, State(M2, (RHO,))), conjugation(M2, PAULI_X))


@given(block_dims, seeds)
def test_transfer_is_a_contraction(dims, s):
    alg = Algebra(dims)
    phi = unitary_mixture(alg, s)
    st_ = State.tracial(alg)
    g = gns_construct(alg, st_)
    u = transfer_contraction(g, phi)
    assert all_passed(contraction_certificates(g, phi, u))


def test_w_system_depolarizing():
    g = gns_construct(M2, State.tracial(M2))
    u = transfer_contraction(g, depolarizing(M2))
    w = induce_w_system(g, u)
    assert w.dim == 4
    assert all_passed(w.certificates())
    x = g.rep(M2.element(np.array([[1, 2], [3, 4]])))
    # the induced map sends pi(a) to pi(tr(a)/2 1)
    assert np.allclose(w.apply(x), 2.5 * np.eye(4))
    assert w.state_dot(x) == pytest.approx(2.5)


def test_w_system_identity():
    g = gns_construct(M2, State.tracial(M2))
    w = induce_w_system(g, np.eye(4))
    x = g.rep(random_element(M2, 1))
    assert np.allclose(w.apply(x), x)


def test_modular_examples():
    g = gns_construct(M2, State.tracial(M2))
    mp = modular_pair(g)
    assert np.allclose(mp.delta, np.eye(4))
    a = random_element(M2, 2)
    assert np.allclose(mp.apply_j(g.embed(a)), g.embed(a.star()))
    g2 = gns_construct(M2, State(M2, (RHO,)))
    mp2 = modular_pair(g2)
    assert np.allclose(sorted(np.linalg.eigvals(mp2.delta).real), [0.5, 1, 1, 2])
    with pytest.raises(NotFaithful):
        modular_pair(gns_construct(Algebra((1, 1)), State.from_probabilities(Algebra((1, 1)), [1, 0])))


@given(block_dims, seeds)
def test_modular_pair_matches_polar_oracle(dims, s):
    alg = Algebra(dims)
    g = gns_construct(alg, random_state(alg, s))
    mp = modular_pair(g)
    orc = modular_oracle(g)
    assert np.linalg.norm(mp.delta - orc.delta) <= 1e-9
    assert np.linalg.norm(mp.conj_unitary - orc.conj_unitary) <= 1e-9
    assert all_passed(modular_certificates(g, mp))


def test_commutation_examples():
    g = gns_construct(M2, State.tracial(M2))
    u = transfer_contraction(g, conjugation(M2, HADAMARD))
    assert all(c.residual < 1e-12 for c in modular_commutation_check(u, modular_pair(g)))
    st_ = State(M2, (RHO,))
    g2 = gns_construct(M2, st_)
    u2 = transfer_contraction(g2, dephasing(M2))
    assert all_passed(modular_commutation_check(u2, modular_pair(g2)))


def test_adjoint_examples():
    tr = State.tracial(M2)
    phi = unitary_mixture(M2, 5, terms=3)
    adj = phi_adjoint(phi, tr)
    assert np.allclose(adj.superop, trace_dual(phi).superop)
    st_ = State(M2, (RHO,))
    assert np.allclose(phi_adjoint(dephasing(M2), st_).superop, dephasing(M2).superop)
    assert np.allclose(phi_adjoint(identity_map(M2), st_).superop, np.eye(4))


def test_modular_family_equivalence():
    fam = modular_family(60)
    outcomes = []
    for s in fam:
        g = gns_construct(s.algebra, s.state)
        u = transfer_contraction(g, s.ucp, s.state)
        commutes = all_passed(modular_commutation_check(u, modular_pair(g), tol=1e-8))
        try:
            adj = phi_adjoint(s.ucp, s.state, g=g)
        except ModularObstruction:
            adj = None
        assert (adj is not None) == commutes, s.name
        if adj is not None:
            assert adjunction_residual(s.ucp, adj, s.state) <= 1e-10
        outcomes.append(adj is not None)
    assert any(outcomes) and not all(outcomes)
