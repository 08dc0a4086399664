import numpy as np
import pytest
from hypothesis import given, strategies as st

from cstar.algebra import Algebra
from cstar.channel import (averaging, conjugation, dephasing, depolarizing, identity_map, multiplicative_domain,
                           random_ucp)
from cstar.errors import NotUcp
from cstar.gns import State, gns_construct, transfer_contraction
from cstar.numerics import is_unitary
from cstar.report import all_passed
from cstar.stinespring import check_md_commutation, lambda0, lambda0_certificates, stinespring
from cstar.systems import HADAMARD

M2 = Algebra((2,))
C2 = Algebra((1, 1))
seeds = st.integers(0, 2 ** 31 - 1)


def level_zero(alg, phi, state):
    g = gns_construct(alg, state)
    images = np.array([g.rep(phi(x)) for x in alg.basis_elements()])
    return g, stinespring(alg, images)


def test_representation_collapses():
    g = gns_construct(C2, State.tracial(C2))
    s = stinespring(C2, g.rep_basis)
    assert s.dilation_dim == 2 and is_unitary(s.V)


def test_dilation_dimensions():
    assert level_zero(M2, depolarizing(M2), State.tracial(M2))[1].dilation_dim == 16
    assert level_zero(C2, averaging(2), State.tracial(C2))[1].dilation_dim == 4
    assert level_zero(M2, conjugation(M2, HADAMARD), State.tracial(M2))[1].dilation_dim == 4


def test_rejects_non_unital_images():
    with pytest.raises(NotUcp):
        stinespring(M2, 2 * gns_construct(M2, State.tracial(M2)).rep_basis)


@given(st.sampled_from([(1,), (2,), (1, 1), (1, 2)]), seeds, st.integers(1, 3))
def test_random_channels_factor(dims, s, rank):
    alg = Algebra(dims)
    phi = random_ucp(alg, s, rank)
    s_ = stinespring(alg, phi.images())
    assert all_passed(s_.certificates(1e-10))


def test_md_commutation():
    _, s = level_zero(M2, depolarizing(M2), State.tracial(M2))
    chk = check_md_commutation(s, multiplicative_domain(depolarizing(M2)))
    assert chk[0].residual == pytest.approx(0, abs=1e-14) and all_passed(chk)
    _, s2 = level_zero(M2, dephasing(M2), State.tracial(M2))
    chk2 = check_md_commutation(s2, multiplicative_domain(dephasing(M2)))
    assert all_passed(chk2)
    assert np.linalg.norm(s2.V @ s2.V.conj().T - np.eye(s2.dilation_dim)) > 0.5
    _, s3 = level_zero(M2, identity_map(M2), State.tracial(M2))
    assert all_passed(check_md_commutation(s3, multiplicative_domain(identity_map(M2))))


def test_lambda0_examples():
    g, s = level_zero(M2, identity_map(M2), State.tracial(M2))
    lam = lambda0(g, s)
    assert np.allclose(lam, s.V) and np.allclose(s.V.conj().T @ lam, np.eye(4))
    g2, s2 = level_zero(C2, averaging(2), State.tracial(C2))
    lam2 = lambda0(g2, s2)
    u = transfer_contraction(g2, averaging(2))
    assert lam2.shape == (4, 2)
    assert np.linalg.norm(u - s2.V.conj().T @ lam2) <= 1e-12
    assert all_passed(lambda0_certificates(g2, s2, lam2, u))
    g3, s3 = level_zero(M2, conjugation(M2, HADAMARD), State.tracial(M2))
    assert is_unitary(lambda0(g3, s3))
