import numpy as np
import pytest
from hypothesis import given, strategies as st

from cstar.algebra import Algebra
from cstar.channel import depolarizing
from cstar.errors import NotHermitian, NotPSD
from cstar.numerics import (as_cmatrix, gram_quotient, herm_eig, is_unitary, null_space, op_norm,
                            orthonormalize, psd_sqrt, rank)
from cstar.stinespring import stinespring_gram

from conftest import PAULI_X

seeds = st.integers(0, 2 ** 31 - 1)


def test_herm_eig_examples():
    assert np.allclose(herm_eig(np.eye(2)).eigenvalues, [1, 1])
    assert np.allclose(herm_eig(np.diag([1.0, 2.0])).eigenvalues, [1, 2])
    assert np.allclose(herm_eig(PAULI_X).eigenvalues, [-1, 1])


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        herm_eig(np.array([[0, 1], [0, 0]]))


def test_as_cmatrix_rejects_bad_input():
    with pytest.raises(ValueError):
        as_cmatrix(np.array([[np.nan, 0], [0, 1]]))
    with pytest.raises(ValueError):
        as_cmatrix(np.zeros((0, 2)))


@given(seeds, st.integers(1, 6))
def test_herm_eig_reconstructs(seed, n):
    r = np.random.default_rng(seed)
    a = r.standard_normal((n, n)) + 1j * r.standard_normal((n, n))
    m = a + a.conj().T
    e = herm_eig(m)
    assert np.linalg.norm(m - e.reconstruct()) <= 1e-10 * max(1, np.linalg.norm(m))
    assert np.linalg.norm(e.eigenvectors.conj().T @ e.eigenvectors - np.eye(n)) <= 1e-10
    assert np.all(np.diff(e.eigenvalues) >= 0)


def test_gram_quotient_examples():
    assert gram_quotient(np.eye(2)).rank == 2
    assert gram_quotient(np.ones((2, 2))).rank == 1


def test_gram_quotient_depolarizing_level_one():
    m2 = Algebra((2,))
    # level-1 Gram of the depolarizing map A -> B(H_phi); H_phi = M2 with tr/2
    from cstar.gns import State, gns_construct
    g = gns_construct(m2, State.tracial(m2))
    phi = depolarizing(m2)
    images = np.array([g.rep(phi(x)) for x in m2.basis_elements()])
    gram = stinespring_gram(m2, images)
    assert gram.shape == (16, 16)
    # oracle: entries tr(a* b)/2 <h, k> in an orthonormal basis is a positive multiple of I
    assert np.linalg.eigvalsh(gram).min() > 0.1
    assert gram_quotient(gram).rank == 16


def test_gram_quotient_rejects_indefinite():
    with pytest.raises(NotPSD):
        gram_quotient(np.diag([1.0, -1.0]))


@given(seeds, st.integers(1, 6), st.integers(1, 6))
def test_gram_quotient_properties(seed, n, k):
    r = np.random.default_rng(seed)
    a = r.standard_normal((n, k)) + 1j * r.standard_normal((n, k))
    g = a @ a.conj().T
    q = gram_quotient(g)
    assert q.rank == np.linalg.matrix_rank(a)
    c = q.coisometry
    assert np.linalg.norm(c @ g @ c.conj().T - np.eye(q.rank)) <= 1e-8
    # reducer is an isometry of the semi-inner product: T* T = G
    t = q.reducer
    assert np.linalg.norm(t.conj().T @ t - g) <= 1e-8 * max(1, np.linalg.norm(g))


def test_gram_quotient_random_rotation_is_covariant():
    r = np.random.default_rng(0)
    a = r.standard_normal((4, 3))
    g = a @ a.T
    q1, q2 = gram_quotient(g), gram_quotient(g, rng=np.random.default_rng(7))
    w = q2.reducer @ q1.lift
    assert is_unitary(w, 1e-8)


def test_op_norm_examples():
    assert op_norm(np.eye(3)) == pytest.approx(1)
    assert op_norm(np.zeros((2, 2))) == 0
    assert op_norm(2 * PAULI_X) == pytest.approx(2)


def test_rank_null_space_orthonormalize():
    m = np.array([[1.0, 2.0], [2.0, 4.0]])
    assert rank(m) == 1
    ns = null_space(m)
    assert ns.shape == (2, 1) and np.linalg.norm(m @ ns) < 1e-12
    q = orthonormalize(np.array([[1.0, 1.0], [0.0, 0.0]]))
    assert q.shape == (2, 1)


def test_psd_sqrt():
    m = np.diag([4.0, 9.0])
    assert np.allclose(psd_sqrt(m), np.diag([2.0, 3.0]))
