import numpy as np
import pytest
from hypothesis import given, strategies as st

from cstar.algebra import Algebra, commutant, double_commutant, generated_star_algebra, random_element
from cstar.gns import State, gns_construct

from conftest import PAULI_X, PAULI_Z

block_dims = st.lists(st.integers(1, 3), min_size=1, max_size=3).map(tuple)
seeds = st.integers(0, 2 ** 31 - 1)


def test_rejects_bad_blocks():
    with pytest.raises(ValueError):
        Algebra(())
    with pytest.raises(ValueError):
        Algebra((2, 0))


@given(block_dims)
def test_basis_is_orthonormal(dims):
    alg = Algebra(dims)
    b = alg.dense_basis.reshape(alg.total_dim, -1)
    assert np.allclose(b.conj() @ b.T, np.eye(alg.total_dim))


def test_star_examples():
    m2 = Algebra((2,))
    assert m2.unit().star().allclose(m2.unit())
    a = m2.element(np.diag([1j, 0]))
    assert a.star().allclose(m2.element(np.diag([-1j, 0])))
    e = m2.element(np.array([[0, 1], [0, 0]]))
    assert e.star().allclose(m2.element(np.array([[0, 0], [1, 0]])))


@given(block_dims, seeds, seeds)
def test_star_is_antimultiplicative_involution(dims, s1, s2):
    alg = Algebra(dims)
    a, b = random_element(alg, s1), random_element(alg, s2)
    assert a.star().star().allclose(a)
    assert (a @ b).star().allclose(b.star() @ a.star())


@given(block_dims, seeds, seeds)
def test_structure_constants_match_products(dims, s1, s2):
    alg = Algebra(dims)
    a, b = random_element(alg, s1), random_element(alg, s2)
    assert np.allclose(alg.left_mult(a) @ alg.to_vec(b), alg.to_vec(a @ b))
    assert np.allclose(alg.right_mult(b) @ alg.to_vec(a), alg.to_vec(a @ b))


@given(block_dims, seeds, seeds)
def test_permuted_algebra_is_the_same_algebra(dims, seed, s2):
    alg = Algebra(dims)
    p = alg.permuted(seed)
    a = random_element(alg, s2)
    b = p.element(a.blocks)
    assert p.same_as(alg)
    assert np.allclose(p.dense(p.from_vec(p.to_vec(b))), alg.dense(a))


def test_generated_star_algebra_examples():
    m2 = Algebra((2,))
    assert generated_star_algebra([m2.unit()]).dim == 1
    assert generated_star_algebra([m2.element(PAULI_X)]).dim == 2
    assert generated_star_algebra([m2.element(PAULI_X), m2.element(PAULI_Z)]).dim == 4


@given(block_dims, seeds)
def test_generated_star_algebra_is_closed(dims, seed):
    alg = Algebra(dims)
    sub = generated_star_algebra([random_element(alg, seed)])
    els = sub.elements()
    assert sub.contains(alg.unit())
    for x in els:
        assert sub.contains(x.star(), 1e-7)
        for y in els:
            assert sub.contains(x @ y, 1e-7)


def test_commutant_examples():
    assert commutant([np.eye(3)]).dim == 9
    assert commutant([np.diag([1.0, 2.0])]).dim == 2
    m2 = Algebra((2,))
    g = gns_construct(m2, State.tracial(m2))
    comm = commutant(list(g.rep_basis))
    assert comm.dim == 4
    assert double_commutant(list(g.rep_basis)).dim == 4


def test_random_element_deterministic_and_shaped():
    m2 = Algebra((2,))
    assert random_element(m2, 0).allclose(random_element(m2, 0))
    c2 = random_element(Algebra((1, 1)), 1)
    assert [b.shape for b in c2.blocks] == [(1, 1), (1, 1)]
    h = random_element(m2, 3, hermitian=True)
    assert h.allclose(h.star())
