import numpy as np
import pytest
from hypothesis import given, strategies as st

from cstar.algebra import Algebra, random_element
from cstar.channel import (LinearMap, UcpMap, averaging, compose, conjugation, copy_endomorphism, dephasing,
                           depolarizing, identity_map, kadison_defect, multiplicative_domain, permutation, power,
                           random_ucp, trace_dual, verify_ucp)
from cstar.errors import NotCP, NotUnital
from cstar.systems import HADAMARD

from conftest import PAULI_X

M2 = Algebra((2,))
seeds = st.integers(0, 2 ** 31 - 1)
block_dims = st.lists(st.integers(1, 3), min_size=1, max_size=2).map(tuple)


def same(a: LinearMap, b: LinearMap, tol=1e-12):
    return np.linalg.norm(a.superop - b.on(a.algebra).superop) <= tol


def test_identity_choi_is_maximally_entangled():
    c = identity_map(M2).choi
    w = np.linalg.eigvalsh(c)
    assert np.allclose(sorted(w), [0, 0, 0, 2])


def test_depolarizing_choi():
    c = depolarizing(M2).choi
    assert np.allclose(c, np.eye(4) / 2)


def test_not_unital_and_not_cp():
    with pytest.raises(NotUnital):
        verify_ucp(lambda a: a * 2, algebra=M2)
    with pytest.raises(NotCP):
        verify_ucp(lambda a: M2.element(a.blocks[0].T), algebra=M2)


def test_power_compose_examples():
    assert same(power(identity_map(M2), 5), identity_map(M2))
    assert same(power(depolarizing(M2), 2), depolarizing(M2))
    u = HADAMARD
    assert same(compose(conjugation(M2, u), conjugation(M2, u.conj().T)), identity_map(M2))


def test_trace_dual_examples():
    u = np.array([[1, 1j], [1j, 1]]) / np.sqrt(2)
    assert same(trace_dual(identity_map(M2)), identity_map(M2))
    assert same(trace_dual(conjugation(M2, u)), conjugation(M2, u.conj().T))
    assert same(trace_dual(depolarizing(M2)), depolarizing(M2))


@given(block_dims, seeds, seeds, seeds)
def test_trace_dual_is_adjoint_for_the_trace(dims, s, s1, s2):
    alg = Algebra(dims)
    phi = random_ucp(alg, s)
    a, x = random_element(alg, s1), random_element(alg, s2)
    tr = lambda e: sum(np.trace(b) for b in e.blocks)
    assert abs(tr(phi(a) @ x) - tr(a @ trace_dual(phi)(x))) < 1e-10


@given(block_dims, seeds, st.integers(1, 3))
def test_random_ucp_encodings_agree(dims, s, rank):
    alg = Algebra(dims)
    phi = random_ucp(alg, s, rank)
    assert verify_ucp(phi) is not None
    ks = phi.kraus()
    rebuilt = UcpMap.from_kraus(alg, ks)
    assert np.linalg.norm(rebuilt.superop - phi.superop) < 1e-9


def test_multiplicative_domain_examples():
    assert multiplicative_domain(identity_map(M2)).dim == 4
    assert multiplicative_domain(depolarizing(M2)).dim == 1
    d = multiplicative_domain(dephasing(M2))
    assert d.dim == 2
    assert d.contains(M2.element(np.diag([1.0, 0.0])))
    assert multiplicative_domain(copy_endomorphism(2)).dim == 8
    assert multiplicative_domain(averaging(2)).dim == 1
    assert multiplicative_domain(permutation([1, 0])).dim == 2


@given(block_dims, seeds)
def test_multiplicative_domain_is_multiplicative(dims, s):
    alg = Algebra(dims)
    phi = random_ucp(alg, s, 2)
    dom = multiplicative_domain(phi)
    for x in dom.elements():
        for y in alg.basis_elements():
            assert (phi(x @ y) - phi(x) @ phi(y)).norm() < 1e-8


def test_kadison_examples():
    assert kadison_defect(identity_map(M2), random_element(M2, 0)).norm() < 1e-12
    d = kadison_defect(depolarizing(M2), M2.element(PAULI_X))
    assert d.allclose(M2.unit())
    assert kadison_defect(random_ucp(M2, 4), M2.unit()).norm() < 1e-12


@given(block_dims, seeds, seeds)
def test_kadison_defect_is_positive(dims, s, s2):
    alg = Algebra(dims)
    d = kadison_defect(random_ucp(alg, s), random_element(alg, s2))
    for b in d.blocks:
        assert np.linalg.eigvalsh((b + b.conj().T) / 2).min() > -1e-9


def test_from_stochastic_permutation_convention():
    p = permutation([1, 2, 0])
    f = p.algebra.diagonal([10, 20, 30])
    assert np.allclose([b[0, 0] for b in p(f).blocks], [20, 30, 10])
