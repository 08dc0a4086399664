import numpy as np
import pytest

from cstar.algebra import Algebra
from cstar.cgns import build_tower, cgns_operators
from cstar.channel import averaging, conjugation, depolarizing, identity_map, permutation
from cstar.dilation import (build_dilation, dilation_certificates, minimality_and_separating,
                            non_separating_vector, right_inverse_analyzer, separating_value,
                            verify_dilation_diagram)
from cstar.errors import BudgetExceeded, NoAdjoint, NotASection, NotMultiplicative
from cstar.gns import State
from cstar.numerics import is_unitary
from cstar.report import all_passed
from cstar.systems import (HADAMARD, automorphism_with_inverse, classical_cycle, classical_swap,
                           copy_endomorphism_system, qubit_automorphism, qubit_depolarizing)

M2 = Algebra((2,))


def dilate(system, depth=3):
    return build_dilation(cgns_operators(build_tower(system.ucp, system.state, depth)))


@pytest.mark.parametrize("make", [qubit_automorphism, classical_swap, classical_cycle])
def test_dilation_certificates(make):
    d = dilate(make())
    assert all_passed(dilation_certificates(d))
    for n in range(d.budget + 1):
        assert all_passed(verify_dilation_diagram(d, n))
    assert all_passed(minimality_and_separating(d))


def test_automorphism_dilation_is_explicit():
    d = dilate(qubit_automorphism())
    v = d.cgns.V
    assert is_unitary(v)
    x = d.big_basis[1]
    assert np.allclose(d.dynamics(x), v.conj().T @ x @ v)
    assert np.allclose(d.dynamics(d.dynamics(x, 1), -1), x)
    assert d.big_algebra.dim == 4
    for a in d.wsystem.vn_basis.elements():
        assert np.allclose(d.i_map(d.E(d.i_map(a))), d.i_map(a))


def test_cycle_expectation_of_dilated_dynamics():
    sys_ = classical_cycle()
    d = dilate(sys_)
    inv = permutation([2, 0, 1])
    alg = sys_.algebra
    for k in range(d.budget + 1):
        for x in alg.basis_elements():
            y = x
            for _ in range(k):
                y = inv(y)
            assert np.linalg.norm(d.E(d.partial(k, x)) - d.cgns.gns.rep(y)) <= 1e-11


def test_k_zero_and_swap_period():
    d = dilate(classical_swap())
    for x in d.cgns.algebra.basis_elements():
        assert np.allclose(d.E(d.cgns.pi(x)), d.cgns.gns.rep(x))
    for x in d.big_basis:
        assert np.linalg.norm(d.dynamics(x, 2) - x) <= 1e-12
    assert verify_dilation_diagram(d, 0)[0].residual == 0
    assert separating_value(d) > 0.1


def test_negative_control():
    for make in (qubit_automorphism, classical_swap, classical_cycle):
        d = dilate(make())
        assert separating_value(d) > 1e-6
        assert separating_value(d, non_separating_vector(d)) < 1e-6
        assert not all_passed(minimality_and_separating(d, non_separating_vector(d)))


def test_budget_enforced():
    d = dilate(classical_swap(), depth=2)
    with pytest.raises(BudgetExceeded):
        d.dynamics(d.big_basis[0], 3)
    with pytest.raises(BudgetExceeded):
        verify_dilation_diagram(d, 3)


def test_preconditions():
    with pytest.raises(NotMultiplicative):
        dilate(qubit_depolarizing(), 1)
    # Omega is cyclic for the commutant here, but the state is not faithful
    with pytest.raises(NoAdjoint):
        dilate(copy_endomorphism_system(), 1)


def test_right_inverse_automorphism():
    sys_ = automorphism_with_inverse()
    rep = right_inverse_analyzer(sys_.ucp, sys_.right_inverse, sys_.state, depth=2)
    assert rep.passed
    ids = {c.id for c in rep.checks}
    assert {"right_inverse.section", "right_inverse.in_domain", "right_inverse.kadison",
            "right_inverse.adjunction", "right_inverse.homomorphism"} <= ids


def test_right_inverse_rejections():
    c2 = Algebra((1, 1))
    with pytest.raises(NotASection) as exc:
        right_inverse_analyzer(averaging(2), identity_map(c2), State.tracial(c2))
    assert exc.value.residual == pytest.approx(0.5)
    assert exc.value.witness.allclose(c2.diagonal([1, 0]))
    with pytest.raises(NotASection):
        right_inverse_analyzer(identity_map(M2), depolarizing(M2), State.tracial(M2))
    u = HADAMARD
    with pytest.raises(NotASection):
        right_inverse_analyzer(conjugation(M2, u), identity_map(M2), State.tracial(M2))
