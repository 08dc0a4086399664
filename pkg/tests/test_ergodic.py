import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cstar.algebra import Algebra
from cstar.cgns import build_tower, cgns_operators
from cstar.dilation import build_dilation
from cstar.ergodic import classification_checks, classify, correlation_sequence, dilation_transfer_check
from cstar.errors import NotInvariant
from cstar.gns import State
from cstar.channel import conjugation
from cstar.report import all_passed
from cstar.systems import (classical_averaging, classical_cycle, classical_identity, classical_swap,
                           irrational_rotation, qubit_automorphism, qubit_depolarizing, random_stochastic_system)

from conftest import PAULI_X

C2 = Algebra((1, 1))
A = C2.diagonal([1, -1])


def test_correlation_examples():
    assert np.allclose(correlation_sequence(classical_identity().ucp, State.tracial(C2), A, A, 5), 1)
    c = correlation_sequence(classical_swap().ucp, State.tracial(C2), A, A, 5)
    assert np.allclose(c, [(-1) ** k for k in range(6)])
    c = correlation_sequence(classical_averaging().ucp, State.tracial(C2), A, A, 5)
    assert np.allclose(c, [1, 0, 0, 0, 0, 0])
    m2 = Algebra((2,))
    with pytest.raises(NotInvariant):
        correlation_sequence(conjugation(m2, PAULI_X), State(m2, (np.diag([0.6, 0.4]),)), m2.unit(), m2.unit(), 1)


@pytest.mark.parametrize("make,ergodic,mixing", [(classical_identity, False, False), (classical_swap, True, False),
                                                 (classical_averaging, True, True), (classical_cycle, True, False),
                                                 (qubit_depolarizing, True, True)])
def test_classification(make, ergodic, mixing):
    s = make()
    r = classify(s.ucp, s.state)
    assert (r.ergodic, r.weakly_mixing) == (ergodic, mixing)
    assert not r.inconclusive and r.agree
    assert all_passed(classification_checks(r))


def test_identity_fixed_space():
    r = classify(classical_identity().ucp, classical_identity().state)
    assert r.fixed_space_dim == 2


@settings(max_examples=10)
@given(st.integers(2, 4), st.integers(0, 10 ** 6))
def test_classification_invariants(n, s):
    sys_ = random_stochastic_system(n, s)
    r = classify(sys_.ucp, sys_.state)
    assert r.fixed_space_dim >= 1
    assert r.ergodic or not r.weakly_mixing
    if not r.inconclusive:
        assert r.agree


def transfer(system, depth=3):
    d = build_dilation(cgns_operators(build_tower(system.ucp, system.state, depth)))
    return dilation_transfer_check(d)


def test_transfer_irrational_rotation():
    rep = transfer(irrational_rotation())
    red = [c for c in rep.checks if c.id == "transfer.reduction"][0]
    assert red.residual <= 1e-10
    assert all_passed(rep.checks)


def test_transfer_swap_and_identity():
    rep = transfer(classical_swap())
    assert all_passed(rep.checks)
    assert rep.dilated_cesaro[0] <= 1e-2
    c2 = classical_identity()
    rep2 = transfer(c2)
    assert all_passed(rep2.checks)
    assert any(c.id == "transfer.nonergodic_trend" for c in rep2.checks)


def test_transfer_automorphism():
    assert all_passed(transfer(qubit_automorphism()).checks)
