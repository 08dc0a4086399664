"""Finite-dimensional covariant GNS constructions for C*-dynamical systems
with completely positive dynamics.

Submodules are organised bottom-up: ``numerics`` and ``algebra`` carry the
linear algebra, ``channel`` and ``gns`` the dynamics and states,
``stinespring`` and ``cgns`` the dilation tower, ``dilation`` and ``ergodic``
the reversible dilation theory, and ``cli`` the command-line front end.
"""

from cstar.algebra import Algebra, Element, Subspace
from cstar.channel import LinearMap, UcpMap, verify_ucp
from cstar.gns import State, gns_construct

__all__ = [
    "Algebra",
    "Element",
    "Subspace",
    "LinearMap",
    "UcpMap",
    "verify_ucp",
    "State",
    "gns_construct",
]

__version__ = "0.1.0"
