"""Existence of the phi-adjoint versus commutation with the modular group on a seeded family.

For each instance the script records whether the candidate adjoint is ucp and
the largest residual of ``U`` against ``Delta^it``, ``J`` and ``Delta``.  The two
verdicts should agree on every instance, and the residuals should separate
cleanly: roundoff for one group, order one for the other.
"""

import argparse

from cstar.errors import ModularObstruction
from cstar.gns import gns_construct, modular_commutation_check, modular_pair, phi_adjoint, transfer_contraction
from cstar.report import all_passed
from cstar.systems import modular_family


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=60)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rows = []
    for s in modular_family(args.count, args.seed):
        g = gns_construct(s.algebra, s.state)
        u = transfer_contraction(g, s.ucp, s.state)
        comm = modular_commutation_check(u, modular_pair(g), tol=1e-8)
        try:
            phi_adjoint(s.ucp, s.state, g=g)
            exists = True
        except ModularObstruction:
            exists = False
        rows.append((s.name, exists, all_passed(comm), max(c.residual for c in comm)))
    for name, exists, commutes, r in rows:
        mark = "" if exists == commutes else "  MISMATCH"
        print(f"{name:28s} adjoint={'yes' if exists else 'no ':3s} commutes={'yes' if commutes else 'no ':3s} "
              f"residual={r:.2e}{mark}")
    yes = [r for _, e, _, r in rows if e]
    no = [r for _, e, _, r in rows if not e]
    print(f"\n{len(yes)} with adjoint (max residual {max(yes, default=0):.2e}), "
          f"{len(no)} obstructed (min residual {min(no, default=float('nan')):.2e}), "
          f"{sum(e != c for _, e, c, _ in rows)} mismatches")


if __name__ == "__main__":
    main()
