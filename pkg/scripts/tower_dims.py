"""Level dimensions and collapse of the Stinespring tower for the named systems."""

import argparse
import time

from cstar.cgns import build_tower, cgns_operators
from cstar.systems import (classical_averaging, classical_cycle, classical_swap, copy_endomorphism_system,
                           irrational_rotation, qubit_automorphism, qubit_dephasing, qubit_depolarizing)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--depth", type=int, default=3)
    args = ap.parse_args()
    for make in (qubit_automorphism, irrational_rotation, qubit_depolarizing, qubit_dephasing, classical_swap,
                 classical_averaging, classical_cycle, copy_endomorphism_system):
        s = make()
        t0 = time.perf_counter()
        t = build_tower(s.ucp, s.state, args.depth)
        c = cgns_operators(t)
        print(f"{s.name:22s} dims {t.dims}  collapsed={c.collapsed}  {time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
