"""Regenerate the bundled system descriptions in src/cstar/data/."""

import json
import math
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "cstar" / "data"
H = 1 / math.sqrt(2)


def doc(name, blocks, state, dynamics, **extra):
    d = {"version": 1, "name": name, "algebra": {"blocks": blocks}, "state": state, "dynamics": dynamics,
         "tolerance": 1e-10, "seed": 0}
    d.update(extra)
    return d


def paulis():
    i = [[1, 0], [0, 1]]
    x = [[0, 1], [1, 0]]
    y = [[0, [0, -1]], [[0, 1], 0]]
    z = [[1, 0], [0, -1]]
    return i, x, y, z


def scaled(m, c):
    def s(v):
        if isinstance(v, list):
            return [v[0] * c, v[1] * c]
        return v * c
    return [[s(v) for v in row] for row in m]


SYSTEMS = {
    "qubit_automorphism": doc("qubit-automorphism", [2], {"densities": [[[0.5, 0], [0, 0.5]]]},
                              {"kraus": [[[H, H], [H, -H]]]}),
    "qubit_depolarizing": doc("qubit-depolarizing", [2], {"densities": [[[0.5, 0], [0, 0.5]]]},
                              {"kraus": [scaled(p, 0.5) for p in paulis()]}),
    "qubit_dephasing": doc("qubit-dephasing", [2], {"densities": [[[2 / 3, 0], [0, 1 / 3]]]},
                           {"kraus": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]}),
    "classical_swap": doc("classical-swap", [1, 1], {"probabilities": [0.5, 0.5]},
                          {"stochastic": [[0, 1], [1, 0]]}),
    "classical_averaging": doc("classical-averaging", [1, 1], {"probabilities": [0.5, 0.5]},
                               {"stochastic": [[0.5, 0.5], [0.5, 0.5]]}),
    "classical_cycle": doc("classical-cycle", [1, 1, 1], {"probabilities": [1 / 3, 1 / 3, 1 / 3]},
                           {"stochastic": [[0, 1, 0], [0, 0, 1], [1, 0, 0]]}),
    "copy_endomorphism": doc("copy-endomorphism", [2, 2],
                             {"densities": [[[0.5, 0], [0, 0.5]], [[0, 0], [0, 0]]]},
                             {"kraus": [[[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
                                        [[0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0]]]}),
    "automorphism_right_inverse": doc("automorphism-right-inverse", [2], {"densities": [[[0.5, 0], [0, 0.5]]]},
                                      {"kraus": [[[H, [0, H]], [[0, H], H]]]},
                                      right_inverse={"kraus": [[[H, [0, -H]], [[0, -H], H]]]}),
}


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for name, d in SYSTEMS.items():
        (OUT / f"{name}.json").write_text(json.dumps(d, indent=2) + "\n")
        print(f"wrote {name}.json")


if __name__ == "__main__":
    main()
