import copy
import json
import time
from importlib import resources

import numpy as np
import pytest

from cstar.channel import dephasing
from cstar.cli import (Options, emit_report, encode_system, load_system, main, parse_system, run)
from cstar.errors import ParseError, ValidationError
from cstar.report import Report
from cstar.systems import bundled_names, classical_averaging

DATA = resources.files("cstar.data")


def bundled(name):
    return parse_system(DATA / name)


def doc(name):
    return json.loads((DATA / name).read_text())


def test_bundled_set_present():
    assert len(bundled_names()) >= 8


def test_parse_depolarizing():
    s = bundled("qubit_depolarizing.json")
    assert s.algebra.block_dims == (2,)


def test_non_psd_density_names_the_state():
    d = doc("qubit_depolarizing.json")
    d["state"]["densities"] = [[[1.5, 0], [0, -0.5]]]
    with pytest.raises(ValidationError, match="state"):
        load_system(d)


def test_non_unital_dynamics_rejected():
    d = doc("qubit_depolarizing.json")
    d["dynamics"] = {"superop": np.eye(4).tolist()}
    d["dynamics"]["superop"][0][0] = 2
    with pytest.raises(ValidationError, match="unital"):
        load_system(d)


def test_stochastic_swap_spec():
    d = {"version": 1, "algebra": {"blocks": [1, 1]}, "state": {"probabilities": [0.5, 0.5]},
         "dynamics": {"stochastic": [[0, 1], [1, 0]]}}
    s = load_system(d)
    rep = run("validate", s)
    assert rep.passed
    assert {c.id for c in rep.checks} >= {"invariance", "system.cp"}


def test_parse_error_has_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"version": 1,\n "algebra": {"blocks": [2]}, \n "state": }')
    with pytest.raises(ParseError, match=r":3:"):
        parse_system(p)


def test_structural_errors():
    with pytest.raises(ParseError, match="algebra"):
        load_system({"version": 1})
    d = doc("classical_swap.json")
    d["dynamics"] = {"kraus": [[[1, 0], [0, 1]]], "stochastic": [[1, 0], [0, 1]]}
    with pytest.raises(ParseError, match="exactly one"):
        load_system(d)
    d = doc("classical_swap.json")
    d["version"] = 2
    with pytest.raises(ValidationError, match="version"):
        load_system(d)


def test_complex_entries_accepted():
    s = bundled("automorphism_right_inverse.json")
    assert s.right_inverse is not None


def test_encode_round_trip():
    sys_ = classical_averaging()
    for kind in ("superop", "stochastic", "kraus"):
        back = load_system(json.loads(json.dumps(encode_system(sys_, kind))))
        assert np.allclose(back.ucp.superop, sys_.ucp.superop)


def test_run_all_automorphism_fast():
    t0 = time.perf_counter()
    rep = run("all", bundled("qubit_automorphism.json"), Options(depth=3))
    assert rep.passed
    assert time.perf_counter() - t0 < 5
    assert rep.data["skipped"] == {"right-inverse": "no right inverse given"}


def test_run_tower_averaging_depth_five():
    rep = run("tower", bundled("classical_averaging.json"), Options(depth=5))
    assert rep.passed and rep.data["dims"] == [2, 4, 8, 16, 32, 64]


def test_run_adjoint_dephasing():
    s = bundled("qubit_dephasing.json")
    rep = run("adjoint", s)
    assert rep.passed and rep.data["adjoint_exists"]
    sup = np.array(rep.data["adjoint_superop"])
    sup = sup[..., 0] + 1j * sup[..., 1]
    assert np.allclose(sup, dephasing(s.algebra).superop)


def test_report_is_deterministic():
    s = bundled("classical_cycle.json")
    a = run("all", s, Options(depth=2, seed=3)).to_dict()
    b = run("all", bundled("classical_cycle.json"), Options(depth=2, seed=3)).to_dict()
    a.pop("timings"), b.pop("timings")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_check_ids_unique():
    rep = run("all", bundled("automorphism_right_inverse.json"), Options(depth=2))
    ids = [c.id for c in rep.checks]
    assert len(ids) == len(set(ids))


def test_emit_round_trip():
    rep = run("gns", bundled("classical_swap.json"))
    assert Report.from_json(emit_report(rep, "json")) == rep
    assert emit_report(rep, "text").startswith(b"gns: PASS")


def test_main_exit_codes(tmp_path, capsys):
    ok = str(DATA / "qubit_dephasing.json")
    out = tmp_path / "r.json"
    assert main(["gns", ok, "--json", str(out)]) == 0
    assert json.loads(out.read_text())["summary"] == "pass"
    assert main(["gns", str(tmp_path / "missing.json")]) == 2
    # valid system, invariance fails: a check failure
    d = doc("qubit_dephasing.json")
    d["dynamics"] = {"kraus": [[[0, 1], [1, 0]]]}
    p = tmp_path / "noninv.json"
    p.write_text(json.dumps(d))
    assert main(["validate", str(p)]) == 1
    # module error is reported with a nonzero exit code
    assert main(["tower", str(p), "--json", str(out)]) == 1
    assert json.loads(out.read_text())["error"].startswith("NotInvariant")
    capsys.readouterr()


def test_right_inverse_rejection_has_witness(tmp_path):
    d = doc("classical_averaging.json")
    d["right_inverse"] = {"stochastic": [[1, 0], [0, 1]]}
    p = tmp_path / "ri.json"
    p.write_text(json.dumps(d))
    out = tmp_path / "r.json"
    assert main(["right-inverse", str(p), "--json", str(out), "--format", "json"]) == 1
    r = json.loads(out.read_text())
    assert r["error"].startswith("NotASection")
    assert r["data"]["section_residual"] == pytest.approx(0.5)
    assert r["data"]["witness"][0][0] == [1.0, 0.0]


def test_right_inverse_missing_is_input_error(capsys):
    assert main(["right-inverse", str(DATA / "classical_swap.json")]) == 2
    capsys.readouterr()


def test_options_override_seed_and_tol(capsys):
    assert main(["gns", str(DATA / "classical_swap.json"), "--seed", "9", "--tol", "1e-8",
                 "--format", "json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["data"]["options"]["seed"] == 9
