import json

import numpy as np
import pytest

from bopp_podolsky import io
from bopp_podolsky.cli import EXIT_HYPOTHESIS, EXIT_INPUT, EXIT_OK, main, parse_grid, parse_init, parse_ladder
from bopp_podolsky.fields import gaussian
from bopp_podolsky.grid import make_radial_grid


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def load(path):
    return json.loads(path.read_text())


def test_p_out_of_range(tmp_path, capsys):
    code, _, err = run(capsys, "q-solve", "--p", 7, "--out", tmp_path / "q")
    assert code == EXIT_INPUT
    msg = json.loads(err)
    assert msg["error"] == "invalid_input"
    assert "p out of range (2,6)" in msg["message"]


def test_q_solve_report_and_manifest(tmp_path, capsys):
    out = tmp_path / "q"
    code, _, _ = run(capsys, "q-solve", "--p", 4, "--out", out)
    assert code == EXIT_OK
    rep = load(out / "report.json")
    assert rep["grad_vs_mass"] <= 1e-5 and rep["lp_vs_mass"] <= 1e-5
    man = load(out / "manifest.json")
    assert man["command"] == "q-solve"
    assert man["outputs"]["Q.bpfld"] == io.sha256_file(out / "Q.bpfld")
    Q = io.read_field(out / "Q.bpfld")
    assert Q.mass() == pytest.approx(rep["mass2"], rel=1e-14)


def test_q_solve_refined_grid(tmp_path, capsys):
    out = tmp_path / "q"
    code, _, _ = run(capsys, "q-solve", "--p", 4, "--tol", "1e-10", "--grid", "8192x60", "--out", out)
    assert code == EXIT_OK
    rep = load(out / "report.json")
    assert rep["grid"]["N"] == 8192 and rep["grid"]["R"] == 60.0
    assert max(rep["grad_vs_mass"], rep["lp_vs_mass"]) <= 1e-10


def test_config_fills_unset_flags_only(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"p": 3.5, "grid": "1024x30"}))
    out = tmp_path / "q"
    code, _, _ = run(capsys, "q-solve", "--config", cfg, "--p", 4, "--out", out)
    assert code == EXIT_OK
    rep = load(out / "report.json")
    assert rep["p"] == 4.0
    assert rep["grid"]["N"] == 1024


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"p": 4, "bogus": 1}))
    code, _, err = run(capsys, "q-solve", "--config", cfg, "--out", tmp_path / "q")
    assert code == EXIT_INPUT
    assert "bogus" in json.loads(err)["message"]


def test_validate_kernel(tmp_path, capsys):
    out = tmp_path / "k"
    code, _, _ = run(capsys, "validate-kernel", "--a", 1, "--out", out)
    assert code == EXIT_OK
    rep = load(out / "report.json")
    assert rep["pass"] and rep["max_phi_gap"] <= 1e-5


def _gaussian_evolve(out, *extra):
    return ["evolve", "--p", 4, "--a", 1, "--m", 1, "--init", "gaussian:1", "--grid", "1024x20",
            "--dt", "2e-3", "--T", "0.2", "--out", out, *extra]


def test_evolve_outputs_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(capsys, *_gaussian_evolve(a))[0] == EXIT_OK
    assert run(capsys, *_gaussian_evolve(b))[0] == EXIT_OK
    assert (a / "trajectory.csv").read_bytes() == (b / "trajectory.csv").read_bytes()
    rep = load(a / "report.json")
    assert rep["status"] == "completed"
    assert rep["mass_drift"] <= 1e-10
    rows = io.read_csv(a / "trajectory.csv")
    assert float(rows[-1]["times"]) == pytest.approx(0.2)


def test_manifest_replay_reproduces_bytes(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(capsys, *_gaussian_evolve(a))[0] == EXIT_OK
    code, _, _ = run(capsys, "evolve", "--config", a / "manifest.json", "--out", b)
    assert code == EXIT_OK
    assert (a / "trajectory.csv").read_bytes() == (b / "trajectory.csv").read_bytes()
    assert (a / "final.bpfld").read_bytes() == (b / "final.bpfld").read_bytes()


def test_manifest_for_other_command_rejected(tmp_path, capsys):
    a = tmp_path / "a"
    assert run(capsys, *_gaussian_evolve(a))[0] == EXIT_OK
    code, _, _ = run(capsys, "q-solve", "--config", a / "manifest.json", "--out", tmp_path / "q")
    assert code == EXIT_INPUT


def test_kappa_needs_ground_state(tmp_path, capsys):
    code, _, _ = run(capsys, "evolve", "--p", 4, "--init", "kappa:0.1", "--out", tmp_path / "e")
    assert code == EXIT_INPUT


def test_hypothesis_violation_exit_code(tmp_path, capsys):
    # a spread-out Gaussian has P > 0, so kappa(., 0.1) is not in the unstable set
    g = gaussian(make_radial_grid(1024, 20.0), 0.5, 2.0)
    path = io.write_field(g, tmp_path / "g.bpfld", p=4.0, a=1.0)
    code, _, err = run(capsys, "evolve", "--init", "kappa:0.1", "--from", path, "--out", tmp_path / "e")
    assert code == EXIT_HYPOTHESIS
    assert json.loads(err)["error"] == "hypotheses_violated"


def test_corrupt_field_file(tmp_path, capsys):
    bad = tmp_path / "bad.bpfld"
    bad.write_bytes(b"NOTAFIELD")
    code, _, err = run(capsys, "evolve", "--p", 4, "--from", bad, "--out", tmp_path / "e")
    assert code == EXIT_INPUT
    assert "bad magic" in json.loads(err)["message"]


def test_gamma_curve_csv(tmp_path, capsys):
    out = tmp_path / "g"
    code, _, _ = run(capsys, "gamma-curve", "--p", 4, "--a", 1, "--m-ladder", "1.2:1.6:2", "--out", out)
    assert code == EXIT_OK
    rows = io.read_csv(out / "gamma.csv")
    gam = [float(r["gamma"]) for r in rows]
    assert len(gam) == 2 and gam[1] <= gam[0]


@pytest.mark.slow
def test_ground_state_then_instability(tmp_path, capsys):
    gs = tmp_path / "gs"
    code, _, _ = run(capsys, "ground-state", "--p", 4, "--a", 1, "--m", 0.5, "--out", gs)
    assert code == EXIT_OK
    u = io.read_field(gs / "ground.bpfld")
    assert np.all(u.values > 0)
    ev = tmp_path / "ev"
    code, _, _ = run(capsys, "evolve", "--init", "kappa:0.1", "--from", gs / "ground.bpfld", "--out", ev)
    assert code == EXIT_OK
    rep = load(ev / "report.json")
    assert rep["status"] == "blowup_detected"
    assert rep["P_negative_throughout"] and rep["bound_holds"]
    assert load(ev / "manifest.json")["inputs"]


def test_flag_parsers():
    assert parse_grid("2048x30") == (2048, 30.0)
    assert parse_ladder("0.2:1.6:8") == (0.2, 1.6, 8)
    assert parse_init("kappa:-0.2") == ("kappa", -0.2)
    with pytest.raises(ValueError):
        parse_ladder("1:1:3")
    with pytest.raises(ValueError):
        parse_init("sech:1")
