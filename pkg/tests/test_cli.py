import json
import subprocess
import sys

import pytest

from dotcavity.cli import main, read_config
from dotcavity.errors import InputError

SWEEP_ARGS = [
    "sweep", "--tau-d-intra", "1ns",
    "--t-min", "0.001meV", "--t-max", "0.1meV", "--t-points", "2",
    "--delta-e-min", "1meV", "--delta-e-max", "10meV", "--delta-e-points", "2",
]


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_default(capsys):
    code, out, _ = run(["verify"], capsys)
    assert code == 0
    assert "cnot_truth_table" in out and out.strip().endswith("PASS")


def test_verify_cutoff_one(capsys):
    code, _, err = run(["verify", "--cutoff", "1"], capsys)
    assert code == 2
    assert "sqrt(2)" in err


def test_verify_json(capsys):
    code, out, _ = run(["verify", "--json"], capsys)
    assert code == 0
    checks = json.loads(out)["checks"]
    assert checks and all(set(c) == {"check", "deviation", "pass"} for c in checks)


def test_global_flags_before_subcommand(capsys):
    code, out, _ = run(["--json", "verify"], capsys)
    assert code == 0 and json.loads(out)["all_passed"]


def test_adiabatic_reference_params(tmp_path, capsys):
    out_csv = tmp_path / "traj.csv"
    code, out, _ = run(
        ["adiabatic", "--omega2", "0.1meV", "--omegac", "0.1meV", "--delta", "1meV", "--steps", "400",
         "--out", str(out_csv)],
        capsys,
    )
    assert code == 0
    assert "rel_deviation" in out
    rows = out_csv.read_text().splitlines()
    assert len(rows) == 402
    assert all(len(r.split(",")) == 5 for r in rows)


@pytest.mark.parametrize("delta", ["0", "0meV"])
def test_adiabatic_zero_delta(delta, capsys):
    code, _, err = run(["adiabatic", "--delta", delta], capsys)
    assert code == 2 and "error" in err


def test_adiabatic_tolerance_failure(capsys):
    code, _, _ = run(["adiabatic", "--steps", "200", "--tolerance", "0.001"], capsys)
    assert code == 1


def test_budget_paper(capsys):
    code, out, _ = run(["budget", "--preset", "paper", "--tau-d-intra", "1ns"], capsys)
    assert code == 0
    lines = dict(line.split("=", 1) for line in out.strip().splitlines())
    lines = {k.strip(): v.strip() for k, v in lines.items()}
    assert lines["gamma"] == "1.0000e-6"
    assert float(lines["enhancement"]) == pytest.approx(1e3, rel=1e-6)
    assert lines["t_gate_cavity"].endswith(" ps")


def test_budget_missing_tau(capsys):
    code, _, err = run(["budget", "--preset", "paper"], capsys)
    assert code == 2 and "tau-d-intra" in err


def test_budget_json_and_explicit(capsys):
    code, out, _ = run(
        ["budget", "--json", "--gamma", "1e-6", "--omega1-intra", "0.1meV", "--omega2", "0.1meV",
         "--omegac-intra", "300MHz", "--delta", "1meV", "--tau-d-intra", "1ns"],
        capsys,
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["enhancement"] == pytest.approx(1e3, rel=1e-12)


def test_budget_mis_united_flag(capsys):
    code, _, err = run(["budget", "--preset", "paper", "--tau-d-intra", "1ns", "--omega2", "300MHz"], capsys)
    assert code == 2


def test_sweep_rows(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert run(SWEEP_ARGS + ["--out", str(out)], capsys)[0] == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 5
    assert lines[0] == "t_meV,delta_meV,gamma,omega_eff_meV,tau_G_ps,tau_d_ps,rho"


def test_noise_zero_rates(capsys):
    code, out, _ = run(["noise", "--gammas", "1,0.01"], capsys)
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert len(rows) == 2
    assert all(float(r.split(",")[1]) >= 0.999999 for r in rows)


def test_config_file_and_override(tmp_path, capsys, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# budget settings\npreset = paper\ntau_d_intra = 2ns   # intra-dot\n")
    code, out, _ = run(["budget", "--config", str(cfg), "--json"], capsys)
    assert code == 0
    assert json.loads(out)["tau_d"] == pytest.approx(2000.0 / 9.99999000001e-07)
    code, out, _ = run(["budget", "--config", str(cfg), "--json", "--tau-d-intra", "1ns"], capsys)
    assert json.loads(out)["tau_d"] == pytest.approx(1000.0 / 9.99999000001e-07)
    monkeypatch.setenv("DOTCAVITY_CONFIG", str(cfg))
    code, out, _ = run(["budget", "--json"], capsys)
    assert code == 0


def test_config_rejects_unknown_key_and_missing_unit(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    with pytest.raises(InputError, match="unknown key"):
        read_config(bad)
    assert run(["budget", "--config", str(bad)], capsys)[0] == 2
    bad.write_text("tau_d_intra = 1\n")
    with pytest.raises(InputError, match="unit"):
        read_config(bad)


def test_malformed_input_never_crashes(capsys):
    for argv in (["nope"], ["budget", "--gamma", "abc"], ["sweep", "--t-points", "x"], ["verify", "--cutoff", "-4"]):
        assert run(argv, capsys)[0] == 2


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "dotcavity", "verify"], capture_output=True, text=True)
    assert res.returncode == 0 and "PASS" in res.stdout
