from __future__ import annotations

import json
import re
import subprocess
import sys

import pytest

from deqctl import io
from deqctl.cli import run
from deqctl.params import WORKED_EXAMPLE

MODEL = WORKED_EXAMPLE.as_dict()
NUMBER = re.compile(r"^-?\d\.(\d+)e[+-]\d+$")


def write(tmp_path, cfg, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def cli(tmp_path, cfg, *extra, out="out"):
    code = run([*extra, "--config", str(write(tmp_path, cfg)), "--out", str(tmp_path / out), "--quiet"])
    return code, tmp_path / out


def significant_digits(text: str) -> list[int]:
    digits = []
    for token in re.split(r"[,\n=]", text):
        m = NUMBER.match(token)
        if m:
            digits.append(1 + len(m.group(1)))
    return digits


def test_solve_writes_policy_and_curves(tmp_path):
    code, out = cli(tmp_path, {"command": "solve", "model": MODEL})
    assert code == 0
    rep = io.read_report(out / "policy.txt")
    assert rep["regime"] == "TwoSided"
    assert float(rep["a_star"]) == pytest.approx(-0.5248, abs=5e-3)
    assert float(rep["T_s"]) == 1.0
    assert set(rep) >= {"a_star", "b_star", "c", "k_s", "k_b", "T_s", "T_b"}
    w = (out / "W.csv").read_text().splitlines()
    assert w[0] == "x,W,Wp" and len(w) > 100
    assert (out / "Q.csv").read_text().startswith("x,Q\n")


def test_solve_zero_control_emits_no_barriers(tmp_path):
    code, out = cli(tmp_path, {"model": {**MODEL, "p_s": 10.0, "p_b": 10.0}}, "solve")
    assert code == 0
    rep = io.read_report(out / "policy.txt")
    assert rep["regime"] == "ZeroControl"
    assert rep["a_star"] == rep["b_star"] == rep["c"] == "none"


def test_numbers_carry_ten_significant_digits(tmp_path):
    code, out = cli(tmp_path, {"model": MODEL}, "solve")
    assert code == 0
    for name in ("policy.txt", "W.csv"):
        text = (out / name).read_text()
        digits = significant_digits(text)
        assert digits and min(digits) >= 10
        assert "\r" not in text


def test_check_reports_each_row(tmp_path):
    code, out = cli(tmp_path, {}, "check")
    rep = io.read_report(out / "check.txt")
    assert rep["total"] == "6"
    assert rep["c.status"] == "PASS"
    # the exit code follows the rows
    assert code == (0 if rep["passed"] == "6" else 3)


def test_simulate_dcp_reproducible(tmp_path):
    cfg = {"model": MODEL, "mc": {"reps": 20, "dt": 0.01, "T_max": 2.0, "seed": 3, "write_path": True}}
    assert cli(tmp_path, cfg, "simulate-dcp", out="a")[0] == 0
    assert cli(tmp_path, cfg, "simulate-dcp", out="b")[0] == 0
    for name in ("cost.txt", "path.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    rep = io.read_report(tmp_path / "a" / "cost.txt")
    assert rep["seed"] == "3" and float(rep["stderr"]) > 0


def test_seed_flag_overrides_config(tmp_path):
    cfg = {"model": MODEL, "mc": {"reps": 10, "dt": 0.01, "T_max": 1.0, "seed": 3}}
    cli(tmp_path, cfg, "simulate-dcp", out="a")
    cli(tmp_path, cfg, "simulate-dcp", "--seed", "4", out="b")
    assert io.read_report(tmp_path / "b" / "cost.txt")["seed"] == "4"
    assert (tmp_path / "a" / "cost.txt").read_text() != (tmp_path / "b" / "cost.txt").read_text()


def test_simulate_queue_outputs(tmp_path):
    cfg = {"model": MODEL, "queue": {"bridge": "markov", "n": 25, "T": 2.0, "reps": 5, "seed": 1}}
    code, out = cli(tmp_path, cfg, "simulate-queue")
    assert code == 0
    rep = io.read_report(out / "cost.txt")
    assert (rep["m_b"], rep["m_s"]) == ("-3", "1")
    ev = (out / "events.csv").read_text().splitlines()
    assert ev[0] == "t,event_type,class,X,G_b,G_s,U_b,U_s"
    assert ev[1].split(",")[1] == "init"
    assert (out / "scaled.csv").read_text().startswith("t,Xhat,")


def test_simulate_queue_explicit_config(tmp_path):
    cfg = {"queue": {"n": 4, "lambda0": 1.0, "beta_b": 0.0, "beta_s": 0.0,
                     "interarrival_s": {"family": "erlang", "k": 3}, "patience_b": "uniform",
                     "m_b": -2, "m_s": 2, "T": 3.0, "reps": 3, "seed": 0}}
    code, out = cli(tmp_path, cfg, "simulate-queue")
    assert code == 0
    assert io.read_report(out / "cost.txt")["m_s"] == "2"


def test_convergence_outputs(tmp_path):
    cfg = {"model": MODEL, "convergence": {"n_list": [25], "reps": 3, "seed": 2, "T_max": 1.0}}
    code, out = cli(tmp_path, cfg, "convergence")
    assert code == 0
    rows = (out / "convergence.csv").read_text().splitlines()
    assert rows[0] == "n,policy,m_b,m_s,mean,stderr,value,gap"
    assert len(rows) == 1 + 6
    assert (out / "diagnostics.csv").read_text().startswith("n,")


def test_plot_flag_renders_figures(tmp_path):
    code, out = cli(tmp_path, {"model": MODEL}, "solve", "--plot")
    assert code == 0
    assert (out / "W.png").stat().st_size > 0 and (out / "Q.png").stat().st_size > 0


@pytest.mark.parametrize("cfg,where", [
    ({"model": {**MODEL, "sigma2": -1.0}}, "model.sigma2"),
    ({"model": {k: v for k, v in MODEL.items() if k != "beta"}}, "model"),
    ({"model": MODEL, "solver": {"x_maxx": 3}}, "solver.x_maxx"),
    ({"model": MODEL, "solver": {"W_big": 1.0}}, "solver"),
])
def test_invalid_config_exit_one(tmp_path, capsys, cfg, where):
    code, _ = cli(tmp_path, cfg, "solve")
    assert code == 1
    assert f"invalid config: {where}" in capsys.readouterr().err


def test_missing_seed_exit_one(tmp_path, capsys):
    code, _ = cli(tmp_path, {"model": MODEL, "mc": {"reps": 10}}, "simulate-dcp")
    assert code == 1
    assert "mc.seed" in capsys.readouterr().err


def test_unknown_command_exit_one(tmp_path):
    assert cli(tmp_path, {"command": "fly", "model": MODEL})[0] == 1


def test_solver_failure_exit_two(tmp_path, capsys):
    code, _ = cli(tmp_path, {"model": MODEL, "solver": {"x_max": 0.05}}, "solve")
    assert code == 2
    assert "solver failure" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    path = write(tmp_path, {"model": MODEL})
    res = subprocess.run([sys.executable, "-m", "deqctl", "solve", "--config", str(path), "--out", str(tmp_path / "o")],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("regime=TwoSided")
