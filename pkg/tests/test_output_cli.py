import io
import json
import math
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from stoch_duopoly import cli, output, simulate, stationary_state
from stoch_duopoly.cli import RunConfig, main

from conftest import ref_game

SMALL = {
    "analyze": [],
    "sweep": ["--param", "alpha", "--steps", "7", "--n-grid", "256"],
    "density": ["--density-methods", "rotation,closed_form,backward_difference", "--n-grid", "256"],
    "simulate": ["--n-steps", "3000", "--deterministic", "--seed", "9"],
    "mc-lambda": ["--n-paths", "8", "--horizon", "2"],
}


def run(tmp_path, *argv):
    out = io.StringIO()
    code = main([*argv, "--output", str(tmp_path / "run")], out=out)
    return code, out.getvalue()


def write_config(tmp_path, **data):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(data))
    return str(path)


# --- CSV and SVG --------------------------------------------------------------

def test_fmt_precision():
    assert float(output.fmt(math.pi)) == math.pi
    assert output.fmt(1 / 3).startswith("0.333333333333")
    assert output.fmt(math.nan) == "nan"
    assert output.fmt(None) == ""


def test_trajectory_csv_trailer(tmp_path):
    game = ref_game(40.0, 40.0)
    tr = simulate(game, stationary_state(game).as_array() * 1.5, "euler_maruyama", 0.05, 5000, seed=0)
    path = tmp_path / "t.csv"
    output.write_trajectory_csv(path, tr)
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0] == "n,t,x1,x2"
    assert lines[-1] == f"# truncated_at={tr.truncated_at}"
    header, rows = output.read_csv(path)
    assert len(rows) == len(tr.steps)
    np.testing.assert_array_equal(np.array(rows, dtype=float)[:, 2:], tr.states)


def test_line_plot_is_valid_svg():
    svg = output.line_plot([("a<b", [0, 1, 2], [1, math.nan, 3]), ("c", [0, 2], [0, -1])],
                           title="t & t", zero_line=True, markers=[1.0], note="note")
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    assert "href" not in svg and "<script" not in svg
    assert svg.count("<polyline") == 3  # NaN splits the first series


# --- CLI ----------------------------------------------------------------------

def test_analyze_csv(tmp_path):
    code, text = run(tmp_path, "analyze", "--alpha", "2", "--beta", "2", "--format", "csv")
    assert code == 0
    rows = dict(line.split(",") for line in text.splitlines()[1:])
    assert float(rows["mu1_re"]) == pytest.approx(-0.606607, abs=1e-6)
    assert float(rows["lambda_closed_form"]) == pytest.approx(-1.70847732, abs=1e-7)


def test_flags_override_config(tmp_path):
    cfg = write_config(tmp_path, c1=0.5, alpha=2.0, beta=2.0, d1=3.0)
    _, a = run(tmp_path, "analyze", "--config", cfg, "--format", "csv")
    _, b = run(tmp_path, "analyze", "--config", cfg, "--format", "csv", "--c1", "0.2")
    _, c = run(tmp_path, "analyze", "--format", "csv", "--alpha", "2", "--beta", "2")
    assert a != b and b == c


@pytest.mark.parametrize("argv", [["--n-grid", "8"], ["--h", "0.5"], ["--steps", "1"], ["--c1", "-1"], ["--scheme", "rk2"]])
def test_config_errors_exit_2(tmp_path, argv):
    assert run(tmp_path, "analyze", *argv)[0] == 2


def test_bad_config_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(tmp_path, "analyze", "--config", str(bad))[0] == 2
    assert run(tmp_path, "analyze", "--config", write_config(tmp_path, nope=1))[0] == 2
    assert run(tmp_path, "analyze", "--config", str(tmp_path / "missing.json"))[0] == 4


def test_numeric_failure_exit_3(tmp_path):
    # diagonal B: the angular diffusion vanishes
    code, _ = run(tmp_path, "density", "--density-methods", "closed_form", "--b11", "1", "--b22", "2")
    assert code == 3


def test_io_error_exit_4(tmp_path):
    out = io.StringIO()
    code = main(["density", "--alpha", "2", "--beta", "2", "--output", str(tmp_path / "no" / "such" / "dir")], out=out)
    assert code == 4


def test_sweep_outputs(tmp_path):
    code, text = run(tmp_path, "sweep", "--alpha", "0", "--beta", "2", "--steps", "13", "--n-grid", "512")
    assert code == 0
    header, rows = output.read_csv(tmp_path / "run_sweep.csv")
    assert header == ["param", "lambda", "method", "stderr"] and len(rows) == 13
    header, roots = output.read_csv(tmp_path / "run_roots.csv")
    assert header == ["param_lo", "param_hi", "root_estimate"] and len(roots) == 2
    ET.parse(tmp_path / "run_sweep.svg")


def test_density_outputs(tmp_path):
    code, _ = run(tmp_path, "density", "--alpha", "2", "--beta", "2", "--domain", "half",
                  "--density-methods", "rotation,backward_difference", "--n-grid", "256")
    assert code == 0
    for m in ("rotation", "backward_difference"):
        header, rows = output.read_csv(tmp_path / f"run_density_{m}.csv")
        assert header == ["theta", "p"] and len(rows) == 257
        assert float(rows[-1][0]) == pytest.approx(math.pi)
    ET.parse(tmp_path / "run_density.svg")


def test_simulate_outputs(tmp_path):
    code, _ = run(tmp_path, "simulate", "--alpha", "0.5", "--beta", "0.5", "--n-steps", "1000", "--deterministic")
    assert code == 0
    for name in ("trajectory.csv", "timeseries.svg", "phase.svg", "ode_trajectory.csv", "ode_timeseries.svg", "ode_phase.svg"):
        assert (tmp_path / f"run_{name}").exists()


def test_simulate_blowup_annotated(tmp_path):
    code, text = run(tmp_path, "simulate", "--alpha", "40", "--beta", "40", "--scheme", "euler_maruyama",
                     "--h", "0.05", "--n-steps", "5000", "--perturbation", "0.5", "--keep-every", "1")
    assert code == 0 and "truncated" in text
    assert (tmp_path / "run_trajectory.csv").read_text().splitlines()[-1].startswith("# truncated_at=")
    assert "truncated at step" in (tmp_path / "run_timeseries.svg").read_text()


@pytest.mark.parametrize("command", sorted(SMALL))
def test_commands_bit_reproducible(tmp_path, monkeypatch, command):
    argv = [command, "--alpha", "2", "--beta", "2", *SMALL[command]]
    results = []
    for k, threads in enumerate(("1", "2")):
        monkeypatch.setenv("STOCH_DUOPOLY_THREADS", threads)
        d = tmp_path / str(k)
        d.mkdir()
        code, text = run(d, *argv)
        assert code == 0
        files = {p.name: p.read_bytes() for p in sorted(d.iterdir())}
        results.append((text, files))
    assert results[0] == results[1]


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "stoch_duopoly.cli", "analyze", "--format", "csv"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("key,value")
