"""End-to-end tests for the command-line interface and artifact formats."""

import argparse
import json
import os

import numpy as np
import pytest

from gapburst.analysis import build_series
from gapburst.cli import _resolve_jobs, main, read_series_csv, write_series_csv
from gapburst.config import default_config

BASE_SIMULATE = """
[run]
seed = 0
out_dir = out
[ensemble]
kind = chain
n_atoms = 2
spacing = 1.5707963267948966
[medium]
alpha = 0.001
[solver]
solver = averaged
t_end = 50
w0 = 1e-6
"""

SWEEP_CONFIG = """
[ensemble]
kind = chain
n_atoms = 2
spacing = 1.5707963267948966
[solver]
solver = averaged
t_end = 50
w0 = 1e-6
[sweep]
g = 0.5, 10.0
alpha = 0.0005, 0.5
"""


def write_cfg(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def run_cli(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_couplings_command(tmp_path, capsys):
    cfg = write_cfg(tmp_path, BASE_SIMULATE)
    out_dir = str(tmp_path / "art")
    code, out, _ = run_cli(
        ["couplings", "--config", cfg, "--out", out_dir], capsys
    )
    assert code == 0
    digest = json.loads(out)
    assert digest["g"] == pytest.approx(2.0 / np.pi, rel=1e-12)
    assert digest["delta_l"] == pytest.approx(0.0, abs=1e-12)
    with open(os.path.join(out_dir, "couplings.json"), encoding="utf-8") as fh:
        full = json.load(fh)
    assert full["n_atoms"] == 2
    assert full["g_per_atom"] == pytest.approx([2 / np.pi, 2 / np.pi])
    assert full["alpha_c"] > 0
    assert out.count("\n") == 1


def test_simulate_writes_artifacts(tmp_path, capsys):
    cfg = write_cfg(tmp_path, BASE_SIMULATE)
    out_dir = str(tmp_path / "sim")
    code, out, _ = run_cli(
        ["simulate", "--config", cfg, "--out", out_dir, "--seed", "7"], capsys
    )
    assert code == 0
    csv_path = os.path.join(out_dir, "series.csv")
    with open(csv_path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    assert lines[0] == "# seed = 7"
    assert lines[1] == "t,s_mean,w_mean,eta,intensity"
    first = [float(v) for v in lines[2].split(",")]
    assert len(first) == 5
    assert first[0] == 0.0
    with open(os.path.join(out_dir, "summary.json"), encoding="utf-8") as fh:
        summary = json.load(fh)
    assert summary["seed"] == 7
    assert summary["regime"] == "intermediate"
    assert summary["alpha"] == 0.001
    assert summary["config"]["solver"]["solver"] == "averaged"
    digest = json.loads(out)
    assert digest["regime"] == "intermediate"
    # Derived columns obey their definitions exactly after the text round trip.
    series = read_series_csv(csv_path)
    assert np.array_equal(series.eta, 0.5 * (1.0 + series.s_mean))


def test_simulate_byte_determinism(tmp_path, capsys):
    cfg = write_cfg(tmp_path, BASE_SIMULATE)
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        code, _, _ = run_cli(
            ["simulate", "--config", cfg, "--out", str(d), "--seed", "3"],
            capsys,
        )
        assert code == 0
    for name in ("series.csv", "summary.json"):
        a = (dirs[0] / name).read_bytes()
        b = (dirs[1] / name).read_bytes()
        assert a == b


def test_simulate_direct_solver(tmp_path, capsys):
    text = """
[ensemble]
kind = chain
n_atoms = 2
spacing = 0.6283185307179586
u0_real = 0.1
s0 = 0.9
[solver]
solver = direct
retardation = phase
dt = 0.01
t_end = 5
"""
    cfg = write_cfg(tmp_path, text)
    out_dir = str(tmp_path / "direct")
    code, _, _ = run_cli(
        ["simulate", "--config", cfg, "--out", out_dir], capsys
    )
    assert code == 0
    with open(os.path.join(out_dir, "summary.json"), encoding="utf-8") as fh:
        summary = json.load(fh)
    assert summary["solver"]["solver"] == "direct"
    assert summary["solver"]["backend"] in ("cython", "python")
    assert summary["solver"]["bloch_max"] <= 1.0 + 1e-6


def test_solver_flag_overrides_config(tmp_path, capsys):
    text = BASE_SIMULATE.replace(
        "[ensemble]", "[ensemble]\nu0_real = 0.1\ns0 = 0.9"
    )
    cfg = write_cfg(tmp_path, text)
    out_dir = str(tmp_path / "forced")
    code, _, _ = run_cli(
        ["simulate", "--config", cfg, "--out", out_dir, "--solver", "direct"],
        capsys,
    )
    assert code == 0
    with open(os.path.join(out_dir, "summary.json"), encoding="utf-8") as fh:
        summary = json.load(fh)
    assert summary["solver"]["solver"] == "direct"


def test_spectrum_command(tmp_path, capsys):
    text = "[medium]\nn_k = 64\n"
    cfg = write_cfg(tmp_path, text)
    out_dir = str(tmp_path / "branches")
    code, out, _ = run_cli(
        ["spectrum", "--config", cfg, "--out", out_dir], capsys
    )
    assert code == 0
    digest = json.loads(out)
    assert digest["gap_low"] == pytest.approx(95.0, rel=1e-12)
    assert digest["gap_high"] == pytest.approx(np.hypot(95.0, 40.0), rel=1e-12)
    assert digest["omega0_location"] == "in_gap"
    with open(os.path.join(out_dir, "spectrum.csv"), encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    assert lines[1] == "k,omega_minus,omega_plus"
    assert len(lines) == 2 + 64


def test_analyze_command(tmp_path, capsys):
    cfg = write_cfg(tmp_path, BASE_SIMULATE)
    out_dir = str(tmp_path / "sim")
    run_cli(["simulate", "--config", cfg, "--out", out_dir], capsys)
    code, out, _ = run_cli(
        ["analyze", "--config", cfg, "--out", out_dir], capsys
    )
    assert code == 0
    with open(os.path.join(out_dir, "analysis.json"), encoding="utf-8") as fh:
        result = json.load(fh)
    with open(os.path.join(out_dir, "summary.json"), encoding="utf-8") as fh:
        summary = json.load(fh)
    assert result["g"] == summary["g"]
    assert result["alpha"] == summary["alpha"]
    assert result["regime"] == summary["regime"]
    assert result["bursts"]["count"] == summary["bursts"]["count"]


def test_analyze_without_series_fails(tmp_path, capsys):
    cfg = write_cfg(tmp_path, BASE_SIMULATE)
    code, _, err = run_cli(
        ["analyze", "--config", cfg, "--out", str(tmp_path / "empty")], capsys
    )
    assert code == 3
    payload = json.loads(err)
    assert "series.csv" in payload["message"]


def test_bad_config_exits_2(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "[solver]\ndt = -1\nunknown = 3\n")
    code, _, err = run_cli(["simulate", "--config", cfg], capsys)
    assert code == 2
    payload = json.loads(err)
    assert payload["error"] == "config"
    assert len(payload["problems"]) == 2


def test_missing_config_exits_2(tmp_path, capsys):
    code, _, err = run_cli(
        ["simulate", "--config", str(tmp_path / "nope.ini")], capsys
    )
    assert code == 2
    assert "cannot read" in json.loads(err)["problems"][0]


def test_numerical_failure_exits_3(tmp_path, capsys):
    # Retardation delay shorter than the step: the history lookup underflows.
    text = """
[ensemble]
kind = chain
n_atoms = 2
spacing = 0.05
u0_real = 0.001
s0 = 0.999
[solver]
solver = direct
retardation = full_dde
dt = 0.01
t_end = 0.1
"""
    cfg = write_cfg(tmp_path, text)
    code, _, err = run_cli(
        ["simulate", "--config", cfg, "--out", str(tmp_path / "x")], capsys
    )
    assert code == 3
    payload = json.loads(err)
    assert payload["error"] == "HistoryUnderflow"


def test_sweep_grid(tmp_path, capsys):
    cfg = write_cfg(tmp_path, SWEEP_CONFIG)
    out_dir = str(tmp_path / "sweep")
    code, out, _ = run_cli(
        ["sweep", "--config", cfg, "--out", out_dir], capsys
    )
    assert code == 0
    assert json.loads(out) == {"n_runs": 4}
    with open(os.path.join(out_dir, "sweep.csv"), encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    assert lines[0] == "# seed = 0"
    assert lines[1] == "g,alpha,alpha_c,regime,eta_infinity,burst_count"
    rows = [line.split(",") for line in lines[2:]]
    assert len(rows) == 4
    # Grid is emitted g-major.
    assert [float(r[0]) for r in rows] == [0.5, 0.5, 10.0, 10.0]
    assert [float(r[1]) for r in rows] == [0.0005, 0.5, 0.0005, 0.5]
    assert rows[2][3] == "coherent_burst"
    assert rows[1][3] == "field_dominated"
    assert rows[3][3] == "field_dominated"
    with open(os.path.join(out_dir, "sweep.json"), encoding="utf-8") as fh:
        agg = json.load(fh)
    assert agg["n_runs"] == 4
    assert len(agg["rows"]) == 4
    for idx, row in enumerate(agg["rows"]):
        run_dir = os.path.join(out_dir, "run_%03d" % idx)
        with open(os.path.join(run_dir, "summary.json"), encoding="utf-8") as fh:
            summary = json.load(fh)
        assert summary["g"] == row["g"]
        assert summary["alpha"] == row["alpha"]
        assert summary["regime"] == row["regime"]
        assert summary["bursts"]["count"] == row["burst_count"]
        assert os.path.exists(os.path.join(run_dir, "series.csv"))


def test_sweep_parallel_matches_serial(tmp_path, capsys):
    text = SWEEP_CONFIG.replace("g = 0.5, 10.0", "g = 10.0").replace(
        "t_end = 50", "t_end = 20"
    )
    cfg = write_cfg(tmp_path, text)
    serial = tmp_path / "serial"
    parallel = tmp_path / "parallel"
    for out_dir, jobs in ((serial, "1"), (parallel, "2")):
        code, _, _ = run_cli(
            ["sweep", "--config", cfg, "--out", str(out_dir), "--jobs", jobs],
            capsys,
        )
        assert code == 0
    assert (serial / "sweep.csv").read_bytes() == (
        parallel / "sweep.csv"
    ).read_bytes()
    for idx in range(2):
        name = "run_%03d" % idx
        assert (serial / name / "series.csv").read_bytes() == (
            parallel / name / "series.csv"
        ).read_bytes()


def test_jobs_resolution_order(monkeypatch):
    cfg = default_config()
    cfg.sections["sweep"]["jobs"] = 4

    def args(jobs=None):
        return argparse.Namespace(jobs=jobs)

    monkeypatch.delenv("APP_JOBS", raising=False)
    assert _resolve_jobs(args(3), cfg) == 3
    assert _resolve_jobs(args(), cfg) == 4
    monkeypatch.setenv("APP_JOBS", "2")
    assert _resolve_jobs(args(), cfg) == 2
    assert _resolve_jobs(args(5), cfg) == 5
    cfg.sections["sweep"]["jobs"] = None
    monkeypatch.delenv("APP_JOBS")
    assert _resolve_jobs(args(), cfg) == 1
    monkeypatch.setenv("APP_JOBS", "junk")
    from gapburst.errors import ConfigError

    with pytest.raises(ConfigError):
        _resolve_jobs(args(), cfg)


def test_out_dir_defaults_to_config(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg = write_cfg(tmp_path, "[run]\nout_dir = from_config\n")
    code, _, _ = run_cli(["couplings", "--config", cfg], capsys)
    assert code == 0
    assert os.path.exists(tmp_path / "from_config" / "couplings.json")


def test_series_csv_round_trip(tmp_path):
    t = np.linspace(0.0, 1.0, 7)
    rng = np.random.default_rng(11)
    s = rng.uniform(-1, 1, t.size)
    w = rng.uniform(0, 1e-3, t.size)
    series = build_series(t, s, w, g=3.7)
    path = tmp_path / "series.csv"
    write_series_csv(str(path), series, seed=5)
    back = read_series_csv(str(path))
    # %.17g text round trip preserves doubles exactly.
    assert np.array_equal(back.t, series.t)
    assert np.array_equal(back.s_mean, series.s_mean)
    assert np.array_equal(back.w_mean, series.w_mean)
    assert np.array_equal(back.intensity, series.intensity)
