"""End-to-end runs of the command-line front end on a tiny 1D problem."""

import json

import numpy as np
import pytest

from onelap.cli import main
from onelap.config import ConfigError, parse_config

CFG = """
# tiny interval problem, fast enough for a unit test
kind = interval
lx = 1.0
nx = 3
q = 1.8
beta = 0.2
p = 1.5
p_bar = 1.6
"""


@pytest.fixture
def cfg_path(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(CFG)
    return path


def test_parse_config_round(cfg_path):
    cfg = parse_config(cfg_path)
    assert cfg.kind == "interval"
    assert cfg.dim == 1
    assert cfg.nx == 3
    assert cfg.p == 1.5


def test_parse_config_rejects_typos():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config("kindd = rect\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config("p = 1.1\np = 1.2\n")
    with pytest.raises(ConfigError, match="bad value"):
        parse_config("nx = four\n")


def test_parse_config_rejects_exponent_violations():
    with pytest.raises(ConfigError, match="q must satisfy"):
        parse_config("q = 2.5\n")
    with pytest.raises(ConfigError, match="p_bar"):
        parse_config("q = 1.5\np_bar = 1.6\n")
    with pytest.raises(ConfigError, match="p entries|p_values entries"):
        parse_config("q = 1.5\np_bar = 1.3\np = 1.4\n")


def test_solve_command(cfg_path, tmp_path):
    out = tmp_path / "out"
    rc = main(["solve", "--config", str(cfg_path), "--out", str(out),
               "--snapshots"])
    assert rc == 0
    for name in ["solve_trace.csv", "solution.field", "summary.json",
                 "solution.flux", "manifest.json"]:
        assert (out / name).exists(), name
    summary = json.loads((out / "summary.json").read_text())
    assert summary["status"] in ("converged", "polished")
    assert summary["grad_residual"] <= 1e-6
    assert summary["level"] > 0.0


def test_verify_command(cfg_path, tmp_path):
    out = tmp_path / "verify"
    rc = main(["verify", "--config", str(cfg_path), "--out", str(out)])
    assert rc == 0
    report = json.loads((out / "verify.json").read_text())
    assert report["clarke_violations"] == 0
    assert report["residual_max"] <= 1e-6
    assert report["sobolev_ok"]


def test_sweep_p_command_is_deterministic(cfg_path, tmp_path):
    cfg2 = tmp_path / "sweep.cfg"
    cfg2.write_text(CFG + "p_values = 1.6 1.5\n")
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        rc = main(["sweep-p", "--config", str(cfg2), "--out", str(out)])
        assert rc == 0
        outs.append((out / "sweep_p.csv").read_bytes())
    assert outs[0] == outs[1]    # reruns are byte-identical
    header = outs[0].decode().splitlines()[0]
    assert header.startswith("p,beta,c,")


def test_sweep_beta_command(cfg_path, tmp_path):
    cfg2 = tmp_path / "beta.cfg"
    cfg2.write_text(CFG + "beta_values = 0.3 0.2\np_values = 1.6 1.5\n")
    out = tmp_path / "beta_out"
    rc = main(["sweep-beta", "--config", str(cfg2), "--out", str(out)])
    assert rc == 0
    lines = (out / "sweep_beta.csv").read_text().splitlines()
    assert lines[0].endswith("l1_to_final")
    assert len(lines) == 3
    # the last record is the reference state: zero distance to itself
    assert float(lines[-1].rsplit(",", 1)[1]) == 0.0


def test_export_command(cfg_path, tmp_path):
    solve_out = tmp_path / "s"
    main(["solve", "--config", str(cfg_path), "--out", str(solve_out)])
    out = tmp_path / "e"
    rc = main(["export", "--config", str(cfg_path), "--out", str(out),
               "--field", str(solve_out / "solution.field")])
    assert rc == 0
    assert (out / "mesh.txt").exists()
    rows = (out / "field.csv").read_text().splitlines()
    assert rows[0] == "x,u"
    assert len(rows) == 5    # header + 4 nodes
    vals = np.array([float(r.split(",")[1]) for r in rows[1:]])
    assert vals[0] == 0.0 and vals[-1] == 0.0
