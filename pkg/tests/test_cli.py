import csv
import io
import json
import os
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from vlasov_linear import cli
from vlasov_linear import equilibria as E
from vlasov_linear import greens_function as gf

HERE = Path(__file__).parent


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def gp1(tmp_path):
    p = tmp_path / "gp1.json"
    p.write_text(json.dumps({"kind": {"generalized_poisson": 1}}))
    return str(p)


def test_parse_grid():
    assert np.allclose(cli.parse_grid("0:1:5"), [0, 0.25, 0.5, 0.75, 1])
    assert cli.parse_grid("2:2:1").tolist() == [2.0]
    for bad in ("0:1", "1:0:3", "0:1:0", "a:b:c", "0:inf:3"):
        with pytest.raises(cli.UsageError):
            cli.parse_grid(bad)


def test_dispersion_poisson(capsys, gp1):
    code, out, _ = run(capsys, "dispersion", "--equilibrium", gp1, "--r-grid", "0.05:0.25:5")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["r", "omega1", "omega2", "re_m_l", "im_m_l", "residual", "iterations"]
    for row in table:
        assert float(row["omega1"]) == pytest.approx(1.0, abs=1e-10)
        assert float(row["omega2"]) == pytest.approx(float(row["r"]), abs=1e-10)


def test_dispersion_usage_errors(capsys):
    assert run(capsys, "dispersion", "--r-grid=-1:0.1:3")[0] == 1
    assert run(capsys, "dispersion")[0] == 1
    assert run(capsys, "nonsense")[0] == 1
    assert run(capsys, "dispersion", "--r-grid", "0.1:0.2:2", "--equilibrium", "/nonexistent.json")[0] == 1
    assert run(capsys, "dispersion", "--r-grid", "0.1:0.2:2", "--threads", "0")[0] == 1


def test_dispersion_out_of_range_is_numerical_failure(capsys):
    code, _, err = run(capsys, "dispersion", "--r-grid", "0.1:0.9:3")
    assert code == 2 and "NoConvergence" in err


def test_poles(capsys):
    code, out, _ = run(capsys, "poles", "--j", "3", "--xi-grid", "0.02:0.1:3")
    assert code == 0
    table = rows(out)
    assert len(table) == 3 * 4
    for row in table:
        x = float(row["xi"])
        zeta = complex(float(row["re_root_zeta"]), float(row["im_root_zeta"]))
        kz = complex(float(row["re_root_k"]), float(row["im_root_k"]))
        assert abs(kz * x - (-1j) * (zeta - x)) < 1e-12
    assert run(capsys, "poles", "--j", "2", "--xi-grid", "0:0:1")[0] == 1
    assert run(capsys, "poles", "--j", "5", "--xi-grid", "0.01:0.2:3")[0] == 1
    assert run(capsys, "poles", "--j", "5", "--xi-grid", "0.01:0.05:3")[0] == 0


def test_greens_closed(capsys, gp1):
    code, out, _ = run(capsys, "greens", "--equilibrium", gp1, "--xi", "0.3", "--tau-grid", "0:10:11",
                       "--method", "closed")
    assert code == 0
    table = rows(out)
    tau = np.array([float(r["tau"]) for r in table])
    sm = np.array([float(r["smooth"]) for r in table])
    assert np.allclose(sm, -np.exp(-0.3 * tau) * np.sin(tau), atol=1e-15)


def test_greens_high_json(capsys):
    code, out, _ = run(capsys, "greens", "--xi", "1.0", "--tau-grid", "0:4:3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    ref = gf.greens_contour_high(E.maxwellian(), 1.0, [0.0, 2.0, 4.0]).smooth
    assert np.allclose([d["smooth"] for d in data], ref, atol=1e-12)


def test_volterra_and_output_file(capsys, tmp_path, gp1):
    out_file = tmp_path / "v.csv"
    code, out, _ = run(capsys, "volterra", "--equilibrium", gp1, "--xi", "0.5", "--t-max", "10", "--steps", "64",
                       "--output", str(out_file))
    assert code == 0 and out == ""
    table = rows(out_file.read_text())
    assert len(table) == 65 and float(table[0]["re_rho"]) == pytest.approx(float(table[0]["re_h"]))


def test_volterra_forcing_file(capsys, tmp_path):
    f = tmp_path / "f.json"
    f.write_text(json.dumps({"f0": "gaussian"}))
    code, _, err = run(capsys, "volterra", "--xi", "0.5", "--forcing", str(f), "--steps", "64")
    assert code == 1 and "separate" in err
    f.write_text(json.dumps({"g": {"kind": "gaussian"}, "q": {"kind": "gaussian", "scale": 0.5}}))
    assert run(capsys, "volterra", "--xi", "0.5", "--forcing", str(f), "--steps", "64")[0] == 0


def test_forcing_decay(capsys):
    code, out, err = run(capsys, "forcing-decay", "--t-grid", "8:64:4")
    assert code == 0 and "fitted decay exponent" in err
    code, out, _ = run(capsys, "forcing-decay", "--t-grid", "8:64:4", "--format", "json")
    assert json.loads(out)["exponent"] == pytest.approx(3.0, abs=0.1)
    assert run(capsys, "forcing-decay", "--t-grid", "0:4:3")[0] == 1


def test_kpath(capsys):
    code, out, _ = run(capsys, "kpath", "--re-grid=-2:2:5", "--im", "0.0")
    assert code == 0
    table = rows(out)
    assert {r["region"] for r in table} == {"RealAxis"}
    assert float(table[2]["re_k"]) == pytest.approx(-2.0)
    assert run(capsys, "kpath", "--re-grid", "0:1:2", "--im", "5")[0] == 1


def test_penrose(capsys, tmp_path):
    code, out, _ = run(capsys, "penrose")
    assert code == 0 and json.loads(out)["stable"] is True
    code, out, _ = run(capsys, "penrose", "--probes", "")
    assert code == 0 and json.loads(out)["no_probes"] is True
    assert run(capsys, "penrose", "--probes", "-1")[0] == 1
    eq = tmp_path / "ts.json"
    eq.write_text(json.dumps({"kind": "custom", "callback": "fixtures_custom:two_stream", "theta": 0.5, "d": 20}))
    code, out, _ = run(capsys, "penrose", "--equilibrium", str(eq), "--probes", "0.1,2")
    assert code == 2
    assert json.loads(out)["winding_numbers"]["0.1"] != 0


def test_validate(capsys, gp1):
    code, out, err = run(capsys, "validate", "--equilibrium", gp1, "--only", "kernel_recursions,dispersion_relation",
                         "--tol", "residual=1e-20")
    assert code == 0
    assert "ignored" in err and "tighten" in err
    assert out.strip().splitlines()[-1].startswith("PASS")
    assert run(capsys, "validate", "--tol", "residual")[0] == 1


def test_threads_and_determinism(capsys):
    args = ["dispersion", "--r-grid", "0.05:0.25:9"]
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    _, c, _ = run(capsys, *args, "--threads", "4")
    assert a == b == c


def test_module_entry_point(tmp_path):
    env = dict(os.environ, PYTHONPATH=str(HERE))
    res = subprocess.run([sys.executable, "-m", "vlasov_linear", "poles", "--j", "2", "--xi-grid", "0.1:0.1:1"],
                         capture_output=True, text=True, env=env, timeout=120)
    assert res.returncode == 0 and res.stdout.startswith("xi,index")
    res = subprocess.run([sys.executable, "-m", "vlasov_linear", "poles", "--j", "2", "--xi-grid", "0:0:1"],
                         capture_output=True, text=True, env=env, timeout=120)
    assert res.returncode == 1 and "usage error" in res.stderr
