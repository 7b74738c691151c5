import json
import subprocess
import sys

import numpy as np
import pytest

from phonolib.cli import main, parse_range
from phonolib.fit import get_model
from phonolib.io import RunManifest, load_dataset, manifest_path
from phonolib.presets import linewidth_params
from phonolib.rates import linewidth_model


@pytest.fixture
def cfg_file(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text("[lambda_system]\nt1_ns = 39.0\n")
    return p


def run(*argv):
    return main([str(a) for a in argv])


def test_parse_range():
    np.testing.assert_allclose(parse_range("4:10:2"), [4, 6, 8, 10])
    np.testing.assert_allclose(parse_range("0.26,1,4"), [0.26, 1, 4])
    assert len(parse_range("4:350:1")) == 347


def test_predict_linewidth_matches_library(tmp_path, cfg_file):
    out = tmp_path / "g.csv"
    assert run("predict", "linewidth", "--config", cfg_file, "--t-range", "4:350:1", "--out", out) == 0
    d = load_dataset(out, ("k", "mhz"))
    expect = linewidth_model(linewidth_params(), d.x)
    np.testing.assert_allclose(d.y, expect, rtol=1e-8)
    assert manifest_path(out).exists()


@pytest.mark.parametrize("q", ["t1", "lifetime", "line-shift", "splitting"])
def test_predict_quantities(q, capsys):
    assert run("predict", q, "--t-range", "5,50,300") == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 4 and lines[0].startswith("temperature_k,")


def test_fit_mott_seitz(tmp_path):
    x = np.arange(5.0, 351.0, 5.0)
    y0 = get_model("mott_seitz")(x, [1.7, 3.3, 55.0])
    rng = np.random.default_rng(5)
    data = tmp_path / "lifetimes.csv"
    rows = "\n".join(f"{a},{b},{0.01 * c}" for a, b, c in zip(x, y0 + rng.normal(0, 0.01 * y0), y0))
    data.write_text("temperature_k,lifetime_ns,sigma_ns\n" + rows + "\n")
    out = tmp_path / "fit.json"
    assert run("fit", "--model", "mott_seitz", "--data", data, "--out", out, "--check-units") == 0
    rep = json.loads(out.read_text())
    assert abs(rep["params"]["activation"] - 55.0) < 3 * rep["stderr"]["activation"]
    man = json.loads(manifest_path(out).read_text())
    assert str(data) in man["inputs"]


def test_simulate_pump_probe(tmp_path, cfg_file, capsys):
    out = tmp_path / "rec.csv"
    assert run("simulate", "pump-probe", "--config", cfg_file, "--tau", "0:200:5", "--out", out) == 0
    assert "fitted T1 = 39 " in capsys.readouterr().err
    head = out.read_text().splitlines()[0]
    assert head == "tau_ns,height,in_fit"
    m = json.loads(manifest_path(out).read_text())
    assert m["extra"]["fitted_t1_ns"] == pytest.approx(39.0, abs=0.01)


def test_simulate_trace(capsys):
    assert run("simulate", "pump-probe", "--trace-wait", "40", "--trace-resolution", "0.5") == 0
    assert capsys.readouterr().out.startswith("time_ns,intensity\n")


def test_synth_and_peaks(tmp_path, capsys):
    out, peaks = tmp_path / "s.csv", tmp_path / "p.json"
    assert run("synth", "spectrum", "--temperature", 90, "--out", out, "--fit-peaks", 2, "--peaks-out", peaks) == 0
    assert "resolvable peaks at 90 K: 2" in capsys.readouterr().err
    assert len(json.loads(peaks.read_text())["peaks"]) == 2


def test_compare_models(tmp_path):
    x = np.linspace(20, 350, 34)
    data = tmp_path / "shift.csv"
    data.write_text("temperature_k,shift_ghz\n" + "\n".join(f"{a},{2 + 1e-6 * a**3}" for a in x) + "\n")
    out = tmp_path / "cmp.json"
    assert run("compare-models", "--models", "power_law[2],power_law[3],power_law[4]", "--data", data, "--out", out) == 0
    assert json.loads(out.read_text())["ranking"][0]["model"] == "power_law[3]"


def test_budget_stdout(capsys):
    assert run("budget", "--splittings", "50", "--temperatures", "1") == 0
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert float(row[2]) == pytest.approx(1011.92, abs=0.01)


def test_config_command(capsys):
    assert run("config") == 0
    assert "[lambda_system]" in capsys.readouterr().out


class TestExitCodes:
    def test_usage(self, capsys):
        assert run() == 1
        assert run("predict", "nonsense", "--t-range", "1") == 1
        assert run("predict", "t1") == 1
        assert run("predict", "t1", "--t-range", "a:b") == 1
        assert run("fit", "--model", "nope", "--data", "x.csv") == 1

    def test_config_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text("[bath]\nt1_offset = 1\n")
        assert run("predict", "t1", "--t-range", "5", "--config", bad) == 1
        assert "did you mean 't1_offset_k'" in capsys.readouterr().err

    def test_missing_data(self, tmp_path):
        assert run("fit", "--model", "linear", "--data", tmp_path / "none.csv") == 1

    def test_domain(self):
        assert run("predict", "t1", "--t-range", "1,2") == 1

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_numerical_failure(self, tmp_path, capsys):
        data = tmp_path / "d.csv"
        data.write_text("x_k,y_ghz\n" + "\n".join(f"{v},{v * v + 1}" for v in range(-5, 6)) + "\n")
        assert run("fit", "--model", "power_law", "--data", data) == 2
        assert "numerical failure" in capsys.readouterr().err


@pytest.mark.filterwarnings("ignore::phonolib.ValidityWarning")
def test_byte_identical_outputs(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"b{k}.csv"
        assert run("budget", "--splittings", "50,1600", "--temperatures", "0.26:4:0.5", "--out", out) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_manifest_verifies(tmp_path):
    out = tmp_path / "t.csv"
    assert run("predict", "t1", "--t-range", "5:20:5", "--out", out) == 0
    d = json.loads(manifest_path(out).read_text())
    m = RunManifest(**d)
    assert m.verify() == {str(out): True}
    assert d["command"][:3] == ["phonolib", "predict", "t1"]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "phonolib", "config"], capture_output=True, text=True)
    assert r.returncode == 0 and "[bath]" in r.stdout
