import csv
import json
import subprocess
import sys

import pytest
import tomli

from fqhlab import __version__
from fqhlab.cli import DEFAULTS, main


def write(tmp_path, text):
    path = tmp_path / "run.toml"
    path.write_text(text)
    return str(path)


def read_csv(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def test_scatter_hard_disc(tmp_path):
    cfg = write(tmp_path, '[potential]\nkind = "hardcore"\nradius = 1.5\n[scatter]\nchannels = [0, 1, 2]\n')
    assert main(["scatter", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    rows = read_csv(tmp_path / "o" / "scatter.csv")
    assert [int(r["ell"]) for r in rows] == [0, 1, 2]
    assert float(rows[2]["b"]) == pytest.approx(1.5**4, rel=1e-8)
    assert rows[0]["b_born"] == "nan" and rows[1]["b_born"] == "inf"
    head = (tmp_path / "o" / "scatter.csv").read_text().splitlines()[:2]
    assert head[0] == f"# fqhlab {__version__}"
    assert json.loads(head[1][len("# config: "):])["potential"]["radius"] == 1.5


def test_laughlin_residual(tmp_path):
    assert main(["laughlin", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "summary.json").read_text())
    assert doc["status"] == "ok" and doc["version"] == __version__
    assert doc["config"]["laughlin"] == {"N": 3, "m": 2, "ell": 1, "statistics": "bose"}
    assert doc["result"]["residual"] <= 1e-10


def test_pseudopot_and_confine(tmp_path):
    assert main(["pseudopot", "--out", str(tmp_path / "p")]) == 0
    res = json.loads((tmp_path / "p" / "summary.json").read_text())["result"]
    assert res["kernel_dimension"] == res["expected_kernel_dimension"]
    assert main(["confine", "--out", str(tmp_path / "c")]) == 0
    res = json.loads((tmp_path / "c" / "summary.json").read_text())["result"]
    assert res["energy"] == pytest.approx(res["closed_form_energy"], abs=1e-8)


def test_yrast_output(tmp_path):
    assert main(["yrast", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "yrast.csv")
    assert [int(r["L"]) for r in rows] == list(range(10))
    doc = json.loads((tmp_path / "summary.json").read_text())
    assert doc["result"]["ground_L"] == 6


def test_empty_channel_list(tmp_path):
    cfg = write(tmp_path, "[scatter]\nchannels = []\n")
    assert main(["scatter", "--config", cfg, "--out", str(tmp_path)]) == 2
    err = json.loads((tmp_path / "error.json").read_text())
    assert err["kind"] == "config" and "channel" in err["message"]


@pytest.mark.parametrize("text", [
    "[converge]\na_list = [0.1, 2.0]\n",
    "[converge]\na_list = [0.05, 0.1]\n",
    "[tolerances]\nfit_residual = -1.0\n",
    "[potential]\nkind = \"yukawa\"\n",
    "[scatter]\nchannels = [-1]\n",
    "[bogus]\nx = 1\n",
    "not toml [",
])
def test_invalid_configs(tmp_path, text):
    assert main(["converge", "--config", write(tmp_path, text), "--out", str(tmp_path)]) == 2


def test_missing_subcommand(tmp_path):
    assert main(["--out", str(tmp_path)]) == 2


def test_numerical_failure_exit_code(tmp_path):
    cfg = write(tmp_path, "[tolerances]\nfit_residual = 1e-40\n[potential]\nkind = \"gaussian\"\n"
                          "height = 1.0\nwidth = 0.3\n[scatter]\nchannels = [1]\n")
    assert main(["scatter", "--config", cfg, "--out", str(tmp_path)]) == 3
    doc = json.loads((tmp_path / "summary.json").read_text())
    assert doc["status"] == "error" and doc["kind"] == "numerical"


def test_partial_convergence_is_flagged(tmp_path):
    cfg = write(tmp_path, '[potential]\nkind = "hardcore"\nradius = 40.0\n[converge]\nell = 0\n'
                          'a_list = [0.2, 0.1]\n')
    assert main(["converge", "--config", cfg, "--out", str(tmp_path)]) == 3
    doc = json.loads((tmp_path / "summary.json").read_text())
    assert doc["status"] == "partial" and doc["result"]["complete"] is False


def test_reruns_are_byte_identical(tmp_path):
    cfg = write(tmp_path, '[potential]\nkind = "softdisc"\nheight = 20.0\nradius = 1.0\n'
                          '[converge]\na_list = [0.1, 0.05]\n')
    for out in ("a", "b"):
        threads = "1" if out == "a" else "3"
        assert main(["converge", "--config", cfg, "--out", str(tmp_path / out), "--threads", threads]) == 0
    for name in ("converge.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert not list((tmp_path / "a").glob("*.tmp"))


def test_print_defaults(capsys):
    assert main(["--print-defaults"]) == 0
    assert tomli.loads(capsys.readouterr().out) == DEFAULTS


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "fqhlab", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout
