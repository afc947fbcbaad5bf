import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from semibounded import cli, spectra
from semibounded.cli import InputError, RunConfig, main, parse_f_spec, parse_grid, run
from semibounded.forms import read_coefficients_csv

SPECS = Path(__file__).resolve().parents[1] / "specs"


def run_cli(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_moments_hilbert(capsys):
    code, out, _ = run_cli(["moments", "--input", str(SPECS / "hilbert.json"), "--n-max", "64"], capsys)
    assert code == 0
    assert out.startswith("# schema_version: 1, kind: hankel")
    c = read_coefficients_csv(out.splitlines())
    assert np.allclose(c.values, 1 / np.arange(1, 130), rtol=1e-15)


def test_moments_atom_at_one(capsys):
    code, out, _ = run_cli(["moments", "--input", str(SPECS / "atom_at_one.json"), "--n-max", "8"], capsys)
    assert code == 0
    c = read_coefficients_csv(out.splitlines())
    assert np.array_equal(c.values, np.ones(9))


def test_diagnose_atom_at_one(capsys):
    code, out, err = run_cli(["diagnose", "--input", str(SPECS / "atom_at_one.json"), "--table"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["schema_version"] == 1 and rep["overall"] is False
    assert "absolutely_continuous" in err


def test_diagnose_hilbert_includes_widom(capsys):
    code, out, _ = run_cli(["diagnose", "--input", str(SPECS / "hilbert.json")], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["overall"] is True
    assert rep["reports"]["widom_boundedness"]["overall"] is True


def test_bridge_check(capsys):
    code, out, _ = run_cli(["bridge-check", "--f", "e3", "--grid", "log:0.1:50:24"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["max_residual"] <= 1e-8
    assert len(rep["per_lambda"]) == 24 and len(rep["lambda_grid"]) == 24
    assert rep["f_spec"] == "e3"


def test_section_spectrum(capsys):
    code, out, _ = run_cli(["section-spectrum", "--input", str(SPECS / "trig_2cos.json"),
                            "--section-size", "8,64"], capsys)
    rep = json.loads(out)
    assert code == 0
    for r in rep["reports"]:
        N = r["N"]
        assert r["lambda_min"] == pytest.approx(2 - np.cos(np.pi / (N + 1)), abs=1e-9)
        assert r["converged"] is True


def test_outer_csv(capsys):
    code, out, _ = run_cli(["outer", "--input", str(SPECS / "trig_2cos.json"), "--radius", "0.999",
                            "--points", "16"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# schema_version: 1")
    assert lines[1] == "theta,outer_modulus_sq,density"
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[2:]])
    assert rows.shape == (16, 3)
    assert np.max(np.abs(rows[:, 1] - rows[:, 2])) < 5e-3


@pytest.mark.parametrize("spec", ["hilbert", "atom_at_one", "trig_2cos"])
def test_round_trip_moments_csv_form_eval(spec, tmp_path, capsys):
    csv_path = tmp_path / f"{spec}.csv"
    f_specs = ["e0", "ones:8", "geom:0.5:16", "random:16", "1,-2,0.5"]
    assert main(["moments", "--input", str(SPECS / f"{spec}.json"), "--n-max", "32",
                 "--output", str(csv_path)]) == 0
    args = sum((["--f", f] for f in f_specs), [])
    assert main(["form-eval", "--input", str(SPECS / f"{spec}.json"), *args]) == 0
    via = json.loads(capsys.readouterr().out)["evaluations"]
    assert main(["form-eval", "--input", str(csv_path), *args]) == 0
    direct = json.loads(capsys.readouterr().out)["evaluations"]
    for a, b in zip(via, direct):
        assert abs(a["form_via_measure"] - b["form_direct"]) <= 1e-10 * (1 + abs(a["form_via_measure"]))


@pytest.mark.parametrize(
    "args",
    [
        ["section-spectrum", "--input", "{spec}/hilbert.json", "--section-size", "16,128"],
        ["form-eval", "--input", "{spec}/trig_2cos.json", "--f", "random:32"],
        ["diagnose", "--input", "{spec}/hilbert.json"],
        ["bridge-check", "--f", "random:16"],
        ["outer", "--input", "{spec}/trig_2cos.json"],
        ["moments", "--input", "{spec}/atom_at_one.json"],
    ],
)
def test_byte_identical_outputs(args, tmp_path):
    args = [a.format(spec=SPECS) for a in args]
    outputs = []
    for k in range(2):
        path = tmp_path / f"out{k}"
        assert main([*args, "--seed", "7", "--output", str(path)]) == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]


def test_subprocess_entry_point(tmp_path):
    cmd = [sys.executable, "-m", "semibounded", "moments", "--input", str(SPECS / "hilbert.json"), "--n-max", "4"]
    res = subprocess.run(cmd, capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert "0,1.0" in res.stdout


# --- error contract -----------------------------------------------------------------


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_exit_2_json_syntax(tmp_path, capsys):
    path = write(tmp_path, "bad.json", '{"support": "circle",\n  "atoms": [}\n')
    code, _, err = run_cli(["moments", "--input", path], capsys)
    assert code == 2
    assert "line 2 column" in err


def test_exit_2_field_path(tmp_path, capsys):
    path = write(tmp_path, "bad.json", json.dumps({"support": "circle", "atoms": [{"location": 0, "mass": -1}]}))
    code, _, err = run_cli(["diagnose", "--input", path], capsys)
    assert code == 2
    assert "atoms[0].mass" in err


def test_exit_2_csv_line(tmp_path, capsys):
    path = write(tmp_path, "bad.csv", "# schema_version: 1, kind: hankel\nn,value\n0,1\n1,oops\n2,1\n")
    code, _, err = run_cli(["form-eval", "--input", path, "--f", "e0"], capsys)
    assert code == 2
    assert "line 4" in err


def test_exit_2_missing_file(capsys):
    code, _, err = run_cli(["moments", "--input", "/nonexistent/m.json"], capsys)
    assert code == 2 and "No such file" in err


@pytest.mark.parametrize(
    "args, needle",
    [
        (["bridge-check", "--f", "nonsense"], "--f"),
        (["bridge-check", "--f", "e1", "--grid", "log:0:1:4"], "--grid"),
        (["bridge-check", "--f", "e1", "--grid", "lin:1:60:4"], "--grid"),
        (["bridge-check", "--f", "random:65"], "--f"),
        (["bridge-check"], "--f"),
        (["moments"], "--input"),
        (["section-spectrum", "--input", "x.json"], "--section-size"),
        (["moments", "--input", "x.json", "--tol", "0"], "--tol"),
        (["outer", "--input", "x.json", "--radius", "0.5"], "--radius"),
    ],
)
def test_exit_2_arguments(args, needle, capsys):
    code, _, err = run_cli(args, capsys)
    assert code == 2
    assert needle in err


def test_exit_2_section_too_large_for_csv(tmp_path, capsys):
    path = write(tmp_path, "h.csv", "n,value\n0,1\n1,0.5\n2,0.25\n")
    code, _, err = run_cli(["section-spectrum", "--input", path, "--section-size", "5"], capsys)
    assert code == 2 and "--section-size 5" in err


def test_exit_2_outer_on_interval(capsys):
    code, _, err = run_cli(["outer", "--input", str(SPECS / "hilbert.json")], capsys)
    assert code == 2 and "circle" in err


def test_exit_3_partial_report(monkeypatch, tmp_path, capsys):
    def fail(c, N, tol, seed):
        raise spectra.LanczosNotConverged("stuck", spectra.SpectralReport(N, 0.5, 2.5, 1e-3, 4 * N))

    monkeypatch.setattr(cli.spectra, "extreme_eigs", fail)
    out = tmp_path / "partial.json"
    code = main(["section-spectrum", "--input", str(SPECS / "trig_2cos.json"), "--section-size", "8",
                 "--output", str(out)])
    assert code == 3
    rep = json.loads(out.read_text())
    assert rep["reports"][0]["converged"] is False
    assert rep["reports"][0]["lambda_max"] == 2.5
    assert "did not converge" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == 2


# --- mini-languages -----------------------------------------------------------------------


def test_parse_f_spec():
    assert np.array_equal(parse_f_spec("e3"), [0, 0, 0, 1])
    assert np.array_equal(parse_f_spec("ones:3"), [1, 1, 1])
    assert np.allclose(parse_f_spec("geom:0.5:4"), [1, 0.5, 0.25, 0.125])
    assert np.array_equal(parse_f_spec("random:5", 3), parse_f_spec("random:5", 3))
    assert np.array_equal(parse_f_spec("1, 2,3"), [1, 2, 3])
    for bad in ("", "ones:0", "geom:0.5", "e", "x,y"):
        with pytest.raises(InputError):
            parse_f_spec(bad)


def test_parse_grid():
    assert np.allclose(parse_grid("log:0.1:50:24"), np.geomspace(0.1, 50, 24))
    assert np.allclose(parse_grid("lin:1:2:3"), [1, 1.5, 2])
    assert np.allclose(parse_grid("0.5,2"), [0.5, 2])
    assert parse_grid(None).size == 24
    with pytest.raises(InputError):
        parse_grid("log:1:2")


def test_run_config_validation():
    assert run(RunConfig("bridge-check", f=["e0"], output=None)) == 0
    with pytest.raises(InputError):
        RunConfig("moments", input="x", n_max=0).validate()
    with pytest.raises(InputError):
        RunConfig("bogus").validate()
