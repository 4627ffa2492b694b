import json
import os
import subprocess
import sys

import numpy as np
import pytest

from stieltjes_lab import catalog, transforms
from stieltjes_lab.cli import parse_grid, run
from stieltjes_lab.errors import InvalidInput
from stieltjes_lab.mellin import (CriticalLineSpectrum, read_sampled_csv, tau_grid,
                                  write_sampled_csv, write_spectrum_csv)


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_grid():
    assert np.allclose(parse_grid("1,100,3"), [1, 10, 100])
    for bad in ("1,1,2", "1,2", "a,b,c", "0,1,4", "1,10,1"):
        with pytest.raises(InvalidInput):
            parse_grid(bad)


def test_transform_csv_to_file(tmp_path, capsys):
    out = tmp_path / "h.csv"
    code, _, _ = _run(capsys, "transform", "--op", "hilbert", "--fn", "cauchy",
                      "--grid", "0.5,2,3", "-o", str(out))
    assert code == 0
    f = read_sampled_csv(out)
    assert np.allclose(f.values, -np.log(f.x) / (1 + f.x), atol=1e-9)


def test_transform_from_csv_file(tmp_path, capsys):
    x = np.geomspace(1e-8, 1e8, 1281)
    src = tmp_path / "f.csv"
    from stieltjes_lab.mellin import SampledFunction
    write_sampled_csv(src, SampledFunction(x, 1 / (1 + x) ** 2))
    code, out, _ = _run(capsys, "transform", "--op", "stieltjes", "--fn", str(src),
                        "--grid", "1,1.5,2", "--format", "json")
    assert code == 0
    data = json.loads(out)
    want = catalog.get("cauchy2").stieltjes(np.array(data["x"]))
    assert np.allclose(data["re"], want, rtol=1e-6)


def test_transform_mellin_route(capsys):
    code, out, _ = _run(capsys, "transform", "--op", "s2", "--fn", "exp", "--route", "mellin",
                        "--grid", "0.5,2,3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    direct = transforms.stieltjes2(catalog.get("exp"), np.array(data["x"]))
    assert np.allclose(data["re"], direct.real, rtol=1e-5)


def test_degenerate_grid_exit_2(capsys):
    code, out, err = _run(capsys, "transform", "--op", "hilbert", "--fn", "cauchy",
                          "--grid", "1,1,2")
    assert code == 2 and out == "" and "grid" in err


def test_errors_json_on_stderr(capsys):
    code, _, err = _run(capsys, "transform", "--op", "laplace", "--fn", "nope", "--format", "json")
    assert code == 2
    assert json.loads(err)["error"] == "UnknownEntry"


def test_bad_argument_exit_2(capsys):
    code, _, err = _run(capsys, "transform", "--op", "bogus", "--fn", "exp")
    assert code == 2 and "bogus" in err


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"grid": "0.5,2,4", "rel_tol": 1e-9, "format": "json"}))
    code, out, _ = _run(capsys, "transform", "--op", "stieltjes", "--fn", "exp",
                        "--config", str(cfg))
    assert code == 0 and len(json.loads(out)["x"]) == 4
    # flags override the file
    code, out, _ = _run(capsys, "transform", "--op", "stieltjes", "--fn", "exp",
                        "--config", str(cfg), "--grid", "0.5,2,3", "--format", "csv")
    assert code == 0 and out.startswith("x,re,im") and len(out.splitlines()) == 4


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"colour": "red"}))
    code, _, err = _run(capsys, "catalog", "list", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_spectrum_command(capsys):
    code, out, _ = _run(capsys, "spectrum", "--fn", "exp", "--tau-max", "1", "--tau-step", "0.5",
                        "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["tau"] == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert abs(data["re"][2] - np.sqrt(np.pi)) < 1e-9


def test_convolve_methods(capsys):
    results = []
    for method in ("mb", "pointwise"):
        code, out, _ = _run(capsys, "convolve", "--f", "cauchy", "--g", "cauchy",
                            "--method", method, "--grid", "1,2,2", "--format", "json")
        assert code == 0
        results.append(json.loads(out)["re"][0])
    assert abs(results[0] - 5 * np.pi ** 2 / 16) < 1e-5
    assert abs(results[1] - 5 * np.pi ** 2 / 16) < 1e-8


def _s2_spectrum_file(tmp_path, name):
    tau = tau_grid()
    G = CriticalLineSpectrum(tau, transforms.symbol("stieltjes2", tau)
                             * catalog.get(name).spectrum(tau).values)
    path = tmp_path / "g.csv"
    write_spectrum_csv(path, G)
    return path


def test_invert_spectral_and_series(tmp_path, capsys):
    path = _s2_spectrum_file(tmp_path, "cauchy")
    outs = []
    for method in ("spectral", "series"):
        code, out, _ = _run(capsys, "invert", "--input", str(path), "--method", method,
                            "--grid", "0.5,2,3", "--format", "json")
        assert code == 0
        outs.append(np.array(json.loads(out)["re"]))
    assert np.allclose(outs[0], 1 / (1 + np.array([0.5, 1, 2])), rtol=2e-4)
    assert np.allclose(outs[0], outs[1], rtol=1e-9)


def test_invert_profile(tmp_path, capsys):
    path = _s2_spectrum_file(tmp_path, "cauchy")
    code, out, _ = _run(capsys, "invert", "--input", str(path), "--profile", "cauchy", "--n", "5")
    assert code == 0
    data = json.loads(out)
    errs = [p["l2_error"] for p in data["profile"]]
    assert [p["n"] for p in data["profile"]] == list(range(6))
    assert all(b <= a for a, b in zip(errs, errs[1:]))


def test_invert_ill_conditioned(tmp_path, capsys):
    path = _s2_spectrum_file(tmp_path, "cauchy")
    code, _, err = _run(capsys, "invert", "--input", str(path), "--tau-cap", "20")
    assert code == 2 and "IllConditioned" in err


def test_solve_degenerate_returns_input(capsys):
    code, out, _ = _run(capsys, "solve", "--pair", "s2", "--alpha", "0.5", "--direction",
                        "inverse", "--input", "cauchy", "--grid", "0.5,2,3", "--format", "json")
    assert code == 0
    assert json.loads(out)["re"] == [2 / 3, 0.5, 1 / 3]


def test_solve_alpha_out_of_range(capsys):
    code, _, _ = _run(capsys, "solve", "--pair", "hilbert", "--alpha", "0.7", "--input", "exp")
    assert code == 2


def test_verify_pass_and_fail(capsys):
    code, out, _ = _run(capsys, "verify", "--suite", "kernel")
    assert code == 0 and json.loads(out)["pass"] is True
    # the exp inversion cannot reach 1e-4 at tau_cap = 3 (hard spectral cut)
    code, out, _ = _run(capsys, "verify", "--suite", "inversion")
    data = json.loads(out)
    assert code == 1 and data["pass"] is False
    failing = {c["id"] for c in data["cases"] if not c["pass"]}
    assert failing == {"spectral:exp", "profile_plateau:exp"}


def test_verify_roundtrip_options(capsys):
    code, out, _ = _run(capsys, "verify", "--suite", "roundtrip", "--pair", "hilbert",
                        "--alpha", "0.25", "--fn", "cauchy")
    assert code == 0 and len(json.loads(out)["cases"]) == 2
    code, _, _ = _run(capsys, "verify", "--suite", "kernel", "--alpha", "0.25")
    assert code == 2


def test_catalog_list(capsys):
    code, out, _ = _run(capsys, "catalog", "list")
    ids = [e["id"] for e in json.loads(out)["entries"]]
    assert code == 0 and "gauss_log" in ids


def test_console_script_with_thread_cap(tmp_path):
    env = dict(os.environ, STIELTJES_LAB_THREADS="1")
    code = ("import os, sys; from stieltjes_lab import cli; "
            "print(os.environ['OPENBLAS_NUM_THREADS']); sys.exit(cli.run(['catalog', 'list']))")
    proc = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("1\n")
    env["STIELTJES_LAB_THREADS"] = "many"
    proc = subprocess.run([sys.executable, "-m", "stieltjes_lab.cli", "catalog", "list"],
                          env=env, capture_output=True, text=True)
    assert proc.returncode == 2
