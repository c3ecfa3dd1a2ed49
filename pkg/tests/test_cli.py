import csv
import hashlib
import json
from fractions import Fraction as F
from pathlib import Path

import numpy as np
import pytest

from bihnls.cli import EXIT_BLOWUP, EXIT_INVALID, EXIT_NOCONV, EXIT_OK, main
from bihnls.exponents import ProblemParams, PowerLaw
from bihnls.grid import Grid, GridField, read_field, write_field
from bihnls.lemmas import LemmaWitness, verify_witness


def run(argv, out):
    return main(list(argv) + ["--out", str(out)])


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def manifest(out):
    return json.loads((Path(out) / "manifest.json").read_text())


# ---------------------------------------------------------------- check

def test_check_lbeta_example(tmp_path, capsys):
    assert run(["check", "-N", "5", "-s", "2", "-alpha", "1", "-b", "1"], tmp_path) == EXIT_OK
    text = capsys.readouterr().out
    assert "LWP: yes" in text
    rep = json.loads((tmp_path / "check.json").read_text())
    w = rep["witnesses"]["L^beta"]["L4.1"]
    assert w["status"] == "ok"
    assert w["witness"]["case"] == 1 and w["witness"]["auxiliary"]["sigma"] == "1/2"


def test_check_gwp_subcritical(tmp_path, capsys):
    assert run(["check", "-N", "4", "-s", "2", "-alpha", "1", "-beta", "4"], tmp_path) == EXIT_OK
    assert "GWP: global_subcritical" in capsys.readouterr().out


def test_check_supercritical(tmp_path, capsys):
    assert run(["check", "-N", "5", "-s", "2", "-alpha", "7", "-b", "1"], tmp_path) == EXIT_OK
    text = capsys.readouterr().out
    assert "criticality: supercritical" in text
    assert "LWP: no" in text and "(N-2s)alpha < 8-2b" in text


def test_check_invalid_names_hypothesis(tmp_path, capsys):
    assert run(["check", "-N", "1", "-s", "1", "-alpha", "1", "-b", "3"], tmp_path) == EXIT_INVALID
    assert "hypothesis" in capsys.readouterr().err


def test_check_unparseable_flag(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run(["check", "-N", "1", "-s", "one", "-alpha", "1", "-b", "1/4"], tmp_path)
    assert exc.value.code == EXIT_INVALID


def test_check_both_exponents_rejected(tmp_path):
    assert run(["check", "-N", "2", "-s", "1", "-alpha", "1", "-b", "1/2", "-beta", "4"], tmp_path) == EXIT_INVALID


def test_witness_json_round_trip(tmp_path):
    run(["check", "-N", "5", "-s", "2", "-alpha", "1", "-b", "1"], tmp_path)
    rep = json.loads((tmp_path / "check.json").read_text())
    params = ProblemParams(5, 2, 1, 0, PowerLaw(1, 1))
    seen = 0
    for group in rep["witnesses"].values():
        for entry in group.values():
            if entry["status"] != "ok":
                continue
            w = LemmaWitness.from_dict(entry["witness"])
            again = LemmaWitness.from_json(w.to_json())
            assert again == w
            margins = verify_witness(again, params)
            assert [(k, str(v)) for k, v in margins] == [tuple(m) for m in entry["witness"]["margins"]]
            seen += 1
    assert seen == 8


# ---------------------------------------------------------------- sweep

def test_sweep_sixteen_rows(tmp_path):
    assert run(["sweep", "-N", "3", "-s", "1", "-alpha", "1/4:4:1/4", "-b", "1/2"], tmp_path) == EXIT_OK
    body = rows(tmp_path / "sweep.csv")[1:]
    assert len(body) == 16
    assert all(r[11] == "ok" and F(r[10]) > 0 for r in body)
    assert manifest(tmp_path)["partial"] is False


def test_sweep_empty_range(tmp_path):
    assert run(["sweep", "-N", "3", "-s", "1", "-alpha", "2:1:1/4", "-b", "1/2"], tmp_path) == EXIT_OK
    assert len(rows(tmp_path / "sweep.csv")) == 1


def test_sweep_case_boundary(tmp_path):
    # (N - 2s) alpha = 2s - 2b  <=>  alpha = 1 at N = 3, s = 1, b = 1/2
    run(["sweep", "-N", "3", "-s", "1", "-alpha", "1/2:3/2:1/8", "-b", "1/2", "--strict"], tmp_path)
    body = rows(tmp_path / "sweep.csv")[1:]
    for r in body:
        assert r[5] == ("1" if F(r[2]) < 1 else "2")


def test_sweep_all_lemmas_and_threads(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["sweep", "-N", "2", "-s", "1/2:1:1/4", "-alpha", "1/2:2:1/2", "-beta", "4", "--lemma", "all"]
    assert run(args, a) == EXIT_OK
    assert run(args + ["--threads", "4"], b) == EXIT_OK
    assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()
    assert {r[4] for r in rows(a / "sweep.csv")[1:]} == {f"L4.{i}" for i in range(1, 11)}


def test_sweep_unknown_lemma(tmp_path):
    assert run(["sweep", "-N", "2", "-s", "1", "-alpha", "1", "-b", "1/2", "--lemma", "L9.9"], tmp_path) == EXIT_INVALID


def test_sweep_deterministic(tmp_path):
    args = ["sweep", "-N", "4", "-s", "1/2:3/2:1/2", "-alpha", "1/4:1:1/4", "-b", "1", "--lemma", "L4.1,L4.2"]
    run(args, tmp_path / "a")
    run(args, tmp_path / "b")
    assert (tmp_path / "a" / "sweep.csv").read_bytes() == (tmp_path / "b" / "sweep.csv").read_bytes()


# ---------------------------------------------------------------- manifest

def test_manifest_checksums(tmp_path):
    run(["sweep", "-N", "3", "-s", "1", "-alpha", "1/4:1:1/4", "-b", "1/2"], tmp_path)
    man = manifest(tmp_path)
    assert man["command"] == "sweep" and man["version"]
    assert man["config"]["seed"] == 0
    assert man["outputs"]
    for entry in man["outputs"]:
        assert hashlib.sha256(Path(entry["path"]).read_bytes()).hexdigest() == entry["sha256"]


def test_env_out_dir(out_dir):
    assert main(["check", "-N", "2", "-s", "1", "-alpha", "1", "-b", "1/2"]) == EXIT_OK
    assert (out_dir / "check.json").exists() and (out_dir / "manifest.json").exists()


# ---------------------------------------------------------------- solve

def solve_config(tmp_path, **kw):
    cfg = {"N": 1, "M": 128, "L": 16.0, "T": 0.2, "dt": 0.002, "s": "1", "alpha": "2",
           "lambda_re": 1.0, "potential": {"kind": "powerlaw", "b": "1/4"},
           "initial": {"kind": "gaussian", "amp": 0.5}, "tol": 1e-12, "max_iter": 60}
    cfg.update(kw)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    return str(path)


def test_solve_linear(tmp_path):
    out = tmp_path / "out"
    assert run(["solve", solve_config(tmp_path, lambda_re=0.0)], out) == EXIT_OK
    summ = json.loads((out / "summary.json").read_text())
    assert summ["status"] == "converged" and summ["iterations"] == 1


def test_solve_defocusing(tmp_path):
    out = tmp_path / "out"
    assert run(["solve", solve_config(tmp_path)], out) == EXIT_OK
    summ = json.loads((out / "summary.json").read_text())
    assert summ["status"] == "converged"
    assert summ["mass_drift"] < 1e-6
    assert "apriori_bound" in summ
    header = rows(out / "trace.csv")[0]
    assert header[:4] == ["t", "mass", "energy", "Hs"]
    fin = read_field(out / "final.bin")
    assert fin.grid == Grid(1, 128, 16.0)
    man = manifest(out)
    assert man["status"] == "converged" and man["inputs"][0]["sha256"]


def test_solve_local_only_has_no_bound(tmp_path):
    # alpha = 8 exceeds 8/N - 2/beta = 15/2 for b = 1/4, beta = 4
    out = tmp_path / "out"
    cfg = solve_config(tmp_path, alpha="8", lambda_re=-1.0, T=0.05, initial={"kind": "gaussian", "amp": 1.0})
    assert run(["solve", cfg], out) == EXIT_OK
    summ = json.loads((out / "summary.json").read_text())
    assert summ["status"] == "converged" and summ["gwp_class"] == "local_only"
    assert "apriori_bound" not in summ


def test_solve_blowup_exit(tmp_path):
    out = tmp_path / "out"
    cfg = solve_config(tmp_path, M=256, alpha="8", lambda_re=-10.0, T=0.5,
                       initial={"kind": "gaussian", "amp": 1.2}, tol=1e-10)
    assert run(["solve", cfg], out) == EXIT_BLOWUP
    summ = json.loads((out / "summary.json").read_text())
    assert summ["status"] == "norm_blowup" and summ["last_finite_hs"] > 0
    assert not (out / "final.bin").exists()


def test_solve_max_iter_exit(tmp_path):
    assert run(["solve", solve_config(tmp_path, max_iter=2, tol=1e-15)], tmp_path / "out") == EXIT_NOCONV


def test_solve_memory_budget(tmp_path):
    assert run(["solve", solve_config(tmp_path), "--memory-mb", "1"], tmp_path / "out") == EXIT_INVALID


def test_solve_config_missing_field(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"N": 1}))
    assert run(["solve", str(path)], tmp_path / "out") == EXIT_INVALID


def test_solve_from_field_file(tmp_path):
    g = Grid(1, 128, 16.0)
    src = tmp_path / "phi.bin"
    write_field(src, GridField(g, 0.3 * np.exp(-g.r2)))
    out = tmp_path / "out"
    assert run(["solve", solve_config(tmp_path, initial={"kind": "file", "path": str(src)})], out) == EXIT_OK
    assert np.array_equal(read_field(out / "initial.bin").samples, read_field(src).samples)


# ---------------------------------------------------------------- probes

def test_probe_strichartz_energy_pair(tmp_path):
    assert run(["probe", "strichartz", "--pair", "inf,2", "--trials", "4"], tmp_path) == EXIT_OK
    rep = json.loads((tmp_path / "probe_strichartz.json").read_text())
    assert abs(rep["homogeneous"] - 1) < 1e-8


def test_probe_strichartz_inadmissible(tmp_path):
    assert run(["probe", "strichartz", "-N", "2", "--pair", "2,inf", "-M", "32", "-L", "8"], tmp_path) \
        == EXIT_INVALID


def test_probe_strichartz_deterministic(tmp_path):
    args = ["probe", "strichartz", "--pair", "8,inf", "--trials", "5", "--seed", "7"]
    run(args, tmp_path / "a")
    run(args, tmp_path / "b")
    assert (tmp_path / "a" / "probe_strichartz.csv").read_bytes() == \
        (tmp_path / "b" / "probe_strichartz.csv").read_bytes()
    assert manifest(tmp_path / "a")["config"]["seed"] == 7


def test_probe_kernel(tmp_path, capsys):
    assert run(["probe", "kernel", "-N", "1", "-s", "1", "-j", "1..6"], tmp_path) == EXIT_OK
    body = rows(tmp_path / "probe_kernel.csv")[1:]
    assert [int(r[0]) for r in body] == [1, 2, 3, 4, 5, 6]
    weighted = [float(r[2]) for r in body]
    assert max(weighted) / min(weighted) <= 10


def test_probe_scaling(tmp_path):
    assert run(["probe", "scaling", "-k", "2", "-alpha", "8", "-b", "1/4"], tmp_path) == EXIT_OK
    rep = json.loads((tmp_path / "probe_scaling.json").read_text())
    assert abs(rep["ratio"] - 1) < 1e-4


def test_probe_ckn(tmp_path):
    args = ["probe", "ckn", "-N", "2", "-s", "2", "-alpha", "1", "-b", "1/2", "--trials", "4", "-M", "64"]
    assert run(args, tmp_path) == EXIT_OK
    rep = json.loads((tmp_path / "probe_ckn.json").read_text())
    assert 0 < rep["constant"] < float("inf")


# ---------------------------------------------------------------- besov and scale-test

def test_besov_command(tmp_path, capsys):
    g = Grid(1, 256, 16.0)
    src = tmp_path / "g.bin"
    write_field(src, GridField(g, np.exp(-g.r2 / 2)))
    assert run(["besov", str(src), "-s", "1"], tmp_path / "out") == EXIT_OK
    val = float(capsys.readouterr().out.strip().splitlines()[-1])
    assert val > 0
    assert rows(tmp_path / "out" / "besov.csv")[1][-1] == repr(val)


def test_scale_test_command(tmp_path):
    assert run(["scale-test", "-alpha", "8", "-b", "1/4", "-k", "2:4:2"], tmp_path) == EXIT_OK
    body = rows(tmp_path / "scale_test.csv")[1:]
    assert [r[0] for r in body] == ["2", "4"]
    assert all(float(r[4]) < 1e-4 for r in body)
