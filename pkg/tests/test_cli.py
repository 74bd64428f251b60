import json
import math

import numpy as np

from discforge.cli import bench_per_round, main
from discforge.linalg import read_matrix, write_matrix


def test_gen_identity(tmp_path, capsys):
    out = tmp_path / "id.mat"
    assert main(["gen", "--kind", "identity", "--t", "5", "--out", str(out)]) == 0
    assert np.array_equal(read_matrix(out), np.eye(5))
    meta = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert meta["shape"] == [5, 5]


def test_gen_with_config_file(tmp_path):
    cfg = tmp_path / "spec.cfg"
    cfg.write_text("m=6\nt=12\n", encoding="utf-8")
    out = tmp_path / "cols.mat"
    rc = main([
        "gen", "--kind", "random-unit-columns", "--config", str(cfg),
        "--seed", "5", "--out", str(out),
    ])
    assert rc == 0
    a = read_matrix(out)
    assert a.shape == (6, 12)
    assert np.abs(np.linalg.norm(a, axis=0) - 1.0).max() <= 1e-12


def test_walk_identity_stream(tmp_path):
    mat = tmp_path / "id.mat"
    write_matrix(mat, np.eye(8))
    out = tmp_path / "run"
    rc = main([
        "walk", "--input", str(mat), "--rank", "4", "--seed", "3", "--out", str(out),
    ])
    assert rc == 0
    us = read_matrix(out / "stream.mat")
    assert us.shape == (8, 4)
    assert np.abs(np.linalg.norm(us, axis=1) - 1.0).max() <= 1e-9
    lines = (out / "metrics.jsonl").read_text().splitlines()
    assert len(lines) == 8
    row = json.loads(lines[-1])
    assert set(row) == {"round", "disc_2inf", "max_row_norm"}
    summary = json.loads((out / "walk.json").read_text())
    assert summary["schema"] == 1


def test_eval_disc(tmp_path, capsys):
    mat = tmp_path / "a.mat"
    write_matrix(mat, np.array([[1.0, 1.0], [1.0, -1.0]]))
    assert main(["eval", "disc", "--input", str(mat)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["op"] == "disc"
    assert payload["value"] == 2.0
    assert payload["std_error"] is None
    assert len(payload["inputs_digest"]) == 64


def test_eval_discg_and_vdisc(tmp_path, capsys):
    mat = tmp_path / "a.mat"
    write_matrix(mat, np.array([[1.0]]))
    coup = tmp_path / "s.mat"
    write_matrix(coup, np.array([[1.0]]))
    rc = main([
        "eval", "discg", "--input", str(mat), "--coupling", str(coup),
        "--samples", "40000", "--seed", "4",
    ])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert abs(payload["value"] - math.sqrt(2.0 / math.pi)) < 4.0 * payload["std_error"]
    assert payload["samples"] == 40000

    units = tmp_path / "u.mat"
    write_matrix(units, np.eye(1))
    assert main(["eval", "vdisc", "--input", str(mat), "--units", str(units)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["value"] == 1.0


def test_eval_online_discg(tmp_path, capsys):
    vs = tmp_path / "vs.mat"
    write_matrix(vs, np.eye(3))
    stream = tmp_path / "us.mat"
    write_matrix(stream, np.eye(3)[:, :2])
    rc = main([
        "eval", "online-discg", "--input", str(vs), "--stream", str(stream),
        "--samples", "20000", "--seed", "6",
    ])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["value"] > 0.5


def test_stationarity_passes(tmp_path):
    rc = main([
        "stationarity", "--r", "2", "--sigma", "0.5", "--runs", "1500",
        "--steps", "25", "--seed", "11", "--out", str(tmp_path),
    ])
    assert rc == 0
    report = json.loads((tmp_path / "stationarity.json").read_text())
    assert report["verdicts"]["ks_radius"]["passed"]


def test_rounding_cli(tmp_path):
    rc = main([
        "rounding", "--setting", "spencer", "--n", "102", "--trials", "3",
        "--seed", "13", "--out", str(tmp_path),
    ])
    assert rc == 0
    report = json.loads((tmp_path / "rounding.json").read_text())
    assert report["spec"]["c_scale"] == 3.0
    lines = (tmp_path / "rounding.metrics.jsonl").read_text().splitlines()
    assert len(lines) == 3


def test_banaszczyk_cli(tmp_path):
    rc = main([
        "banaszczyk", "--m", "8", "--t", "32", "--delta", "0.05",
        "--trials", "3", "--samples", "4000", "--seed", "17", "--out", str(tmp_path),
    ])
    assert rc == 0
    report = json.loads((tmp_path / "banaszczyk.json").read_text())
    assert report["spec"]["rank"] == math.ceil(math.log(8 * 32 / 0.05))
    assert report["verdicts"]["estimate_below_threshold"]["passed"]


def test_bench_smoke(capsys):
    assert main(["bench", "--m", "64", "--rank", "4", "--t", "16", "--reps", "3"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["median_round_seconds"] > 0.0
    direct = bench_per_round(64, 16, 4, reps=3, seed=0)
    assert direct["median_round_seconds"] > 0.0


def test_usage_errors(tmp_path):
    assert main(["no-such-command"]) == 2
    # --seed is mandatory for experiment subcommands
    assert main(["rounding", "--setting", "spencer", "--n", "102"]) == 2
    assert main(["walk", "--input", str(tmp_path / "missing.mat"),
                 "--rank", "4", "--seed", "1", "--out", str(tmp_path)]) == 2
    mat = tmp_path / "a.mat"
    write_matrix(mat, np.eye(2))
    assert main(["eval", "discg", "--input", str(mat)]) == 2  # missing coupling/seed
