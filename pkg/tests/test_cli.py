import json

import numpy as np
import pytest

from rfs.cli import main


def test_spectrum_row(capsys):
    assert main(["spectrum", "--epsilon", "0.01", "--gamma", "0.8"]) == 0
    assert "17,27,11,3.7424" in capsys.readouterr().out.splitlines()


def test_spectrum_text_and_json(capsys):
    assert main(["spectrum", "--epsilon-list", "1e-2,1e-3", "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert "168" in out and "11.4518" in out
    assert main(["spectrum", "--epsilon", "1e-4", "--format", "json"]) == 0
    row = json.loads(capsys.readouterr().out)[0]
    assert (row["k_min"], row["k_max"], row["size"]) == (1674, 2707, 1034)


def test_missing_epsilon_is_usage_error(capsys):
    assert main(["tub", "--trials", "5"]) == 2
    err = capsys.readouterr().err
    assert "usage" in err and "--epsilon" in err


@pytest.mark.parametrize("argv", [
    ["tub", "--epsilon", "1e-2", "--bogus"],
    ["tub", "--epsilon", "1e-2", "--trials", "0"],
    ["restricted", "--epsilon", "1e-2", "--c", "2"],
    ["tub", "--epsilon", "-1"],
    ["tub", "--epsilon", "1e-2", "--m", "40"],
    ["sample", "--epsilon", "0.9"],
    ["nosuch"],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_runtime_failure_exit_one(tmp_path):
    assert main(["tub", "--epsilon", "1e-2", "--trials", "2", "--m", "0",
                 "--out", str(tmp_path / "missing" / "x.csv")]) == 1


def test_tub_file_is_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["tub", "--epsilon", "1e-2", "--trials", "1000", "--seed", "42"]
    assert main(base + ["--out", str(a)]) == 0
    assert main(base + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert text.startswith("# tool=rfs") and '"master_seed": 42' in text


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# experiment defaults\nepsilon = 0.01\ntrials = 7\nseed = 3\nm-range = 0:2\n")
    out = tmp_path / "o.csv"
    assert main(["tub", "--config", str(cfg), "--trials", "4", "--out", str(out)]) == 0
    text = out.read_text()
    echo = json.loads(text.splitlines()[1].split("=", 1)[1])
    assert echo["trials"] == 4 and echo["master_seed"] == 3 and echo["m_values"] == [0, 1, 2]
    assert len([ln for ln in text.splitlines() if ln.startswith("tub,")]) == 3


def test_bad_config_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["tub", "--config", str(cfg)]) == 2


def test_json_and_csv_agree(tmp_path):
    base = ["model-compare", "--epsilon", "1e-2", "--trials", "20", "--bins", "5"]
    c, j = tmp_path / "h.csv", tmp_path / "h.json"
    assert main(base + ["--out", str(c)]) == 0
    assert main(base + ["--out", str(j), "--format", "json"]) == 0
    rows = [ln.split(",") for ln in c.read_text().splitlines() if not ln.startswith("#")]
    doc = json.loads(j.read_text())
    assert doc["fields"] == rows[0] and len(doc["rows"]) == len(rows) - 1
    assert rows[0][-2:] == ["real", "model"]


def test_all_outputs_and_svg(tmp_path):
    p = {k: tmp_path / f"{k}.x" for k in ("out", "raw", "summary", "svg")}
    assert main(["match-hist", "--epsilon", "1e-2", "--trials", "30", "--bins", "6",
                 "--out", str(p["out"]), "--raw", str(p["raw"]), "--summary", str(p["summary"]),
                 "--svg", str(p["svg"])]) == 0
    assert "bin_left,bin_right,count" in p["out"].read_text()
    assert "experiment,epsilon,gamma,cell,trial,value" in p["raw"].read_text()
    assert "<svg" in p["svg"].read_text()


def test_sample_and_bounds(tmp_path, capsys):
    out = tmp_path / "f.csv"
    assert main(["sample", "--epsilon", "1e-2", "--seed", "1", "--grid", "11", "--out", str(out)]) == 0
    printed = dict(ln.split("=") for ln in capsys.readouterr().out.split())
    assert float(printed["ratio"]) == pytest.approx(float(printed["sup"]) / float(printed["l2"]))
    assert len([ln for ln in out.read_text().splitlines() if not ln.startswith("#")]) == 12
    assert main(["sample", "--epsilon", "1e-2", "--target", "0.3"]) == 0
    capsys.readouterr()
    assert main(["bounds", "--epsilon", "1e-2", "--m", "0"]) == 0
    text = capsys.readouterr().out
    assert "worst_case_ratio" in text and "4.69041575982343" in text


def test_2d_sample(tmp_path, capsys):
    out, pgm = tmp_path / "f.csv", tmp_path / "f.pgm"
    assert main(["2d-sample", "--epsilon", "0.03", "--grid", "9", "--out", str(out), "--pgm", str(pgm)]) == 0
    rows = [ln for ln in out.read_text().splitlines() if not ln.startswith("#")]
    assert rows[0] == "x,y,value" and len(rows) == 82
    raw = pgm.read_bytes()
    assert raw.startswith(b"P5\n9 9\n255\n") and len(raw) == len(b"P5\n9 9\n255\n") + 81
    assert main(["2d-sample", "--epsilon", "0.001"]) == 2


def test_2d_compare(tmp_path):
    out = tmp_path / "h.csv"
    assert main(["2d-compare", "--epsilon", "0.03", "--trials", "5", "--bins", "3", "--out", str(out)]) == 0
    assert "real,model" in out.read_text()


def test_threads_env(monkeypatch, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["tub", "--epsilon", "1e-2", "--trials", "100", "--m-range", "0:3"]
    monkeypatch.setenv("RFS_THREADS", "3")
    assert main(base + ["--out", str(a)]) == 0
    assert main(base + ["--threads", "1", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
