import json

import numpy as np
import pytest

from rfs import __version__, reporting
from rfs.montecarlo import ExperimentConfig, ExperimentResult, Histogram, run


@pytest.fixture(scope="module")
def tub():
    return run(ExperimentConfig("tub", epsilons=(1e-2,), trials=6, master_seed=5, m_values=(0, 3)))


def lines(text):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def test_header_comment(tub):
    text = reporting.render(tub, "summary")
    head = [ln for ln in text.splitlines() if ln.startswith("#")]
    assert head[0] == f"# tool=rfs {__version__}"
    assert json.loads(head[1].split("=", 1)[1]) == tub.config.echo()
    assert head[2] == "# master_seed=5"


def test_exact_table_headers(tub):
    assert lines(reporting.render(tub, "raw"))[0] == "experiment,epsilon,gamma,cell,trial,value"
    assert lines(reporting.render(tub, "summary"))[0] == \
        "experiment,epsilon,gamma,cell,mean,std,min,q1,median,q3,max,n"


def test_raw_rows_round_trip(tub):
    fields, rows = reporting.read_csv(reporting.render(tub, "raw"))
    assert len(rows) == 12
    vals = np.array([float(r[fields.index("value")]) for r in rows])
    assert np.array_equal(vals, np.concatenate([v for _, _, v in tub.cells]))


@pytest.mark.parametrize("what", ["raw", "summary"])
def test_json_mirrors_csv(tub, what):
    fields, rows = reporting.read_csv(reporting.render(tub, what, "csv"))
    doc = json.loads(reporting.render(tub, what, "json"))
    assert doc["fields"] == fields
    assert doc["header"]["config"] == tub.config.echo()
    assert len(doc["rows"]) == len(rows)
    for row, jrow in zip(rows, doc["rows"]):
        for f, v in zip(fields, row):
            j = jrow[f]
            assert (v == j) if isinstance(j, str) else (float(v) == j)


def test_histogram_layout():
    cfg = ExperimentConfig("match_hist")
    res = ExperimentResult(cfg, histograms=[Histogram("match_ratio", 0.01, np.linspace(0, 1, 3),
                                                      {"count": np.array([4, 6])})])
    fields, rows = reporting.read_csv(reporting.render(res, "hist"))
    assert fields[-3:] == ["bin_left", "bin_right", "count"]
    assert [r[-3:] for r in rows] == [["0.0", "0.5", "4"], ["0.5", "1.0", "6"]]


def test_raw_refused_beyond_guard():
    res = ExperimentResult(ExperimentConfig("ratio_sweep"), cells=[(0.01, "ratio", np.zeros(10 ** 6 + 1))])
    with pytest.raises(ValueError):
        reporting.render(res, "raw")


def test_unknown_kinds_rejected(tub):
    with pytest.raises(ValueError):
        reporting.render(tub, "boxes")
    with pytest.raises(ValueError):
        reporting.render(tub, "summary", "xml")
