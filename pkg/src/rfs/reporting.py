"""CSV / JSON serialization of experiment results.

Every file starts with '#' comment lines carrying the tool version, the
effective configuration and the master seed.  Floats are written with
``repr`` (shortest round-trip form), so equal results give equal bytes.
"""

from __future__ import annotations

import io
import json

import numpy as np

RAW_FIELDS = ("experiment", "epsilon", "gamma", "cell", "trial", "value")
SUMMARY_FIELDS = ("experiment", "epsilon", "gamma", "cell",
                  "mean", "std", "min", "q1", "median", "q3", "max", "n")


def _version() -> str:
    from rfs import __version__
    return __version__


def header(config_echo: dict) -> dict:
    return {
        "tool": f"rfs {_version()}",
        "config": config_echo,
        "master_seed": config_echo.get("master_seed"),
    }


def header_lines(config_echo: dict) -> str:
    h = header(config_echo)
    return (f"# tool={h['tool']}\n"
            f"# config={json.dumps(h['config'], sort_keys=True)}\n"
            f"# master_seed={h['master_seed']}\n")


def _num(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def raw_rows(res) -> list[dict]:
    gamma = res.config.gamma
    rows = []
    for eps, cell, vals in res.cells:
        for t, v in enumerate(vals):
            rows.append({"experiment": res.experiment, "epsilon": float(eps), "gamma": gamma,
                         "cell": cell, "trial": t, "value": float(v)})
    return rows


def summary_rows(res) -> list[dict]:
    gamma = res.config.gamma
    return [{"experiment": res.experiment, "epsilon": float(eps), "gamma": gamma, "cell": cell, **stats}
            for eps, cell, stats in res.summaries()]


def histogram_rows(res) -> list[dict]:
    rows = []
    for h in res.histograms:
        for i in range(h.edges.size - 1):
            row = {"experiment": res.experiment, "epsilon": float(h.epsilon), "quantity": h.name,
                   "bin_left": float(h.edges[i]), "bin_right": float(h.edges[i + 1])}
            for name, counts in h.series.items():
                row[name] = int(counts[i])
            rows.append(row)
    return rows


def _fields(rows: list[dict], default: tuple[str, ...]) -> tuple[str, ...]:
    return tuple(rows[0].keys()) if rows else default


def rows_to_csv(rows: list[dict], fields: tuple[str, ...], config_echo: dict) -> str:
    out = io.StringIO()
    out.write(header_lines(config_echo))
    out.write(",".join(fields) + "\n")
    for row in rows:
        out.write(",".join(row[f] if isinstance(row[f], str) else _num(row[f]) for f in fields) + "\n")
    return out.getvalue()


def rows_to_json(rows: list[dict], fields: tuple[str, ...], config_echo: dict) -> str:
    doc = {"header": header(config_echo), "fields": list(fields), "rows": rows}
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def render(res, what: str = "summary", fmt: str = "csv") -> str:
    if what == "raw":
        if not res.keep_raw:
            raise ValueError("raw rows were not retained (more than 10**6 values)")
        rows, fields = raw_rows(res), RAW_FIELDS
    elif what == "summary":
        rows, fields = summary_rows(res), SUMMARY_FIELDS
    elif what == "hist":
        rows = histogram_rows(res)
        fields = _fields(rows, ("experiment", "epsilon", "quantity", "bin_left", "bin_right"))
    else:
        raise ValueError(f"unknown output kind {what!r}")
    echo = res.config.echo()
    if fmt == "json":
        return rows_to_json(rows, fields, echo)
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    return rows_to_csv(rows, fields, echo)


def read_csv(text: str) -> tuple[list[str], list[list[str]]]:
    """Split a file written by ``rows_to_csv`` into (fields, rows); comments dropped."""
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    fields = lines[0].split(",")
    return fields, [ln.split(",") for ln in lines[1:]]
