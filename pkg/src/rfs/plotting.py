"""Static SVG figures for experiment results, rendered with matplotlib.

The SVG files are self-contained (glyphs as paths, styles inline) and
deterministic: no date metadata and a fixed id salt.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "svg.hashsalt": "rfs",
    "svg.fonttype": "path",
    "font.size": 10,
    "axes.labelsize": 10,
    "axes.titlesize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def figsize(width=6.0, height=None):
    golden = (math.sqrt(5.0) - 1.0) / 2.0
    return width, height if height else width * golden


def save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def ratio_sweep_figure(res, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize())
        eps = [e for e, _, _ in res.cells]
        for e, _, vals in res.cells:
            ax.plot(np.full(vals.size, e), vals, "s", ms=2, color="0.6", alpha=0.5)
        ax.plot(eps, [v.mean() for _, _, v in res.cells], "-", color="tab:blue", lw=2, label="mean")
        ax.set_xscale("log")
        ax.invert_xaxis()
        ax.set_xlabel(r"$\varepsilon$")
        ax.set_ylabel(r"$\|f\|_\infty / \|f\|_{L^2}$")
        ax.legend()
        save(fig, path)


def box_figure(res, path, epsilon=None):
    """Boxplots per cell from summary statistics; whiskers are min and max."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize(7.0))
        stats = []
        for eps, cell, s in res.summaries():
            if epsilon is not None and not math.isclose(eps, epsilon):
                continue
            stats.append({"label": cell.split("=")[-1], "med": s["median"], "q1": s["q1"],
                          "q3": s["q3"], "whislo": s["min"], "whishi": s["max"], "mean": s["mean"]})
        ax.bxp(stats, showmeans=True, showfliers=False)
        ax.set_xlabel("m")
        ax.set_ylabel("norm ratio")
        if len(stats) > 20:
            for i, lab in enumerate(ax.get_xticklabels()):
                lab.set_visible(i % max(1, len(stats) // 10) == 0)
        save(fig, path)


def histogram_figure(res, path):
    hists = res.histograms
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(len(hists), 1, figsize=figsize(6.0, 2.2 * len(hists)), squeeze=False)
        for ax, h in zip(axes[:, 0], hists):
            for name, counts in h.series.items():
                ax.stairs(counts, h.edges, label=name, lw=1.5)
            ax.set_title(f"{h.name}, eps={h.epsilon:.4g}")
            if len(h.series) > 1:
                ax.legend()
        save(fig, path)


def series_figure(res, path):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=figsize())
        labels = [f"{cell}\n{eps:.3g}" for eps, cell, _ in res.cells]
        ax.boxplot([v for _, _, v in res.cells], showfliers=False)
        ax.set_xticks(range(1, len(labels) + 1), labels)
        save(fig, path)


def render_figure(res, path):
    kind = res.experiment
    if kind == "ratio_sweep":
        ratio_sweep_figure(res, path)
    elif kind in ("tub", "restricted"):
        box_figure(res, path)
    elif res.histograms:
        histogram_figure(res, path)
    else:
        series_figure(res, path)
