"""Figures for sweep reports, written next to the CSV output."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 11,
    "axes.labelsize": 12,
    "axes.titlesize": 12,
    "legend.fontsize": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 120,
    "savefig.bbox": "tight",
}

MARKERS = ["o", "s", "^", "D", "v", "P", "X"]


def sweep_figure(rows, title: str | None = None, width: float = 6.0):
    """Mean normalized GED vs. m, one errorbar line per method."""
    series = defaultdict(list)
    for r in rows:
        series[r["method"]].append((r["m"], r["mean_ged"], r["std_ged"]))
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(width, width * 0.62))
        for k, (method, pts) in enumerate(sorted(series.items())):
            pts.sort()
            ms, means, stds = zip(*pts)
            ax.errorbar(ms, means, yerr=stds, marker=MARKERS[k % len(MARKERS)],
                        capsize=3, linewidth=1.5, label=method)
        ax.set_xlabel("number of new nodes $m$")
        ax.set_ylabel("normalized GED")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        ax.grid(alpha=0.3)
    return fig


def save_sweep_plot(rows, path, title: str | None = None) -> Path:
    path = Path(path)
    fig = sweep_figure(rows, title=title)
    with plt.rc_context(STYLE):
        fig.savefig(path)
    plt.close(fig)
    return path
