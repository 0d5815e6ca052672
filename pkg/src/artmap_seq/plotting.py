"""Figures written next to the tab-separated reports."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.titlesize": 10,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 100,
    "savefig.dpi": 150,
}
# fixed metadata keeps PNG output byte-stable between runs
_META = {"Software": None}


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, metadata=_META)
    plt.close(fig)
    return path


def plot_length_histogram(hist: Sequence[tuple[int, int]], bin_width: int, path,
                          title="Sequence length distribution") -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3))
        if hist:
            starts, counts = zip(*hist)
            ax.bar(starts, counts, width=bin_width, align="edge", color="0.45", edgecolor="white")
        ax.set_xlabel("sequence length (residues)")
        ax.set_ylabel("number of sequences")
        ax.set_title(title)
        return _save(fig, path)


def plot_ga_history(history: Sequence[float], path) -> Path:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3))
        ax.plot(range(len(history)), history, color="k", lw=1.2, drawstyle="steps-post")
        ax.set_xlabel("generation")
        ax.set_ylabel("best fitness (lower is better)")
        ax.set_title("Member selection")
        return _save(fig, path)


def plot_evaluation(stages: Sequence[str], series: dict[str, Sequence[float | None]], path) -> Path:
    """One line per evaluated set; missing entries are skipped."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3))
        x = list(range(1, len(stages) + 1))
        for name, values in series.items():
            pts = [(xi, v) for xi, v in zip(x, values) if v is not None]
            if pts:
                xs, ys = zip(*pts)
                ax.plot(xs, ys, marker="o", ms=3, lw=1.2, label=name)
        ax.set_xticks(x, stages, rotation=0)
        ax.set_ylabel("error (%)")
        ax.set_title("Error after each training stage")
        ax.legend(frameon=False)
        return _save(fig, path)
