"""Figures for the bench report."""

from __future__ import annotations

from pathlib import Path
from typing import List

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import METRICS, BenchReport, series  # noqa: E402

LABELS = {
    "input_reads": "input reads",
    "aux_highwater_cells": "auxiliary cells (M)",
    "garbage_cells": "garbage cells (G)",
    "steps": "steps",
}


def plot_metric(report: BenchReport, metric: str, path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    for program, points in sorted(series(report, metric).items()):
        ns = [n for n, _ in points]
        values = [v for _, v in points]
        ax.plot(ns, values, marker="o", label=program)
    ax.set_xscale("log", base=2)
    # small counts (M is a handful of cells) read better on a linear axis
    if max(v for pts in series(report, metric).values() for _, v in pts) > 20:
        ax.set_yscale("symlog", linthresh=1)
    ax.set_ylim(bottom=0)
    ax.set_xlabel("records n")
    ax.set_ylabel(LABELS.get(metric, metric))
    ax.set_title(f"{LABELS.get(metric, metric)} on failed searches")
    ax.legend(fontsize=7, loc="best")
    ax.grid(True, which="major", alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_report(report: BenchReport, directory) -> List[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return [plot_metric(report, m, directory / f"growth_{m}.png") for m in METRICS]
