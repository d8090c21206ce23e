"""Render MSE sweep tables as figures next to the CSV output."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .runner import MseTable

_XLABELS = {
    "gamma-c": "communication SNR (dB)",
    "n-sensors": "number of sensors",
    "bit-rate": "quantizer bits per observation",
}


def sweep_axis_label(sweep_kind: str) -> str:
    return _XLABELS.get(sweep_kind, "sweep value")


def render_mse_figure(table: MseTable, path, title: str = "", xlabel: str = "sweep value") -> None:
    """One log-scale MSE curve per estimator, with standard-error bars."""
    series: dict[str, list] = {}
    for r in table.rows:
        if math.isnan(r.mse):
            continue
        series.setdefault(r.estimator, []).append((r.sweep_value, r.mse, r.std_err))

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for est, pts in series.items():
        pts.sort()
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        es = [p[2] for p in pts]
        ax.errorbar(xs, ys, yerr=es, marker="o", capsize=3, label=est)
    ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("MSE")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    if series:
        ax.legend(fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
