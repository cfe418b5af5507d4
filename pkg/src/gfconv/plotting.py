"""Figure rendering for simulation and capacity outputs (written next to the CSV)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def get_plot(width: float = 6, height: float | None = None):
    golden_ratio = (math.sqrt(5) - 1.0) / 2.0
    if not height:
        height = width * golden_ratio
    fig, ax = plt.subplots(figsize=(width, height), facecolor="w")
    ax.grid(True, which="both", alpha=0.3)
    return fig, ax


def figure_path(out: str | Path, suffix: str = ".png") -> Path:
    out = Path(out)
    return out.with_suffix(suffix)


def plot_error_rates(reports: dict, path, metric: str = "ser", axis: str = "eb_n0_db"):
    """One semilog curve per labelled SimReport."""
    fig, ax = get_plot()
    for label, rep in reports.items():
        xs = [getattr(p, axis) for p in rep.points]
        ys = [getattr(p, metric) for p in rep.points]
        ax.semilogy(xs, ys, marker="o", label=label)
    ax.set_xlabel("Eb/N0 (dB)" if axis == "eb_n0_db" else "Es/N0 (dB)")
    ax.set_ylabel(metric.upper())
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def plot_capacity(curves: list, path):
    fig, ax = get_plot()
    for cv in curves:
        q = cv.meta.get("q", "")
        ax.plot(cv.snr_db, cv.bits, label=f"{cv.label} q={q}")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("bits / channel use")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)
