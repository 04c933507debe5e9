"""Figure rendering for the CLI report path.

Each command that writes a delimited output can render a companion PNG
next to it; all figures use the Agg backend so they work headless.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import FitResult, model_intensity, normalized_appearance
from .daq import Trace

__all__ = ["save_curve_figure", "save_trace_figure", "save_fit_figure"]

_SURVIVE_COLOR = "tab:green"
_APPEAR_COLOR = "tab:blue"


def save_curve_figure(
    l_values: np.ndarray,
    p_appear: np.ndarray,
    p_survive: np.ndarray,
    path: str | Path,
    xlabel: str = "path length L (um)",
    title: str = "transition probability",
) -> Path:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(l_values, p_survive, color=_SURVIVE_COLOR, label="survival")
    ax.plot(l_values, p_appear, color=_APPEAR_COLOR, label="appearance")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("probability")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(title)
    ax.legend(loc="upper right")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return Path(path)


def save_trace_figure(trace: Trace, path: str | Path) -> Path:
    x = trace.column("delta_L_um")
    fig, ax = plt.subplots(figsize=(8, 4.5))
    ax.plot(x, trace.column("i1"), ".", ms=3, color=_SURVIVE_COLOR, label="detector 1 (survival)")
    ax.plot(x, trace.column("i2"), ".", ms=3, color=_APPEAR_COLOR, label="detector 2 (appearance)")
    ax.set_xlabel("path-length change dL (um)")
    ax.set_ylabel("intensity (rel.)")
    theta = trace.samples[0].theta_deg if trace.samples else float("nan")
    laser = trace.metadata.get("laser_name", "?")
    ax.set_title(f"scan trace  (theta = {theta:.1f} deg, laser: {laser})")
    ax.legend(loc="upper right")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return Path(path)


def save_fit_figure(trace: Trace, fit: FitResult, path: str | Path) -> Path:
    x, y = normalized_appearance(trace)
    grid = np.linspace(float(x.min()), float(x.max()), 1200)
    model = model_intensity(fit.model, grid)
    fig, (ax, res_ax) = plt.subplots(
        2, 1, figsize=(8, 6), sharex=True, height_ratios=[3, 1]
    )
    ax.plot(x, y, ".", ms=3, color=_APPEAR_COLOR, label="normalized appearance")
    ax.plot(grid, model, "-", color="tab:red", lw=1.5, label="fitted model")
    ax.set_ylabel("appearance probability")
    m = fit.model
    ax.set_title(
        f"fit: theta = {m.amplitude_theta_deg:.2f} deg, "
        f"lambda_osc = {m.lambda_osc_um:.3f} um, chi2 = {fit.chi2:.3g}"
    )
    ax.legend(loc="upper right")
    ax.grid(alpha=0.3)
    res_ax.plot(x, y - model_intensity(fit.model, x), ".", ms=3, color="0.4")
    res_ax.axhline(0.0, color="k", lw=0.8)
    res_ax.set_xlabel("path-length change dL (um)")
    res_ax.set_ylabel("residual")
    res_ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return Path(path)
