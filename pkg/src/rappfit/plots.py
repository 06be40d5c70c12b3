"""Figure rendering for report artifacts.

Everything here draws to files through the Agg backend; no interactive
windows.  Each function returns the path it wrote.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .rapp import OperatingPoint


def save_heatmap_png(
    path, vsup_grid, freq_grid, values_by_op, title: str, cbar_label: str
) -> Path:
    """Render a parameter or metric map over the (vsup, freq) grid."""
    vsup_grid = [float(v) for v in vsup_grid]
    freq_grid = [float(f) for f in freq_grid]
    grid = np.empty((len(freq_grid), len(vsup_grid)))
    for j, freq in enumerate(freq_grid):
        for i, vsup in enumerate(vsup_grid):
            grid[j, i] = values_by_op[OperatingPoint(vsup, freq)]
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    mesh = ax.pcolormesh(vsup_grid, freq_grid, grid, shading="nearest")
    fig.colorbar(mesh, ax=ax, label=cbar_label)
    ax.set_xlabel("Supply voltage (V)")
    ax.set_ylabel("Carrier frequency (GHz)")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def save_trace_png(path, rows, title: str) -> Path:
    """Render an elimination trace: rmse versus remaining term count."""
    counts = [row[0] for row in rows]
    rmses = [row[1] for row in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(counts, rmses, marker="o")
    for count, rmse, label in rows:
        if label:
            ax.annotate(
                label,
                (count, rmse),
                textcoords="offset points",
                xytext=(4, 6),
                fontsize=8,
            )
    ax.set_xlabel("Monomials kept")
    ax.set_ylabel("Surface fit RMSE")
    ax.set_title(title)
    ax.invert_xaxis()
    ax.grid(True, alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def save_amam_png(path, input_amps, measured_amps, curves: dict, title: str) -> Path:
    """Scatter measured AM/AM samples with fitted curves overlaid.

    ``curves`` maps a legend label to (input_amplitudes, output_amplitudes).
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    ax.plot(
        np.asarray(input_amps, dtype=float),
        np.asarray(measured_amps, dtype=float),
        ".",
        markersize=2,
        alpha=0.3,
        label="measured",
        color="0.4",
    )
    for label, (xs, ys) in curves.items():
        ax.plot(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float), label=label)
    ax.set_xlabel("Input amplitude (V)")
    ax.set_ylabel("Output amplitude (V)")
    ax.set_title(title)
    ax.legend()
    ax.grid(True, alpha=0.4)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def save_nrmse_bars_png(path, means: dict, title: str) -> Path:
    """Bar chart of mean NRMSE per model variant."""
    names = list(means)
    values = [means[name] for name in names]
    fig, ax = plt.subplots(figsize=(5.4, 3.8))
    ax.bar(names, values, color=["#4878d0", "#ee854a", "#6acc64"][: len(names)])
    for i, value in enumerate(values):
        ax.annotate(f"{value:.4f}", (i, value), ha="center", va="bottom", fontsize=9)
    ax.set_ylabel("Mean AM/AM NRMSE")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)
