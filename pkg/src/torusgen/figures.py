"""Matplotlib figure builders with byte-stable SVG output.

Figures are rendered headlessly.  SVG files omit the creation date and use a
fixed hash salt for element ids, so rerunning a command with the same seed
reproduces the output byte for byte.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .validation import QuadrantTable, chi_square_critical

__all__ = ["save_figure", "histogram_figure", "quadrant_figure", "bench_figure"]

_RC = {
    "figure.figsize": (7.0, 4.4),
    "figure.dpi": 110,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "torusgen",
}

_BAR_COLOR = "#5b84b1"
_LINE_COLOR = "#c4524e"


def save_figure(fig, path) -> Path:
    """Write a figure to ``path``; suffix picks the format (svg preferred).

    The hash salt and date suppression take effect here, at render time, so
    SVG element ids and metadata are identical run to run.
    """
    path = Path(path)
    kwargs = {"metadata": {"Date": None}} if path.suffix.lower() == ".svg" else {}
    try:
        with plt.rc_context({"svg.hashsalt": _RC["svg.hashsalt"]}):
            fig.savefig(path, **kwargs)
    finally:
        plt.close(fig)
    return path


def histogram_figure(
    edges: np.ndarray,
    densities: np.ndarray,
    overlay=None,
    title: str = "",
    xlabel: str = "theta",
):
    """Bar chart of a density histogram, optionally with the target curve."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        ax.bar(
            edges[:-1],
            densities,
            width=np.diff(edges),
            align="edge",
            color=_BAR_COLOR,
            edgecolor="white",
            linewidth=0.4,
            label="sample",
        )
        if overlay is not None:
            grid = np.linspace(edges[0], edges[-1], 513)
            ax.plot(grid, overlay(grid), color=_LINE_COLOR, lw=1.7, label="target")
            ax.legend(frameon=False)
        ax.set_xlabel(xlabel)
        ax.set_ylabel("density")
        ax.set_xlim(edges[0], edges[-1])
        if title:
            ax.set_title(title)
        fig.tight_layout()
    return fig


def quadrant_figure(table: QuadrantTable, title: str = ""):
    """Observed vs expected counts over the 16 angle quadrants."""
    observed = table.observed.ravel()
    expected = (table.n * table.expected_probs).ravel()
    verdicts = ", ".join(
        f"alpha={alpha}: {'pass' if table.passes(alpha) else 'fail'}"
        f" (crit {chi_square_critical(table.dof, alpha):.3f})"
        for alpha in (0.05, 0.01)
    )
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        x = np.arange(observed.size)
        ax.bar(x, observed, color=_BAR_COLOR, label="observed")
        ax.plot(x, expected, "o-", color=_LINE_COLOR, ms=4, lw=1.2, label="expected")
        ax.set_xticks(x)
        ax.set_xticklabels(
            [f"{i + 1},{j + 1}" for i in range(4) for j in range(4)], fontsize=7
        )
        ax.set_xlabel("quadrant (theta1, theta2)")
        ax.set_ylabel("count")
        ax.legend(frameon=False)
        head = title or "Quadrant counts"
        ax.set_title(f"{head}\nchi-square = {table.statistic:.2f}, {verdicts}", fontsize=9)
        fig.tight_layout()
    return fig


def bench_figure(table: dict):
    """Acceptance-rate curves per sampler from a bench report dictionary."""
    rows = table["rows"]
    samplers = list(dict.fromkeys(row["sampler"] for row in rows))
    param = next(k for k in rows[0]["params"] if k not in ("mu", "partitions"))
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        for name in samplers:
            xs = [row["params"][param] for row in rows if row["sampler"] == name]
            ys = [row["rate_percent"] for row in rows if row["sampler"] == name]
            ax.plot(xs, ys, "o-", ms=4, lw=1.4, label=name)
        if max(xs) / max(min(xs), 1e-12) > 50:
            ax.set_xscale("log")
        ax.set_xlabel(param)
        ax.set_ylabel("acceptance rate (%)")
        ax.legend(frameon=False)
        ax.set_title(f"Acceptance rates, table {table['table_id']} (n={table['n']})")
        fig.tight_layout()
    return fig
