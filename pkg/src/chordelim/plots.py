"""Matplotlib renderers for training curves, evaluation reports, and sweeps.

Figures are written next to the CSV outputs; the CSVs remain the canonical
machine-readable artifacts.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import EvalReport
from .landscape import LandscapeGrid
from .train import TrainHistory

_SPLIT_COLORS = {"train": "tab:blue", "val": "tab:orange"}


def plot_history(history: TrainHistory, path: str | Path) -> None:
    """Two panels: average KL loss (log scale) and fill-in per policy, by epoch."""
    fig, (ax_loss, ax_fill) = plt.subplots(1, 2, figsize=(11, 4))
    splits = sorted({r.split for r in history.records})
    for split in splits:
        recs = [r for r in history.records if r.split == split]
        epochs = [r.epoch for r in recs]
        color = _SPLIT_COLORS.get(split)
        ax_loss.semilogy(
            epochs, [max(r.avg_kl_loss, 1e-12) for r in recs], color=color, label=split
        )
        ax_fill.plot(
            epochs, [r.avg_fillin_gnn for r in recs],
            color=color, linestyle="-", label=f"gnn ({split})",
        )
        ax_fill.plot(
            epochs, [r.avg_fillin_mindeg for r in recs],
            color=color, linestyle="--", label=f"min degree ({split})",
        )
        ax_fill.plot(
            epochs, [r.avg_fillin_uniform for r in recs],
            color=color, linestyle=":", label=f"uniform ({split})",
        )
    ax_loss.set_xlabel("epoch")
    ax_loss.set_ylabel("avg KL loss")
    ax_loss.legend()
    ax_fill.set_xlabel("epoch")
    ax_fill.set_ylabel("avg fill-in per graph")
    ax_fill.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_report(report: EvalReport, path: str | Path) -> None:
    """Bar chart of average fill-in per policy, per-graph values overlaid."""
    names = ["gnn", "min_degree", "uniform"]
    means = [report.avg_fillin[n] for n in names]
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = np.arange(len(names))
    ax.bar(xs, means, color=["tab:green", "tab:blue", "tab:red"], alpha=0.7)
    for k, name in enumerate(names):
        vals = [row.fillin[name] for row in report.per_graph]
        ax.scatter(np.full(len(vals), xs[k]), vals, s=8, color="black", alpha=0.4)
    ax.set_xticks(xs, names)
    ax.set_ylabel("avg fill-in per graph")
    ax.set_title(f"{report.dataset_id}: fill-in by policy")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_grid(grid: LandscapeGrid, loss_path: str | Path, fill_path: str | Path) -> None:
    """Heatmaps of the loss surface (log10) and the normalized fill surface."""
    for values, label, path in (
        (np.log10(np.maximum(grid.loss, 1e-12)), "log10 avg KL loss", loss_path),
        (grid.normalized_fill, "fill-in / min-degree fill-in", fill_path),
    ):
        fig, ax = plt.subplots(figsize=(6, 5))
        mesh = ax.pcolormesh(
            grid.w1_values, grid.w2_values, values.T, shading="nearest", cmap="viridis"
        )
        fig.colorbar(mesh, ax=ax, label=label)
        ax.set_xlabel("w1")
        ax.set_ylabel("w2")
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
