"""Matplotlib rendering for evaluation reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .evaluate import ARMS, MEASURES, EvalReport
from .rouge import VARIANTS

_ARM_LABELS = {"with_context": "with KG context", "without_context": "without context"}
_ARM_COLORS = {"with_context": "#3b6fb6", "without_context": "#9a9a9a"}


def plot_report(report: EvalReport, out_path: str) -> None:
    """Grouped bars, one panel per measure, both arms per Rouge variant."""
    fig, axes = plt.subplots(1, len(MEASURES), figsize=(12, 3.6), sharey=True)
    x = np.arange(len(VARIANTS))
    width = 0.38
    for ax, measure in zip(axes, MEASURES):
        for k, arm in enumerate(ARMS):
            values = [
                report.aggregates.get(v, {}).get(arm, {}).get(measure, 0.0)
                for v in VARIANTS
            ]
            ax.bar(
                x + (k - 0.5) * width,
                values,
                width,
                label=_ARM_LABELS[arm],
                color=_ARM_COLORS[arm],
            )
        ax.set_title(measure)
        ax.set_xticks(x)
        ax.set_xticklabels(VARIANTS, rotation=20)
        ax.set_ylim(0.0, 1.0)
        ax.grid(axis="y", alpha=0.3)
    axes[0].set_ylabel("mean score")
    axes[0].legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
