"""Rendered figures for distance matrices.

The PNG heatmap mirrors the raw PGM/PPM exports with axis labels and a
colorbar, using the same blue-to-red reading: near pairs cold, far
pairs warm.
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .retrieval import DistanceMatrix  # noqa: E402


def heatmap_png(matrix: DistanceMatrix, path: str, title: str = "") -> None:
    n = matrix.n
    size = max(4.0, min(10.0, 0.35 * n + 2.0))
    fig, ax = plt.subplots(figsize=(size, size * 0.85))
    im = ax.imshow(matrix.values, cmap="coolwarm", interpolation="nearest")
    fig.colorbar(im, ax=ax, label="distance")
    if n <= 40:
        ax.set_xticks(range(n))
        ax.set_yticks(range(n))
        ax.set_xticklabels(matrix.ids, rotation=90, fontsize=7)
        ax.set_yticklabels(matrix.ids, fontsize=7)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150, metadata={"Software": None})
    plt.close(fig)
