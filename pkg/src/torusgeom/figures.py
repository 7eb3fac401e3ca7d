"""Quick-look matplotlib figures for the report path of the CLI."""

from __future__ import annotations

import numpy as np

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.collections import LineCollection

from .graph import TorusGraph
from .svg import wrapped_edge_segments


def _draw_graph(ax, g: TorusGraph, edge_color, vertex_color, title):
    m = g.shape.matrix
    ring = np.array([m @ np.array(k) for k in
                     ((0, 0), (1, 0), (1, 1), (0, 1), (0, 0))])
    ax.plot(ring[:, 0], ring[:, 1], color="0.75", lw=0.8, zorder=1)
    segments = [(a, b) for _, a, b in wrapped_edge_segments(g)]
    ax.add_collection(LineCollection(segments, colors=edge_color, lw=1.4,
                                     zorder=2))
    ax.scatter(g.coords[:, 0], g.coords[:, 1], s=18, color=vertex_color,
               zorder=3)
    ax.set_title(title, fontsize=9)
    ax.set_aspect("equal")
    ax.margins(0.08)
    ax.set_xticks([])
    ax.set_yticks([])


def save_analysis_figure(path, g: TorusGraph, force_dual: TorusGraph | None = None,
                         overlay_dual: TorusGraph | None = None, dpi: int = 150):
    """Write a figure showing the graph and, when given, its force diagram.

    ``overlay_dual`` (an orthogonal dual on the same torus) is drawn on the
    left panel; ``force_dual`` (the dual on its own torus) fills a second
    panel.
    """
    ncols = 2 if force_dual is not None else 1
    fig, axes = plt.subplots(1, ncols, figsize=(4.2 * ncols, 4.2))
    axes = np.atleast_1d(axes)
    _draw_graph(axes[0], g, "#1a1a1a", "#1a1a1a", "graph")
    if overlay_dual is not None:
        segments = [(a, b) for _, a, b in wrapped_edge_segments(overlay_dual)]
        axes[0].add_collection(LineCollection(segments, colors="#cc3311",
                                              lw=1.0, zorder=2))
        axes[0].scatter(overlay_dual.coords[:, 0], overlay_dual.coords[:, 1],
                        s=10, color="#cc3311", zorder=3)
    if force_dual is not None:
        _draw_graph(axes[1], force_dual, "#cc3311", "#cc3311", "force diagram")
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
