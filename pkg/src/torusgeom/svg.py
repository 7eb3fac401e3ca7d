"""Deterministic SVG rendering of torus graphs.

Single-cell renders draw the fundamental parallelogram with every geodesic
split at the boundary crossings (an edge with homology (hx, hy) becomes up to
|hx| + |hy| + 1 segments); k x k patch renders draw straight lifted copies
instead.  An optional dual embedding on the same torus is overlaid in a second
color.  Output is plain SVG 1.1 text built from fixed-precision numbers, so
identical inputs produce identical bytes.
"""

from __future__ import annotations

import numpy as np

from .graph import TorusGraph

STYLE = (
    "path.domain{fill:none;stroke:#bbbbbb;stroke-width:1}"
    "path.edge{fill:none;stroke:#1a1a1a;stroke-width:1.6}"
    "circle.vertex{fill:#1a1a1a}"
    "path.dual-edge{fill:none;stroke:#cc3311;stroke-width:1.2}"
    "circle.dual-vertex{fill:#cc3311}"
    "text.weight{font-family:monospace;font-size:10px;fill:#004488}"
)


def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".6f")


def wrapped_edge_segments(g: TorusGraph):
    """Native segments of every edge clipped to the fundamental domain.

    Returns a list of (edge index, start, end) with both points inside the
    parallelogram; segments are split where the geodesic crosses a side.
    """
    m = g.shape.matrix
    inv = g.shape.inverse
    out = []
    for e in range(g.edge_count):
        start_lat = inv @ g.coords[g.tails[2 * e]]
        vec = inv @ g.displacement(2 * e)
        cuts = {0.0, 1.0}
        for axis in range(2):
            if abs(vec[axis]) < 1e-15:
                continue
            lo = min(start_lat[axis], start_lat[axis] + vec[axis])
            hi = max(start_lat[axis], start_lat[axis] + vec[axis])
            n = np.ceil(lo)
            while n < hi:
                if lo < n < hi:
                    cuts.add(float((n - start_lat[axis]) / vec[axis]))
                n += 1.0
        ts = sorted(t for t in cuts if -1e-12 <= t <= 1 + 1e-12)
        for ta, tb in zip(ts, ts[1:]):
            if tb - ta < 1e-12:
                continue
            mid = start_lat + 0.5 * (ta + tb) * vec
            cell = np.floor(mid)
            a = m @ (start_lat + ta * vec - cell)
            b = m @ (start_lat + tb * vec - cell)
            out.append((e, a, b))
    return out


def render_svg(g: TorusGraph, dual: TorusGraph | None = None, weights=None,
               patch=(1, 1), scale: float = 240.0) -> str:
    """Render to SVG text; see the module docstring for the conventions."""
    nx, ny = (patch, patch) if isinstance(patch, int) else patch
    if nx < 1 or ny < 1:
        raise ValueError("patch range must be nonempty")
    if dual is not None and not g.shape.close_to(dual.shape, 1e-9):
        raise ValueError("dual overlay must live on the same torus")

    m = g.shape.matrix
    cells = [(i, j) for i in range(nx) for j in range(ny)]
    corners = [m @ np.array([i + di, j + dj])
               for i, j in cells for di, dj in ((0, 0), (1, 0), (1, 1), (0, 1))]
    corners = np.asarray(corners)
    lo = corners.min(axis=0)
    hi = corners.max(axis=0)
    margin = 0.05 * float(max(hi - lo))
    width = (hi[0] - lo[0] + 2 * margin) * scale
    height = (hi[1] - lo[1] + 2 * margin) * scale

    def pt(p):
        x = (p[0] - lo[0] + margin) * scale
        y = (hi[1] - p[1] + margin) * scale
        return f"{_fmt(x)} {_fmt(y)}"

    body = []
    for i, j in cells:
        ring = [m @ np.array([i + di, j + dj])
                for di, dj in ((0, 0), (1, 0), (1, 1), (0, 1))]
        d = "M " + " L ".join(pt(p) for p in ring) + " Z"
        body.append(f'<path class="domain" d="{d}"/>')

    def emit_graph(graph, edge_class, vertex_class, radius):
        if (nx, ny) == (1, 1):
            for _, a, b in wrapped_edge_segments(graph):
                body.append(f'<path class="{edge_class}" '
                            f'd="M {pt(a)} L {pt(b)}"/>')
        else:
            for i, j in cells:
                k = np.array([i, j])
                for e in range(graph.edge_count):
                    a = graph.coords[graph.tails[2 * e]] + m @ k
                    b = graph.coords[graph.tails[2 * e + 1]] + m @ (
                        k + graph.homology[e])
                    body.append(f'<path class="{edge_class}" '
                                f'd="M {pt(a)} L {pt(b)}"/>')
        for i, j in cells:
            k = np.array([i, j])
            for v in range(graph.vertex_count):
                p = graph.coords[v] + m @ k
                x, y = pt(p).split()
                body.append(f'<circle class="{vertex_class}" cx="{x}" cy="{y}" '
                            f'r="{_fmt(radius)}"/>')

    emit_graph(g, "edge", "vertex", 3.2)
    if dual is not None:
        emit_graph(dual, "dual-edge", "dual-vertex", 2.4)
    if weights is not None:
        values = np.asarray(getattr(weights, "values", weights), dtype=float)
        for v in range(g.vertex_count):
            x, y = pt(g.coords[v]).split()
            label = format(values[v], ".4g")
            body.append(f'<text class="weight" x="{x}" y="{y}" dx="5" dy="-5">'
                        f'{label}</text>')

    head = (f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_fmt(width)}" height="{_fmt(height)}" '
            f'viewBox="0 0 {_fmt(width)} {_fmt(height)}">')
    return "\n".join([head, f"<style>{STYLE}</style>", *body, "</svg>"]) + "\n"
