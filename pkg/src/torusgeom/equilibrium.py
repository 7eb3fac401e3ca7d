"""Equilibrium stresses, the toroidal spring embedder, and affine transfer.

A positive stress is in equilibrium when, at every vertex, the stress-weighted
displacement vectors of the outgoing darts sum to zero.  For an essentially
simple, essentially 3-connected graph and any positive stress there is a
unique homotopic equilibrium embedding up to translation; `tutte_embed`
computes it by pinning one vertex and solving the weighted Laplacian system
with the homology vectors as constants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotEssentiallyValid
from .graph import TorusGraph
from .linalg import LinearSystem, TorusShape, reduce_to_fundamental, solve_dense

RESIDUAL_RTOL = 1e-9


@dataclass(frozen=True)
class Stress:
    """Per-edge weights; ``positive`` asserts every weight is > 0."""

    values: np.ndarray
    positive: bool = False

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if not np.all(np.isfinite(self.values)):
            raise ValueError("stress values must be finite")
        if self.positive and self.values.size and self.values.min() <= 0.0:
            raise ValueError("stress flagged positive has a non-positive entry")

    @classmethod
    def uniform(cls, g: TorusGraph, value: float = 1.0) -> "Stress":
        return cls(np.full(g.edge_count, float(value)), positive=value > 0)


def stress_values(stress, g: TorusGraph, require_positive: bool = False) -> np.ndarray:
    """Coerce a Stress or array-like to a validated per-edge array."""
    values = stress.values if isinstance(stress, Stress) else np.asarray(stress, dtype=float)
    if values.shape != (g.edge_count,):
        raise ValueError(
            f"stress has {values.shape} entries, graph has {g.edge_count} edges")
    if require_positive and values.size and values.min() <= 0.0:
        raise ValueError("a positive stress is required")
    return values


@dataclass
class EquilibriumReport:
    residuals: np.ndarray      # (V, 2) net force per vertex
    max_residual: float
    scale: float               # largest single force term |w * displacement|
    is_equilibrium: bool


def equilibrium_residual(g: TorusGraph, stress) -> EquilibriumReport:
    """Net stress-weighted displacement at every vertex."""
    w = stress_values(stress, g)
    residuals = np.zeros((g.vertex_count, 2))
    scale = 0.0
    for d in range(g.dart_count):
        term = w[d >> 1] * g.displacement(d)
        residuals[g.tails[d]] += term
        scale = max(scale, float(np.hypot(*term)))
    max_residual = float(np.max(np.hypot(residuals[:, 0], residuals[:, 1]), initial=0.0))
    return EquilibriumReport(residuals, max_residual, scale,
                             max_residual <= RESIDUAL_RTOL * max(scale, 1e-300))


def affine_transfer(g: TorusGraph, target: TorusShape) -> TorusGraph:
    """Image of ``g`` on another torus under the linear map target @ shape^-1.

    Homology vectors (and hence lattice coordinates) are unchanged; the
    displacement matrix maps by the same linear map, so equilibrium stresses
    stay equilibrium stresses.
    """
    transform = target.matrix @ g.shape.inverse
    coords = g.coords @ transform.T
    return g.with_geometry(shape=target, coords=coords)


def tutte_embed(g: TorusGraph, stress, pin=0) -> TorusGraph:
    """Homotopic equilibrium (spring) embedding with one pinned vertex.

    Solves, for every vertex except ``pin``, the balance equations with the
    homology vectors held constant; the pinned vertex keeps its input
    coordinate, which fixes the translation gauge.  Requires the graph to be
    essentially simple and essentially 3-connected, and the stress positive.
    """
    w = stress_values(stress, g, require_positive=True)
    report = g.check_essential()
    if not (report.essentially_simple and report.essentially_3_connected):
        raise NotEssentiallyValid(
            f"spring embedding needs an essentially simple, essentially "
            f"3-connected graph (simple={report.essentially_simple}, "
            f"3-connected={report.essentially_3_connected})")
    pin = g.vertex_index(pin)
    n = g.vertex_count
    unknown = [v for v in range(n) if v != pin]
    col = {v: i for i, v in enumerate(unknown)}

    matrix = np.zeros((n - 1, n - 1))
    rhs = np.zeros((n - 1, 2))
    m = g.shape.matrix
    for d in range(g.dart_count):
        p = int(g.tails[d])
        if p == pin:
            continue
        q = g.head(d)
        we = w[d >> 1]
        i = col[p]
        matrix[i, i] -= we
        rhs[i] -= we * (m @ g.dart_homology(d))
        if q == pin:
            rhs[i] -= we * g.coords[pin]
        else:
            matrix[i, col[q]] += we
    solution = solve_dense(LinearSystem(matrix, rhs)) if unknown else np.zeros((0, 2))

    coords = g.coords.copy()
    shifts = np.zeros((n, 2), dtype=int)
    for v, i in col.items():
        coords[v], shifts[v] = reduce_to_fundamental(solution[i], g.shape)
    homology = g.homology.copy()
    for e in range(g.edge_count):
        homology[e] += shifts[g.tails[2 * e + 1]] - shifts[g.tails[2 * e]]

    result = g.with_geometry(coords=coords, homology=homology)
    check = equilibrium_residual(result, w)
    if not check.is_equilibrium:
        raise ArithmeticError(
            f"spring embedding did not reach equilibrium "
            f"(residual {check.max_residual:g}, scale {check.scale:g})")
    if not embedding_check(result):
        raise ArithmeticError("spring embedding produced a crossing drawing")
    return result


# ----------------------------------------------------------------------
# embedding validation


def embedding_check(g: TorusGraph) -> bool:
    """True when the drawing is an embedding.

    Checks, on a 3x3 universal-cover patch, that no two edge segments meet
    except at shared endpoints, that vertices are distinct, and that every
    face polygon has positive orientation (faces are traversed
    counterclockwise).
    """
    scale = float(np.sqrt(g.shape.det))
    eps = 1e-9 * scale
    if g.vertex_count > 1:
        diff = g.coords[:, None, :] - g.coords[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        np.fill_diagonal(dist, np.inf)
        if dist.min() <= eps:
            return False

    # two darts leaving one vertex in the same direction would make their
    # lifted segments overlap from a shared endpoint, which the pairwise
    # test below ignores
    for v in range(g.vertex_count):
        angles = sorted(float(np.arctan2(*g.displacement(d)[::-1]))
                        for d in g.darts_at(v))
        for first, second in zip(angles, angles[1:] + [angles[0] + 2 * np.pi]):
            if second - first <= 1e-12:
                return False

    m = g.shape.matrix
    starts, ends = [], []
    for e in range(g.edge_count):
        t, h = int(g.tails[2 * e]), int(g.tails[2 * e + 1])
        for ka in (-1, 0, 1):
            for kb in (-1, 0, 1):
                k = np.array([ka, kb])
                starts.append(g.coords[t] + m @ k)
                ends.append(g.coords[h] + m @ (k + g.homology[e]))
    if not starts:
        return True
    a = np.asarray(starts)
    b = np.asarray(ends)
    if np.min(np.hypot(*(b - a).T)) <= eps:
        return False    # degenerate edge

    if _segments_cross(a, b, eps):
        return False

    total_area = 0.0
    for face in g.faces:
        first = face.boundary[0]
        pos = g.coords[g.tails[first]].copy()
        corners = []
        for d in face.boundary:
            corners.append(pos.copy())
            pos = pos + g.displacement(d)
        corners = np.asarray(corners)
        rolled = np.roll(corners, -1, axis=0)
        area = 0.5 * float(np.sum(corners[:, 0] * rolled[:, 1]
                                  - corners[:, 1] * rolled[:, 0]))
        if area <= eps * scale:
            return False
        total_area += area
    return abs(total_area - g.shape.det) <= 1e-6 * g.shape.det


def _segments_cross(a: np.ndarray, b: np.ndarray, eps: float) -> bool:
    """Any proper crossing or overlap between segments, ignoring contacts at
    shared endpoints."""
    n = len(a)
    d = b - a

    def orient(p, q, r):
        # sign of cross(q - p, r - p); broadcast friendly
        return ((q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1])
                - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0]))

    ai, bi = a[:, None, :], b[:, None, :]
    aj, bj = a[None, :, :], b[None, :, :]
    o1 = orient(ai, bi, aj)
    o2 = orient(ai, bi, bj)
    o3 = orient(aj, bj, ai)
    o4 = orient(aj, bj, bi)
    area_eps = eps * max(1.0, float(np.max(np.hypot(d[:, 0], d[:, 1]))))

    proper = ((o1 * o2 < -(area_eps ** 2)) & (o3 * o4 < -(area_eps ** 2)))

    def coincide(p, q):
        return np.hypot(p[..., 0] - q[..., 0], p[..., 1] - q[..., 1]) <= eps

    shared = (coincide(ai, aj) | coincide(ai, bj)
              | coincide(bi, aj) | coincide(bi, bj))

    # touching: an endpoint strictly inside another segment
    def on_segment(p, q, r):
        collinear = np.abs(orient(p, q, r)) <= area_eps * np.hypot(
            q[..., 0] - p[..., 0], q[..., 1] - p[..., 1])
        t = ((r[..., 0] - p[..., 0]) * (q[..., 0] - p[..., 0])
             + (r[..., 1] - p[..., 1]) * (q[..., 1] - p[..., 1]))
        length2 = ((q[..., 0] - p[..., 0]) ** 2 + (q[..., 1] - p[..., 1]) ** 2)
        inside = (t > eps * np.sqrt(length2)) & (t < length2 - eps * np.sqrt(length2))
        return collinear & inside

    touch = (on_segment(ai, bi, aj) | on_segment(ai, bi, bj)
             | on_segment(aj, bj, ai) | on_segment(aj, bj, bi))

    bad = (proper | touch) & ~shared
    idx = np.triu_indices(n, k=1)
    return bool(np.any(bad[idx]))
