"""Stress covariance, reciprocality tests, reciprocal duals, force diagrams.

The covariance of a stressed graph is the 2x2 matrix Delta W Delta^T of its
square-torus (reference) displacements, summarized by the three numbers
alpha (x second moment), beta (y second moment) and gamma (mixed moment).
A positive equilibrium stress is reciprocal on a given torus exactly when
these numbers match a closed-form function of the torus matrix; in that case
the dual graph embeds on the same torus with every dual edge orthogonal to
its primal edge and scaled by the stress.  For an arbitrary positive
equilibrium stress, scaling it to unit discriminant singles out a torus,
unique up to similarity, on which it becomes reciprocal; without rescaling,
the dual still embeds on the generally different force-diagram torus.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ClosureFailure, NotNormalized, NotReciprocalHere
from .graph import TorusGraph
from .linalg import J, TorusShape, perp, reduce_to_fundamental
from .equilibrium import affine_transfer, stress_values

RECIPROCAL_TOL = 1e-9


@dataclass(frozen=True)
class StressAnalysis:
    """Covariance summary of a stressed graph in reference coordinates."""

    alpha: float
    beta: float
    gamma: float

    @property
    def discriminant(self) -> float:
        return self.alpha * self.beta - self.gamma ** 2

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.alpha, self.gamma], [self.gamma, self.beta]])


def covariance(g: TorusGraph, stress) -> StressAnalysis:
    """Covariance of the stress over the square-torus pullback of ``g``."""
    w = stress_values(stress, g)
    delta = g.reference_displacements()
    alpha = float(np.sum(w * delta[0] ** 2))
    beta = float(np.sum(w * delta[1] ** 2))
    gamma = float(np.sum(w * delta[0] * delta[1]))
    return StressAnalysis(alpha, beta, gamma)


def normalize_stress(g: TorusGraph, stress) -> np.ndarray:
    """Scale a positive stress so its covariance has unit discriminant."""
    w = stress_values(stress, g, require_positive=True)
    disc = covariance(g, w).discriminant
    if disc <= 0.0:
        raise ValueError(f"covariance discriminant must be positive, got {disc:g}")
    return w / np.sqrt(disc)


def reciprocal_torus(analysis: StressAnalysis, tol: float = RECIPROCAL_TOL) -> TorusShape:
    """Canonical torus on which a unit-discriminant stress is reciprocal.

    The full family is every rotation and positive scaling of the returned
    representative ((beta, -gamma), (0, 1)).
    """
    if abs(analysis.discriminant - 1.0) > tol:
        raise NotNormalized(
            f"discriminant is {analysis.discriminant:.12g}; scale the stress "
            f"by 1/sqrt(discriminant) first")
    return TorusShape([[analysis.beta, -analysis.gamma], [0.0, 1.0]])


def expected_covariance(shape: TorusShape) -> StressAnalysis:
    """Covariance values a reciprocal stress must have on ``shape``."""
    (a, b), (c, d) = shape.matrix
    det = shape.det
    return StressAnalysis((b * b + d * d) / det, (a * a + c * c) / det,
                          -(a * b + c * d) / det)


def is_reciprocal_on(g: TorusGraph, stress, shape: TorusShape,
                     tol: float = RECIPROCAL_TOL) -> bool:
    """Does this equilibrium stress admit an orthogonal dual on ``shape``?"""
    actual = covariance(g, stress)
    wanted = expected_covariance(shape)
    return bool(max(abs(actual.alpha - wanted.alpha),
                    abs(actual.beta - wanted.beta),
                    abs(actual.gamma - wanted.gamma)) <= tol)


# ----------------------------------------------------------------------
# realized duals


@dataclass
class ReciprocalPair:
    """A graph with an orthogonal dual embedding on the same torus.

    Dual edge e corresponds to primal edge e, and the dual of dart d carries
    the same packed id d (the dual reference dart runs from the face right of
    the primal reference dart to the face left of it).
    """

    primal: TorusGraph
    dual: TorusGraph
    stress: np.ndarray      # |dual edge| / |primal edge| per edge

    def dual_displacement(self, d: int) -> np.ndarray:
        """Native displacement row of the dual of dart ``d``."""
        return self.dual.displacement(d)


@dataclass
class ForceDiagram:
    """The dual realized on the torus determined by the stress itself."""

    shape: TorusShape
    dual: TorusGraph
    primal: TorusGraph
    stress: np.ndarray


def realize_dual(primal: TorusGraph, dual_rows: np.ndarray, shape: TorusShape,
                 root_position=None, tol: float = RECIPROCAL_TOL) -> TorusGraph:
    """Integrate per-edge dual displacement rows into a dual embedding.

    ``dual_rows[e]`` is the native displacement row of the dual reference
    dart of edge e on ``shape``.  Dual vertex positions are accumulated over
    a breadth-first dual spanning tree rooted at face 0; every non-tree
    adjacency must close up to a lattice translation within ``tol`` times the
    row scale, otherwise ClosureFailure is raised.
    """
    dual_rows = np.asarray(dual_rows, dtype=float).reshape(primal.edge_count, 2)
    dmap = primal.dual()
    nfaces = primal.face_count
    scale = max(1.0, float(np.max(np.abs(dual_rows), initial=0.0)))

    def row(d):
        r = dual_rows[d >> 1]
        return r if (d & 1) == 0 else -r

    raw = np.full((nfaces, 2), np.nan)
    raw[0] = np.zeros(2) if root_position is None else np.asarray(root_position, float)
    queue = [0]
    order = []
    while queue:
        f = queue.pop(0)
        order.append(f)
        for d in primal.faces[f].boundary:
            g2 = int(primal.face_of[d ^ 1])
            candidate = raw[f] + row(d ^ 1)
            if np.isnan(raw[g2, 0]):
                raw[g2] = candidate
                queue.append(g2)
            else:
                gap = candidate - raw[g2]
                k = np.rint(shape.inverse @ gap)
                residual = float(np.max(np.abs(gap - shape.matrix @ k)))
                if residual > tol * scale:
                    raise ClosureFailure(
                        f"dual integration mismatch {residual:g} across faces "
                        f"{f} and {g2}")
    if len(order) != nfaces:
        raise ClosureFailure("dual graph is disconnected")

    coords = np.zeros((nfaces, 2))
    for f in range(nfaces):
        coords[f], _ = reduce_to_fundamental(raw[f], shape)

    homology = np.zeros((primal.edge_count, 2), dtype=int)
    for e in range(primal.edge_count):
        t, h = int(dmap.tails[2 * e]), int(dmap.tails[2 * e + 1])
        gap = dual_rows[e] - (coords[h] - coords[t])
        k = shape.inverse @ gap
        homology[e] = np.rint(k)
        if np.max(np.abs(k - homology[e])) > tol * max(1.0, scale):
            raise ClosureFailure(
                f"dual homology of edge {e} is not integral: {k}")

    names = [f"f{f}" for f in range(nfaces)]
    return TorusGraph(shape, names, coords, primal.edge_names, dmap.tails,
                      dmap.rotation_next, homology)


def pair_stress(primal: TorusGraph, dual: TorusGraph,
                tol: float = RECIPROCAL_TOL) -> np.ndarray:
    """Validate orthogonality of a candidate dual and return |e*|/|e|.

    Every dual edge must be a positive multiple of the rotated primal edge;
    the multiple is the induced stress coefficient.
    """
    if not primal.shape.close_to(dual.shape, tol * 10):
        raise NotReciprocalHere("primal and dual live on different tori")
    stress = np.zeros(primal.edge_count)
    for e in range(primal.edge_count):
        delta = primal.displacement(2 * e)
        dual_delta = dual.displacement(2 * e)
        norm = float(np.hypot(*delta))
        dual_norm = float(np.hypot(*dual_delta))
        if norm <= 0.0 or dual_norm <= 0.0:
            raise NotReciprocalHere(f"degenerate edge {primal.edge_names[e]}")
        if abs(float(delta @ dual_delta)) > tol * norm * dual_norm:
            raise NotReciprocalHere(
                f"edge {primal.edge_names[e]} is not orthogonal to its dual")
        if float(perp(delta) @ dual_delta) <= 0.0:
            raise NotReciprocalHere(
                f"dual of edge {primal.edge_names[e]} points against the "
                f"counterclockwise rotation of the primal edge")
        stress[e] = dual_norm / norm
    return stress


def build_reciprocal(g: TorusGraph, stress, shape: TorusShape | None = None,
                     tol: float = RECIPROCAL_TOL) -> ReciprocalPair:
    """Construct the orthogonal dual embedding on ``shape`` (default: g's torus).

    Requires ``is_reciprocal_on`` to hold there; the dual displacement of
    every reference dart is the stress times the rotated primal displacement,
    and the dual root vertex is placed at the centroid of face 0.
    """
    w = stress_values(stress, g, require_positive=True)
    if shape is None:
        shape = g.shape
    primal = g if g.shape.close_to(shape, 1e-15) else affine_transfer(g, shape)
    if not is_reciprocal_on(primal, w, shape, tol):
        actual = covariance(primal, w)
        wanted = expected_covariance(shape)
        raise NotReciprocalHere(
            f"covariance (alpha, beta, gamma) = "
            f"({actual.alpha:.9g}, {actual.beta:.9g}, {actual.gamma:.9g}) but "
            f"this torus requires ({wanted.alpha:.9g}, {wanted.beta:.9g}, "
            f"{wanted.gamma:.9g})")

    delta = primal.displacement_matrix()
    dual_rows = np.array([w[e] * perp(delta[:, e]) for e in range(primal.edge_count)])
    _, corners = primal.face_polygon(0)
    dual = realize_dual(primal, dual_rows, shape,
                        root_position=np.mean(corners, axis=0), tol=tol)
    return ReciprocalPair(primal, dual, pair_stress(primal, dual, tol))


def coherent_image(g: TorusGraph, stress, pin=0,
                   tol: float = RECIPROCAL_TOL) -> ReciprocalPair:
    """Reciprocal (hence weighted Delaunay) image for ANY positive stress.

    Composite of the pipeline: spring-embed the graph under the stress,
    rescale the stress to unit discriminant, move the embedding to the
    canonical torus of the rescaled stress, and build the orthogonal dual
    there.  Works for every essentially simple, essentially 3-connected
    graph and every positive stress; the primal of the returned pair is the
    transferred equilibrium embedding.
    """
    from .equilibrium import tutte_embed

    w = stress_values(stress, g, require_positive=True)
    balanced = tutte_embed(g, w, pin=pin)
    scaled = normalize_stress(balanced, w)
    shape = reciprocal_torus(covariance(balanced, scaled), tol)
    return build_reciprocal(affine_transfer(balanced, shape), scaled, tol=tol)


def force_diagram(g: TorusGraph, stress, tol: float = RECIPROCAL_TOL) -> ForceDiagram:
    """Realize the dual with exact force lengths on its own torus.

    The dual displacement of edge e is the stress times the rotated native
    primal displacement, so dual edges are orthogonal to primal edges with
    |e*| = w_e |e|; they close up on the torus J M (Delta W Delta^T) J^T,
    which coincides with M exactly when the stress is reciprocal on M.
    """
    w = stress_values(stress, g, require_positive=True)
    analysis = covariance(g, w)
    shape = TorusShape(J @ g.shape.matrix @ analysis.matrix @ J.T)
    delta = g.displacement_matrix()
    dual_rows = np.array([w[e] * perp(delta[:, e]) for e in range(g.edge_count)])
    dual = realize_dual(g, dual_rows, shape, tol=tol)
    return ForceDiagram(shape, dual, g, w)
