"""Weighted Delaunay predicates, polyhedral lifting, and a brute-force oracle.

A torus graph with vertex weights is weighted-Delaunay when every edge passes
the local determinant test and every diagonal of every non-triangular face is
locally flat.  Conversely, any orthogonal dual embedding induces such weights:
lift the universal cover to a piecewise-linear surface whose per-face gradient
is the dual vertex position, read the weight of each vertex off its lifted
height, and translate the dual so the weights become periodic.  The unique
translation is determined by the plane constants of the two neighbouring
copies of the root face.

The oracle at the bottom recomputes weighted Delaunay graphs from scratch by
testing empty power circles over a finite patch of the universal cover; it is
deliberately independent of the determinant tests so the two can check each
other.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import DegenerateStar, GeometryError, NonGeneric, PathInconsistent
from .graph import TorusGraph
from .linalg import TorusShape, reduce_to_fundamental
from .reciprocal import ReciprocalPair, pair_stress, realize_dual

FLATNESS_TOL = 1e-9

DELAUNAY = "delaunay"
FLAT = "flat"
VIOLATED = "violated"


@dataclass
class VertexWeights:
    """Per-vertex Delaunay weights, gauged so the origin vertex has weight 0."""

    values: np.ndarray
    origin: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)


def weight_values(weights, g: TorusGraph) -> np.ndarray:
    if weights is None:
        return np.zeros(g.vertex_count)
    values = weights.values if isinstance(weights, VertexWeights) else \
        np.asarray(weights, dtype=float)
    if values.shape != (g.vertex_count,):
        raise ValueError(
            f"{values.shape} weights for {g.vertex_count} vertices")
    return values


# ----------------------------------------------------------------------
# determinant predicates


def local_delaunay_det(g: TorusGraph, weights, edge, reverse: bool = False) -> float:
    """Local Delaunay determinant of an edge, evaluated at its tail vertex.

    Builds the 3x3 determinant over the three consecutive darts q, r, s
    around the tail in counterclockwise order, where r is the edge's dart:
    rows are (dx, dy, |d|^2/2 + w_tail - w_head).  Positive means locally
    Delaunay, zero locally flat, negative violated.  ``reverse`` evaluates
    from the other endpoint.
    """
    w = weight_values(weights, g)
    e = g.edge_index(edge)
    d = 2 * e + (1 if reverse else 0)
    rows = _delaunay_rows(g, w, d)
    return _det3(rows)


def _delaunay_rows(g: TorusGraph, w: np.ndarray, d: int) -> np.ndarray:
    tail = g.tail(d)
    if g.degree(tail) < 3:
        raise DegenerateStar(
            f"vertex {g.vertex_names[tail]} has degree {g.degree(tail)} < 3")
    rows = []
    for u in (int(g.rotation_prev[d]), d, int(g.rotation_next[d])):
        delta = g.displacement(u)
        rows.append([delta[0], delta[1],
                     0.5 * float(delta @ delta) + w[tail] - w[g.head(u)]])
    return np.asarray(rows)


def _det3(rows: np.ndarray) -> float:
    a, b, c = rows
    return float(a[0] * (b[1] * c[2] - b[2] * c[1])
                 - a[1] * (b[0] * c[2] - b[2] * c[0])
                 + a[2] * (b[0] * c[1] - b[1] * c[0]))


def triple_delaunay_det(points, weights) -> float:
    """3x3 determinant over four lifted weighted points (p, q, r, s).

    Rows are the displacements of q, r, s from p with third entry
    |d|^2/2 + w_p - w_other; equals the 4x4 lifted form on the same points.
    """
    points = np.asarray(points, dtype=float).reshape(4, 2)
    weights = np.asarray(weights, dtype=float).reshape(4)
    rel = points[1:] - points[0]
    rows = np.column_stack([
        rel, 0.5 * np.sum(rel ** 2, axis=1) + weights[0] - weights[1:]])
    return _det3(rows)


def lifted_delaunay_det(points, weights) -> float:
    """4x4 incircle-style determinant over four lifted weighted points.

    Rows are (1, x, y, (x^2 + y^2)/2 - w).  Shares its sign (and value) with
    the 3x3 form evaluated on the same four points.
    """
    points = np.asarray(points, dtype=float).reshape(4, 2)
    weights = np.asarray(weights, dtype=float).reshape(4)
    m = np.column_stack([
        np.ones(4), points[:, 0], points[:, 1],
        0.5 * np.sum(points ** 2, axis=1) - weights])
    return float(np.linalg.det(m))


def _classify(value: float, rows: np.ndarray, tol: float) -> str:
    scale = float(np.max(np.hypot(np.hypot(rows[:, 0], rows[:, 1]), rows[:, 2]))) ** 3
    if abs(value) <= tol * max(scale, 1e-300):
        return FLAT
    return DELAUNAY if value > 0 else VIOLATED


@dataclass
class DelaunayReport:
    edge_values: np.ndarray
    edge_classes: list
    #: (face, corner i, corner j, value, class) per tested diagonal
    diagonal_checks: list
    is_weighted_delaunay: bool


def is_weighted_delaunay(g: TorusGraph, weights=None,
                         tol: float = FLATNESS_TOL) -> DelaunayReport:
    """Classify every edge and every non-triangular-face diagonal.

    The graph is weighted Delaunay when all edges classify ``delaunay`` and
    all diagonals classify ``flat``.
    """
    w = weight_values(weights, g)
    edge_values = np.zeros(g.edge_count)
    edge_classes = []
    for e in range(g.edge_count):
        rows = _delaunay_rows(g, w, 2 * e)
        edge_values[e] = _det3(rows)
        edge_classes.append(_classify(edge_values[e], rows, tol))

    diagonal_checks = []
    for face in g.faces:
        k = len(face.boundary)
        if k <= 3:
            continue
        vertices, corners = g.face_polygon(face.id)
        for i, j in _diagonal_pairs(vertices, k):
            picks = [i, (i + 1) % k, j, (i - 1) % k]
            quad = np.asarray([corners[p] for p in picks])
            quad_w = np.asarray([w[vertices[p]] for p in picks])
            value = lifted_delaunay_det(quad, quad_w)
            rel = quad[1:] - quad[0]
            rows = np.column_stack([
                rel, 0.5 * np.sum(rel ** 2, axis=1) + quad_w[0] - quad_w[1:]])
            cls = _classify(value, rows, tol)
            diagonal_checks.append((face.id, i, j, value, cls))

    ok = all(c == DELAUNAY for c in edge_classes) and \
        all(c[4] == FLAT for c in diagonal_checks)
    return DelaunayReport(edge_values, edge_classes, diagonal_checks, ok)


def _diagonal_pairs(vertices, k):
    """Corner index pairs whose diagonals are tested for flatness.

    All non-adjacent pairs up to octagons; beyond that, the fan from the
    corner with the lowest vertex index (ties broken by boundary position).
    """
    if k <= 8:
        return [(i, j) for i in range(k) for j in range(i + 2, k)
                if not (i == 0 and j == k - 1)]
    base = min(range(k), key=lambda i: (vertices[i], i))
    return [(base, (base + off) % k) for off in range(2, k - 1)]


# ----------------------------------------------------------------------
# polyhedral lifting


@dataclass
class LiftingResult:
    """Piecewise-linear lift of the universal cover induced by a dual embedding.

    Within (the chosen lift of) face f the height is z(q) = gradient(f) @ q +
    plane_constant(f); the weight of vertex p is |p|^2 / 2 - z(p).  All
    positions are taken relative to the origin vertex, whose lift sits at
    (0, 0) with z = 0.
    """

    root_face: int
    origin: int
    plane_constants: np.ndarray          # (F,) for the home copies of faces
    gradients: np.ndarray                # (F, 2) dual vertex rows, home copies
    weights: VertexWeights
    max_path_residual: float
    _constants: dict = field(repr=False, default_factory=dict)
    _gradients: dict = field(repr=False, default_factory=dict)
    _heights: dict = field(repr=False, default_factory=dict)
    _positions: dict = field(repr=False, default_factory=dict)

    def weight_patch(self, translation_row=None) -> dict:
        """Weights of all covered vertex lifts, optionally after translating
        the dual embedding by ``translation_row``."""
        out = {}
        for key, z in self._heights.items():
            p = self._positions[key]
            shift = 0.0 if translation_row is None else float(
                np.asarray(translation_row) @ p)
            out[key] = 0.5 * float(p @ p) - (z + shift)
        return out


def lift(g: TorusGraph, pair: ReciprocalPair, origin=0, cover_radius: int = 3,
         tol: float = FLATNESS_TOL) -> LiftingResult:
    """Compute plane constants, gradients and weights from a reciprocal pair.

    Integrates over dual paths in the universal cover: crossing from a face
    copy into its neighbour across a primal dart adds the stress coefficient
    times the determinant of the dart's endpoint lifts to the plane constant,
    while the gradient moves by the dual displacement of the crossed dart.
    Covers all face copies with translations up to ``cover_radius``; path
    independence across non-tree adjacencies is verified to ``tol``.
    """
    origin = g.vertex_index(origin)
    w = pair.stress
    base = g.coords - g.coords[origin]
    m = g.shape.matrix
    offsets = g.face_anchor_offsets()
    root_face = _face_incident_to(g, origin)

    radius = int(cover_radius)
    in_range = lambda k: max(abs(k[0]), abs(k[1])) <= radius

    constants = {(root_face, (0, 0)): 0.0}
    gradients = {(root_face, (0, 0)): pair.dual.coords[root_face].astype(float)}
    heights = {}
    positions = {}
    max_residual = 0.0

    def visit_corners(f, key):
        c = constants[(f, key)]
        grad = gradients[(f, key)]
        nonlocal max_residual
        for d in g.faces[f].boundary:
            kv = (int(offsets[d][0] + key[0]), int(offsets[d][1] + key[1]))
            vkey = (int(g.tails[d]), kv)
            pos = base[g.tails[d]] + m @ np.array(kv)
            z = float(grad @ pos) + c
            if vkey in heights:
                scale = max(1.0, abs(heights[vkey]))
                if abs(heights[vkey] - z) > tol * scale:
                    raise PathInconsistent(
                        f"lift height of vertex copy {vkey} differs between "
                        f"faces: {heights[vkey]:.12g} vs {z:.12g}")
            else:
                heights[vkey] = z
                positions[vkey] = pos

    visit_corners(root_face, (0, 0))
    queue = [(root_face, (0, 0))]
    while queue:
        f, key = queue.pop(0)
        c = constants[(f, key)]
        grad = gradients[(f, key)]
        for d in g.faces[f].boundary:
            tail_k = np.array(key) + offsets[d]
            head_k = tail_k + g.dart_homology(d)
            f2 = int(g.face_of[d ^ 1])
            key2 = tuple(int(x) for x in head_k - offsets[d ^ 1])
            if not in_range(key2):
                continue
            # crossing dual dart is the dual of the reversal of d
            p_lift = base[g.head(d)] + m @ head_k
            q_lift = base[g.tails[d]] + m @ tail_k
            c2 = c + w[d >> 1] * float(p_lift[0] * q_lift[1] - p_lift[1] * q_lift[0])
            grad2 = grad + pair.dual.displacement(d ^ 1)
            if (f2, key2) in constants:
                scale = max(1.0, abs(constants[(f2, key2)]))
                err = abs(constants[(f2, key2)] - c2)
                gerr = float(np.max(np.abs(gradients[(f2, key2)] - grad2)))
                max_residual = max(max_residual, err, gerr)
                if err > tol * scale or gerr > tol:
                    raise PathInconsistent(
                        f"plane data for face copy {(f2, key2)} differs "
                        f"between dual paths")
            else:
                constants[(f2, key2)] = c2
                gradients[(f2, key2)] = grad2
                visit_corners(f2, key2)
                queue.append((f2, key2))

    plane_constants = np.array([constants[(f, (0, 0))] for f in range(g.face_count)])
    grad_home = np.array([gradients[(f, (0, 0))] for f in range(g.face_count)])
    values = np.array([
        0.5 * float(positions[(v, (0, 0))] @ positions[(v, (0, 0))])
        - heights[(v, (0, 0))] for v in range(g.vertex_count)])
    result = LiftingResult(root_face, origin, plane_constants, grad_home,
                           VertexWeights(values, origin), max_residual)
    result._constants = constants
    result._gradients = gradients
    result._heights = heights
    result._positions = positions
    return result


def _face_incident_to(g: TorusGraph, v: int) -> int:
    for d in range(g.dart_count):
        if g.tails[d] == v:
            return int(g.face_of[d])
    raise GeometryError(f"vertex {v} has no incident face")


def fix_translation(g: TorusGraph, pair: ReciprocalPair,
                    lifting: LiftingResult) -> np.ndarray:
    """Dual-root position (row) whose translation zeroes the weights of the
    origin vertex and of its two lattice neighbours.

    Derived from the plane constants of the root face's two neighbouring
    copies; recomputing weights with this translation makes them periodic.
    """
    u = g.shape.u
    v = g.shape.v
    f0 = lifting.root_face
    try:
        cu = lifting._constants[(f0, (1, 0))]
        cv = lifting._constants[(f0, (0, 1))]
    except KeyError:
        raise GeometryError("lifting cover is too small; raise cover_radius")
    row = np.array([-0.5 * float(u @ u) - cu, -0.5 * float(v @ v) - cv])
    return row @ g.shape.inverse


def weights_from_reciprocal(g: TorusGraph, pair: ReciprocalPair, origin=0,
                            cover_radius: int = 3,
                            tol: float = FLATNESS_TOL) -> VertexWeights:
    """Recover the Delaunay weights certified by a reciprocal pair.

    Composes the lifting with the unique periodic translation and validates
    the result: the origin's lattice neighbours get weight zero, all covered
    vertex copies agree with their home copy, and the weighted Delaunay test
    passes for the recovered weights.
    """
    origin = g.vertex_index(origin)
    lifting = lift(g, pair, origin=origin, cover_radius=cover_radius, tol=tol)
    root_row = fix_translation(g, pair, lifting)
    shift = root_row - lifting._gradients[(lifting.root_face, (0, 0))]
    patch = lifting.weight_patch(shift)

    scale = max(1.0, max(abs(x) for x in patch.values()))
    for key in ((origin, (1, 0)), (origin, (0, 1))):
        if key in patch and abs(patch[key]) > tol * scale:
            raise PathInconsistent(
                f"weight of origin copy {key} is {patch[key]:.3g}, not 0")
    values = np.array([patch[(v, (0, 0))] for v in range(g.vertex_count)])
    for (v, k), value in patch.items():
        if abs(value - values[v]) > tol * scale:
            raise PathInconsistent(
                f"weights are not periodic: copy {(v, k)} has {value:.12g} "
                f"vs {values[v]:.12g}")
    report = is_weighted_delaunay(g, values, tol)
    if not report.is_weighted_delaunay:
        raise GeometryError(
            "recovered weights fail the weighted Delaunay test; the pair is "
            "not a consistent reciprocal embedding")
    return VertexWeights(values, origin)


# ----------------------------------------------------------------------
# weighted Voronoi dual of a coherent graph


def radical_center(points, weights, tol: float = FLATNESS_TOL) -> np.ndarray:
    """Point with equal power distance to all given weighted points."""
    pts = np.asarray(points, dtype=float)
    w = np.asarray(weights, dtype=float)
    a = 2.0 * (pts[1:3] - pts[0])
    rhs = (np.sum(pts[1:3] ** 2, axis=1) - np.sum(pts[0] ** 2)
           - 2.0 * (w[1:3] - w[0]))
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if abs(det) <= tol * max(1.0, float(np.max(np.abs(a)))) ** 2:
        raise NonGeneric("degenerate (collinear) face corners")
    center = np.array([
        (rhs[0] * a[1, 1] - rhs[1] * a[0, 1]) / det,
        (a[0, 0] * rhs[1] - a[1, 0] * rhs[0]) / det])
    power = np.sum((pts - center) ** 2, axis=1) - 2.0 * w
    if np.max(np.abs(power - power[0])) > max(1.0, abs(power[0])) * 1e-7:
        raise NonGeneric("face corners are not power-concircular")
    return center


def voronoi_dual(g: TorusGraph, weights=None, tol: float = FLATNESS_TOL) -> ReciprocalPair:
    """Weighted Voronoi dual embedding of a weighted Delaunay graph.

    Every dual vertex is the radical center of its face's corner lifts; dual
    displacements follow from radical centers of adjacent face lifts anchored
    across their shared dart.
    """
    w = weight_values(weights, g)

    rows = np.zeros((g.edge_count, 2))
    for e in range(g.edge_count):
        d = 2 * e
        vertices, corners = g.face_polygon(int(g.face_of[d]), anchor_dart=d)
        left = radical_center(corners, w[vertices], tol)
        start = g.coords[g.tails[d]] + g.displacement(d)
        vertices, corners = g.face_polygon(int(g.face_of[d ^ 1]), anchor_dart=d ^ 1,
                                           anchor_pos=start)
        right = radical_center(corners, w[vertices], tol)
        rows[e] = left - right
    vertices0, corners0 = g.face_polygon(0)
    root = radical_center(corners0, w[np.asarray(vertices0)], tol)
    dual = realize_dual(g, rows, g.shape, root_position=root, tol=tol)
    return ReciprocalPair(g, dual, pair_stress(g, dual, tol))


# ----------------------------------------------------------------------
# brute-force weighted Delaunay oracle


def oracle_weighted_delaunay(shape: TorusShape, points, weights=None,
                             names=None, tol: float = 1e-9) -> TorusGraph:
    """Weighted Delaunay graph of sites on a torus, by empty power circles.

    An edge joins two site lifts exactly when some circle with equal power
    distance to both has strictly positive power distance to every other
    lift.  Candidates and witnesses range over a 3x3 patch of translations,
    escalating to 5x5 when a witness cannot be certified against sites
    beyond the patch; tolerance-ambiguous configurations raise NonGeneric.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    n = len(pts)
    if n == 0:
        raise ValueError("no sites")
    if n > 32:
        raise ValueError("desk-scale oracle accepts at most 32 sites")
    w = np.zeros(n) if weights is None else np.asarray(weights, dtype=float).reshape(n)
    reduced = np.array([reduce_to_fundamental(p, shape)[0] for p in pts])

    last_error = None
    for radius in (1, 2):
        try:
            edges = _power_edges(shape, reduced, w, radius, tol)
            break
        except _PatchTooSmall as exc:
            last_error = exc
    else:
        raise NonGeneric(f"could not certify witnesses within a 5x5 patch: "
                         f"{last_error}")

    used = {t for t, _, _ in edges} | {h for _, h, _ in edges}
    if used != set(range(n)):
        hidden = sorted(set(range(n)) - used)
        raise NonGeneric(f"sites {hidden} have empty power cells; perturb "
                         f"weights")
    graph = TorusGraph.from_embedding(shape, reduced, edges, vertex_names=names)
    report = is_weighted_delaunay(graph, w, tol)
    if not report.is_weighted_delaunay:
        raise NonGeneric("oracle output is tolerance-ambiguous under the "
                         "determinant test; perturb the input")
    return graph


class _PatchTooSmall(Exception):
    pass


def _power_edges(shape: TorusShape, pts: np.ndarray, w: np.ndarray,
                 radius: int, tol: float):
    n = len(pts)
    m = shape.matrix
    length_scale = float(np.sqrt(shape.det))
    width_tol = tol * length_scale
    tie_tol = tol * length_scale ** 2
    sigma_min = float(np.sqrt(np.min(np.linalg.eigvalsh(m.T @ m))))
    max_w = float(np.max(w, initial=0.0))

    # constraint sites: all lifts with translations up to radius + 1
    span = range(-radius - 1, radius + 2)
    lift_offsets = np.array([(i, j) for i in span for j in span])
    lift_site = np.tile(np.arange(n), len(lift_offsets))
    lift_k = np.repeat(lift_offsets, n, axis=0)
    lift_pos = pts[lift_site] + lift_k @ m.T
    lift_w = w[lift_site]

    candidate_offsets = [np.array(k) for k in
                         product(range(-radius, radius + 1), repeat=2)]
    edges = []
    for i in range(n):
        for j in range(i, n):
            for k in candidate_offsets:
                if i == j and not (k[0] > 0 or (k[0] == 0 and k[1] > 0)):
                    continue    # one orientation per loop candidate
                a = pts[i]
                b = pts[j] + m @ k
                ab = b - a
                len2 = float(ab @ ab)
                if len2 <= (1e-9 * length_scale) ** 2:
                    raise NonGeneric(f"sites {i} and {j} (offset {tuple(k)}) "
                                     f"coincide")
                s = 0.5 + (w[i] - w[j]) / len2
                x0 = a + s * ab
                u = np.array([-ab[1], ab[0]]) / np.sqrt(len2)

                exclude = ((lift_site == i) & (lift_k == (0, 0)).all(axis=1)) | \
                          ((lift_site == j) & (lift_k == k).all(axis=1))
                rel = lift_pos[~exclude] - a
                c = 2.0 * (rel @ u)
                gval = (np.sum(rel ** 2, axis=1) - 2.0 * (rel @ (x0 - a))
                        + 2.0 * (w[i] - lift_w[~exclude]))

                parallel = np.abs(c) <= 1e-12 * length_scale
                if np.any(parallel & (np.abs(gval) <= tie_tol)):
                    raise NonGeneric(
                        f"degenerate bisector tie for sites {i}, {j}")
                if np.any(parallel & (gval < 0)):
                    continue
                pos_side = c > 1e-12 * length_scale
                neg_side = c < -1e-12 * length_scale
                if not pos_side.any() or not neg_side.any():
                    raise _PatchTooSmall(
                        f"unbounded power-circle interval for sites {i}, {j}")
                hi = float(np.min(gval[pos_side] / c[pos_side]))
                lo = float(np.max(gval[neg_side] / c[neg_side]))
                width = hi - lo
                if abs(width) <= width_tol:
                    raise NonGeneric(
                        f"power circle through sites {i} and {j} "
                        f"(offset {tuple(k)}) is tolerance-ambiguous")
                if width < 0:
                    continue
                witness = x0 + 0.5 * (lo + hi) * u
                power = float((witness - a) @ (witness - a)) - 2.0 * w[i]
                margin_lat = _block_margin(shape, witness, radius + 1)
                outside = (sigma_min * margin_lat) ** 2 - 2.0 * max_w
                if power >= outside - tie_tol:
                    raise _PatchTooSmall(
                        f"witness for sites {i}, {j} too close to the patch "
                        f"boundary")
                edges.append((i, j, k.copy()))
    return edges


def _block_margin(shape: TorusShape, point: np.ndarray, radius: int) -> float:
    """Lattice-coordinate margin from ``point`` to the outside of the block
    of cells with translations up to ``radius``."""
    lat = shape.inverse @ point
    lo = lat - (-radius)
    hi = (radius + 1) - lat
    return float(max(0.0, min(lo.min(), hi.min())))
