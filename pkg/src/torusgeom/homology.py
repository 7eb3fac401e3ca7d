"""Circulations, cocirculations, and homology classes of torus graphs.

A circulation assigns a real value to every edge (read on the reference dart;
the reversal carries the negated value) such that the signed values around
every vertex sum to zero.  Its homology class is the weighted sum of the
reference-dart homology vectors, and for any geodesic drawing it equals the
weighted sum of reference displacements in the square-torus pullback -- the
harmonic identity that the whole pipeline leans on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CocirculationCheckFailed, NotACirculation, NotClosed
from .graph import TorusGraph, edge_of, is_reference
from .linalg import J, mat_perp

BALANCE_TOL = 1e-9


def homology_matrix(g: TorusGraph) -> np.ndarray:
    """2 x E integer matrix whose columns are reference-dart homology vectors."""
    return g.homology.T.copy()


def vertex_balance(g: TorusGraph, phi) -> np.ndarray:
    """Signed outgoing sum of ``phi`` at every vertex."""
    phi = np.asarray(phi, dtype=float)
    balance = np.zeros(g.vertex_count)
    for e in range(g.edge_count):
        balance[g.tails[2 * e]] += phi[e]
        balance[g.tails[2 * e + 1]] -= phi[e]
    return balance


def is_circulation(g: TorusGraph, phi, tol: float = BALANCE_TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(phi), initial=0.0)))
    return bool(np.max(np.abs(vertex_balance(g, phi)), initial=0.0) <= tol * scale)


def cycle_homology(g: TorusGraph, darts) -> np.ndarray:
    """Homology class of a closed dart walk (sum of dart homology vectors)."""
    darts = [int(d) for d in darts]
    if not darts:
        raise NotClosed("empty dart sequence")
    for d, nxt in zip(darts, darts[1:] + darts[:1]):
        if g.head(d) != g.tail(nxt):
            raise NotClosed(
                f"dart {d} ends at vertex {g.head(d)} but dart {nxt} starts at "
                f"vertex {g.tail(nxt)}")
    total = np.zeros(2, dtype=int)
    for d in darts:
        total += g.dart_homology(d)
    return total


def circulation_class(g: TorusGraph, phi, tol: float = BALANCE_TOL) -> np.ndarray:
    """Homology class of a circulation: homology matrix times ``phi``."""
    phi = np.asarray(phi, dtype=float)
    if not is_circulation(g, phi, tol):
        raise NotACirculation("edge values are not balanced at every vertex")
    return homology_matrix(g).astype(float) @ phi


def verify_harmonic(g: TorusGraph, phi) -> float:
    """Max-norm of (reference displacements - homology matrix) applied to phi.

    Zero (up to rounding) for every circulation on every valid geodesic
    graph; a large value signals inconsistent homology annotations.
    """
    phi = np.asarray(phi, dtype=float)
    delta = g.reference_displacements() @ phi
    lam = homology_matrix(g).astype(float) @ phi
    return float(np.max(np.abs(delta - lam), initial=0.0))


# ----------------------------------------------------------------------
# spanning-tree cycle basis and circulation sampling


def spanning_tree_darts(g: TorusGraph):
    """BFS spanning tree; returns (order, parent_dart) with parent_dart[v]
    being the tree dart entering v (or -1 at the root)."""
    parent = np.full(g.vertex_count, -1, dtype=int)
    seen = np.zeros(g.vertex_count, dtype=bool)
    seen[0] = True
    order = [0]
    queue = [0]
    while queue:
        v = queue.pop(0)
        for d in g.darts_at(v):
            w = g.head(d)
            if not seen[w]:
                seen[w] = True
                parent[w] = d
                order.append(w)
                queue.append(w)
    return order, parent


def cycle_basis(g: TorusGraph):
    """Fundamental cycles of a BFS tree.

    Returns a list of (phi, darts): ``phi`` is the integer circulation
    supported on the cycle and ``darts`` the closed walk (the non-tree edge's
    reference dart followed by the tree path back to its tail).
    """
    _, parent = spanning_tree_darts(g)
    tree_edges = {edge_of(d) for d in parent if d >= 0}

    def path_to_root(v):
        darts = []
        while parent[v] >= 0:
            darts.append(int(parent[v]))
            v = g.tail(parent[v])
        return darts

    basis = []
    for e in range(g.edge_count):
        if e in tree_edges:
            continue
        d = 2 * e
        up = path_to_root(g.tail(d))      # downward darts listed from tail to root
        down = path_to_root(g.head(d))    # downward darts listed from head to root
        # drop the common suffix toward the root
        while up and down and up[-1] == down[-1]:
            up.pop()
            down.pop()
        walk = [d] + [x ^ 1 for x in down] + list(reversed(up))
        phi = np.zeros(g.edge_count)
        for x in walk:
            phi[edge_of(x)] += 1.0 if is_reference(x) else -1.0
        basis.append((phi, walk))
    return basis


def random_circulation(g: TorusGraph, rng, basis=None) -> np.ndarray:
    """Random real circulation: a random combination of fundamental cycles."""
    if basis is None:
        basis = cycle_basis(g)
    phi = np.zeros(g.edge_count)
    for vec, _ in basis:
        phi += rng.uniform(-2.0, 2.0) * vec
    return phi


def independent_homology_cycles(g: TorusGraph):
    """Two directed cycles whose homology classes span the integer plane."""
    first = None
    for phi, walk in cycle_basis(g):
        cls = homology_matrix(g).astype(float) @ phi
        if first is None:
            if np.max(np.abs(cls)) > 0.5:
                first = (walk, cls)
            continue
        det = first[1][0] * cls[1] - first[1][1] * cls[0]
        if abs(det) > 0.5:
            return first[0], walk
    raise ValueError("no pair of independent essential cycles found")


# ----------------------------------------------------------------------
# boundary cocirculations


@dataclass
class CocirculationReport:
    row1: np.ndarray
    row2: np.ndarray
    #: 2x2 matrix whose rows are the cohomology classes of row1 and row2.
    classes: np.ndarray
    dual_balance_residual: float


def boundary_cocirculations(g: TorusGraph, tol: float = BALANCE_TOL) -> CocirculationReport:
    """The two rows of the homology matrix, checked as cocirculations.

    Each row must balance at every dual vertex (every face of ``g``), and
    their cohomology classes must be (0, 1) and (-1, 0).  The classes are
    measured on a realized dual: a spring embedding under the uniform stress
    is transferred to the square torus and its force-diagram displacement
    rows are contracted against the rows.  Raises CocirculationCheckFailed on
    mismatch.
    """
    from .equilibrium import affine_transfer, tutte_embed
    from .linalg import TorusShape

    lam = homology_matrix(g).astype(float)
    residual = 0.0
    for face in g.faces:
        total = np.zeros(2)
        for d in face.boundary:
            total += g.dart_homology(d)
        residual = max(residual, float(np.max(np.abs(total))))
    if residual > tol:
        raise CocirculationCheckFailed(
            f"rows are not balanced at every dual vertex (residual {residual:g})")

    uniform = np.ones(g.edge_count)
    balanced = affine_transfer(tutte_embed(g, uniform), TorusShape.square())
    delta = balanced.reference_displacements()
    covariance = delta @ np.diag(uniform) @ delta.T
    force_shape = J @ covariance @ J.T
    dual_rows = mat_perp(delta @ np.diag(uniform)) @ np.linalg.inv(force_shape.T)
    classes = lam @ dual_rows
    expected = -J
    if np.max(np.abs(classes - expected)) > tol:
        raise CocirculationCheckFailed(
            f"cohomology classes {classes.tolist()} differ from "
            f"{expected.tolist()}")
    return CocirculationReport(lam[0].copy(), lam[1].copy(), classes, residual)
