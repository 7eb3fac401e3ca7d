"""Reference graphs used across the test suite and shipped as documents.

* ``k7_delaunay`` -- the symmetric embedding of the complete graph on seven
  vertices on the square torus, an unweighted intrinsic Delaunay
  triangulation.  Its 21 edges fall into three parallel classes with
  displacement vectors (1,3)/7, (3,2)/7 and (2,-1)/7.
* ``one_vertex_triangulation`` -- a one-vertex, three-loop triangulation of
  the square torus with loop homology vectors (1,0), (1,1) and (2,1); every
  stress on it is an equilibrium stress, yet it is not weighted-Delaunay.
* ``lattice_triangulation(k)`` -- the k x k covering of the one-vertex
  triangulation (k = 1 reproduces it).
"""

from __future__ import annotations

import numpy as np

from .graph import TorusGraph
from .linalg import TorusShape


def k7_delaunay() -> TorusGraph:
    shape = TorusShape.square()
    coords = np.array([(i / 7.0, (3 * i % 7) / 7.0) for i in range(7)])
    class_vectors = {
        1: np.array([1.0, 3.0]) / 7.0,
        2: np.array([2.0, -1.0]) / 7.0,
        3: np.array([3.0, 2.0]) / 7.0,
    }
    edges = []
    for step in (1, 2, 3):
        for i in range(7):
            j = (i + step) % 7
            h = np.rint(class_vectors[step] - (coords[j] - coords[i])).astype(int)
            edges.append((i, j, h))
    return TorusGraph.from_embedding(shape, coords, edges)


def k7_class_stress(slope3=4.0 / 7.0, slope23=1.0 / 7.0, slope_neg_half=9.0 / 7.0):
    """Per-edge stress constant on each of the three K7 edge classes.

    The defaults are the stress coefficients induced by the Voronoi diagram
    (ratio of dual to primal edge length), which make the stress reciprocal
    on the square torus.
    """
    per_step = {1: slope3, 3: slope23, 2: slope_neg_half}
    return np.array([per_step[step] for step in (1, 2, 3) for _ in range(7)])


def k7_edge_classes() -> np.ndarray:
    """Class label (1, 2 or 3 = vertex-index step) per K7 edge."""
    return np.array([step for step in (1, 2, 3) for _ in range(7)])


def one_vertex_triangulation() -> TorusGraph:
    shape = TorusShape.square()
    coords = np.array([[0.0, 0.0]])
    edges = [(0, 0, (1, 0)), (0, 0, (1, 1)), (0, 0, (2, 1))]
    return TorusGraph.from_embedding(shape, coords, edges)


def unit_square_lattice() -> TorusGraph:
    """One vertex with a horizontal and a vertical loop on the square torus.

    Its single face is the unit square, whose lifted corners are cocircular:
    the square grid is a weighted Delaunay graph with a locally flat diagonal
    on every face.
    """
    shape = TorusShape.square()
    coords = np.array([[0.0, 0.0]])
    edges = [(0, 0, (1, 0)), (0, 0, (0, 1))]
    return TorusGraph.from_embedding(shape, coords, edges)


def lattice_triangulation(k: int) -> TorusGraph:
    """k x k covering of the one-vertex triangulation on the square torus."""
    if k < 1:
        raise ValueError("k must be positive")
    shape = TorusShape.square()
    index = lambda a, b: (a % k) * k + (b % k)
    coords = np.array([(a / k, b / k) for a in range(k) for b in range(k)])
    steps = [np.array([1, 0]), np.array([1, 1]), np.array([2, 1])]
    edges = []
    for a in range(k):
        for b in range(k):
            i = index(a, b)
            for step in steps:
                j = index(a + step[0], b + step[1])
                delta = step / k
                h = np.rint(delta - (coords[j] - coords[i])).astype(int)
                edges.append((i, j, h))
    return TorusGraph.from_embedding(shape, coords, edges)
