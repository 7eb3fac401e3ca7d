import numpy as np
import pytest

from torusgeom.coherence import oracle_weighted_delaunay, voronoi_dual
from torusgeom.errors import NonGeneric
from torusgeom.fixtures import k7_delaunay, k7_class_stress, one_vertex_triangulation
from torusgeom.linalg import TorusShape


@pytest.fixture(scope="session")
def k7():
    return k7_delaunay()


@pytest.fixture(scope="session")
def k7_stress():
    return k7_class_stress()


@pytest.fixture(scope="session")
def g1():
    return one_vertex_triangulation()


def random_weighted_sites(rng, min_sites=5, max_sites=16):
    """A random torus, well-separated sites on it, and small weights."""
    n = int(rng.integers(min_sites, max_sites + 1))
    while True:
        m = np.array([[rng.uniform(0.8, 1.3), rng.uniform(-0.3, 0.3)],
                      [rng.uniform(-0.3, 0.3), rng.uniform(0.8, 1.3)]])
        if np.linalg.det(m) > 0.5:
            break
    shape = TorusShape(m)
    min_sep = 0.25 * np.sqrt(shape.det / n)
    while True:
        lat = rng.uniform(0.0, 1.0, (n, 2))
        gap = lat[:, None, :] - lat[None, :, :]
        gap -= np.rint(gap)
        native = gap @ m.T
        dist = np.hypot(native[..., 0], native[..., 1])
        np.fill_diagonal(dist, np.inf)
        if dist.min() >= min_sep:
            break
    weights = rng.uniform(0.0, 0.2 * min_sep ** 2, n)
    return shape, lat @ m.T, weights


def oracle_instance(rng, **kwargs):
    """Draw random sites until the oracle accepts them as generic."""
    for _ in range(50):
        shape, points, weights = random_weighted_sites(rng, **kwargs)
        try:
            graph = oracle_weighted_delaunay(shape, points, weights)
        except NonGeneric:
            continue
        return shape, points, weights, graph
    raise RuntimeError("could not draw a generic instance")


_SUITE_TIMING = {}


@pytest.fixture(scope="session")
def oracle_suite():
    """100 seeded oracle instances with their weighted Voronoi duals."""
    import time
    rng = np.random.default_rng(186282)
    suite = []
    start = time.perf_counter()
    for _ in range(100):
        shape, points, weights, graph = oracle_instance(rng)
        suite.append((shape, points, weights, graph, voronoi_dual(graph, weights)))
    _SUITE_TIMING["seconds"] = time.perf_counter() - start
    return suite


@pytest.fixture(scope="session")
def oracle_suite_seconds(oracle_suite) -> float:
    return _SUITE_TIMING["seconds"]


@pytest.fixture(scope="session")
def oracle_sample(oracle_suite):
    """A small slice of the suite for the more expensive checks."""
    return oracle_suite[:10]


def edge_key_set(g):
    """Canonical (tail, head, homology) keys, orientation-independent."""
    keys = set()
    for e in range(g.edge_count):
        t, h = int(g.tails[2 * e]), int(g.tails[2 * e + 1])
        hx, hy = (int(x) for x in g.homology[e])
        if t > h or (t == h and (hx, hy) < (-hx, -hy)):
            t, h, hx, hy = h, t, -hx, -hy
        keys.add((t, h, hx, hy))
    return keys


def is_scaled_rotation(a, tol=1e-7):
    scale = max(1.0, float(np.abs(a).max()))
    return (abs(a[0, 0] - a[1, 1]) <= tol * scale
            and abs(a[0, 1] + a[1, 0]) <= tol * scale
            and a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0] > 0)
