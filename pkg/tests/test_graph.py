import numpy as np
import pytest

from conftest import edge_key_set
from torusgeom.errors import BadFaceHomology, MalformedMap, NotCellular
from torusgeom.fixtures import lattice_triangulation, one_vertex_triangulation
from torusgeom.graph import TorusGraph
from torusgeom.linalg import TorusShape


class TestBuild:
    def test_g1_counts(self, g1):
        assert (g1.vertex_count, g1.edge_count, g1.face_count) == (1, 3, 2)
        assert g1.homology.tolist() == [[1, 0], [1, 1], [2, 1]]

    def test_k7_counts(self, k7):
        assert (k7.vertex_count, k7.edge_count, k7.face_count) == (7, 21, 14)
        assert all(len(f.boundary) == 3 for f in k7.faces)

    def test_rotation_must_cover_all_darts(self):
        with pytest.raises(MalformedMap):
            TorusGraph.build(
                TorusShape.square(),
                [("p", (0.0, 0.0))],
                [("a", "p", "p", (1, 0)), ("b", "p", "p", (0, 1))],
                {"p": ["a+", "b+", "a-"]})   # b- missing

    def test_rotation_wrong_vertex(self):
        with pytest.raises(MalformedMap):
            TorusGraph.build(
                TorusShape.square(),
                [("p", (0.1, 0.1)), ("q", (0.6, 0.6))],
                [("a", "p", "q", (0, 0)), ("b", "q", "p", (1, 0)),
                 ("c", "p", "p", (0, 1)), ("d", "q", "q", (0, 1))],
                {"p": ["a+", "b+", "c+", "c-"],    # b+ leaves q, not p
                 "q": ["b-", "a-", "d+", "d-"]})

    def test_noncellular_sphere_map(self):
        # a triangle with zero homology is a sphere map: V - E + F = 2
        with pytest.raises(NotCellular):
            TorusGraph.build(
                TorusShape.square(),
                [("a", (0.1, 0.1)), ("b", (0.6, 0.1)), ("c", (0.1, 0.6))],
                [("ab", "a", "b", (0, 0)), ("bc", "b", "c", (0, 0)),
                 ("ca", "c", "a", (0, 0))],
                {"a": ["ab+", "ca-"], "b": ["bc+", "ab-"], "c": ["ca+", "bc-"]})

    def test_single_contractible_loop_rejected(self):
        with pytest.raises(NotCellular):
            TorusGraph.build(
                TorusShape.square(),
                [("p", (0.5, 0.5))],
                [("a", "p", "p", (0, 0))],
                {"p": ["a+", "a-"]})

    def test_bad_face_homology(self):
        # same combinatorics as the one-vertex triangulation, but the third
        # loop's homology vector has the wrong sign, so face boundaries no
        # longer sum to zero
        with pytest.raises(BadFaceHomology):
            TorusGraph.build(
                TorusShape.square(),
                [("p", (0.0, 0.0))],
                [("a", "p", "p", (1, 0)), ("b", "p", "p", (1, 1)),
                 ("c", "p", "p", (-2, -1))],
                {"p": ["a+", "c+", "b+", "a-", "c-", "b-"]})

    def test_disconnected_rejected(self):
        with pytest.raises(NotCellular):
            TorusGraph.build(
                TorusShape.square(),
                [("p", (0.2, 0.2)), ("q", (0.7, 0.7))],
                [("a", "p", "p", (1, 0)), ("b", "p", "p", (0, 1)),
                 ("c", "q", "q", (1, 0)), ("d", "q", "q", (0, 1))],
                {"p": ["a+", "b+", "a-", "b-"], "q": ["c+", "d+", "c-", "d-"]})

    def test_coordinates_outside_domain_rejected(self):
        from torusgeom.errors import ValidationError
        g1 = one_vertex_triangulation()
        with pytest.raises(ValidationError):
            g1.with_geometry(coords=np.array([[1.5, 0.0]]))


class TestDisplacement:
    def test_g1_loop(self, g1):
        e = {tuple(g1.homology[e]): e for e in range(3)}[(1, 1)]
        assert np.allclose(g1.displacement(2 * e), [1, 1])

    def test_reversal_negates(self, k7):
        for d in range(k7.dart_count):
            assert np.allclose(k7.displacement(d), -k7.displacement(d ^ 1))

    def test_k7_first_class(self, k7):
        # dart from (0,0) to (1/7, 3/7): slope 3
        for e in range(k7.edge_count):
            if k7.tails[2 * e] == 0 and k7.tails[2 * e + 1] == 1:
                delta = k7.displacement(2 * e)
                assert np.allclose(delta, [1 / 7, 3 / 7])
                assert delta[1] / delta[0] == pytest.approx(3.0)

    def test_g1_matrix(self, g1):
        assert np.allclose(g1.displacement_matrix(),
                           [[1, 1, 2], [0, 1, 1]])

    def test_empty_graph_matrix(self):
        g = TorusGraph(TorusShape.square(), [], np.zeros((0, 2)), [],
                       np.zeros(0, dtype=int), np.zeros(0, dtype=int),
                       np.zeros((0, 2), dtype=int))
        assert g.displacement_matrix().shape == (2, 0)

    def test_face_displacement_sums_vanish(self, k7, g1):
        for g in (k7, g1):
            for face in g.faces:
                total = sum((g.displacement(d) for d in face.boundary),
                            np.zeros(2))
                assert np.allclose(total, 0, atol=1e-12)
                hom = sum((g.dart_homology(d) for d in face.boundary),
                          np.zeros(2, dtype=int))
                assert hom.tolist() == [0, 0]


class TestDual:
    def test_g1_counts(self, g1):
        assert g1.dual().counts() == (2, 3, 1)

    def test_k7_counts(self, k7):
        dual = k7.dual()
        assert dual.counts() == (14, 21, 7)
        assert all(len(f.boundary) == 6 for f in dual.faces)

    def test_dual_dual_reverses_darts(self, k7, g1, oracle_suite):
        graphs = [k7, g1] + [inst[3] for inst in oracle_suite]
        for g in graphs:
            dual = g.dual()
            # applying the dual construction twice must reproduce the primal
            # rotation with every dart reversed
            ids = np.arange(g.dart_count)
            tails2 = dual.face_of[ids ^ 1]
            rot2 = dual.rotation_prev[ids] ^ 1
            assert np.array_equal(rot2, g.rotation_next[ids ^ 1] ^ 1)
            # dual faces are the primal vertex stars
            face_tails = {tuple(sorted(set(int(g.tails[d]) for d in f.boundary)))
                          for f in dual.faces}
            assert face_tails == {(v,) for v in range(g.vertex_count)}
            assert len(set(tails2.tolist())) == dual.face_count

    def test_dual_faces_are_vertex_stars(self, k7):
        dual = k7.dual()
        assert dual.face_count == k7.vertex_count
        for f in dual.faces:
            assert len(f.boundary) == 6   # K7 vertex degree


class TestUniversalCover:
    def test_g1_single_cell(self, g1):
        patch = g1.universal_cover_patch(1, 1)
        assert len(patch.vertices) == 1
        assert len(patch.segments) == 0
        assert len(patch.outgoing) == 3

    def test_k7_3x3(self, k7):
        patch = k7.universal_cover_patch(3, 3)
        assert len(patch.vertices) == 63

    def test_positions_periodic(self, k7):
        patch = k7.universal_cover_patch(3, 3)
        m = k7.shape.matrix
        for v, k, pos in patch.vertices:
            assert np.array_equal(pos, k7.coords[v] + m @ np.array(k))

    def test_empty_range_rejected(self, k7):
        with pytest.raises(ValueError):
            k7.universal_cover_patch(0, 2)


class TestEssential:
    def test_k7(self, k7):
        report = k7.check_essential()
        assert report.essentially_simple
        assert report.essentially_3_connected
        assert not report.patch_limited

    def test_g1_simple_but_flagged(self, g1):
        report = g1.check_essential()
        assert report.essentially_simple
        assert report.patch_limited   # homology entries reach 2

    def test_duplicate_parallel_edge_not_simple(self, k7):
        g = _with_duplicate_edge(k7)
        report = g.check_essential()
        assert not report.essentially_simple

    def test_contractible_loop_flag(self):
        g2 = lattice_triangulation(2)
        assert g2.check_essential().essentially_simple


def _with_duplicate_edge(g):
    """Copy of g with edge 0 duplicated (same endpoints and homology)."""
    vertices = list(zip(g.vertex_names, g.coords))
    edges = [(name, g.vertex_names[g.tails[2 * e]],
              g.vertex_names[g.tails[2 * e + 1]], tuple(g.homology[e]))
             for e, name in enumerate(g.edge_names)]
    edges.append(("dup", edges[0][1], edges[0][2], edges[0][3]))
    rotations = {}
    from torusgeom.graph import dart_token, edge_of
    names = list(g.edge_names) + ["dup"]
    for v, name in enumerate(g.vertex_names):
        tokens = [dart_token(names[edge_of(d)], d) for d in g.darts_at(v)]
        if v == g.tails[0]:
            tokens.insert(tokens.index(dart_token(names[0], 0)) + 1, "dup+")
        if v == g.tails[1]:
            tokens.insert(tokens.index(dart_token(names[0], 1)), "dup-")
        rotations[name] = tokens
    return TorusGraph.build(g.shape, vertices, edges, rotations)


def test_oracle_graphs_validate(oracle_suite):
    for shape, points, weights, graph, pair in oracle_suite:
        assert graph.vertex_count == len(points)
        assert graph.vertex_count - graph.edge_count + graph.face_count == 0
        assert edge_key_set(graph)   # nonempty
