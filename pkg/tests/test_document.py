from pathlib import Path

import numpy as np
import pytest

from torusgeom.document import (parse, parse_sites, same_graph, serialize,
                                serialize_sites)
from torusgeom.errors import ParseError
from torusgeom.fixtures import k7_class_stress

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


class TestRoundTrip:
    def test_k7_memory(self, k7, k7_stress):
        text = serialize(k7, stress=k7_stress)
        doc = parse(text)
        assert same_graph(doc.graph, k7)
        assert np.array_equal(doc.stress, k7_stress)
        assert serialize(doc.graph, stress=doc.stress) == text

    def test_g1_memory(self, g1):
        text = serialize(g1)
        assert same_graph(parse(text).graph, g1)

    def test_weights_section(self, k7):
        w = np.linspace(-0.3, 0.3, 7)
        doc = parse(serialize(k7, weights=w))
        assert np.array_equal(doc.weights, w)

    @pytest.mark.parametrize("name", ["k7.graph", "g1.graph", "hexa.graph"])
    def test_shipped_fixtures(self, name):
        text = (FIXTURES / name).read_text()
        doc = parse(text)
        assert serialize(doc.graph, stress=doc.stress, weights=doc.weights) == text

    def test_shipped_k7_counts(self, k7):
        doc = parse((FIXTURES / "k7.graph").read_text())
        assert doc.graph.vertex_count == 7
        assert doc.graph.edge_count == 21
        assert same_graph(doc.graph, k7)
        assert np.array_equal(doc.stress, k7_class_stress())

    def test_oracle_fixture_is_weighted_delaunay(self):
        from torusgeom.coherence import is_weighted_delaunay
        doc = parse((FIXTURES / "hexa.graph").read_text())
        assert is_weighted_delaunay(doc.graph, doc.weights).is_weighted_delaunay

    def test_seventeen_digit_exactness(self, k7):
        doc = parse(serialize(k7))
        assert np.array_equal(doc.graph.coords, k7.coords)


class TestParseErrors:
    def test_missing_rotation_names_vertex(self, g1):
        text = "\n".join(line for line in serialize(g1).splitlines()
                         if not line.startswith("rotation")) + "\n"
        with pytest.raises(ParseError, match="rotation record for vertex 'v0'"):
            parse(text)

    def test_unknown_keyword_with_line(self, g1):
        text = serialize(g1) + "wavelength 17\n"
        with pytest.raises(ParseError, match=r"line \d+.*wavelength"):
            parse(text)

    def test_bad_number(self, g1):
        text = serialize(g1).replace("torus 1 0 0 1", "torus 1 zero 0 1")
        with pytest.raises(ParseError, match="line 2"):
            parse(text)

    def test_missing_header(self, g1):
        text = "\n".join(serialize(g1).splitlines()[1:]) + "\n"
        with pytest.raises(ParseError, match="header"):
            parse(text)

    def test_missing_torus(self):
        with pytest.raises(ParseError, match="torus"):
            parse("torusgraph 1\nvertex p 0 0\n")

    def test_duplicate_vertex(self, g1):
        text = serialize(g1) + "vertex v0 0 0\n"
        with pytest.raises(ParseError, match="duplicate vertex"):
            parse(text)

    def test_stress_for_unknown_edge(self, g1):
        text = serialize(g1) + "stress ghost 1.0\n"
        with pytest.raises(ParseError):
            parse(text)

    def test_partial_stress_section(self, g1):
        text = serialize(g1) + "stress e0 1.0\n"
        with pytest.raises(ParseError, match="misses"):
            parse(text)

    def test_comments_and_blank_lines_ok(self, g1):
        text = "# header comment\n\n" + serialize(g1).replace(
            "torus 1 0 0 1", "torus 1 0 0 1   # unit square")
        assert same_graph(parse(text).graph, g1)

    def test_validation_errors_propagate(self):
        from torusgeom.errors import NotCellular
        text = ("torusgraph 1\ntorus 1 0 0 1\nvertex p 0.5 0.5\n"
                "edge a p p 0 0\nrotation p a+ a-\n")
        with pytest.raises(NotCellular):
            parse(text)


class TestSites:
    def test_round_trip(self, k7):
        text = serialize_sites(k7.shape, list(k7.vertex_names), k7.coords,
                               np.zeros(7))
        doc = parse_sites(text)
        assert doc.names == list(k7.vertex_names)
        assert np.array_equal(doc.points, k7.coords)
        assert serialize_sites(doc.shape, doc.names, doc.points,
                               doc.weights) == text

    def test_shipped_sites(self):
        doc = parse_sites((FIXTURES / "k7.sites").read_text())
        assert len(doc.names) == 7

    def test_missing_torus(self):
        with pytest.raises(ParseError):
            parse_sites("site a 0 0 0\n")

    def test_duplicate_site(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_sites("torus 1 0 0 1\nsite a 0 0 0\nsite a 1 1 0\n")
