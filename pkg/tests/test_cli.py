from pathlib import Path

import numpy as np
import pytest

from torusgeom.cli import main
from torusgeom.document import parse

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
K7 = str(FIXTURES / "k7.graph")
G1 = str(FIXTURES / "g1.graph")
SITES = str(FIXTURES / "k7.sites")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_tsv(out):
    rows = {}
    for line in out.splitlines():
        key, _, value = line.partition("\t")
        rows[key] = value
    return rows


class TestValidate:
    def test_k7(self, capsys):
        code, out, err = run(capsys, "validate", K7)
        assert code == 0
        rows = parse_tsv(out)
        assert rows["vertices"] == "7"
        assert rows["essentially_3_connected"] == "true"
        assert rows["equilibrium"] == "true"

    def test_missing_file(self, capsys):
        code, out, err = run(capsys, "validate", "/nonexistent.graph")
        assert code == 1
        assert err.startswith("error: ")


class TestAnalyze:
    def test_uniform_stress(self, capsys):
        code, out, _ = run(capsys, "analyze", K7, "--stress", "uniform:1")
        assert code == 0
        rows = parse_tsv(out)
        assert float(rows["alpha"]) == pytest.approx(2.0, abs=1e-9)
        assert float(rows["beta"]) == pytest.approx(2.0, abs=1e-9)
        assert float(rows["gamma"]) == pytest.approx(1.0, abs=1e-9)
        assert float(rows["discriminant"]) == pytest.approx(3.0, abs=1e-9)
        force = [float(x) for x in rows["force_torus"].split()]
        assert np.allclose(force, [2, -1, -1, 2], atol=1e-9)
        recip = [float(x) for x in rows["reciprocal_torus"].split()]
        expected = np.array([2, -1, 0, np.sqrt(3)]) / np.sqrt(3)
        assert np.allclose(recip, expected, atol=1e-9)

    def test_document_stress(self, capsys):
        code, out, _ = run(capsys, "analyze", K7)
        rows = parse_tsv(out)
        assert code == 0
        assert rows["reciprocal_on_own_torus"] == "true"

    def test_figure_written(self, capsys, tmp_path):
        target = tmp_path / "report.png"
        code, out, _ = run(capsys, "analyze", K7, "--stress", "uniform:1",
                           "--figure", str(target))
        assert code == 0
        assert target.exists() and target.stat().st_size > 1000

    def test_figure_with_reciprocal_overlay(self, capsys, tmp_path):
        # the document stress is reciprocal on the square torus, so the
        # figure also draws the orthogonal dual overlay
        target = tmp_path / "overlay.png"
        code, _, _ = run(capsys, "analyze", K7, "--figure", str(target))
        assert code == 0
        assert target.exists() and target.stat().st_size > 1000

    def test_stress_file(self, capsys, tmp_path, k7, k7_stress):
        stress_file = tmp_path / "class.stress"
        stress_file.write_text("".join(
            f"stress {name} {value}\n"
            for name, value in zip(k7.edge_names, k7_stress)))
        code, out, _ = run(capsys, "analyze", K7, "--stress", str(stress_file))
        assert code == 0
        assert parse_tsv(out)["reciprocal_on_own_torus"] == "true"

    def test_stress_file_missing_edges(self, capsys, tmp_path):
        stress_file = tmp_path / "partial.stress"
        stress_file.write_text("stress e0 1.0\n")
        code, _, err = run(capsys, "analyze", K7, "--stress", str(stress_file))
        assert code == 1
        assert "misses" in err


class TestEmbed:
    def test_recovers_symmetric_coordinates(self, capsys, tmp_path, k7):
        out_path = tmp_path / "embedded.graph"
        code, _, _ = run(capsys, "embed", K7, "--stress", "uniform:1",
                         "--pin", "v0", "-o", str(out_path))
        assert code == 0
        doc = parse(out_path.read_text())
        assert np.max(np.abs(doc.graph.coords - k7.coords)) <= 1e-9


class TestReciprocal:
    def test_square_torus_dual(self, capsys, tmp_path):
        out_path = tmp_path / "dual.graph"
        code, _, _ = run(capsys, "reciprocal", K7, "-o", str(out_path))
        assert code == 0
        doc = parse(out_path.read_text())
        assert doc.graph.vertex_count == 14
        assert doc.graph.edge_count == 21

    def test_uniform_stress_rejected(self, capsys):
        code, _, err = run(capsys, "reciprocal", K7, "--stress", "uniform:1")
        assert code == 1
        assert "NotReciprocalHere" in err

    def test_normalize_flag(self, capsys, tmp_path):
        out_path = tmp_path / "dual.graph"
        code, _, _ = run(capsys, "reciprocal", K7, "--stress", "uniform:1",
                         "--normalize", "-o", str(out_path))
        assert code == 0
        doc = parse(out_path.read_text())
        expected = np.array([[2, -1], [0, np.sqrt(3)]]) / np.sqrt(3)
        assert np.allclose(doc.graph.shape.matrix, expected, atol=1e-9)


class TestWeights:
    def test_k7_weights_zero(self, capsys, tmp_path):
        out_path = tmp_path / "weighted.graph"
        code, out, _ = run(capsys, "weights", K7, "-o", str(out_path))
        assert code == 0
        for line in out.splitlines():
            assert abs(float(line.split("\t")[2])) <= 1e-9
        doc = parse(out_path.read_text())
        assert np.max(np.abs(doc.weights)) <= 1e-9


class TestCheckDelaunay:
    def test_k7_passes(self, capsys):
        code, out, _ = run(capsys, "check-delaunay", K7)
        assert code == 0
        assert parse_tsv(out)["weighted_delaunay"] == "true"

    def test_g1_fails_with_error_line(self, capsys):
        code, out, err = run(capsys, "check-delaunay", G1)
        assert code == 1
        assert parse_tsv(out)["weighted_delaunay"] == "false"
        assert err.startswith("error: ")


class TestOracle:
    def test_k7_sites_rebuild(self, capsys, tmp_path, k7):
        from conftest import edge_key_set
        out_path = tmp_path / "oracle.graph"
        code, _, _ = run(capsys, "oracle", SITES, "-o", str(out_path))
        assert code == 0
        doc = parse(out_path.read_text())
        assert edge_key_set(doc.graph) == edge_key_set(k7)

    def test_ambiguous_sites_error(self, capsys, tmp_path):
        bad = tmp_path / "one.sites"
        bad.write_text("torus 1 0 0 1\nsite a 0.5 0.5 0\n")
        code, _, err = run(capsys, "oracle", str(bad))
        assert code == 1
        assert "NonGeneric" in err


class TestRender:
    def test_svg_output(self, capsys, tmp_path):
        out_path = tmp_path / "k7.svg"
        code, _, _ = run(capsys, "render", K7, "--dual", "-o", str(out_path))
        assert code == 0
        text = out_path.read_text()
        assert text.count('class="vertex"') == 7
        assert text.count('class="edge"') >= 21

    def test_identical_across_runs(self, capsys, tmp_path):
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        run(capsys, "render", K7, "--patch", "2x2", "-o", str(a))
        run(capsys, "render", K7, "--patch", "2x2", "-o", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_weight_labels(self, capsys, tmp_path):
        weighted = tmp_path / "weighted.graph"
        run(capsys, "weights", K7, "-o", str(weighted))
        out_path = tmp_path / "labeled.svg"
        code, _, _ = run(capsys, "render", str(weighted), "--weights",
                         "-o", str(out_path))
        assert code == 0
        assert out_path.read_text().count('class="weight"') == 7

    def test_bad_patch_spec(self, capsys):
        code, _, err = run(capsys, "render", K7, "--patch", "wide")
        assert code == 1
        assert "error:" in err


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_round_trip_through_cli(capsys, tmp_path):
    # serialize -> parse -> serialize is the identity on shipped fixtures
    for name in ("k7.graph", "g1.graph", "hexa.graph"):
        text = (FIXTURES / name).read_text()
        doc = parse(text)
        from torusgeom.document import serialize
        assert serialize(doc.graph, stress=doc.stress,
                         weights=doc.weights) == text
