"""Command line interface.

Exit codes: 0 success, 1 domain error (reported as a structured
``error: <Kind>: <message>`` line on stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import coherence, document, equilibrium, reciprocal, svg
from .errors import GeometryError


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _load(path: str) -> document.GraphDocument:
    with open(path, "r", encoding="utf-8") as handle:
        return document.parse(handle.read())


def _resolve_stress(doc: document.GraphDocument, choice: str | None) -> np.ndarray:
    """Stress from --stress (``uniform:VALUE`` or a stress-lines file),
    falling back to the document's stress section."""
    g = doc.graph
    if choice is None:
        if doc.stress is None:
            raise GeometryError("no stress given: pass --stress or add a "
                                "stress section to the document")
        return doc.stress
    if choice.startswith("uniform:"):
        return np.full(g.edge_count, float(choice.split(":", 1)[1]))
    values = {}
    with open(choice, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 3 or fields[0] != "stress":
                raise GeometryError(
                    f"{choice}:{lineno}: expected 'stress EDGE VALUE'")
            values[fields[1]] = float(fields[2])
    missing = [n for n in g.edge_names if n not in values]
    if missing:
        raise GeometryError(f"stress file misses edges {missing}")
    return np.array([values[n] for n in g.edge_names])


def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)


def _parse_patch(text: str):
    try:
        nx, ny = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise GeometryError(f"bad patch {text!r}; expected KxK") from None
    return nx, ny


# ----------------------------------------------------------------------
# subcommands


def cmd_validate(args) -> int:
    doc = _load(args.file)
    g = doc.graph
    report = g.check_essential()
    embeds = equilibrium.embedding_check(g)
    print(f"vertices\t{g.vertex_count}")
    print(f"edges\t{g.edge_count}")
    print(f"faces\t{g.face_count}")
    print(f"essentially_simple\t{str(report.essentially_simple).lower()}")
    print(f"essentially_3_connected\t{str(report.essentially_3_connected).lower()}")
    if report.patch_limited:
        print("note\t3-connectivity certificate is heuristic "
              "(homology entries exceed 1)")
    print(f"embedding\t{str(embeds).lower()}")
    if doc.stress is not None:
        rep = equilibrium.equilibrium_residual(g, doc.stress)
        print(f"equilibrium\t{str(rep.is_equilibrium).lower()}")
    if not embeds:
        raise GeometryError("drawing is not an embedding")
    return 0


def cmd_embed(args) -> int:
    doc = _load(args.file)
    w = _resolve_stress(doc, args.stress)
    pin = args.pin if args.pin is not None else doc.graph.vertex_names[0]
    result = equilibrium.tutte_embed(doc.graph, w, pin=pin)
    _write(document.serialize(result, stress=w), args.output)
    return 0


def cmd_analyze(args) -> int:
    doc = _load(args.file)
    g = doc.graph
    w = _resolve_stress(doc, args.stress)
    analysis = reciprocal.covariance(g, w)
    rep = equilibrium.equilibrium_residual(g, w)
    print(f"alpha\t{_fmt(analysis.alpha)}")
    print(f"beta\t{_fmt(analysis.beta)}")
    print(f"gamma\t{_fmt(analysis.gamma)}")
    print(f"discriminant\t{_fmt(analysis.discriminant)}")
    print(f"equilibrium\t{str(rep.is_equilibrium).lower()}")
    print(f"reciprocal_on_own_torus\t"
          f"{str(reciprocal.is_reciprocal_on(g, w, g.shape)).lower()}")
    force = reciprocal.force_diagram(g, w) if rep.is_equilibrium else None
    if force is not None:
        print("force_torus\t" + " ".join(_fmt(x) for x in force.shape.matrix.ravel()))
    normalized = reciprocal.normalize_stress(g, w)
    canonical = reciprocal.reciprocal_torus(reciprocal.covariance(g, normalized))
    print(f"normalized_scale\t{_fmt(normalized[0] / w[0])}")
    print("reciprocal_torus\t" + " ".join(_fmt(x) for x in canonical.matrix.ravel()))
    if args.figure:
        from .figures import save_analysis_figure
        overlay = None
        if force is not None and reciprocal.is_reciprocal_on(g, w, g.shape):
            overlay = reciprocal.build_reciprocal(g, w).dual
        save_analysis_figure(args.figure, g,
                             force_dual=force.dual if force else None,
                             overlay_dual=overlay)
        print(f"figure\t{args.figure}")
    return 0


def cmd_reciprocal(args) -> int:
    doc = _load(args.file)
    w = _resolve_stress(doc, args.stress)
    if args.normalize:
        pair = reciprocal.coherent_image(doc.graph, w)
    else:
        pair = reciprocal.build_reciprocal(doc.graph, w)
    _write(document.serialize(pair.dual, stress=1.0 / pair.stress), args.output)
    return 0


def cmd_weights(args) -> int:
    doc = _load(args.file)
    g = doc.graph
    w = _resolve_stress(doc, args.stress)
    pair = reciprocal.build_reciprocal(g, w)
    weights = coherence.weights_from_reciprocal(g, pair)
    for name, value in zip(g.vertex_names, weights.values):
        print(f"weight\t{name}\t{_fmt(value)}")
    if args.output:
        _write(document.serialize(g, stress=w, weights=weights.values),
               args.output)
    return 0


def cmd_check_delaunay(args) -> int:
    doc = _load(args.file)
    g = doc.graph
    weights = doc.weights
    report = coherence.is_weighted_delaunay(g, weights, tol=args.tolerance)
    counts = {}
    for cls in report.edge_classes:
        counts[cls] = counts.get(cls, 0) + 1
    for e, name in enumerate(g.edge_names):
        print(f"edge\t{name}\t{report.edge_classes[e]}\t"
              f"{_fmt(report.edge_values[e])}")
    for face, i, j, value, cls in report.diagonal_checks:
        print(f"diagonal\tf{face}\t{i}-{j}\t{cls}\t{_fmt(value)}")
    print(f"weighted_delaunay\t{str(report.is_weighted_delaunay).lower()}")
    if not report.is_weighted_delaunay:
        raise GeometryError(f"graph is not weighted Delaunay ({counts})")
    return 0


def cmd_oracle(args) -> int:
    with open(args.sites, "r", encoding="utf-8") as handle:
        sites = document.parse_sites(handle.read())
    g = coherence.oracle_weighted_delaunay(sites.shape, sites.points,
                                           sites.weights, names=sites.names,
                                           tol=args.tolerance)
    _write(document.serialize(g, weights=sites.weights), args.output)
    return 0


def cmd_render(args) -> int:
    doc = _load(args.file)
    g = doc.graph
    dual = None
    if args.dual:
        w = _resolve_stress(doc, args.stress)
        dual = reciprocal.build_reciprocal(g, w).dual
    weights = doc.weights if args.weights else None
    text = svg.render_svg(g, dual=dual, weights=weights,
                          patch=_parse_patch(args.patch), scale=args.scale)
    _write(text, args.output)
    return 0


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="torusgeom",
        description="Geodesic torus graphs: spring embeddings, stress "
                    "analysis, reciprocal duals, weighted Delaunay weights.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "validate a graph document")
    p.add_argument("file")
    p.add_argument("--tolerance", type=float, default=1e-9)

    p = add("embed", cmd_embed, "compute the spring (equilibrium) embedding")
    p.add_argument("file")
    p.add_argument("--stress", help="uniform:VALUE or a stress-lines file")
    p.add_argument("--pin", help="vertex kept at its input coordinate")
    p.add_argument("--output", "-o")

    p = add("analyze", cmd_analyze, "stress covariance, force and reciprocal tori")
    p.add_argument("file")
    p.add_argument("--stress")
    p.add_argument("--figure", help="write a matplotlib figure to this file")

    p = add("reciprocal", cmd_reciprocal, "build the orthogonal dual embedding")
    p.add_argument("file")
    p.add_argument("--stress")
    p.add_argument("--normalize", action="store_true",
                   help="rescale the stress and move to its canonical torus first")
    p.add_argument("--output", "-o")

    p = add("weights", cmd_weights, "recover Delaunay vertex weights")
    p.add_argument("file")
    p.add_argument("--stress")
    p.add_argument("--output", "-o")

    p = add("check-delaunay", cmd_check_delaunay,
            "weighted Delaunay determinant tests")
    p.add_argument("file")
    p.add_argument("--tolerance", type=float, default=1e-9)

    p = add("oracle", cmd_oracle, "brute-force weighted Delaunay graph of sites")
    p.add_argument("sites")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--output", "-o")

    p = add("render", cmd_render, "render a document to SVG")
    p.add_argument("file")
    p.add_argument("--patch", default="1x1", help="KxK universal-cover panes")
    p.add_argument("--dual", action="store_true",
                   help="overlay the reciprocal dual (needs a stress)")
    p.add_argument("--weights", action="store_true", help="label vertex weights")
    p.add_argument("--stress")
    p.add_argument("--scale", type=float, default=240.0)
    p.add_argument("--output", "-o")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GeometryError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
