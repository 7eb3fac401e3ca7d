"""Line-oriented text documents for torus graphs, stresses and weights.

Grammar (one record per line, whitespace separated, ``#`` starts a comment):

    torusgraph 1
    torus A B C D              # shape matrix rows: (A, B) and (C, D)
    vertex NAME X Y
    edge NAME TAIL HEAD HX HY
    rotation VERTEX DART...    # darts counterclockwise, written EDGE+ / EDGE-
    stress EDGE VALUE          # optional
    weight VERTEX VALUE        # optional

Serialization is canonical: records in index order, numbers with 17
significant digits, so parse and serialize are mutually inverse.

Sites files for the Delaunay oracle use:

    torus A B C D
    site NAME X Y WEIGHT
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParseError
from .graph import TorusGraph, dart_token, edge_of
from .linalg import TorusShape

FORMAT_NAME = "torusgraph"
FORMAT_VERSION = 1


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


@dataclass
class GraphDocument:
    graph: TorusGraph
    stress: np.ndarray | None = None
    weights: np.ndarray | None = None


def serialize(g: TorusGraph, stress=None, weights=None) -> str:
    lines = [f"{FORMAT_NAME} {FORMAT_VERSION}"]
    a, b, c, d = g.shape.matrix.ravel()
    lines.append(f"torus {_fmt(a)} {_fmt(b)} {_fmt(c)} {_fmt(d)}")
    for name, (x, y) in zip(g.vertex_names, g.coords):
        lines.append(f"vertex {name} {_fmt(x)} {_fmt(y)}")
    for e, name in enumerate(g.edge_names):
        tail = g.vertex_names[g.tails[2 * e]]
        head = g.vertex_names[g.tails[2 * e + 1]]
        hx, hy = g.homology[e]
        lines.append(f"edge {name} {tail} {head} {hx} {hy}")
    for v, name in enumerate(g.vertex_names):
        tokens = [dart_token(g.edge_names[edge_of(d)], d) for d in g.darts_at(v)]
        lines.append(f"rotation {name} " + " ".join(tokens))
    if stress is not None:
        values = np.asarray(stress, dtype=float)
        for e, name in enumerate(g.edge_names):
            lines.append(f"stress {name} {_fmt(values[e])}")
    if weights is not None:
        values = np.asarray(getattr(weights, "values", weights), dtype=float)
        for v, name in enumerate(g.vertex_names):
            lines.append(f"weight {name} {_fmt(values[v])}")
    return "\n".join(lines) + "\n"


def _records(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def _float(token: str, lineno: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"expected a number, got {token!r}", lineno) from None


def _int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", lineno) from None


def parse(text: str) -> GraphDocument:
    """Parse a graph document; validation errors from graph construction
    propagate unchanged."""
    shape = None
    vertices = []
    edges = []
    rotations = {}
    stress = {}
    weights = {}
    vertex_seen = set()
    edge_seen = set()
    header_seen = False

    for lineno, fields in _records(text):
        keyword, args = fields[0], fields[1:]
        if keyword == FORMAT_NAME:
            if len(args) != 1 or _int(args[0], lineno) != FORMAT_VERSION:
                raise ParseError(f"unsupported format version {args!r}", lineno)
            header_seen = True
        elif keyword == "torus":
            if len(args) != 4:
                raise ParseError("torus record needs 4 numbers", lineno)
            if shape is not None:
                raise ParseError("duplicate torus record", lineno)
            a, b, c, d = (_float(t, lineno) for t in args)
            try:
                shape = TorusShape([[a, b], [c, d]])
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
        elif keyword == "vertex":
            if len(args) != 3:
                raise ParseError("vertex record needs NAME X Y", lineno)
            if args[0] in vertex_seen:
                raise ParseError(f"duplicate vertex {args[0]!r}", lineno)
            vertex_seen.add(args[0])
            vertices.append((args[0], (_float(args[1], lineno),
                                       _float(args[2], lineno))))
        elif keyword == "edge":
            if len(args) != 5:
                raise ParseError("edge record needs NAME TAIL HEAD HX HY", lineno)
            if args[0] in edge_seen:
                raise ParseError(f"duplicate edge {args[0]!r}", lineno)
            edge_seen.add(args[0])
            edges.append((args[0], args[1], args[2],
                          (_int(args[3], lineno), _int(args[4], lineno))))
        elif keyword == "rotation":
            if len(args) < 2:
                raise ParseError("rotation record needs VERTEX DART...", lineno)
            if args[0] in rotations:
                raise ParseError(f"duplicate rotation for {args[0]!r}", lineno)
            rotations[args[0]] = args[1:]
        elif keyword == "stress":
            if len(args) != 2:
                raise ParseError("stress record needs EDGE VALUE", lineno)
            if args[0] in stress:
                raise ParseError(f"duplicate stress for {args[0]!r}", lineno)
            stress[args[0]] = _float(args[1], lineno)
        elif keyword == "weight":
            if len(args) != 2:
                raise ParseError("weight record needs VERTEX VALUE", lineno)
            if args[0] in weights:
                raise ParseError(f"duplicate weight for {args[0]!r}", lineno)
            weights[args[0]] = _float(args[1], lineno)
        else:
            raise ParseError(f"unknown record {keyword!r}", lineno)

    if not header_seen:
        raise ParseError(f"missing {FORMAT_NAME} header line")
    if shape is None:
        raise ParseError("missing torus record")
    if not vertices:
        raise ParseError("no vertex records")
    endpoint_names = {t for _, t, _, _ in edges} | {h for _, _, h, _ in edges}
    for name in (n for n, _ in vertices):
        if name in endpoint_names and name not in rotations:
            raise ParseError(f"missing rotation record for vertex {name!r}")

    graph = TorusGraph.build(shape, vertices, edges, rotations)
    stress_arr = None
    if stress:
        missing = [n for n in graph.edge_names if n not in stress]
        if missing:
            raise ParseError(f"stress section misses edges {missing}")
        unknown = [n for n in stress if n not in graph._edge_index]
        if unknown:
            raise ParseError(f"stress for unknown edges {unknown}")
        stress_arr = np.array([stress[n] for n in graph.edge_names])
    weights_arr = None
    if weights:
        missing = [n for n in graph.vertex_names if n not in weights]
        if missing:
            raise ParseError(f"weight section misses vertices {missing}")
        unknown = [n for n in weights if n not in graph._vertex_index]
        if unknown:
            raise ParseError(f"weight for unknown vertices {unknown}")
        weights_arr = np.array([weights[n] for n in graph.vertex_names])
    return GraphDocument(graph, stress_arr, weights_arr)


# ----------------------------------------------------------------------
# sites files


@dataclass
class SitesDocument:
    shape: TorusShape
    names: list
    points: np.ndarray
    weights: np.ndarray


def serialize_sites(shape: TorusShape, names, points, weights) -> str:
    a, b, c, d = shape.matrix.ravel()
    lines = [f"torus {_fmt(a)} {_fmt(b)} {_fmt(c)} {_fmt(d)}"]
    for name, (x, y), w in zip(names, np.asarray(points, float),
                               np.asarray(weights, float)):
        lines.append(f"site {name} {_fmt(x)} {_fmt(y)} {_fmt(w)}")
    return "\n".join(lines) + "\n"


def parse_sites(text: str) -> SitesDocument:
    shape = None
    names, points, weights = [], [], []
    for lineno, fields in _records(text):
        keyword, args = fields[0], fields[1:]
        if keyword == "torus":
            if len(args) != 4:
                raise ParseError("torus record needs 4 numbers", lineno)
            a, b, c, d = (_float(t, lineno) for t in args)
            try:
                shape = TorusShape([[a, b], [c, d]])
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
        elif keyword == "site":
            if len(args) != 4:
                raise ParseError("site record needs NAME X Y WEIGHT", lineno)
            if args[0] in names:
                raise ParseError(f"duplicate site {args[0]!r}", lineno)
            names.append(args[0])
            points.append((_float(args[1], lineno), _float(args[2], lineno)))
            weights.append(_float(args[3], lineno))
        else:
            raise ParseError(f"unknown record {keyword!r}", lineno)
    if shape is None:
        raise ParseError("missing torus record")
    if not names:
        raise ParseError("no site records")
    return SitesDocument(shape, names, np.asarray(points), np.asarray(weights))


def same_graph(a: TorusGraph, b: TorusGraph) -> bool:
    """Exact structural and geometric equality (used for round-trip checks)."""
    return (a.vertex_names == b.vertex_names
            and a.edge_names == b.edge_names
            and np.array_equal(a.shape.matrix, b.shape.matrix)
            and np.array_equal(a.coords, b.coords)
            and np.array_equal(a.tails, b.tails)
            and np.array_equal(a.rotation_next, b.rotation_next)
            and np.array_equal(a.homology, b.homology))
