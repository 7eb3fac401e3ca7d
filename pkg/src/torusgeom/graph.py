"""Combinatorial maps on flat tori: darts, rotation systems, faces, homology.

Each edge ``e`` owns two darts packed as integers: the reference dart ``2e``
and its reversal ``2e + 1`` (so reversal is ``d ^ 1`` and is an involution
without fixed points by construction).  The rotation system stores, for each
dart, the next dart counterclockwise around its tail.  Faces are traversed
with the face to the LEFT of every boundary dart: the successor of ``d``
along its left face is the rotation-predecessor of the reversal of ``d``,
which walks every face counterclockwise.

Geometry lives in per-vertex coordinates inside the fundamental parallelogram
plus one integer homology vector per reference dart; the displacement of a
dart is head minus tail plus the shape matrix applied to its homology vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .errors import BadFaceHomology, MalformedMap, NotCellular, ValidationError
from .linalg import TorusShape, Vec2

COORD_TOL = 1e-9


def reverse(d: int) -> int:
    return d ^ 1


def edge_of(d: int) -> int:
    return d >> 1


def is_reference(d: int) -> bool:
    return (d & 1) == 0


def dart_token(edge_name: str, d: int) -> str:
    return edge_name + ("+" if is_reference(d) else "-")


def _orbits(successor: np.ndarray):
    """Partition dart ids into orbits of a permutation.

    Returns (orbit_of, orbits) where each orbit lists darts in successor
    order starting from its smallest member.
    """
    n = len(successor)
    orbit_of = np.full(n, -1, dtype=int)
    orbits = []
    for start in range(n):
        if orbit_of[start] >= 0:
            continue
        idx = len(orbits)
        cycle = []
        d = start
        while orbit_of[d] < 0:
            orbit_of[d] = idx
            cycle.append(d)
            d = successor[d]
        if d != start:
            raise MalformedMap("successor array is not a permutation")
        orbits.append(cycle)
    return orbit_of, orbits


@dataclass(frozen=True)
class Dart:
    """A directed half-edge, identified by its packed integer id."""

    id: int

    @property
    def edge(self) -> int:
        return self.id >> 1

    @property
    def is_reference(self) -> bool:
        return (self.id & 1) == 0

    @property
    def reversal(self) -> "Dart":
        return Dart(self.id ^ 1)


@dataclass(frozen=True)
class Face:
    """A face of the embedding with its counterclockwise boundary darts."""

    id: int
    boundary: tuple


@dataclass
class PlanePatch:
    """A finite piece of the universal cover.

    ``vertices`` holds (vertex index, translation, position) triples with
    position = coordinate + M @ translation.  ``segments`` lists edge copies
    whose endpoint copies both lie in the requested range; ``outgoing`` lists
    copies whose head copy falls outside it.
    """

    vertices: list
    segments: list
    outgoing: list


@dataclass
class EssentialReport:
    essentially_simple: bool
    essentially_3_connected: bool
    #: True when some homology entry exceeds 1 in magnitude, in which case the
    #: 3x3 wraparound certificate for 3-connectivity is heuristic.
    patch_limited: bool


class TorusGraph:
    """An immutable geodesic graph on a flat torus.

    Build instances with :meth:`build` (record-level input, as used by the
    document parser) or the array constructor.  Construction validates the
    rotation system, cellularity (Euler count), face homology sums and
    coordinate placement; instances should be treated as read-only.
    """

    def __init__(self, shape: TorusShape, vertex_names, coords, edge_names,
                 tails, rotation_next, homology):
        self.shape = shape
        self.vertex_names = tuple(str(n) for n in vertex_names)
        self.coords = np.array(coords, dtype=float).reshape(len(self.vertex_names), 2)
        self.edge_names = tuple(str(n) for n in edge_names)
        self.tails = np.array(tails, dtype=int).reshape(2 * len(self.edge_names))
        self.rotation_next = np.array(rotation_next, dtype=int).reshape(self.tails.shape)
        self.homology = np.array(homology, dtype=int).reshape(len(self.edge_names), 2)
        self._vertex_index = {n: i for i, n in enumerate(self.vertex_names)}
        self._edge_index = {n: i for i, n in enumerate(self.edge_names)}
        if len(self._vertex_index) != len(self.vertex_names):
            raise MalformedMap("duplicate vertex name")
        if len(self._edge_index) != len(self.edge_names):
            raise MalformedMap("duplicate edge name")
        self._validate_permutations()
        self._compute_faces()
        self._validate()
        for arr in (self.coords, self.tails, self.rotation_next, self.homology,
                    self.face_of):
            arr.setflags(write=False)

    # ------------------------------------------------------------------
    # construction helpers

    @classmethod
    def build(cls, shape: TorusShape, vertices, edges, rotations) -> "TorusGraph":
        """Build and validate a graph from record-level input.

        vertices: iterable of (name, (x, y)) with coordinates inside the
            fundamental parallelogram of ``shape``.
        edges: iterable of (name, tail name, head name, (hx, hy)).
        rotations: mapping vertex name -> counterclockwise dart list; darts
            are written ``edge+`` (reference) or ``edge-`` (reversal).
        """
        vertices = list(vertices)
        edges = list(edges)
        vertex_names = [name for name, _ in vertices]
        coords = [xy for _, xy in vertices]
        vindex = {n: i for i, n in enumerate(vertex_names)}
        if len(vindex) != len(vertex_names):
            raise MalformedMap("duplicate vertex name")
        edge_names = []
        tails = np.zeros(2 * len(edges), dtype=int)
        homology = np.zeros((len(edges), 2), dtype=int)
        eindex = {}
        for e, (name, tail, head, h) in enumerate(edges):
            if name in eindex:
                raise MalformedMap(f"duplicate edge name {name!r}")
            eindex[name] = e
            edge_names.append(name)
            if tail not in vindex:
                raise MalformedMap(f"edge {name!r}: unknown tail vertex {tail!r}")
            if head not in vindex:
                raise MalformedMap(f"edge {name!r}: unknown head vertex {head!r}")
            tails[2 * e] = vindex[tail]
            tails[2 * e + 1] = vindex[head]
            homology[e] = h

        rotation_next = np.full(2 * len(edges), -1, dtype=int)
        seen = np.zeros(2 * len(edges), dtype=bool)
        for vname, dart_list in rotations.items():
            if vname not in vindex:
                raise MalformedMap(f"rotation record for unknown vertex {vname!r}")
            v = vindex[vname]
            ids = []
            for token in dart_list:
                if isinstance(token, tuple):
                    ename, sign = token
                else:
                    ename, sign = token[:-1], token[-1]
                if sign not in "+-" or ename not in eindex:
                    raise MalformedMap(f"unknown dart {token!r} at vertex {vname!r}")
                d = 2 * eindex[ename] + (0 if sign == "+" else 1)
                if seen[d]:
                    raise MalformedMap(f"dart {token!r} listed twice")
                if tails[d] != v:
                    raise MalformedMap(
                        f"dart {token!r} does not leave vertex {vname!r}")
                seen[d] = True
                ids.append(d)
            if not ids:
                raise MalformedMap(f"empty rotation for vertex {vname!r}")
            for i, d in enumerate(ids):
                rotation_next[d] = ids[(i + 1) % len(ids)]
        if not seen.all():
            missing = int(np.flatnonzero(~seen)[0])
            vname = vertex_names[tails[missing]]
            raise MalformedMap(
                f"no rotation record covers dart "
                f"{dart_token(edge_names[edge_of(missing)], missing)} "
                f"at vertex {vname!r}")
        return cls(shape, vertex_names, coords, edge_names, tails,
                   rotation_next, homology)

    @classmethod
    def from_embedding(cls, shape: TorusShape, coords, edges,
                       vertex_names=None, edge_names=None) -> "TorusGraph":
        """Build a graph from geometry alone, deriving the rotation system.

        ``edges`` is an iterable of (tail index, head index, (hx, hy)).  Darts
        around each vertex are ordered counterclockwise by the angle of their
        displacement, which is the rotation system of any valid geodesic
        embedding with these coordinates.
        """
        coords = np.asarray(coords, dtype=float).reshape(-1, 2)
        edges = [(int(t), int(h), np.asarray(k, dtype=int)) for t, h, k in edges]
        if vertex_names is None:
            vertex_names = [f"v{i}" for i in range(len(coords))]
        if edge_names is None:
            edge_names = [f"e{i}" for i in range(len(edges))]
        m = shape.matrix
        by_vertex = {}
        for e, (t, h, k) in enumerate(edges):
            delta = coords[h] - coords[t] + m @ k
            by_vertex.setdefault(t, []).append((2 * e, delta))
            by_vertex.setdefault(h, []).append((2 * e + 1, -delta))
        rotations = {}
        for v, darts in by_vertex.items():
            darts.sort(key=lambda item: np.arctan2(item[1][1], item[1][0]))
            rotations[vertex_names[v]] = [
                dart_token(edge_names[edge_of(d)], d) for d, _ in darts]
        records = [(edge_names[e], vertex_names[t], vertex_names[h], tuple(k))
                   for e, (t, h, k) in enumerate(edges)]
        vertices = list(zip(vertex_names, coords))
        return cls.build(shape, vertices, records, rotations)

    def _validate_permutations(self):
        n = self.dart_count
        if n == 0:
            self.rotation_prev = np.zeros(0, dtype=int)
            return
        if self.tails.min() < 0 or self.tails.max() >= self.vertex_count:
            raise MalformedMap("dart tail out of range")
        counts = np.bincount(self.rotation_next, minlength=n)
        if self.rotation_next.min() < 0 or self.rotation_next.max() >= n \
                or counts.max() > 1:
            raise MalformedMap("rotation is not a permutation of the darts")
        if np.any(self.tails[self.rotation_next] != self.tails):
            raise MalformedMap("rotation mixes darts of different vertices")
        self.rotation_prev = np.empty(n, dtype=int)
        self.rotation_prev[self.rotation_next] = np.arange(n)
        # rotation orbits must exhaust each vertex star
        orbit_of, orbits = _orbits(self.rotation_next)
        stars = len(set(self.tails[[orb[0] for orb in orbits]]))
        if len(orbits) != stars or stars != len(set(self.tails.tolist())):
            raise MalformedMap("rotation splits a vertex star into several orbits")

    def _compute_faces(self):
        if self.dart_count == 0:
            self.face_of = np.zeros(0, dtype=int)
            self.faces = []
            return
        successor = self.rotation_prev[np.arange(self.dart_count) ^ 1]
        self._face_next = successor
        self.face_of, cycles = _orbits(successor)
        self.faces = [Face(i, tuple(c)) for i, c in enumerate(cycles)]

    def _validate(self):
        if not np.all(np.isfinite(self.coords)):
            raise ValidationError("vertex coordinates must be finite")
        if self.vertex_count == 0:
            return
        lat = self.coords @ self.shape.inverse.T
        if lat.size and (lat.min() < -COORD_TOL or lat.max() >= 1.0 + COORD_TOL):
            raise ValidationError(
                "vertex coordinate outside the fundamental parallelogram")
        if np.any(np.bincount(self.tails, minlength=self.vertex_count) == 0):
            raise NotCellular("isolated vertex")
        # connectivity over edges
        adjacency = [[] for _ in range(self.vertex_count)]
        for d in range(self.dart_count):
            adjacency[self.tails[d]].append(self.tails[d ^ 1])
        seen = np.zeros(self.vertex_count, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            for w in adjacency[stack.pop()]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        if not seen.all():
            raise NotCellular("graph is disconnected")
        euler = self.vertex_count - self.edge_count + len(self.faces)
        if euler != 0:
            raise NotCellular(
                f"V - E + F = {euler}, not 0: not a cellular torus embedding")
        for face in self.faces:
            total = np.zeros(2, dtype=int)
            for d in face.boundary:
                total += self.dart_homology(d)
            if total[0] or total[1]:
                raise BadFaceHomology(
                    f"face {face.id} boundary has homology {tuple(total)}")

    # ------------------------------------------------------------------
    # basic accessors

    @property
    def vertex_count(self) -> int:
        return len(self.vertex_names)

    @property
    def edge_count(self) -> int:
        return len(self.edge_names)

    @property
    def dart_count(self) -> int:
        return 2 * len(self.edge_names)

    @property
    def face_count(self) -> int:
        return len(self.faces)

    def vertex_index(self, name) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self._vertex_index[name]
        except KeyError:
            raise KeyError(f"unknown vertex {name!r}") from None

    def edge_index(self, name) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self._edge_index[name]
        except KeyError:
            raise KeyError(f"unknown edge {name!r}") from None

    def tail(self, d: int) -> int:
        return int(self.tails[d])

    def head(self, d: int) -> int:
        return int(self.tails[d ^ 1])

    def dart_homology(self, d: int) -> np.ndarray:
        h = self.homology[d >> 1]
        return h if (d & 1) == 0 else -h

    def darts_at(self, v: int):
        """Darts with tail ``v`` in counterclockwise rotation order."""
        start = -1
        for d in range(self.dart_count):
            if self.tails[d] == v:
                start = d
                break
        if start < 0:
            return []
        out = [start]
        d = self.rotation_next[start]
        while d != start:
            out.append(int(d))
            d = self.rotation_next[d]
        return out

    def degree(self, v: int) -> int:
        return int(np.count_nonzero(self.tails == v))

    # ------------------------------------------------------------------
    # geometry

    def displacement(self, d: int) -> Vec2:
        """Head minus tail of any lift of dart ``d`` (native coordinates)."""
        delta = self.coords[self.head(d)] - self.coords[self.tail(d)]
        return delta + self.shape.matrix @ self.dart_homology(d)

    def displacement_matrix(self) -> np.ndarray:
        """2 x E matrix whose column e is the displacement of reference dart 2e."""
        if self.edge_count == 0:
            return np.zeros((2, 0))
        ref = np.arange(0, self.dart_count, 2)
        delta = (self.coords[self.tails[ref ^ 1]] - self.coords[self.tails[ref]]).T
        return delta + self.shape.matrix @ self.homology.T.astype(float)

    def reference_displacements(self) -> np.ndarray:
        """Displacement matrix of the graph's pullback to the square torus."""
        return self.shape.inverse @ self.displacement_matrix()

    def face_polygon(self, f: int, anchor_dart: int | None = None,
                     anchor_pos=None):
        """Lifted boundary polygon of face ``f``.

        Returns (vertices, positions): the corner vertex indices and their
        lifted positions, walking the counterclockwise boundary.  The walk
        starts at ``anchor_dart`` (default: the face's first boundary dart)
        with its tail placed at ``anchor_pos`` (default: the tail's canonical
        coordinate).
        """
        boundary = list(self.faces[f].boundary)
        if anchor_dart is not None:
            i = boundary.index(anchor_dart)
            boundary = boundary[i:] + boundary[:i]
        pos = (self.coords[self.tails[boundary[0]]].astype(float)
               if anchor_pos is None else np.array(anchor_pos, dtype=float))
        vertices, positions = [], []
        for d in boundary:
            vertices.append(int(self.tails[d]))
            positions.append(pos.copy())
            pos = pos + self.displacement(d)
        return vertices, np.asarray(positions)

    def face_anchor_offsets(self) -> np.ndarray:
        """Per dart, the homology sum from its face's first boundary dart.

        The lift of face f anchored at translation k places the tail of
        boundary dart d at translation k + offset[d].
        """
        offsets = np.zeros((self.dart_count, 2), dtype=int)
        for face in self.faces:
            acc = np.zeros(2, dtype=int)
            for d in face.boundary:
                offsets[d] = acc
                acc = acc + self.dart_homology(d)
        return offsets

    def with_geometry(self, *, shape=None, coords=None, homology=None) -> "TorusGraph":
        """Copy of this graph with replaced geometry, re-validated."""
        return TorusGraph(
            shape if shape is not None else self.shape,
            self.vertex_names,
            coords if coords is not None else self.coords,
            self.edge_names,
            self.tails,
            self.rotation_next,
            homology if homology is not None else self.homology,
        )

    # ------------------------------------------------------------------
    # derived structures

    def dual(self) -> "DualMap":
        """Combinatorial dual: vertices are faces, dart d maps to dual dart d.

        The dual of dart d runs from the face right of d to the face left of
        d (the dart rotated counterclockwise); no dual coordinates are
        assigned here.
        """
        ids = np.arange(self.dart_count)
        tails = self.face_of[ids ^ 1]
        rotation_next = self.rotation_prev[ids] ^ 1
        return DualMap(self, tails, rotation_next, self.face_count)

    def universal_cover_patch(self, nx: int, ny: int) -> PlanePatch:
        """Straight-line plane patch with one vertex copy per translation in
        range(nx) x range(ny); edge copies are realized when both endpoint
        copies lie in the range."""
        if nx < 1 or ny < 1:
            raise ValueError("patch range must be nonempty")
        translations = [np.array(k) for k in product(range(nx), range(ny))]
        in_range = {tuple(k) for k in translations}
        m = self.shape.matrix
        vertices = [(v, tuple(k), self.coords[v] + m @ k)
                    for k in translations for v in range(self.vertex_count)]
        segments, outgoing = [], []
        for e in range(self.edge_count):
            delta = self.displacement(2 * e)
            for k in translations:
                p0 = self.coords[self.tails[2 * e]] + m @ k
                entry = (e, tuple(k), p0, p0 + delta)
                if tuple(k + self.homology[e]) in in_range:
                    segments.append(entry)
                else:
                    outgoing.append(entry)
        return PlanePatch(vertices, segments, outgoing)

    def check_essential(self) -> EssentialReport:
        """Certify essential simplicity and essential 3-connectivity.

        Simplicity is exact: two lifts of edges share both endpoints exactly
        when the edges connect the same vertex pair with the same homology
        vector (up to orientation).  3-connectivity is certified on the 3x3
        wraparound quotient of the universal cover, which is reliable for
        homology entries of magnitude at most 1 and heuristic beyond that
        (reported via ``patch_limited``).
        """
        simple = True
        seen = set()
        for e in range(self.edge_count):
            p, q = int(self.tails[2 * e]), int(self.tails[2 * e + 1])
            h = tuple(int(x) for x in self.homology[e])
            if p == q:
                if h == (0, 0):
                    simple = False
                    break
                if h < (0, 0) or (h[0] == 0 and h[1] < 0) or h[0] < 0:
                    h = (-h[0], -h[1])
                key = (p, q, h)
            elif p < q:
                key = (p, q, h)
            else:
                key = (q, p, (-h[0], -h[1]))
            if key in seen:
                simple = False
                break
            seen.add(key)

        connected3 = self._wraparound_three_connected()
        limited = bool(self.edge_count) and int(np.abs(self.homology).max(initial=0)) > 1
        return EssentialReport(simple, connected3, limited)

    def _wraparound_three_connected(self) -> bool:
        n = 3 * 3 * self.vertex_count
        if n < 4:
            return False
        index = lambda v, a, b: v * 9 + a * 3 + b
        neighbors = [set() for _ in range(n)]
        for e in range(self.edge_count):
            p, q = int(self.tails[2 * e]), int(self.tails[2 * e + 1])
            hx, hy = (int(x) for x in self.homology[e])
            for a, b in product(range(3), range(3)):
                i = index(p, a, b)
                j = index(q, (a + hx) % 3, (b + hy) % 3)
                if i != j:
                    neighbors[i].add(j)
                    neighbors[j].add(i)
        if min(len(s) for s in neighbors) < 3:
            return False
        adjacency = [sorted(s) for s in neighbors]
        # the graph is 3-connected iff no single deletion leaves a
        # disconnected graph or one with an articulation point
        for removed in range(n):
            if _has_cut_vertex(adjacency, removed):
                return False
        return True


def _has_cut_vertex(adjacency, removed: int) -> bool:
    """Is the graph minus one vertex disconnected or split by another vertex?

    Iterative depth-first lowpoint computation over the remaining vertices.
    """
    n = len(adjacency)
    start = 0 if removed != 0 else 1
    num = [-1] * n
    low = [0] * n
    parent = [-1] * n
    num[start] = low[start] = 0
    counter = 1
    visited = 1
    root_children = 0
    found_cut = False
    iterators = {start: iter(adjacency[start])}
    stack = [start]
    while stack:
        v = stack[-1]
        descended = False
        for w in iterators[v]:
            if w == removed:
                continue
            if num[w] < 0:
                num[w] = low[w] = counter
                counter += 1
                visited += 1
                parent[w] = v
                if v == start:
                    root_children += 1
                iterators[w] = iter(adjacency[w])
                stack.append(w)
                descended = True
                break
            if w != parent[v]:
                low[v] = min(low[v], num[w])
        if not descended:
            stack.pop()
            p = parent[v]
            if p >= 0:
                low[p] = min(low[p], low[v])
                if p != start and low[v] >= num[p]:
                    found_cut = True
    if visited != n - 1:
        return True      # removing the vertex disconnects the graph
    return found_cut or root_children > 1


class DualMap:
    """Combinatorial dual of a TorusGraph; dual dart ids equal primal ids.

    The dual of the reference dart of edge e is the reference dart of dual
    edge e; its tail is the face right of the primal dart and its head the
    face left of it.
    """

    def __init__(self, primal: TorusGraph, tails, rotation_next, vertex_count):
        self.primal = primal
        self.tails = np.asarray(tails, dtype=int)
        self.rotation_next = np.asarray(rotation_next, dtype=int)
        self.vertex_count = int(vertex_count)
        self.edge_count = primal.edge_count
        n = len(self.rotation_next)
        self.rotation_prev = np.empty(n, dtype=int)
        self.rotation_prev[self.rotation_next] = np.arange(n)
        successor = self.rotation_prev[np.arange(n) ^ 1]
        self.face_of, cycles = _orbits(successor)
        self.faces = [Face(i, tuple(c)) for i, c in enumerate(cycles)]

    @property
    def face_count(self) -> int:
        return len(self.faces)

    def head(self, d: int) -> int:
        return int(self.tails[d ^ 1])

    def counts(self):
        return self.vertex_count, self.edge_count, self.face_count

    def rotation_at(self, f: int):
        """Dual darts leaving dual vertex f in counterclockwise order."""
        start = -1
        for d in range(len(self.tails)):
            if self.tails[d] == f:
                start = d
                break
        out = [start]
        d = self.rotation_next[start]
        while d != start:
            out.append(int(d))
            d = self.rotation_next[d]
        return out
