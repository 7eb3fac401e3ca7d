"""2D vector and matrix primitives, fundamental-domain reduction, dense solver.

Column vectors carry primal quantities (coordinates, displacements); row
vectors carry dual quantities.  The distinction is positional: a 1-D numpy
array is read as a column or a row depending on which side of a product it
appears on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularSystem

Vec2 = np.ndarray   # shape (2,)
Mat2 = np.ndarray   # shape (2, 2)

#: 90 degree counterclockwise rotation.
J = np.array([[0.0, -1.0], [1.0, 0.0]])
J.setflags(write=False)

PIVOT_RTOL = 1e-12
RESIDUAL_RTOL = 1e-9


def vec2(x, y) -> Vec2:
    return np.array([float(x), float(y)])


def perp(v) -> Vec2:
    """Rotate ``v`` by 90 degrees counterclockwise, i.e. (J v) read as a row.

    (x, y) maps to (-y, x); applying perp twice negates the vector.
    """
    v = np.asarray(v, dtype=float)
    return np.array([-v[1], v[0]])


def mat_perp(a) -> np.ndarray:
    """Return (J a)^T for a 2 x n matrix: row i is perp of column i of ``a``."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != 2:
        raise ValueError("expected a 2 x n matrix")
    return (J @ a).T


class TorusShape:
    """Flat torus defined by a nonsingular 2x2 matrix with positive determinant.

    The columns of the matrix span the fundamental parallelogram; opposite
    sides are identified.  Canonical point representatives have lattice
    coordinates (matrix^-1 applied to the point) in [0, 1)^2.
    """

    __slots__ = ("matrix", "inverse", "det")

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float).reshape(2, 2)
        if not np.all(np.isfinite(m)):
            raise ValueError("torus matrix must be finite")
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if det <= 0.0:
            raise ValueError(f"torus matrix must have positive determinant, got {det!r}")
        self.matrix = m
        self.det = det
        self.inverse = np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]]) / det
        self.matrix.setflags(write=False)
        self.inverse.setflags(write=False)

    @classmethod
    def square(cls) -> "TorusShape":
        return cls(np.eye(2))

    @property
    def u(self) -> Vec2:
        """First lattice generator (first column)."""
        return self.matrix[:, 0]

    @property
    def v(self) -> Vec2:
        """Second lattice generator (second column)."""
        return self.matrix[:, 1]

    def lattice_coords(self, p) -> Vec2:
        return self.inverse @ np.asarray(p, dtype=float)

    def close_to(self, other: "TorusShape", tol: float = 1e-9) -> bool:
        return bool(np.max(np.abs(self.matrix - other.matrix)) <= tol)

    def __repr__(self):
        a, b, c, d = self.matrix.ravel()
        return f"TorusShape(({a:.6g}, {b:.6g}), ({c:.6g}, {d:.6g}))"


def reduce_to_fundamental(p, shape: TorusShape):
    """Reduce ``p`` into the fundamental parallelogram of ``shape``.

    Returns (q, k) with q = p - M k, k integer, and the lattice coordinates of
    q in [0, 1)^2 (up to floating rounding at cell boundaries).
    """
    p = np.asarray(p, dtype=float)
    lat = shape.inverse @ p
    k = np.floor(lat)
    # floor can leave a fractional part that rounds up to exactly 1.0
    bump = (lat - k) >= 1.0
    k[bump] += 1.0
    q = p - shape.matrix @ k
    return q, k.astype(int)


@dataclass
class LinearSystem:
    """A dense square system ``matrix @ x = rhs`` (rhs may have several columns)."""

    matrix: np.ndarray
    rhs: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        self.rhs = np.asarray(self.rhs, dtype=float)
        n = self.matrix.shape[0]
        if self.matrix.shape != (n, n):
            raise ValueError("matrix must be square")
        if self.rhs.shape[0] != n:
            raise ValueError("rhs rows must match matrix size")


def _lu_factor(a: np.ndarray):
    """In-place LU with partial pivoting; returns (lu, perm)."""
    n = a.shape[0]
    perm = np.arange(n)
    scale = np.max(np.abs(a)) if n else 0.0
    if n and scale == 0.0:
        raise SingularSystem("matrix is identically zero")
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(a[col:, col])))
        if np.abs(a[pivot_row, col]) <= PIVOT_RTOL * scale:
            raise SingularSystem(f"no usable pivot in column {col}")
        if pivot_row != col:
            a[[col, pivot_row]] = a[[pivot_row, col]]
            perm[[col, pivot_row]] = perm[[pivot_row, col]]
        factors = a[col + 1:, col] / a[col, col]
        a[col + 1:, col] = factors
        a[col + 1:, col + 1:] -= np.outer(factors, a[col, col + 1:])
    return a, perm


def _lu_solve(lu: np.ndarray, perm: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = lu.shape[0]
    x = b[perm].astype(float, copy=True)
    for col in range(n):                       # forward substitution (unit lower)
        x[col + 1:] -= np.outer(lu[col + 1:, col], x[col])
    for col in range(n - 1, -1, -1):           # back substitution
        x[col] /= lu[col, col]
        if col:
            x[:col] -= np.outer(lu[:col, col], x[col])
    return x


def solve_dense(system: LinearSystem) -> np.ndarray:
    """Gaussian elimination with partial pivoting plus one refinement step.

    Raises SingularSystem when no pivot exceeds PIVOT_RTOL relative to the
    largest matrix entry.  The returned solution satisfies
    ``max|A x - b| <= 1e-9 * (1 + max|b|)`` for the well-conditioned systems
    this package produces.
    """
    a0 = system.matrix
    b = system.rhs
    flat = b.ndim == 1
    if flat:
        b = b[:, None]
    n = a0.shape[0]
    if n == 0:
        x = np.zeros_like(b, dtype=float)
        return x[:, 0] if flat else x
    lu, perm = _lu_factor(a0.copy())
    x = _lu_solve(lu, perm, b)
    x += _lu_solve(lu, perm, b - a0 @ x)
    return x[:, 0] if flat else x
