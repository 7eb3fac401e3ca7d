import numpy as np
import pytest
from hypothesis import given, strategies as st

from torusgeom.errors import SingularSystem
from torusgeom.linalg import (LinearSystem, TorusShape, mat_perp, perp,
                              reduce_to_fundamental, solve_dense)

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def test_perp_axes():
    assert np.allclose(perp([1, 0]), [0, 1])
    assert np.allclose(perp([0, 1]), [-1, 0])


def test_perp_involution_negates():
    v = np.array([3.0, -2.0])
    assert np.allclose(perp(perp(v)), [-3.0, 2.0])


@given(finite, finite)
def test_perp_perp_is_negation(x, y):
    v = np.array([x, y])
    assert np.allclose(perp(perp(v)), -v, rtol=1e-15, atol=0)


def test_mat_perp_identity():
    assert np.allclose(mat_perp(np.eye(2)), [[0, 1], [-1, 0]])


def test_mat_perp_single_column():
    assert np.allclose(mat_perp(np.array([[1.0], [0.0]])), [[0.0, 1.0]])


def test_mat_perp_matches_transpose_identity():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    j = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert np.allclose(mat_perp(a), -a.T @ j)


def test_mat_perp_rows_are_perped_columns():
    a = np.array([[1.0, -2.0, 0.5], [4.0, 0.0, -1.0]])
    result = mat_perp(a)
    for i in range(3):
        assert np.allclose(result[i], perp(a[:, i]))


class TestTorusShape:
    def test_rejects_nonpositive_determinant(self):
        with pytest.raises(ValueError):
            TorusShape([[1, 0], [0, -1]])
        with pytest.raises(ValueError):
            TorusShape([[1, 2], [2, 4]])

    def test_columns(self):
        shape = TorusShape([[2, -1], [0, 1]])
        assert np.allclose(shape.u, [2, 0])
        assert np.allclose(shape.v, [-1, 1])
        assert shape.det == pytest.approx(2.0)

    def test_inverse_exact(self):
        shape = TorusShape([[2, -1], [-1, 2]])
        assert np.allclose(shape.matrix @ shape.inverse, np.eye(2), atol=1e-15)


class TestReduce:
    def test_square_example(self):
        q, k = reduce_to_fundamental([1.25, -0.5], TorusShape.square())
        assert np.allclose(q, [0.25, 0.5])
        assert k.tolist() == [1, -1]

    def test_origin_fixed(self):
        shape = TorusShape([[1.3, 0.4], [-0.2, 0.9]])
        q, k = reduce_to_fundamental([0.0, 0.0], shape)
        assert np.allclose(q, 0)
        assert k.tolist() == [0, 0]

    def test_lattice_translation(self):
        p = np.array([3 / 7, 2 / 7]) + np.array([2.0, -1.0])
        q, k = reduce_to_fundamental(p, TorusShape.square())
        assert np.allclose(q, [3 / 7, 2 / 7])
        assert k.tolist() == [2, -1]

    def test_random_invariants(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            m = rng.uniform(-2, 2, (2, 2))
            if np.linalg.det(m) < 0.1:
                continue
            shape = TorusShape(m)
            p = rng.uniform(-20, 20, 2)
            q, k = reduce_to_fundamental(p, shape)
            lat = shape.inverse @ q
            assert lat.min() >= -1e-9 and lat.max() < 1 + 1e-9
            assert np.allclose(p - q, m @ k, atol=1e-9)


class TestSolveDense:
    def test_identity(self):
        b = np.array([3.0, -1.0, 2.0])
        assert np.allclose(solve_dense(LinearSystem(np.eye(3), b)), b)

    def test_diagonal(self):
        x = solve_dense(LinearSystem([[2.0, 0.0], [0.0, 4.0]], [2.0, 8.0]))
        assert np.allclose(x, [1.0, 2.0])

    def test_residual_bound_random(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            a = rng.normal(size=(20, 20)) + 20 * np.eye(20)
            b = rng.normal(size=(20, 3))
            x = solve_dense(LinearSystem(a, b))
            assert np.max(np.abs(a @ x - b)) <= 1e-9 * (1 + np.max(np.abs(b)))
            assert np.allclose(x, np.linalg.solve(a, b), atol=1e-9)

    def test_singular_raises(self):
        a = np.array([[1.0, 2.0], [2.0, 4.0]])
        with pytest.raises(SingularSystem):
            solve_dense(LinearSystem(a, [1.0, 1.0]))

    def test_empty_system(self):
        x = solve_dense(LinearSystem(np.zeros((0, 0)), np.zeros((0, 2))))
        assert x.shape == (0, 2)

    def test_needs_pivoting(self):
        a = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert np.allclose(solve_dense(LinearSystem(a, [2.0, 5.0])), [5.0, 2.0])
