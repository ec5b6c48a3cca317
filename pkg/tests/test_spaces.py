import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from tumordg import spaces
from tumordg.mesh import Mesh, generate_crisscross

MESH = generate_crisscross((-10.0, 10.0, -10.0, 10.0), 4, 4)


def test_quadrature_weights_sum_to_one():
    assert spaces.QUAD_WEIGHTS.sum() == pytest.approx(1.0, abs=1e-15)
    np.testing.assert_allclose(spaces.QUAD_POINTS.sum(axis=1), 1.0, atol=1e-15)


@pytest.mark.parametrize("i,j", [(a, b) for a in range(5) for b in range(5) if a + b <= 4])
def test_quadrature_exact_on_reference_triangle(i, j):
    from math import factorial
    x, y = spaces.QUAD_POINTS[:, 1], spaces.QUAD_POINTS[:, 2]
    approx = 0.5 * np.sum(spaces.QUAD_WEIGHTS * x ** i * y ** j)
    exact = factorial(i) * factorial(j) / factorial(i + j + 2)
    assert approx == pytest.approx(exact, rel=1e-14)


def test_project_p0_linear_triangle():
    m = Mesh.from_arrays([[0, 0], [1, 0], [0, 1]], [[0, 1, 2]])
    assert spaces.project_p0(np.array([0.0, 3.0, 6.0]), m)[0] == pytest.approx(3.0)


def test_project_p0_matches_quadrature(rng, unit_cell):
    g = rng.normal(size=unit_cell.n_vertices)
    # 3-point edge-midpoint rule is exact for linears
    t = unit_cell.triangles
    mid = (g[t[:, [0, 1, 2]]] + g[t[:, [1, 2, 0]]]) / 2.0
    np.testing.assert_allclose(spaces.project_p0(g, unit_cell), mid.mean(axis=1), rtol=1e-14)
    np.testing.assert_allclose(spaces.project_p0(g, unit_cell), spaces.project_p0_of_p1(g, unit_cell),
                               rtol=1e-14)


def test_constants_preserved(mesh4):
    c = 0.37
    np.testing.assert_allclose(spaces.project_p0(np.full(mesh4.n_vertices, c), mesh4), c, rtol=1e-15)
    np.testing.assert_allclose(spaces.regularize_p1(np.full(mesh4.n_triangles, c), mesh4), c, rtol=1e-15)
    np.testing.assert_allclose(
        spaces.project_p0_of_p1(spaces.regularize_p1(np.full(mesh4.n_triangles, c), mesh4), mesh4), c,
        rtol=1e-15)


def test_regularize_unit_cell_oracle(unit_cell):
    m = unit_cell
    v = np.zeros(4)
    k = 0
    v[k] = 1.0
    w = spaces.regularize_p1(v, m)
    center = int(np.flatnonzero(np.all(m.vertices == 0.5, axis=1))[0])
    assert w[center] == pytest.approx(0.25, abs=1e-15)
    corners = [i for i in m.triangles[k] if i != center]
    # each corner lies in two triangles of equal area
    np.testing.assert_allclose(w[corners], 0.5, atol=1e-15)


def test_project_p0_of_p1_mean():
    m = Mesh.from_arrays([[0, 0], [1, 0], [0, 1]], [[0, 1, 2]])
    assert spaces.project_p0_of_p1(np.array([1.0, 2.0, 3.0]), m)[0] == pytest.approx(2.0)


def test_lumped_inner_oracles(rng, mesh4, unit_cell):
    one = np.ones(mesh4.n_vertices)
    assert spaces.lumped_inner(one, one, mesh4) == pytest.approx(400.0, rel=1e-14)
    b = rng.normal(size=mesh4.n_vertices)
    assert spaces.lumped_inner(one, b, mesh4) == pytest.approx(
        np.sum(mesh4.vertex_support_area * b) / 3.0, rel=1e-13)
    center = int(np.flatnonzero(np.all(unit_cell.vertices == 0.5, axis=1))[0])
    hat = np.zeros(unit_cell.n_vertices)
    hat[center] = 1.0
    assert spaces.lumped_inner(hat, hat, unit_cell) == pytest.approx(1.0 / 3.0, rel=1e-14)


def test_integrate_p0_oracles(mesh4, unit_cell):
    assert spaces.integrate_p0(np.ones(mesh4.n_triangles), mesh4) == pytest.approx(400.0, rel=1e-14)
    v = np.zeros(4)
    v[2] = 1.0
    assert spaces.integrate_p0(v, unit_cell) == pytest.approx(0.25, rel=1e-15)


def test_integrate_p1_linear_exact(mesh_rect):
    x, y = mesh_rect.vertices.T
    # int over [0,3]x[-1,1] of (2x - y + 1) = 2*9 - 0 + 6
    assert spaces.integrate_p1(2 * x - y + 1, mesh_rect) == pytest.approx(24.0, rel=1e-14)


def test_integrate_p0_p1_exact(rng, mesh_rect):
    v = rng.normal(size=mesh_rect.n_triangles)
    w = rng.normal(size=mesh_rect.n_vertices)
    ref = spaces.quadrature_integral(v[:, None] * spaces.quadrature_values(w, mesh_rect), mesh_rect)
    assert spaces.integrate_p0_p1(v, w, mesh_rect) == pytest.approx(ref, rel=1e-13)


def test_mass_matrix_integrates_products(rng, mesh_rect):
    a, b = rng.normal(size=(2, mesh_rect.n_vertices))
    ref = spaces.quadrature_integral(spaces.quadrature_values(a, mesh_rect) * spaces.quadrature_values(b, mesh_rect),
                                     mesh_rect)
    assert a @ (spaces.mass_matrix(mesh_rect) @ b) == pytest.approx(ref, rel=1e-13)
    np.testing.assert_allclose(np.asarray(spaces.mass_matrix(mesh_rect).sum(axis=1)).ravel(),
                               spaces.lumped_mass_diagonal(mesh_rect), rtol=1e-13)


def test_stiffness_matrix(mesh_rect):
    A = spaces.stiffness_matrix(mesh_rect)
    x, y = mesh_rect.vertices.T
    # constants in the kernel; |grad(3x - 2y)|^2 * area = 13 * 6
    np.testing.assert_allclose(A @ np.ones(mesh_rect.n_vertices), 0.0, atol=1e-12)
    w = 3 * x - 2 * y
    assert w @ (A @ w) == pytest.approx(78.0, rel=1e-13)
    np.testing.assert_allclose(spaces.gradient_p1(w, mesh_rect), np.tile([3.0, -2.0], (mesh_rect.n_triangles, 1)),
                               atol=1e-13)


def test_operator_matrices_match_functions(rng, mesh_rect):
    v = rng.normal(size=mesh_rect.n_triangles)
    w = rng.normal(size=mesh_rect.n_vertices)
    np.testing.assert_allclose(spaces.regularization_matrix(mesh_rect) @ v, spaces.regularize_p1(v, mesh_rect),
                               rtol=1e-13)
    np.testing.assert_allclose(spaces.mean_matrix(mesh_rect) @ w, spaces.project_p0_of_p1(w, mesh_rect), rtol=1e-13)
    assert w @ (spaces.p0_load_matrix(mesh_rect) @ v) == pytest.approx(spaces.integrate_p0_p1(v, w, mesh_rect),
                                                                        rel=1e-12)


def test_signed_incidence(mesh4):
    D = spaces.signed_incidence(mesh4)
    ie = mesh4.interior_edges
    v = np.arange(mesh4.n_triangles, dtype=float)
    np.testing.assert_array_equal(D @ v, v[mesh4.edge_owner[ie]] - v[mesh4.edge_neighbor[ie]])


def test_wrong_shape_rejected(mesh4):
    with pytest.raises(ValueError):
        spaces.regularize_p1(np.ones(mesh4.n_vertices), mesh4)


p0_fields = arrays(np.float64, MESH.n_triangles, elements=st.floats(-5, 5, allow_nan=False))
unit_fields = arrays(np.float64, MESH.n_triangles, elements=st.floats(0, 1, allow_nan=False))
p1_fields = arrays(np.float64, MESH.n_vertices, elements=st.floats(-5, 5, allow_nan=False))


@settings(max_examples=60, deadline=None)
@given(p0_fields)
def test_regularization_preserves_mass(v):
    lhs = spaces.integrate_p1(spaces.regularize_p1(v, MESH), MESH)
    rhs = spaces.integrate_p0(v, MESH)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, np.sum(MESH.triangle_area * np.abs(v)))


@settings(max_examples=60, deadline=None)
@given(p0_fields, p1_fields)
def test_duality(v, mu):
    lhs = spaces.integrate_p0_p1(v, mu, MESH)
    rhs = spaces.lumped_inner(spaces.regularize_p1(v, MESH), mu, MESH)
    scale = max(1.0, np.sum(MESH.triangle_area * np.abs(v)) * np.abs(mu).max())
    assert abs(lhs - rhs) <= 1e-12 * scale


@settings(max_examples=60, deadline=None)
@given(unit_fields)
def test_regularization_order_preserving(v):
    w = spaces.regularize_p1(v, MESH)
    assert w.min() >= v.min() - 1e-15 and w.max() <= v.max() + 1e-15
