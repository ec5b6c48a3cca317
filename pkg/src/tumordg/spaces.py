"""Piecewise-constant and continuous piecewise-linear fields on a mesh.

Fields are plain 1D numpy arrays: P0 fields have one value per triangle,
P1 fields one value per vertex.  All operators below integrate exactly;
the P0/P1 duality identity

    int v * mu  ==  <regularize_p1(v), mu>_lumped

must hold to rounding error because the discrete energy law rests on it.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy import sparse

from .mesh import Mesh

# 6-point symmetric rule on the reference triangle, exact up to degree 4.
# Rows are barycentric coordinates, weights sum to one (multiply by |K|).
_A1, _W1 = 0.44594849091596488632, 0.22338158967801146570
_A2, _W2 = 0.091576213509770743460, 0.10995174365532186764
QUAD_POINTS = np.array([
    [_A1, _A1, 1 - 2 * _A1],
    [_A1, 1 - 2 * _A1, _A1],
    [1 - 2 * _A1, _A1, _A1],
    [_A2, _A2, 1 - 2 * _A2],
    [_A2, 1 - 2 * _A2, _A2],
    [1 - 2 * _A2, _A2, _A2],
])
QUAD_WEIGHTS = np.array([_W1, _W1, _W1, _W2, _W2, _W2])


def _check(values, n, what):
    values = np.asarray(values, dtype=float)
    if values.shape != (n,):
        raise ValueError(f"{what} field has shape {values.shape}, expected ({n},)")
    return values


def project_p0(g, mesh: Mesh) -> np.ndarray:
    """Element means of a P1 field (its value at each barycenter)."""
    g = _check(g, mesh.n_vertices, "P1")
    return g[mesh.triangles].mean(axis=1)


def project_p0_of_p1(w, mesh: Mesh) -> np.ndarray:
    """Arithmetic mean of the three vertex values of every triangle."""
    w = _check(w, mesh.n_vertices, "P1")
    t = mesh.triangles
    return (w[t[:, 0]] + w[t[:, 1]] + w[t[:, 2]]) / 3.0


def regularize_p1(v, mesh: Mesh) -> np.ndarray:
    """Area-weighted vertex average of a P0 field.

    Each vertex gets ``sum_L |L| v_L / sum_L |L|`` over the triangles L
    containing it, so the result stays inside ``[min v, max v]``.
    """
    v = _check(v, mesh.n_triangles, "P0")
    weighted = mesh.triangle_area * v
    out = np.zeros(mesh.n_vertices)
    for k in range(3):
        np.add.at(out, mesh.triangles[:, k], weighted)
    return out / mesh.vertex_support_area


def lumped_inner(a, b, mesh: Mesh) -> float:
    a = _check(a, mesh.n_vertices, "P1")
    b = _check(b, mesh.n_vertices, "P1")
    return float(np.dot(lumped_mass_diagonal(mesh) * a, b))


def lumped_mass_diagonal(mesh: Mesh) -> np.ndarray:
    return mesh.vertex_support_area / 3.0


def integrate_p0(v, mesh: Mesh) -> float:
    v = _check(v, mesh.n_triangles, "P0")
    return float(np.dot(mesh.triangle_area, v))


def integrate_p1(w, mesh: Mesh) -> float:
    return integrate_p0(project_p0_of_p1(w, mesh), mesh)


def integrate_p0_p1(v, w, mesh: Mesh) -> float:
    """Exact integral of a P0 field times a P1 field."""
    return integrate_p0(_check(v, mesh.n_triangles, "P0") * project_p0_of_p1(w, mesh), mesh)


# ---------------------------------------------------------------------------
# assembled operators, cached per mesh

@lru_cache(maxsize=16)
def basis_gradients(mesh: Mesh) -> np.ndarray:
    """Constant gradients of the three local hat functions, shape (nt, 3, 2)."""
    p = mesh.vertices[mesh.triangles]
    # grad phi_k = rot90(p_{k+2} - p_{k+1}) / (2|K|)
    e = np.stack([p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]], axis=1)
    grads = np.stack([-e[..., 1], e[..., 0]], axis=-1)
    return grads / (2.0 * mesh.triangle_area[:, None, None])


def _element_scatter(mesh: Mesh, local: np.ndarray):
    t = mesh.triangles
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    n = mesh.n_vertices
    return sparse.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()


@lru_cache(maxsize=16)
def stiffness_matrix(mesh: Mesh) -> sparse.csr_matrix:
    g = basis_gradients(mesh)
    local = np.einsum("kid,kjd->kij", g, g) * mesh.triangle_area[:, None, None]
    return _element_scatter(mesh, local)


@lru_cache(maxsize=16)
def mass_matrix(mesh: Mesh) -> sparse.csr_matrix:
    """Consistent P1 mass matrix."""
    ref = (np.ones((3, 3)) + np.eye(3)) / 12.0
    local = mesh.triangle_area[:, None, None] * ref[None]
    return _element_scatter(mesh, local)


@lru_cache(maxsize=16)
def regularization_matrix(mesh: Mesh) -> sparse.csr_matrix:
    """Matrix of ``regularize_p1``, shape (nv, nt)."""
    t = mesh.triangles
    rows = t.ravel()
    cols = np.repeat(np.arange(mesh.n_triangles), 3)
    data = (mesh.triangle_area[:, None] / mesh.vertex_support_area[t]).ravel()
    return sparse.coo_matrix((data, (rows, cols)), shape=(mesh.n_vertices, mesh.n_triangles)).tocsr()


@lru_cache(maxsize=16)
def mean_matrix(mesh: Mesh) -> sparse.csr_matrix:
    """Matrix of ``project_p0_of_p1``, shape (nt, nv)."""
    nt = mesh.n_triangles
    rows = np.repeat(np.arange(nt), 3)
    data = np.full(3 * nt, 1.0 / 3.0)
    return sparse.coo_matrix((data, (rows, mesh.triangles.ravel())), shape=(nt, mesh.n_vertices)).tocsr()


@lru_cache(maxsize=16)
def p0_load_matrix(mesh: Mesh) -> sparse.csr_matrix:
    """``B[j, K] = int_K phi_j = |K|/3``: load vector of a P0 field against hats."""
    return (mean_matrix(mesh).T @ sparse.diags(mesh.triangle_area)).tocsr()


@lru_cache(maxsize=16)
def signed_incidence(mesh: Mesh) -> sparse.csr_matrix:
    """Interior-edge jump operator: ``(D v)_e = v_K - v_L``, shape (n_interior, nt)."""
    ie = mesh.interior_edges
    m = len(ie)
    rows = np.r_[np.arange(m), np.arange(m)]
    cols = np.r_[mesh.edge_owner[ie], mesh.edge_neighbor[ie]]
    data = np.r_[np.ones(m), -np.ones(m)]
    return sparse.coo_matrix((data, (rows, cols)), shape=(m, mesh.n_triangles)).tocsr()


def quadrature_values(w, mesh: Mesh) -> np.ndarray:
    """Values of a P1 field at the quadrature points, shape (nt, nq)."""
    w = _check(w, mesh.n_vertices, "P1")
    return w[mesh.triangles] @ QUAD_POINTS.T


def quadrature_integral(values: np.ndarray, mesh: Mesh) -> float:
    """Integral of point values given at the quadrature points."""
    return float(np.dot(mesh.triangle_area, values @ QUAD_WEIGHTS))


def quadrature_load(values: np.ndarray, mesh: Mesh) -> np.ndarray:
    """Load vector ``int g phi_j`` for ``g`` given at quadrature points."""
    local = (values * QUAD_WEIGHTS) @ QUAD_POINTS * mesh.triangle_area[:, None]
    out = np.zeros(mesh.n_vertices)
    for k in range(3):
        np.add.at(out, mesh.triangles[:, k], local[:, k])
    return out


def gradient_p1(w, mesh: Mesh) -> np.ndarray:
    """Elementwise-constant gradient of a P1 field, shape (nt, 2)."""
    w = _check(w, mesh.n_vertices, "P1")
    return np.einsum("kid,ki->kd", basis_gradients(mesh), w[mesh.triangles])
