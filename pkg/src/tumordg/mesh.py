"""Conforming 2D triangular meshes with oriented edges.

The upwind DG discretization reconstructs normal gradients from the two
element values adjacent to an interior edge, divided by the distance
between the element barycenters.  That reconstruction is consistent only
when the barycenter segment is orthogonal to the shared edge, so meshes
carry enough geometry to check that condition.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


class MeshError(ValueError):
    """Raised for malformed mesh input."""


@dataclass(frozen=True)
class Edge:
    """Read-only view of one mesh edge."""

    index: int
    endpoints: tuple[int, int]
    owner: int
    neighbor: int  # -1 on the boundary
    normal: np.ndarray
    length: float
    barycenter_distance: float  # nan on the boundary

    @property
    def is_interior(self) -> bool:
        return self.neighbor >= 0


@dataclass(frozen=True, eq=False)
class Mesh:
    """Immutable triangulation.

    Triangles are stored counterclockwise.  Every edge has an owner
    triangle (the smaller index of the two adjacent triangles) and the
    stored normal points out of the owner, towards the neighbor or out of
    the domain on the boundary.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray = field(repr=False)
    edge_owner: np.ndarray = field(repr=False)
    edge_neighbor: np.ndarray = field(repr=False)
    edge_normal: np.ndarray = field(repr=False)
    edge_length: np.ndarray = field(repr=False)
    edge_barycenter_distance: np.ndarray = field(repr=False)
    triangle_area: np.ndarray = field(repr=False)
    barycenters: np.ndarray = field(repr=False)
    vertex_support_area: np.ndarray = field(repr=False)

    @classmethod
    def from_arrays(cls, vertices, triangles) -> "Mesh":
        vertices = np.ascontiguousarray(vertices, dtype=float)
        triangles = np.ascontiguousarray(triangles, dtype=np.int64)
        if vertices.ndim != 2 or vertices.shape[1] != 2:
            raise MeshError("vertices must have shape (nv, 2)")
        if triangles.ndim != 2 or triangles.shape[1] != 3:
            raise MeshError("triangles must have shape (nt, 3)")
        nv = len(vertices)
        if triangles.size and (triangles.min() < 0 or triangles.max() >= nv):
            raise MeshError("triangle vertex index out of range")

        p0, p1, p2 = (vertices[triangles[:, k]] for k in range(3))
        signed = 0.5 * ((p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1])
                        - (p1[:, 1] - p0[:, 1]) * (p2[:, 0] - p0[:, 0]))
        if np.any(signed <= 0.0):
            bad = int(np.flatnonzero(signed <= 0.0)[0])
            raise MeshError(f"triangle {bad} is degenerate or clockwise")
        area = signed
        bary = (p0 + p1 + p2) / 3.0

        support = np.zeros(nv)
        for k in range(3):
            np.add.at(support, triangles[:, k], area)

        edges, owner, neighbor = _build_edges(triangles, nv)

        a, b = vertices[edges[:, 0]], vertices[edges[:, 1]]
        tangent = b - a
        length = np.hypot(tangent[:, 0], tangent[:, 1])
        normal = np.column_stack([tangent[:, 1], -tangent[:, 0]]) / length[:, None]
        midpoint = 0.5 * (a + b)
        flip = np.einsum("ij,ij->i", midpoint - bary[owner], normal) < 0.0
        normal[flip] *= -1.0

        dist = np.full(len(edges), np.nan)
        interior = neighbor >= 0
        diff = bary[neighbor[interior]] - bary[owner[interior]]
        dist[interior] = np.hypot(diff[:, 0], diff[:, 1])

        return cls(vertices, triangles, edges, owner, neighbor, normal, length,
                   dist, area, bary, support)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def interior_edges(self) -> np.ndarray:
        return np.flatnonzero(self.edge_neighbor >= 0)

    @property
    def boundary_edges(self) -> np.ndarray:
        return np.flatnonzero(self.edge_neighbor < 0)

    @property
    def area(self) -> float:
        return float(self.triangle_area.sum())

    @property
    def diameters(self) -> np.ndarray:
        """Circumscribed-circle diameter of every triangle."""
        t = self.triangles
        la, lb, lc = (np.linalg.norm(self.vertices[t[:, (k + 1) % 3]] - self.vertices[t[:, (k + 2) % 3]], axis=1)
                      for k in range(3))
        return la * lb * lc / (2.0 * self.triangle_area)

    @property
    def h(self) -> float:
        """Mesh size: largest circumscribed diameter."""
        return float(self.diameters.max())

    def edge(self, i: int) -> Edge:
        return Edge(
            index=int(i),
            endpoints=(int(self.edges[i, 0]), int(self.edges[i, 1])),
            owner=int(self.edge_owner[i]),
            neighbor=int(self.edge_neighbor[i]),
            normal=self.edge_normal[i].copy(),
            length=float(self.edge_length[i]),
            barycenter_distance=float(self.edge_barycenter_distance[i]),
        )

    def vertex_adjacency(self):
        """Sparse vertex-vertex adjacency through mesh edges."""
        from scipy import sparse

        nv = self.n_vertices
        i, j = self.edges[:, 0], self.edges[:, 1]
        data = np.ones(2 * len(i))
        return sparse.coo_matrix((data, (np.r_[i, j], np.r_[j, i])), shape=(nv, nv)).tocsr()


def _build_edges(triangles: np.ndarray, nv: int):
    nt = len(triangles)
    local = np.array([[1, 2], [2, 0], [0, 1]])
    pairs = triangles[:, local].reshape(-1, 2)
    tri_of = np.repeat(np.arange(nt), 3)
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    key = lo * nv + hi
    order = np.lexsort((tri_of, key))
    key_s, tri_s = key[order], tri_of[order]
    uniq, start, counts = np.unique(key_s, return_index=True, return_counts=True)
    if np.any(counts > 2):
        raise MeshError("non-manifold mesh: an edge is shared by more than two triangles")
    owner = tri_s[start]
    neighbor = np.full(len(uniq), -1, dtype=np.int64)
    two = counts == 2
    neighbor[two] = tri_s[start[two] + 1]
    edges = np.column_stack([uniq // nv, uniq % nv])
    return edges, owner, neighbor


def generate_crisscross(domain=(0.0, 1.0, 0.0, 1.0), nx: int = 1, ny: int = 1) -> Mesh:
    """Rectangle grid with each cell split into four triangles by both diagonals.

    ``domain`` is ``(xmin, xmax, ymin, ymax)``.  Cell centers are numbered
    after the grid vertices.  Barycenter orthogonality holds on every
    interior edge when the cells are square.
    """
    x0, x1, y0, y1 = map(float, domain)
    if int(nx) != nx or int(ny) != ny or nx < 1 or ny < 1:
        raise MeshError(f"cell counts must be positive integers, got nx={nx}, ny={ny}")
    if not (x1 > x0 and y1 > y0):
        raise MeshError(f"degenerate rectangle {domain!r}")
    nx, ny = int(nx), int(ny)

    xs = np.linspace(x0, x1, nx + 1)
    ys = np.linspace(y0, y1, ny + 1)
    gx, gy = np.meshgrid(xs, ys, indexing="xy")
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    cx, cy = np.meshgrid(0.5 * (xs[:-1] + xs[1:]), 0.5 * (ys[:-1] + ys[1:]), indexing="xy")
    centers = np.column_stack([cx.ravel(), cy.ravel()])
    vertices = np.vstack([grid, centers])

    j, i = np.meshgrid(np.arange(ny), np.arange(nx), indexing="ij")
    i, j = i.ravel(), j.ravel()
    v00 = j * (nx + 1) + i
    v10 = v00 + 1
    v01 = v00 + nx + 1
    v11 = v01 + 1
    c = (nx + 1) * (ny + 1) + j * nx + i
    cells = np.stack([
        np.column_stack([v00, v10, c]),  # bottom
        np.column_stack([v10, v11, c]),  # right
        np.column_stack([v11, v01, c]),  # top
        np.column_stack([v01, v00, c]),  # left
    ], axis=1)
    return Mesh.from_arrays(vertices, cells.reshape(-1, 3))


@dataclass
class AdmissibilityReport:
    passed: bool
    tol: float
    deviation: np.ndarray  # |cos| of angle between barycenter segment and edge, per interior edge
    interior_edges: np.ndarray
    worst: list = field(default_factory=list)  # (edge index, deviation), largest first

    @property
    def max_deviation(self) -> float:
        return float(self.deviation.max()) if self.deviation.size else 0.0

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{status}: {len(self.interior_edges)} interior edges, "
                 f"max deviation {self.max_deviation:.3e} (tol {self.tol:.1e})"]
        for e, d in self.worst:
            if d > self.tol:
                lines.append(f"  edge {e}: deviation {d:.3e}")
        return "\n".join(lines)


def check_admissibility(mesh: Mesh, tol: float = 1e-12, n_worst: int = 10) -> AdmissibilityReport:
    """Check that barycenter segments are orthogonal to their shared edges.

    The deviation of an edge is ``|(b_L - b_K) . t_e| / |b_L - b_K|`` with
    ``t_e`` the unit tangent, i.e. the cosine of the angle between the
    segment and the edge.
    """
    ie = mesh.interior_edges
    K, L = mesh.edge_owner[ie], mesh.edge_neighbor[ie]
    seg = mesh.barycenters[L] - mesh.barycenters[K]
    a, b = mesh.vertices[mesh.edges[ie, 0]], mesh.vertices[mesh.edges[ie, 1]]
    tangent = (b - a) / mesh.edge_length[ie, None]
    dev = np.abs(np.einsum("ij,ij->i", seg, tangent)) / np.linalg.norm(seg, axis=1)
    order = np.argsort(-dev, kind="stable")[:n_worst]
    worst = [(int(ie[k]), float(dev[k])) for k in order]
    passed = bool(np.all(dev <= tol))
    return AdmissibilityReport(passed, tol, dev, ie, worst)


def read_mesh(source) -> Mesh:
    """Read the plain-text format: ``nv nt``, nv lines ``x y``, nt lines ``i j k``."""
    text = Path(source).read_text() if not hasattr(source, "read") else source.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MeshError("empty mesh file")
    try:
        nv, nt = (int(t) for t in lines[0].split())
    except ValueError as exc:
        raise MeshError(f"line 1: expected 'nv nt', got {lines[0]!r}") from exc
    if len(lines) < 1 + nv + nt:
        raise MeshError(f"expected {nv} vertex and {nt} triangle lines, file has {len(lines) - 1}")
    try:
        verts = np.array([[float(t) for t in ln.split()] for ln in lines[1:1 + nv]])
        tris = np.array([[int(t) for t in ln.split()] for ln in lines[1 + nv:1 + nv + nt]])
    except ValueError as exc:
        raise MeshError(f"malformed numeric entry: {exc}") from exc
    return Mesh.from_arrays(verts.reshape(nv, -1), tris.reshape(nt, -1))


def write_mesh(mesh: Mesh, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(f"{mesh.n_vertices} {mesh.n_triangles}\n")
        for x, y in mesh.vertices:
            fh.write(f"{float(x)!r} {float(y)!r}\n")
        for i, j, k in mesh.triangles:
            fh.write(f"{i} {j} {k}\n")
