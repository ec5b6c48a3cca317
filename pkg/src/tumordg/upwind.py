"""Edge-based upwind form for degenerate-mobility fluxes of P0 fields.

For interior edges e = K|L with ``[x] = x_K - x_L``::

    a(mu, M(v); vbar) = sum_e |e|/D_e * ( [mu]_+ (M_up(v_K) + M_dn(v_L))_+
                                        - [mu]_- (M_up(v_L) + M_dn(v_K))_+ ) [vbar]

The mobility is taken upwind with respect to the flux direction and split
into nondecreasing and nonincreasing parts so that the scheme keeps
elementwise values inside [0, 1].  Boundary edges do not contribute
(homogeneous Neumann).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse

from . import backend, spaces
from .mesh import Mesh
from .model import MobilitySplit


@dataclass(frozen=True, eq=False)
class EdgeFluxWorkspace:
    """Per-interior-edge geometry reused by every evaluation."""

    interior: np.ndarray
    owner: np.ndarray
    neighbor: np.ndarray
    weight: np.ndarray  # |e| / D_e
    jump: sparse.csr_matrix  # (n_interior, nt)

    @classmethod
    def from_mesh(cls, mesh: Mesh) -> "EdgeFluxWorkspace":
        ie = mesh.interior_edges
        weight = mesh.edge_length[ie] / mesh.edge_barycenter_distance[ie]
        if np.any(~(weight > 0.0)):
            raise ValueError("interior edges need positive |e|/D_e")
        return cls(ie, mesh.edge_owner[ie], mesh.edge_neighbor[ie], weight,
                   spaces.signed_incidence(mesh))


@lru_cache(maxsize=16)
def workspace(mesh: Mesh) -> EdgeFluxWorkspace:
    return EdgeFluxWorkspace.from_mesh(mesh)


def normal_gradient(mu, edge, mesh: Mesh | None = None) -> float:
    """Two-point normal derivative ``(mu_L - mu_K) / D_e`` on an interior edge.

    ``edge`` is an :class:`~tumordg.mesh.Edge` or an edge index (then
    ``mesh`` is required).
    """
    if not hasattr(edge, "owner"):
        edge = mesh.edge(edge)
    if edge.neighbor < 0:
        raise ValueError(f"edge {edge.index} is a boundary edge")
    mu = np.asarray(mu, dtype=float)
    return float((mu[edge.neighbor] - mu[edge.owner]) / edge.barycenter_distance)


def edge_terms(mu, v, mesh: Mesh, split: MobilitySplit):
    """Per-edge flux and partials from the active kernel backend."""
    ws = workspace(mesh)
    mu = np.asarray(mu, dtype=float)
    v = np.asarray(v, dtype=float)
    jump = mu[ws.owner] - mu[ws.neighbor]
    return backend.kernels.upwind_edge_terms(
        jump, v[ws.owner], v[ws.neighbor], ws.weight,
        split.p, split.q, split.vstar, split.kpq, split.mstar)


def upwind_form(mu, v, vbar, mesh: Mesh, split: MobilitySplit) -> float:
    ws = workspace(mesh)
    g = edge_terms(mu, v, mesh, split)[0]
    vbar = np.asarray(vbar, dtype=float)
    return float(np.dot(g, vbar[ws.owner] - vbar[ws.neighbor]))


def upwind_residual(mu, v, mesh: Mesh, split: MobilitySplit) -> np.ndarray:
    """Vector ``a(mu, M(v); 1_K)`` over all triangles K."""
    g = edge_terms(mu, v, mesh, split)[0]
    return workspace(mesh).jump.T @ g


def upwind_jacobian_blocks(mu, v, mesh: Mesh, split: MobilitySplit):
    """Residual ``a(mu, M(v); 1_K)`` and its Jacobians w.r.t. P0 ``mu`` and ``v``.

    Returns ``(residual, J_mu, J_v)`` with both Jacobians (nt, nt) CSR.
    The positive part has derivative 1 for positive arguments and 0
    otherwise.
    """
    ws = workspace(mesh)
    g, dg_dj, dg_dvK, dg_dvL = edge_terms(mu, v, mesh, split)
    D = ws.jump
    res = D.T @ g
    J_mu = (D.T @ sparse.diags(dg_dj) @ D).tocsr()
    m = len(g)
    nt = mesh.n_triangles
    rows = np.arange(m)
    dv = sparse.coo_matrix(
        (np.r_[dg_dvK, dg_dvL], (np.r_[rows, rows], np.r_[ws.owner, ws.neighbor])),
        shape=(m, nt)).tocsr()
    J_v = (D.T @ dv).tocsr()
    return res, J_mu, J_v
