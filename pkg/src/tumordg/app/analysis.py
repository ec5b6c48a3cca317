"""Post-processing helpers."""
from __future__ import annotations

import numpy as np
from scipy.sparse.csgraph import connected_components

from ..mesh import Mesh


def count_components(values, mesh: Mesh, level: float = 0.5) -> int:
    """Connected components of the vertex set ``{values > level}`` along mesh edges."""
    values = np.asarray(values, dtype=float)
    if values.shape != (mesh.n_vertices,):
        raise ValueError(f"expected a P1 field with {mesh.n_vertices} values")
    mask = values > level
    if not mask.any():
        return 0
    adj = mesh.vertex_adjacency()[mask][:, mask]
    return int(connected_components(adj, directed=False)[0])
