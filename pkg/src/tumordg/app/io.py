"""Diagnostics CSV and legacy-VTK snapshot writers."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from ..mesh import Mesh

CSV_COLUMNS = ("step", "time", "mass_u", "mass_n", "mass_total", "min_u", "max_u", "min_n", "max_n",
               "min_ureg", "max_ureg", "energy", "newton_iters", "residual")


class DiagnosticsWriter:
    """Append one row per step; flushed after each row so partial runs are usable."""

    def __init__(self, path):
        self.path = Path(path)
        self._fh = open(self.path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(CSV_COLUMNS)

    def write(self, diag) -> None:
        # str(float) is the shortest round-trip repr, so rows reproduce bitwise
        self._writer.writerow([getattr(diag, c) for c in CSV_COLUMNS])
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_diagnostics(path) -> dict:
    """Columns of a diagnostics CSV as float arrays (``step``/``newton_iters`` as int)."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    out = {}
    for c in CSV_COLUMNS:
        dtype = int if c in ("step", "newton_iters") else float
        out[c] = np.array([dtype(r[c]) for r in rows])
    return out


def _scalars(fh, name, values):
    fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
    np.savetxt(fh, np.asarray(values, dtype=float), fmt="%.17g")


def write_vtk(path, mesh: Mesh, cell_data: dict, point_data: dict, title: str = "tumordg") -> None:
    """Legacy ASCII unstructured grid of triangles with scalar fields."""
    nv, nt = mesh.n_vertices, mesh.n_triangles
    for name, values in cell_data.items():
        if np.shape(values) != (nt,):
            raise ValueError(f"cell field {name!r} has shape {np.shape(values)}, expected ({nt},)")
    for name, values in point_data.items():
        if np.shape(values) != (nv,):
            raise ValueError(f"point field {name!r} has shape {np.shape(values)}, expected ({nv},)")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID\n")
        fh.write(f"POINTS {nv} double\n")
        np.savetxt(fh, np.column_stack([mesh.vertices, np.zeros(nv)]), fmt="%.17g")
        fh.write(f"CELLS {nt} {4 * nt}\n")
        np.savetxt(fh, np.column_stack([np.full(nt, 3), mesh.triangles]), fmt="%d")
        fh.write(f"CELL_TYPES {nt}\n")
        np.savetxt(fh, np.full(nt, 5), fmt="%d")  # VTK_TRIANGLE
        if cell_data:
            fh.write(f"CELL_DATA {nt}\n")
            for name, values in cell_data.items():
                _scalars(fh, name, values)
        if point_data:
            fh.write(f"POINT_DATA {nv}\n")
            for name, values in point_data.items():
                _scalars(fh, name, values)


def read_vtk_fields(path) -> dict:
    """Scalar fields of a file written by :func:`write_vtk`, keyed by name."""
    tokens = Path(path).read_text(encoding="utf-8").split()
    fields, i = {}, 0
    while i < len(tokens):
        if tokens[i] in ("CELL_DATA", "POINT_DATA"):
            count = int(tokens[i + 1])
            i += 2
            while i < len(tokens) and tokens[i] == "SCALARS":
                name = tokens[i + 1]
                i += 6  # SCALARS name type ncomp LOOKUP_TABLE default
                fields[name] = np.array(tokens[i:i + count], dtype=float)
                i += count
        else:
            i += 1
    return fields
