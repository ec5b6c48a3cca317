"""Closed-form initial conditions sampled on a mesh."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..mesh import Mesh
from ..model import ModelParams


def _bump(x, y, cx, cy, radius, eps):
    return np.tanh((radius - np.hypot(x - cx, y - cy)) / (np.sqrt(2.0) * eps))


def _three_tumors(x, y, eps):
    u = 0.5 * (_bump(x, y, 2.0, 2.0, 1.0, eps) + _bump(x, y, 3.0, -5.0, 1.0, eps)
               + _bump(x, y, -1.5, -1.5, 1.73, eps) + 3.0)
    return u, 1.0 - u


def _irregular_growth(x, y, eps):
    u = 0.5 * (_bump(x, y, 0.0, 0.0, 1.75, eps) + 1.0)
    n = 0.5 * (1.0 - u) + 0.25 * (_bump(x, y, 2.45, 1.45, 1.0, eps) + _bump(x, y, -3.75, 1.0, 1.75, eps)
                                  + _bump(x, y, 0.0, -5.0, 2.5, eps) + 3.0)
    return u, n


def _zero(x, y, eps):
    return np.zeros_like(x), np.zeros_like(x)


@dataclass(frozen=True)
class ICPreset:
    name: str
    description: str
    func: Callable  # (x, y, eps) -> (u0, n0)

    def evaluate(self, x, y, eps: float):
        u, n = self.func(np.asarray(x, dtype=float), np.asarray(y, dtype=float), eps)
        return np.clip(u, 0.0, 1.0), np.clip(n, 0.0, 1.0)


IC_PRESETS = {
    p.name: p for p in (
        ICPreset("three_tumors", "three diffuse discs with n0 = 1 - u0", _three_tumors),
        ICPreset("irregular_growth", "one disc in an uneven nutrient field", _irregular_growth),
        ICPreset("zero", "u0 = n0 = 0", _zero),
    )
}

_NAMESPACE = {name: getattr(np, name) for name in (
    "tanh", "sqrt", "exp", "log", "sin", "cos", "arctan2", "hypot", "abs", "minimum", "maximum", "where",
    "pi")}


def compile_expression(expr: str, name: str = "<expr>"):
    """Numpy expression in ``x, y, eps, delta`` (and ``u0`` for the nutrient)."""
    code = compile(expr, name, "eval")

    def f(x, y, params: ModelParams, u0=None):
        ns = dict(_NAMESPACE, x=x, y=y, eps=params.eps, delta=params.delta, u0=u0)
        return np.broadcast_to(np.asarray(eval(code, {"__builtins__": {}}, ns), dtype=float), np.shape(x))
    return f


def _points(mesh: Mesh, at: str):
    if at == "barycenters":
        return mesh.barycenters
    if at == "vertices":
        return mesh.vertices
    raise ValueError(f"at must be 'barycenters' or 'vertices', got {at!r}")


def sample_ic(preset, mesh: Mesh, params: ModelParams = ModelParams(), at: str = "barycenters"):
    """Evaluate an initial condition at barycenters (P0) or vertices (P1), clamped to [0, 1]."""
    if isinstance(preset, str):
        try:
            preset = IC_PRESETS[preset]
        except KeyError:
            raise ValueError(f"unknown initial condition {preset!r}") from None
    pts = _points(mesh, at)
    return preset.evaluate(pts[:, 0], pts[:, 1], params.eps)


def sample_expressions(u0_expr: str, n0_expr: str, mesh: Mesh, params: ModelParams, at: str = "barycenters"):
    pts = _points(mesh, at)
    x, y = pts[:, 0], pts[:, 1]
    u = np.clip(compile_expression(u0_expr, "u0")(x, y, params), 0.0, 1.0)
    n = np.clip(compile_expression(n0_expr, "n0")(x, y, params, u), 0.0, 1.0)
    return u, n
