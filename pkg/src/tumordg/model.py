"""Pointwise physics of the bounded tumor-growth model.

Unknowns are the tumor volume fraction u and the nutrient volume fraction
n, both confined to [0, 1] by a degenerate normalized mobility

    h_{p,q}(v) = K_{p,q} v_+^p (1 - v)_+^q,    max h_{p,q} = 1,

and a proliferation term P(u, n) = h_{r,s}(u) n_+.  The double-well
potential F(u) = u^2 (1 - u)^2 / 4 is split into a convex part 3u^2/8
(implicit) and a concave remainder (explicit).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import spaces
from .mesh import Mesh


def pos_part(x):
    return np.maximum(x, 0.0)


def neg_part(x):
    return np.maximum(-np.asarray(x, dtype=float), 0.0)


def potential_F(u):
    u = np.asarray(u, dtype=float)
    return 0.25 * u * u * (1.0 - u) ** 2


def potential_dF(u):
    u = np.asarray(u, dtype=float)
    return 0.5 * u * (1.0 - u) * (1.0 - 2.0 * u)


def split_f(u_new, u_old):
    """Convex-splitting derivative: implicit ``3u/4`` plus explicit concave part."""
    u_new = np.asarray(u_new, dtype=float)
    u_old = np.asarray(u_old, dtype=float)
    return 0.25 * (3.0 * u_new + 4.0 * u_old ** 3 - 6.0 * u_old ** 2 - u_old)


SPLIT_F_DNEW = 0.75


@dataclass(frozen=True)
class MobilitySplit:
    """Normalized degenerate mobility h_{p,q} and its monotone parts."""

    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0 or self.p + self.q < 1:
            raise ValueError(f"exponents must be >= 0 with p + q >= 1, got p={self.p}, q={self.q}")

    @property
    def vstar(self) -> float:
        return self.p / (self.p + self.q)

    @property
    def kpq(self) -> float:
        return 1.0 / (self.vstar ** self.p * (1.0 - self.vstar) ** self.q)

    @cached_property
    def mstar(self) -> float:
        return float(self(self.vstar))

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        inside = (v >= 0.0) & (v <= 1.0)
        vc = np.where(inside, v, 0.0)
        return np.where(inside, self.kpq * vc ** self.p * (1.0 - vc) ** self.q, 0.0)

    def derivative(self, v):
        """Derivative on (0, 1), zero elsewhere (one-sided kinks count as zero)."""
        v = np.asarray(v, dtype=float)
        inside = (v > 0.0) & (v < 1.0)
        vc = np.where(inside, v, 0.5)
        p, q = self.p, self.q
        left = p * vc ** (p - 1) * (1.0 - vc) ** q if p > 0 else 0.0
        right = q * vc ** p * (1.0 - vc) ** (q - 1) if q > 0 else 0.0
        return np.where(inside, self.kpq * (left - right), 0.0)

    def up(self, v):
        v = np.asarray(v, dtype=float)
        return np.where(v <= self.vstar, self(v), self.mstar)

    def down(self, v):
        v = np.asarray(v, dtype=float)
        return np.where(v <= self.vstar, 0.0, self(v) - self.mstar)

    def up_derivative(self, v):
        v = np.asarray(v, dtype=float)
        return np.where(v < self.vstar, self.derivative(v), 0.0)

    def down_derivative(self, v):
        v = np.asarray(v, dtype=float)
        return np.where(v > self.vstar, self.derivative(v), 0.0)


@dataclass(frozen=True)
class ModelParams:
    eps: float = 0.1
    delta: float = 0.01
    chi0: float = 0.0
    p0: float = 0.0
    cu: float = 1.0
    cn: float = 1.0
    mob_p: int = 1
    mob_q: int = 1
    prolif_r: int = 1
    prolif_s: int = 1
    # nutrient mobility exponents; None means shared with the tumor mobility
    mob_n_p: int | None = None
    mob_n_q: int | None = None

    def __post_init__(self):
        for name in ("delta", "cu", "cn"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive, got {getattr(self, name)}")
        for name in ("eps", "chi0", "p0"):
            if not getattr(self, name) >= 0.0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")
        MobilitySplit(self.mob_p, self.mob_q)
        MobilitySplit(self.prolif_r, self.prolif_s)
        if (self.mob_n_p is None) != (self.mob_n_q is None):
            raise ValueError("mob_n_p and mob_n_q must be given together")
        if self.mob_n_p is not None:
            MobilitySplit(self.mob_n_p, self.mob_n_q)

    @property
    def mobility_u(self) -> MobilitySplit:
        return MobilitySplit(self.mob_p, self.mob_q)

    @property
    def mobility_n(self) -> MobilitySplit:
        if self.mob_n_p is None:
            return self.mobility_u
        return MobilitySplit(self.mob_n_p, self.mob_n_q)

    @property
    def prolif_h(self) -> MobilitySplit:
        return MobilitySplit(self.prolif_r, self.prolif_s)


def mobility(v, split: MobilitySplit):
    return split(v)


def mobility_up(v, split: MobilitySplit):
    return split.up(v)


def mobility_down(v, split: MobilitySplit):
    return split.down(v)


def proliferation(u, n, params: ModelParams):
    return params.prolif_h(u) * pos_part(n)


def mu_n_field(n_new, u_old_reg_proj, params: ModelParams) -> np.ndarray:
    """Nutrient potential ``n/delta - chi0 * Pi0(Pi1h u_old)``."""
    return np.asarray(n_new, dtype=float) / params.delta - params.chi0 * np.asarray(u_old_reg_proj, dtype=float)


def energy(u_reg, n, mesh: Mesh, params: ModelParams, n_space: str = "p0") -> float:
    """Free energy of a P1 tumor field and a P0 (or P1) nutrient field.

    Every term is integrated exactly: the gradient term through the
    stiffness matrix, F through the degree-4 rule, and the bilinear terms
    in closed form.
    """
    w = np.asarray(u_reg, dtype=float)
    n = np.asarray(n, dtype=float)
    grad = params.eps ** 2 / 2.0 * float(w @ (spaces.stiffness_matrix(mesh) @ w))
    pot = spaces.quadrature_integral(potential_F(spaces.quadrature_values(w, mesh)), mesh)
    if n_space == "p0":
        cross = spaces.integrate_p0_p1(n, w, mesh)
        quad = spaces.integrate_p0(n * n, mesh)
    elif n_space == "p1":
        M = spaces.mass_matrix(mesh)
        cross = float(n @ (M @ w))
        quad = float(n @ (M @ n))
    else:
        raise ValueError(f"n_space must be 'p0' or 'p1', got {n_space!r}")
    return grad + pot - params.chi0 * cross + quad / (2.0 * params.delta)
