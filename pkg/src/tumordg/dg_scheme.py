"""Upwind DG time step for the coupled (u, mu_u, n) system.

u and n are P0, mu_u is P1.  The nutrient potential is eliminated,

    mu_n = n / delta - chi0 * Pi0(Pi1h u_old),

and the unknown vector is ordered ``[u | n | mu_u]``.  The u- and n-rows
are the element equations multiplied by ``dt``; the mu_u-rows use the
lumped mass on the left-hand side.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import sparse

from . import spaces, upwind
from .mesh import Mesh
from .model import SPLIT_F_DNEW, ModelParams, energy, pos_part
from .newton import NewtonDiverged, NewtonSettings, solve


class BoundsViolated(RuntimeError):
    pass


class EnergyIncreased(RuntimeError):
    pass


class MassDrift(RuntimeError):
    pass


@dataclass
class SchemeState:
    u: np.ndarray
    n: np.ndarray
    mu_u: np.ndarray
    mu_n: np.ndarray
    u_reg: np.ndarray
    u_reg_mean: np.ndarray
    time: float = 0.0
    step: int = 0

    @classmethod
    def build(cls, u, n, mu_u, mesh: Mesh, params: ModelParams, mu_n=None, time=0.0, step=0):
        u = np.asarray(u, dtype=float)
        n = np.asarray(n, dtype=float)
        u_reg = spaces.regularize_p1(u, mesh)
        u_reg_mean = spaces.project_p0_of_p1(u_reg, mesh)
        if mu_n is None:
            mu_n = n / params.delta - params.chi0 * u_reg_mean
        return cls(u, n, np.asarray(mu_u, dtype=float), np.asarray(mu_n, dtype=float),
                   u_reg, u_reg_mean, float(time), int(step))


@dataclass
class StepDiagnostics:
    step: int
    time: float
    mass_u: float
    mass_n: float
    mass_total: float
    min_u: float
    max_u: float
    min_n: float
    max_n: float
    min_ureg: float
    max_ureg: float
    energy: float
    energy_decrement: float = 0.0
    newton_iters: int = 0
    residual: float = 0.0
    dt: float = 0.0
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class _Operators:
    area: np.ndarray
    lumped: np.ndarray
    R: sparse.csr_matrix
    G: sparse.csr_matrix
    B: sparse.csr_matrix
    A: sparse.csr_matrix
    J_mu_u: sparse.csr_matrix
    J_mu_n: sparse.csr_matrix
    J_mu_mu: sparse.csr_matrix


@lru_cache(maxsize=8)
def _operators(mesh: Mesh, params: ModelParams) -> _Operators:
    R = spaces.regularization_matrix(mesh)
    A = spaces.stiffness_matrix(mesh)
    Mc = spaces.mass_matrix(mesh)
    B = spaces.p0_load_matrix(mesh)
    lumped = spaces.lumped_mass_diagonal(mesh)
    J_mu_u = (-(params.eps ** 2 * A + SPLIT_F_DNEW * Mc) @ R).tocsr()
    return _Operators(mesh.triangle_area, lumped, R, spaces.mean_matrix(mesh), B, A,
                      J_mu_u, (params.chi0 * B).tocsr(), sparse.diags(lumped).tocsr())


def _explicit_load(u_reg_old, mesh: Mesh) -> np.ndarray:
    """``int F_e'(Pi1h u_old) phi_j``; exact with the degree-4 rule."""
    b = spaces.quadrature_values(u_reg_old, mesh)
    return spaces.quadrature_load(b ** 3 - 1.5 * b ** 2 - 0.25 * b, mesh)


def split(x, mesh: Mesh):
    nt = mesh.n_triangles
    return x[:nt], x[nt:2 * nt], x[2 * nt:]


def _check_inputs(state_old: SchemeState, guess, dt, mesh: Mesh):
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    nt, nv = mesh.n_triangles, mesh.n_vertices
    if state_old.u.shape != (nt,) or state_old.n.shape != (nt,):
        raise ValueError("old state does not match the mesh")
    x = np.concatenate([np.ravel(g) for g in guess]) if isinstance(guess, tuple) else np.asarray(guess, float)
    if x.shape != (2 * nt + nv,):
        raise ValueError(f"guess has {x.size} entries, expected {2 * nt + nv}")
    if not np.all(np.isfinite(x)):
        raise ValueError("guess contains non-finite values")
    return x


class _Step:
    """Residual/Jacobian closure for one time step."""

    def __init__(self, state_old: SchemeState, dt: float, mesh: Mesh, params: ModelParams):
        self.old, self.dt, self.mesh, self.params = state_old, dt, mesh, params
        self.ops = _operators(mesh, params)
        self.explicit = _explicit_load(state_old.u_reg, mesh)
        self.mu_n_shift = params.chi0 * state_old.u_reg_mean

    def _pieces(self, x):
        m, p = self.mesh, self.params
        u, n, mu = split(x, m)
        pm = self.ops.G @ mu
        mu_n = n / p.delta - self.mu_n_shift
        d = mu_n - pm
        h = p.prolif_h(u)
        npos = pos_part(n)
        return u, n, mu, pm, mu_n, d, h, npos

    def residual(self, x) -> np.ndarray:
        m, p, o, dt = self.mesh, self.params, self.ops, self.dt
        u, n, mu, pm, mu_n, d, h, npos = self._pieces(x)
        reac = p.delta * p.p0 * o.area * h * npos * pos_part(d)
        a_u = upwind.upwind_residual(pm, u, m, p.mobility_u)
        a_n = upwind.upwind_residual(mu_n, n, m, p.mobility_n)
        r_u = o.area * (u - self.old.u) + dt * (p.cu * a_u - reac)
        r_n = o.area * (n - self.old.n) + dt * (p.cn * a_n + reac)
        # J_mu_u = -(eps^2 A + 3/4 M) R holds the u-dependence exactly
        r_mu = o.lumped * mu + o.J_mu_u @ u - self.explicit + o.B @ (p.chi0 * n)
        return np.concatenate([r_u, r_n, r_mu])

    def jacobian(self, x) -> sparse.csr_matrix:
        m, p, o, dt = self.mesh, self.params, self.ops, self.dt
        u, n, mu, pm, mu_n, d, h, npos = self._pieces(x)
        _, Ju_mu, Ju_u = upwind.upwind_jacobian_blocks(pm, u, m, p.mobility_u)
        _, Jn_mu, Jn_n = upwind.upwind_jacobian_blocks(mu_n, n, m, p.mobility_n)
        c = p.delta * p.p0 * o.area
        dpos = pos_part(d)
        hd = (d > 0.0).astype(float)
        dreac_du = c * p.prolif_h.derivative(u) * npos * dpos
        dreac_dn = c * (h * (n > 0.0) * dpos + h * npos * hd / p.delta)
        dreac_dmu_diag = -c * h * npos * hd  # times G

        diag = sparse.diags
        Juu = diag(o.area + dt * (-dreac_du)) + dt * p.cu * Ju_u
        Jun = diag(-dt * dreac_dn)
        Jumu = dt * (p.cu * (Ju_mu @ o.G) - diag(dreac_dmu_diag) @ o.G)
        Jnu = diag(dt * dreac_du)
        Jnn = diag(o.area + dt * dreac_dn) + dt * p.cn * (Jn_mu / p.delta + Jn_n)
        Jnmu = dt * (diag(dreac_dmu_diag) @ o.G)
        return sparse.bmat([[Juu, Jun, Jumu],
                            [Jnu, Jnn, Jnmu],
                            [o.J_mu_u, o.J_mu_n, o.J_mu_mu]], format="csr")


def residual(state_old: SchemeState, guess, dt: float, mesh: Mesh, params: ModelParams) -> np.ndarray:
    x = _check_inputs(state_old, guess, dt, mesh)
    return _Step(state_old, dt, mesh, params).residual(x)


def jacobian(state_old: SchemeState, guess, dt: float, mesh: Mesh, params: ModelParams) -> sparse.csr_matrix:
    x = _check_inputs(state_old, guess, dt, mesh)
    return _Step(state_old, dt, mesh, params).jacobian(x)


def initial_mu_u(u0, n0, mesh: Mesh, params: ModelParams) -> np.ndarray:
    """Lumped solve of the potential equation at ``(u0, n0)`` with ``f(w, w)``."""
    o = _operators(mesh, params)
    w = o.R @ np.asarray(u0, dtype=float)
    load = (params.eps ** 2 * (o.A @ w) + SPLIT_F_DNEW * (spaces.mass_matrix(mesh) @ w)
            + _explicit_load(w, mesh) - params.chi0 * (o.B @ np.asarray(n0, dtype=float)))
    return load / o.lumped


def initial_state(u0, n0, mesh: Mesh, params: ModelParams) -> SchemeState:
    return SchemeState.build(u0, n0, initial_mu_u(u0, n0, mesh, params), mesh, params)


def diagnostics(state: SchemeState, mesh: Mesh, params: ModelParams, **kw) -> StepDiagnostics:
    mass_u = spaces.integrate_p0(state.u, mesh)
    mass_n = spaces.integrate_p0(state.n, mesh)
    return StepDiagnostics(
        step=state.step, time=state.time, mass_u=mass_u, mass_n=mass_n, mass_total=mass_u + mass_n,
        min_u=float(state.u.min()), max_u=float(state.u.max()),
        min_n=float(state.n.min()), max_n=float(state.n.max()),
        min_ureg=float(state.u_reg.min()), max_ureg=float(state.u_reg.max()),
        energy=energy(state.u_reg, state.n, mesh, params), **kw)


def energy_law(old: SchemeState, new: SchemeState, dt: float, mesh: Mesh, params: ModelParams) -> dict:
    """All terms of the discrete energy inequality, multiplied by ``dt``.

    ``slack = -(E_new - E_old + dissipation)`` must be nonnegative up to
    rounding and Newton error.
    """
    p = params
    pm = spaces.project_p0_of_p1(new.mu_u, mesh)
    e_old = energy(old.u_reg, old.n, mesh, p)
    e_new = energy(new.u_reg, new.n, mesh, p)
    diss_u = p.cu * upwind.upwind_form(pm, new.u, pm, mesh, p.mobility_u)
    diss_n = p.cn * upwind.upwind_form(new.mu_n, new.n, new.mu_n, mesh, p.mobility_n)
    d = new.mu_n - pm
    reac = p.delta * p.p0 * spaces.integrate_p0(p.prolif_h(new.u) * pos_part(new.n) * pos_part(d) ** 2, mesh)
    dw = new.u_reg - old.u_reg
    grad_inc = p.eps ** 2 / 2.0 * float(dw @ (spaces.stiffness_matrix(mesh) @ dw))
    dn = new.n - old.n
    n_inc = spaces.integrate_p0(dn * dn, mesh) / (2.0 * p.delta)
    lhs = (e_new - e_old) + dt * (diss_u + diss_n + reac) + grad_inc + n_inc
    return dict(energy_old=e_old, energy_new=e_new, diss_u=diss_u, diss_n=diss_n, reaction=reac,
                grad_increment=grad_inc, n_increment=n_inc, lhs=lhs, slack=-lhs)


def step(state_old: SchemeState, dt: float, mesh: Mesh, params: ModelParams,
         newton: NewtonSettings = NewtonSettings(), check: bool = True):
    """Advance one time step; returns ``(new_state, diagnostics)``.

    With ``check`` the conservation, bound and energy properties are
    verified after convergence and a violation raises (it indicates an
    implementation error, not a model property).
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    stepper = _Step(state_old, dt, mesh, params)
    x0 = np.concatenate([state_old.u, state_old.n, state_old.mu_u])
    result = solve(stepper.residual, stepper.jacobian, x0, newton)
    u, n, mu = split(result.x, mesh)
    new = SchemeState.build(u, n, mu, mesh, params, mu_n=n / params.delta - stepper.mu_n_shift,
                            time=state_old.time + dt, step=state_old.step + 1)
    e_old = energy(state_old.u_reg, state_old.n, mesh, params)
    diag = diagnostics(new, mesh, params, newton_iters=result.iterations, residual=result.residual, dt=dt)
    diag.energy_decrement = diag.energy - e_old
    if check:
        tol = 10.0 * newton.abs_tol
        mass_old = spaces.integrate_p0(state_old.u + state_old.n, mesh)
        drift = abs(diag.mass_total - mass_old)
        scale = max(1.0, abs(mass_old))
        if drift > tol * scale:
            raise MassDrift(f"mass drift {drift:.3e} exceeds {tol * scale:.1e}")
        lo = min(diag.min_u, diag.min_n)
        hi = max(diag.max_u, diag.max_n)
        if lo < -tol or hi > 1.0 + tol:
            raise BoundsViolated(f"values left [0, 1]: min {lo:.3e}, max {hi:.3e}")
        if diag.energy_decrement > tol * max(1.0, abs(e_old)):
            raise EnergyIncreased(f"energy increased by {diag.energy_decrement:.3e}")
    return new, diag


__all__ = ["SchemeState", "StepDiagnostics", "BoundsViolated", "EnergyIncreased", "MassDrift",
           "NewtonDiverged",
           "residual", "jacobian", "step", "initial_mu_u", "initial_state", "diagnostics", "energy_law"]
