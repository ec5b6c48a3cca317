"""P1 continuous Galerkin discretization of the same convex-splitting step.

All three unknowns are P1; the unknown vector is ``[u | n | mu_u]``.  Time
derivatives and the potential equation use the consistent mass matrix and
nonlinear coefficients are integrated with the degree-4 rule.  Nothing in
this discretization keeps u and n inside [0, 1]; it is the comparison
baseline that loses the bounds under strong cross-diffusion.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import sparse

from . import backend, spaces
from .dg_scheme import StepDiagnostics
from .mesh import Mesh
from .model import SPLIT_F_DNEW, MobilitySplit, ModelParams, energy, pos_part
from .newton import NewtonSettings, solve

LAM = spaces.QUAD_POINTS
WQ = spaces.QUAD_WEIGHTS


@dataclass
class FEState:
    u: np.ndarray
    n: np.ndarray
    mu_u: np.ndarray
    time: float = 0.0
    step: int = 0


@dataclass(frozen=True, eq=False)
class _Operators:
    M: sparse.csr_matrix
    A: sparse.csr_matrix
    J_mu_u: sparse.csr_matrix
    J_mu_n: sparse.csr_matrix
    grads: np.ndarray
    rows: np.ndarray
    cols: np.ndarray


@lru_cache(maxsize=8)
def _operators(mesh: Mesh, params: ModelParams) -> _Operators:
    M = spaces.mass_matrix(mesh)
    A = spaces.stiffness_matrix(mesh)
    t = mesh.triangles
    return _Operators(M, A, (-(params.eps ** 2) * A - SPLIT_F_DNEW * M).tocsr(), (params.chi0 * M).tocsr(),
                      spaces.basis_gradients(mesh), np.repeat(t, 3, axis=1).ravel(), np.tile(t, (1, 3)).ravel())


def _h(v, split: MobilitySplit):
    return backend.kernels.mobility_values(v, split.p, split.q, split.kpq)


def _dh(v, split: MobilitySplit):
    return backend.kernels.mobility_derivatives(v, split.p, split.q, split.kpq)


def _scatter_vec(local, mesh: Mesh):
    out = np.zeros(mesh.n_vertices)
    for k in range(3):
        np.add.at(out, mesh.triangles[:, k], local[:, k])
    return out


class _Step:
    def __init__(self, old: FEState, dt: float, mesh: Mesh, params: ModelParams):
        self.old, self.dt, self.mesh, self.params = old, dt, mesh, params
        self.ops = _operators(mesh, params)
        b = spaces.quadrature_values(old.u, mesh)
        self.explicit = spaces.quadrature_load(b ** 3 - 1.5 * b ** 2 - 0.25 * b, mesh)
        self.mu_n_shift = params.chi0 * old.u
        self.area = mesh.triangle_area

    def _split(self, x):
        nv = self.mesh.n_vertices
        return x[:nv], x[nv:2 * nv], x[2 * nv:]

    def _local(self, x):
        m, p = self.mesh, self.params
        u, n, mu = self._split(x)
        mu_n = n / p.delta - self.mu_n_shift
        t = m.triangles
        U, N, MU, MUN = (f[t] @ LAM.T for f in (u, n, mu, mu_n))
        g = self.ops.grads
        # s[K, i] = grad(field) . grad(phi_i)
        s_mu = np.einsum("kid,kd->ki", g, np.einsum("kjd,kj->kd", g, mu[t]))
        s_mun = np.einsum("kid,kd->ki", g, np.einsum("kjd,kj->kd", g, mu_n[t]))
        return u, n, mu, U, N, MU, MUN, s_mu, s_mun

    def residual(self, x):
        m, p, o, dt = self.mesh, self.params, self.ops, self.dt
        u, n, mu, U, N, MU, MUN, s_mu, s_mun = self._local(x)
        a = self.area
        mbar_u = _h(U, p.mobility_u) @ WQ
        mbar_n = _h(N, p.mobility_n) @ WQ
        d = MUN - MU
        reac_q = p.delta * p.p0 * _h(U, p.prolif_h) * pos_part(N) * pos_part(d)
        reac = _scatter_vec(a[:, None] * ((reac_q * WQ) @ LAM), m)
        flux_u = _scatter_vec((a * mbar_u)[:, None] * s_mu, m)
        flux_n = _scatter_vec((a * mbar_n)[:, None] * s_mun, m)
        r_u = o.M @ (u - self.old.u) + dt * (p.cu * flux_u - reac)
        r_n = o.M @ (n - self.old.n) + dt * (p.cn * flux_n + reac)
        r_mu = o.M @ mu + o.J_mu_u @ u - self.explicit + o.J_mu_n @ n
        return np.concatenate([r_u, r_n, r_mu])

    def _assemble(self, local):
        nv = self.mesh.n_vertices
        return sparse.coo_matrix((local.ravel(), (self.ops.rows, self.ops.cols)), shape=(nv, nv)).tocsr()

    def _weighted_mass(self, coef):
        # |K| sum_q w_q c_q lam_qi lam_qk
        local = np.einsum("kq,qi,qj->kij", coef * WQ, LAM, LAM) * self.area[:, None, None]
        return self._assemble(local)

    def jacobian(self, x):
        m, p, o, dt = self.mesh, self.params, self.ops, self.dt
        u, n, mu, U, N, MU, MUN, s_mu, s_mun = self._local(x)
        a = self.area
        g = o.grads
        stiff_local = np.einsum("kid,kjd->kij", g, g) * a[:, None, None]
        mbar_u = _h(U, p.mobility_u) @ WQ
        mbar_n = _h(N, p.mobility_n) @ WQ
        cu_k = (_dh(U, p.mobility_u) * WQ) @ LAM  # (nt, 3)
        cn_k = (_dh(N, p.mobility_n) * WQ) @ LAM

        Fu_mu = self._assemble(mbar_u[:, None, None] * stiff_local)
        Fu_u = self._assemble(a[:, None, None] * s_mu[:, :, None] * cu_k[:, None, :])
        Fn_n = self._assemble(mbar_n[:, None, None] * stiff_local / p.delta
                              + a[:, None, None] * s_mun[:, :, None] * cn_k[:, None, :])

        d = MUN - MU
        c = p.delta * p.p0
        hq = _h(U, p.prolif_h)
        Np = pos_part(N)
        Hd = (d > 0.0).astype(float)
        R_u = self._weighted_mass(c * _dh(U, p.prolif_h) * Np * pos_part(d))
        R_n = self._weighted_mass(c * (hq * (N > 0.0) * pos_part(d) + hq * Np * Hd / p.delta))
        R_mu = self._weighted_mass(-c * hq * Np * Hd)

        Juu = o.M + dt * (p.cu * Fu_u - R_u)
        Jun = -dt * R_n
        Jumu = dt * (p.cu * Fu_mu - R_mu)
        Jnu = dt * R_u
        Jnn = o.M + dt * (p.cn * Fn_n + R_n)
        Jnmu = dt * R_mu
        return sparse.bmat([[Juu, Jun, Jumu],
                            [Jnu, Jnn, Jnmu],
                            [o.J_mu_u, o.J_mu_n, o.M]], format="csr")


def _as_vector(guess, mesh):
    x = np.concatenate([np.ravel(g) for g in guess]) if isinstance(guess, tuple) else np.asarray(guess, float)
    if x.shape != (3 * mesh.n_vertices,):
        raise ValueError(f"guess has {x.size} entries, expected {3 * mesh.n_vertices}")
    if not np.all(np.isfinite(x)):
        raise ValueError("guess contains non-finite values")
    return x


def fe_residual(state_old: FEState, guess, dt: float, mesh: Mesh, params: ModelParams) -> np.ndarray:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return _Step(state_old, dt, mesh, params).residual(_as_vector(guess, mesh))


def fe_jacobian(state_old: FEState, guess, dt: float, mesh: Mesh, params: ModelParams) -> sparse.csr_matrix:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    return _Step(state_old, dt, mesh, params).jacobian(_as_vector(guess, mesh))


def fe_initial_mu_u(u0, n0, mesh: Mesh, params: ModelParams) -> np.ndarray:
    from scipy.sparse.linalg import spsolve

    o = _operators(mesh, params)
    u0 = np.asarray(u0, dtype=float)
    b = spaces.quadrature_values(u0, mesh)
    load = (-(o.J_mu_u @ u0) + spaces.quadrature_load(b ** 3 - 1.5 * b ** 2 - 0.25 * b, mesh)
            - o.J_mu_n @ np.asarray(n0, dtype=float))
    return spsolve(o.M.tocsc(), load)


def fe_initial_state(u0, n0, mesh: Mesh, params: ModelParams) -> FEState:
    u0 = np.asarray(u0, dtype=float)
    n0 = np.asarray(n0, dtype=float)
    return FEState(u0, n0, fe_initial_mu_u(u0, n0, mesh, params))


def fe_diagnostics(state: FEState, mesh: Mesh, params: ModelParams, **kw) -> StepDiagnostics:
    mass_u = spaces.integrate_p1(state.u, mesh)
    mass_n = spaces.integrate_p1(state.n, mesh)
    umin, umax = float(state.u.min()), float(state.u.max())
    return StepDiagnostics(
        step=state.step, time=state.time, mass_u=mass_u, mass_n=mass_n, mass_total=mass_u + mass_n,
        min_u=umin, max_u=umax, min_n=float(state.n.min()), max_n=float(state.n.max()),
        min_ureg=umin, max_ureg=umax,
        energy=energy(state.u, state.n, mesh, params, n_space="p1"), **kw)


def fe_step(state_old: FEState, dt: float, mesh: Mesh, params: ModelParams,
            newton: NewtonSettings = NewtonSettings()):
    """Advance one step.  Bounds are recorded in the diagnostics, never enforced."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    stepper = _Step(state_old, dt, mesh, params)
    x0 = np.concatenate([state_old.u, state_old.n, state_old.mu_u])
    result = solve(stepper.residual, stepper.jacobian, x0, newton)
    u, n, mu = stepper._split(result.x)
    new = FEState(u.copy(), n.copy(), mu.copy(), state_old.time + dt, state_old.step + 1)
    e_old = energy(state_old.u, state_old.n, mesh, params, n_space="p1")
    diag = fe_diagnostics(new, mesh, params, newton_iters=result.iterations, residual=result.residual, dt=dt)
    diag.energy_decrement = diag.energy - e_old
    return new, diag
