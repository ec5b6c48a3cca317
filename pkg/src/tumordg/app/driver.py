"""Time-stepping driver: mesh and IC setup, step-size fallback and outputs."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import dg_scheme, fe_scheme, spaces
from ..mesh import Mesh, check_admissibility, generate_crisscross, read_mesh
from ..newton import NewtonDiverged
from .config import RunConfig
from .ic import sample_expressions, sample_ic
from .io import DiagnosticsWriter, write_vtk

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ABORT = 3


@dataclass
class RunResult:
    status: int
    mesh: Mesh
    state: object
    diagnostics: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    message: str = ""


class _DG:
    at = "barycenters"

    def __init__(self, mesh, config):
        self.mesh, self.params, self.newton = mesh, config.model, config.newton

    def initial(self, u0, n0):
        return dg_scheme.initial_state(u0, n0, self.mesh, self.params)

    def diagnostics(self, state):
        return dg_scheme.diagnostics(state, self.mesh, self.params)

    def step(self, state, dt):
        return dg_scheme.step(state, dt, self.mesh, self.params, self.newton, check=False)

    def fields(self, s):
        n_reg = spaces.regularize_p1(s.n, self.mesh)
        return dict(u=s.u, n=s.n, mu_n=s.mu_n), dict(u_reg=s.u_reg, mu_u=s.mu_u, n_reg=n_reg)


class _FE:
    at = "vertices"

    def __init__(self, mesh, config):
        self.mesh, self.params, self.newton = mesh, config.model, config.newton

    def initial(self, u0, n0):
        return fe_scheme.fe_initial_state(u0, n0, self.mesh, self.params)

    def diagnostics(self, state):
        return fe_scheme.fe_diagnostics(state, self.mesh, self.params)

    def step(self, state, dt):
        return fe_scheme.fe_step(state, dt, self.mesh, self.params, self.newton)

    def fields(self, s):
        m, p = self.mesh, self.params
        mu_n = s.n / p.delta - p.chi0 * s.u
        cells = {name: spaces.project_p0_of_p1(v, m) for name, v in (("u", s.u), ("n", s.n), ("mu_n", mu_n))}
        return cells, dict(u_reg=s.u, mu_u=s.mu_u, n_reg=s.n)


def build_mesh(config: RunConfig) -> Mesh:
    if config.mesh_file:
        mesh = read_mesh(config.mesh_file)
    else:
        mesh = generate_crisscross(config.domain, config.nx, config.ny)
    if config.scheme == "dg":
        report = check_admissibility(mesh)
        if not report.passed:
            log.warning("mesh is not barycenter-orthogonal; the upwind gradient is inconsistent: %s",
                        report.summary())
    return mesh


def initial_fields(config: RunConfig, mesh: Mesh):
    at = _DG.at if config.scheme == "dg" else _FE.at
    if config.ic is not None:
        return sample_ic(config.ic, mesh, config.model, at=at)
    return sample_expressions(config.u0, config.n0, mesh, config.model, at=at)


def run(config: RunConfig, output_dir=None, max_steps: int | None = None, write: bool = True,
        mesh: Mesh | None = None, callback=None) -> RunResult:
    """Integrate ``config`` to ``t_end``; ``result.status`` is the process exit code.

    A step whose Newton iteration fails is retried with half the step size,
    at most ``config.max_halvings`` times in a row; each success afterwards
    doubles the step again up to the configured value.  Exhausting the
    halvings aborts the run with :data:`EXIT_ABORT`.  ``callback(state,
    diag)`` is called after every accepted step.
    """
    mesh = build_mesh(config) if mesh is None else mesh
    scheme = (_DG if config.scheme == "dg" else _FE)(mesh, config)
    out = Path(output_dir if output_dir is not None else config.output_dir)
    if config.seed is not None:
        log.info("seed %d recorded; the model has no random component", config.seed)

    state = scheme.initial(*initial_fields(config, mesh))
    diag = scheme.diagnostics(state)
    result = RunResult(EXIT_OK, mesh, state, [diag])
    writer = None
    if write:
        out.mkdir(parents=True, exist_ok=True)
        writer = DiagnosticsWriter(out / "diagnostics.csv")
        writer.write(diag)

    def snapshot(s):
        if write:
            path = out / f"snapshot_{s.step:06d}.vtk"
            cells, points = scheme.fields(s)
            write_vtk(path, mesh, cells, points, title=f"{config.scheme} step {s.step} t={s.time!r}")
            result.snapshots.append(path)

    snapshot(state)
    t_end, dt_nom = config.t_end, config.dt
    level = 0
    accepted = 0
    try:
        while t_end - state.time > 1e-9 * dt_nom and (max_steps is None or accepted < max_steps):
            dt = min(dt_nom / 2 ** level, t_end - state.time)
            try:
                new, diag = scheme.step(state, dt)
            except NewtonDiverged as exc:
                level += 1
                if level > config.max_halvings:
                    result.status = EXIT_ABORT
                    result.message = (f"step {state.step + 1}: Newton failed at dt={dt:.3e} after "
                                      f"{config.max_halvings} halvings: {exc}")
                    log.error(result.message)
                    break
                log.warning("step %d: %s; retrying with dt=%.3e", state.step + 1, exc, dt_nom / 2 ** level)
                continue
            state = new
            accepted += 1
            level = max(level - 1, 0)
            result.diagnostics.append(diag)
            if writer is not None:
                writer.write(diag)
            if not (np.isfinite(diag.energy) and np.isfinite(diag.mass_total)):
                result.status = EXIT_ABORT
                result.message = f"step {state.step}: non-finite diagnostics"
                log.error(result.message)
                break
            if state.step % config.cadence == 0:
                snapshot(state)
            if callback is not None:
                callback(state, diag)
        else:
            if state.step % config.cadence != 0:
                snapshot(state)
    finally:
        if writer is not None:
            writer.close()
    result.state = state
    if result.status == EXIT_OK:
        log.info("finished %d steps at t=%g", accepted, state.time)
    return result
