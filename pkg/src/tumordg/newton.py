"""Damped semismooth Newton iteration with a direct sparse solver."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse.linalg import splu

log = logging.getLogger(__name__)

# The Jacobians have a nonzero, usually dominant diagonal: a symmetric
# minimum-degree ordering with diagonal-preferring threshold pivoting gives
# 2-5x less fill than column ordering.  Without the symmetric mode the same
# ordering can collapse under off-diagonal pivoting.
LU_OPTIONS = dict(permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.1, options=dict(SymmetricMode=True))


class NewtonDiverged(RuntimeError):
    """Residual not reduced below tolerance within the iteration budget."""

    def __init__(self, message, residual=float("nan"), iterations=0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class NewtonSettings:
    abs_tol: float = 1e-11
    rel_tol: float = 1e-14
    max_iters: int = 30
    damping: float = 0.5
    min_step: float = 2.0 ** -10

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("Newton tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not (0 < self.damping < 1 and 0 < self.min_step <= 1):
            raise ValueError("damping must lie in (0, 1) and min_step in (0, 1]")


@dataclass
class NewtonResult:
    x: np.ndarray
    iterations: int
    residual: float


def _norm(r):
    return float(np.max(np.abs(r))) if r.size else 0.0


def solve(residual, jacobian, x0, settings: NewtonSettings = NewtonSettings()) -> NewtonResult:
    """Find ``x`` with ``residual(x) ~ 0``; ∞-norm convergence test.

    At least one Newton update is always applied so that a warm start that
    already satisfies the tolerance is still polished once.
    """
    x = np.array(x0, dtype=float)
    r = residual(x)
    rnorm = _norm(r)
    if not np.isfinite(rnorm):
        raise NewtonDiverged("non-finite residual at the initial guess", rnorm, 0)
    tol = max(settings.abs_tol, settings.rel_tol * rnorm)
    for it in range(1, settings.max_iters + 1):
        J = jacobian(x)
        try:
            dx = splu(J.tocsc(), **LU_OPTIONS).solve(-r)
        except RuntimeError as exc:  # singular factor
            raise NewtonDiverged(f"linear solve failed: {exc}", rnorm, it) from exc
        if not np.all(np.isfinite(dx)):
            raise NewtonDiverged("non-finite Newton update", rnorm, it)

        step = 1.0
        while True:
            x_try = x + step * dx
            r_try = residual(x_try)
            n_try = _norm(r_try)
            if n_try < rnorm or n_try <= tol:
                break
            if step * settings.damping < settings.min_step:
                # no decrease along the damped path: take the full step
                x_try = x + dx
                r_try = residual(x_try)
                n_try = _norm(r_try)
                break
            step *= settings.damping
        if not np.isfinite(n_try):
            raise NewtonDiverged("non-finite residual", n_try, it)
        x, r, rnorm = x_try, r_try, n_try
        log.debug("newton it=%d step=%.3g |r|=%.3e", it, step, rnorm)
        if rnorm <= tol:
            return NewtonResult(x, it, rnorm)
    raise NewtonDiverged(f"no convergence in {settings.max_iters} iterations (|r|={rnorm:.3e})",
                         rnorm, settings.max_iters)
