"""Vectorized numpy versions of the compiled kernels in ``_kernels.pyx``.

Both modules expose the same functions with the same argument order; the
active implementation is chosen in ``tumordg.backend``.
"""
import numpy as np


def mobility_values(v, p, q, kpq):
    v = np.asarray(v, dtype=float)
    inside = (v >= 0.0) & (v <= 1.0)
    vc = np.where(inside, v, 0.0)
    return np.where(inside, kpq * vc ** p * (1.0 - vc) ** q, 0.0)


def mobility_derivatives(v, p, q, kpq):
    v = np.asarray(v, dtype=float)
    inside = (v > 0.0) & (v < 1.0)
    vc = np.where(inside, v, 0.5)
    left = p * vc ** (p - 1) * (1.0 - vc) ** q if p > 0 else 0.0
    right = q * vc ** p * (1.0 - vc) ** (q - 1) if q > 0 else 0.0
    return np.where(inside, kpq * (left - right), 0.0)


def upwind_edge_terms(jump, v_own, v_nb, weight, p, q, vstar, kpq, mstar):
    """Per-edge upwind flux and its semismooth partial derivatives.

    ``jump`` is ``mu_K - mu_L`` across each interior edge (K owner, L
    neighbor), ``weight`` is ``|e| / D_e``.  Returns ``(g, dg/djump,
    dg/dv_K, dg/dv_L)`` where

        g = w * (jump_+ * (M_up(v_K) + M_dn(v_L))_+ - jump_- * (M_up(v_L) + M_dn(v_K))_+).
    """
    jump = np.asarray(jump, dtype=float)
    mK = mobility_values(v_own, p, q, kpq)
    mL = mobility_values(v_nb, p, q, kpq)
    dK = mobility_derivatives(v_own, p, q, kpq)
    dL = mobility_derivatives(v_nb, p, q, kpq)
    upK = np.where(v_own <= vstar, mK, mstar)
    upL = np.where(v_nb <= vstar, mL, mstar)
    dnK = np.where(v_own <= vstar, 0.0, mK - mstar)
    dnL = np.where(v_nb <= vstar, 0.0, mL - mstar)
    dupK = np.where(v_own < vstar, dK, 0.0)
    dupL = np.where(v_nb < vstar, dL, 0.0)
    ddnK = np.where(v_own > vstar, dK, 0.0)
    ddnL = np.where(v_nb > vstar, dL, 0.0)

    a_raw = upK + dnL
    b_raw = upL + dnK
    a = np.maximum(a_raw, 0.0)
    b = np.maximum(b_raw, 0.0)
    jp = np.maximum(jump, 0.0)
    jm = np.maximum(-jump, 0.0)
    ha = (a_raw > 0.0).astype(float)
    hb = (b_raw > 0.0).astype(float)

    g = weight * (jp * a - jm * b)
    dg_dj = weight * ((jump > 0.0) * a + (jump < 0.0) * b)
    dg_dvK = weight * (jp * ha * dupK - jm * hb * ddnK)
    dg_dvL = weight * (jp * ha * ddnL - jm * hb * dupL)
    return g, dg_dj, dg_dvK, dg_dvL
