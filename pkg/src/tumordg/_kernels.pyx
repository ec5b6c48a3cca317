# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled edge and pointwise kernels; see ``_kernels_py`` for the reference."""
import numpy as np


cdef inline double _ipow(double x, int k) nogil:
    cdef double r = 1.0
    cdef int i
    for i in range(k):
        r *= x
    return r


cdef inline double _h(double v, int p, int q, double kpq) nogil:
    if v < 0.0 or v > 1.0:
        return 0.0
    return kpq * _ipow(v, p) * _ipow(1.0 - v, q)


cdef inline double _dh(double v, int p, int q, double kpq) nogil:
    cdef double left = 0.0, right = 0.0
    if v <= 0.0 or v >= 1.0:
        return 0.0
    if p > 0:
        left = p * _ipow(v, p - 1) * _ipow(1.0 - v, q)
    if q > 0:
        right = q * _ipow(v, p) * _ipow(1.0 - v, q - 1)
    return kpq * (left - right)


def mobility_values(v, int p, int q, double kpq):
    cdef double[::1] vv = np.ascontiguousarray(v, dtype=np.float64).ravel()
    out = np.empty(vv.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(vv.shape[0]):
            o[i] = _h(vv[i], p, q, kpq)
    return out.reshape(np.shape(v))


def mobility_derivatives(v, int p, int q, double kpq):
    cdef double[::1] vv = np.ascontiguousarray(v, dtype=np.float64).ravel()
    out = np.empty(vv.shape[0])
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(vv.shape[0]):
            o[i] = _dh(vv[i], p, q, kpq)
    return out.reshape(np.shape(v))


def upwind_edge_terms(jump, v_own, v_nb, weight, int p, int q,
                      double vstar, double kpq, double mstar):
    cdef double[::1] j = np.ascontiguousarray(jump, dtype=np.float64)
    cdef double[::1] vk = np.ascontiguousarray(v_own, dtype=np.float64)
    cdef double[::1] vl = np.ascontiguousarray(v_nb, dtype=np.float64)
    cdef double[::1] w = np.ascontiguousarray(weight, dtype=np.float64)
    cdef Py_ssize_t n = j.shape[0], e
    g_arr = np.empty(n)
    dj_arr = np.empty(n)
    dk_arr = np.empty(n)
    dl_arr = np.empty(n)
    cdef double[::1] g = g_arr, dj = dj_arr, dk = dk_arr, dl = dl_arr
    cdef double mK, mL, dK, dL, upK, upL, dnK, dnL, dupK, dupL, ddnK, ddnL
    cdef double a_raw, b_raw, a, b, jp, jm, ha, hb, x
    with nogil:
        for e in range(n):
            mK = _h(vk[e], p, q, kpq)
            mL = _h(vl[e], p, q, kpq)
            dK = _dh(vk[e], p, q, kpq)
            dL = _dh(vl[e], p, q, kpq)
            if vk[e] <= vstar:
                upK = mK
                dnK = 0.0
            else:
                upK = mstar
                dnK = mK - mstar
            if vl[e] <= vstar:
                upL = mL
                dnL = 0.0
            else:
                upL = mstar
                dnL = mL - mstar
            dupK = dK if vk[e] < vstar else 0.0
            dupL = dL if vl[e] < vstar else 0.0
            ddnK = dK if vk[e] > vstar else 0.0
            ddnL = dL if vl[e] > vstar else 0.0

            a_raw = upK + dnL
            b_raw = upL + dnK
            a = a_raw if a_raw > 0.0 else 0.0
            b = b_raw if b_raw > 0.0 else 0.0
            ha = 1.0 if a_raw > 0.0 else 0.0
            hb = 1.0 if b_raw > 0.0 else 0.0
            x = j[e]
            jp = x if x > 0.0 else 0.0
            jm = -x if x < 0.0 else 0.0

            g[e] = w[e] * (jp * a - jm * b)
            if x > 0.0:
                dj[e] = w[e] * a
            elif x < 0.0:
                dj[e] = w[e] * b
            else:
                dj[e] = 0.0
            dk[e] = w[e] * (jp * ha * dupK - jm * hb * ddnK)
            dl[e] = w[e] * (jp * ha * ddnL - jm * hb * dupL)
    return g_arr, dj_arr, dk_arr, dl_arr
