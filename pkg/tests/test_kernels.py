import numpy as np
import pytest

from tumordg import _kernels_py, backend
from tumordg.model import MobilitySplit

compiled = pytest.importorskip("tumordg._kernels")


@pytest.mark.parametrize("p,q", [(1, 1), (5, 1), (1, 3), (2, 7)])
def test_compiled_matches_python(rng, p, q):
    s = MobilitySplit(p, q)
    v = rng.uniform(-0.3, 1.3, 4000)
    for name in ("mobility_values", "mobility_derivatives"):
        np.testing.assert_allclose(getattr(compiled, name)(v, p, q, s.kpq), getattr(_kernels_py, name)(v, p, q, s.kpq),
                                   rtol=1e-12, atol=1e-14)
    jump = rng.normal(size=4000)
    jump[::7] = 0.0
    vk, vl = rng.uniform(-0.2, 1.2, (2, 4000))
    w = rng.uniform(0.5, 2.0, 4000)
    a = compiled.upwind_edge_terms(jump, vk, vl, w, p, q, s.vstar, s.kpq, s.mstar)
    b = _kernels_py.upwind_edge_terms(jump, vk, vl, w, p, q, s.vstar, s.kpq, s.mstar)
    for x, y in zip(a, b):
        # integer powers vs numpy pow differ by a few ulps
        np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-14)


def test_values_match_split(kernel_backend):
    s = MobilitySplit(5, 1)
    v = np.linspace(-0.5, 1.5, 201)
    np.testing.assert_allclose(backend.kernels.mobility_values(v, 5, 1, s.kpq), s(v), rtol=1e-14, atol=1e-16)
    np.testing.assert_allclose(backend.kernels.mobility_derivatives(v, 5, 1, s.kpq), s.derivative(v),
                               rtol=1e-13, atol=1e-13)


def test_backend_switch():
    previous = backend.NAME
    backend.use("python")
    assert backend.kernels is _kernels_py
    backend.use("compiled")
    assert backend.NAME == "compiled"
    with pytest.raises(ValueError):
        backend.use("fortran")
    backend.use(previous)


def test_env_var_forces_fallback(monkeypatch):
    import importlib

    monkeypatch.setenv("TUMORDG_PURE_PYTHON", "1")
    mod = importlib.reload(backend)
    try:
        assert mod.NAME == "python"
    finally:
        monkeypatch.delenv("TUMORDG_PURE_PYTHON")
        importlib.reload(backend)
