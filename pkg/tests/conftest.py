import numpy as np
import pytest

from tumordg import backend
from tumordg.mesh import generate_crisscross


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def unit_cell():
    return generate_crisscross((0.0, 1.0, 0.0, 1.0), 1, 1)


@pytest.fixture(scope="session")
def mesh4():
    return generate_crisscross((-10.0, 10.0, -10.0, 10.0), 4, 4)


@pytest.fixture(scope="session")
def mesh_rect():
    # non-square cells: barycenter orthogonality fails, metric operators still valid
    return generate_crisscross((0.0, 3.0, -1.0, 1.0), 5, 3)


@pytest.fixture(params=["python", "compiled"])
def kernel_backend(request):
    previous = backend.NAME
    try:
        backend.use(request.param)
    except ImportError:
        pytest.skip("compiled kernels not built")
    yield request.param
    backend.use(previous)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(mod.RESULTS, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
