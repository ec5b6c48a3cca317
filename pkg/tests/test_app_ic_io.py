import numpy as np
import pytest

from tumordg.app import ic
from tumordg.app.analysis import count_components
from tumordg.app.io import CSV_COLUMNS, DiagnosticsWriter, read_diagnostics, read_vtk_fields, write_vtk
from tumordg.dg_scheme import StepDiagnostics
from tumordg.mesh import Mesh, generate_crisscross
from tumordg.model import ModelParams

P = ModelParams()


def test_three_tumors_far_field_and_nutrient():
    u, n = ic.IC_PRESETS["three_tumors"].evaluate(np.array([-9.0]), np.array([9.0]), 0.1)
    assert u[0] == pytest.approx(0.0, abs=1e-12)
    assert n[0] == pytest.approx(1.0, abs=1e-12)
    x = np.linspace(-10, 10, 51)
    u, n = ic.IC_PRESETS["three_tumors"].evaluate(x, -x, 0.1)
    np.testing.assert_allclose(n, 1.0 - u, atol=1e-15)


def test_three_tumors_centers():
    u, _ = ic.IC_PRESETS["three_tumors"].evaluate(np.array([2.0, 3.0, -1.5]), np.array([2.0, -5.0, -1.5]), 0.1)
    # 1 - tanh(1/(sqrt2*0.1)) ~ 1.4e-6 for the unit-radius discs
    np.testing.assert_allclose(u, 1.0, atol=2e-6)


def test_irregular_growth_center():
    u, n = ic.IC_PRESETS["irregular_growth"].evaluate(np.array([0.0]), np.array([0.0]), 0.1)
    assert u[0] == pytest.approx(1.0, abs=1e-10)
    # far from all bumps: n = 1/2 + 0
    u, n = ic.IC_PRESETS["irregular_growth"].evaluate(np.array([9.0]), np.array([9.0]), 0.1)
    assert u[0] == pytest.approx(0.0, abs=1e-12) and n[0] == pytest.approx(0.5, abs=1e-12)


def test_sample_ic_barycenters_and_vertices(mesh4):
    u, n = ic.sample_ic("three_tumors", mesh4, P)
    assert u.shape == (mesh4.n_triangles,)
    ref, _ = ic.IC_PRESETS["three_tumors"].evaluate(mesh4.barycenters[:, 0], mesh4.barycenters[:, 1], P.eps)
    np.testing.assert_array_equal(u, ref)
    u, n = ic.sample_ic("irregular_growth", mesh4, P, at="vertices")
    assert u.shape == (mesh4.n_vertices,)
    for name in ic.IC_PRESETS:
        u, n = ic.sample_ic(name, mesh4, P)
        assert u.min() >= 0 and u.max() <= 1 and n.min() >= 0 and n.max() <= 1
    with pytest.raises(ValueError):
        ic.sample_ic("nothing", mesh4, P)
    with pytest.raises(ValueError):
        ic.sample_ic("zero", mesh4, P, at="edges")


def test_expressions_clamped(mesh4):
    u, n = ic.sample_expressions("x / 5", "1 - u0", mesh4, P)
    assert u.min() == 0.0 and u.max() == 1.0
    np.testing.assert_allclose(n, 1 - u)
    with pytest.raises(NameError):
        ic.sample_expressions("__import__('os')", "0", mesh4, P)


def test_count_components():
    m = generate_crisscross((0, 10, 0, 10), 10, 10)
    x, y = m.vertices.T
    blobs = (np.hypot(x - 2, y - 2) < 1.2) | (np.hypot(x - 8, y - 7) < 1.5)
    assert count_components(blobs.astype(float), m) == 2
    assert count_components(np.zeros(m.n_vertices), m) == 0
    assert count_components(np.ones(m.n_vertices), m) == 1
    with pytest.raises(ValueError):
        count_components(np.zeros(3), m)


def _diag(step):
    return StepDiagnostics(step=step, time=0.1 * step, mass_u=1 / 3, mass_n=2.0, mass_total=1 / 3 + 2.0,
                           min_u=0.0, max_u=1.0, min_n=-1e-300, max_n=0.5, min_ureg=0.0, max_ureg=0.9,
                           energy=123.456789012345678, newton_iters=step, residual=1e-13)


def test_csv_roundtrip_exact(tmp_path):
    path = tmp_path / "d.csv"
    with DiagnosticsWriter(path) as w:
        for k in range(3):
            w.write(_diag(k))
    header = path.read_text().splitlines()[0]
    assert header == ",".join(CSV_COLUMNS)
    cols = read_diagnostics(path)
    assert list(cols["step"]) == [0, 1, 2]
    assert cols["mass_u"][0] == 1 / 3 and cols["energy"][2] == 123.456789012345678
    assert cols["min_n"][0] == -1e-300


def test_vtk_writer(tmp_path):
    m = Mesh.from_arrays([[0, 0], [1, 0], [1, 1], [0, 1]], [[0, 1, 2], [0, 2, 3]])
    path = tmp_path / "s.vtk"
    write_vtk(path, m, {"u": np.array([0.1, 1 / 3]), "n": np.array([0.5, 0.25])},
              {"u_reg": np.arange(4.0) / 7})
    text = path.read_text()
    assert text.startswith("# vtk DataFile Version 3.0")
    assert "DATASET UNSTRUCTURED_GRID" in text and "CELL_TYPES 2" in text
    assert "CELLS 2 8\n3 0 1 2\n3 0 2 3\n" in text
    fields = read_vtk_fields(path)
    assert fields["u"][1] == 1 / 3
    np.testing.assert_array_equal(fields["u_reg"], np.arange(4.0) / 7)
    with pytest.raises(ValueError):
        write_vtk(path, m, {"u": np.zeros(3)}, {})
    with pytest.raises(ValueError):
        write_vtk(path, m, {}, {"w": np.zeros(2)})
