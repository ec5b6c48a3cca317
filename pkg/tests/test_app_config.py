import dataclasses

import pytest

from tumordg.app.config import ConfigError, load_config, load_config_file, preset_names


def test_minimal_config_defaults():
    cfg = load_config("scheme = dg\npreset = test2\n")
    assert cfg.newton.abs_tol == 1e-11 and cfg.newton.max_iters == 30
    assert cfg.newton.min_step == 2.0 ** -10
    assert cfg.max_halvings == 8
    assert cfg.output_dir == "output"


def test_test1_preset_parameters():
    cfg = load_config("scheme = dg\npreset = test1\n")
    m = cfg.model
    assert (m.cu, m.cn, m.p0, m.eps, m.delta, m.chi0) == (100.0, 0.01, 125.0, 0.1, 0.01, 0.0)
    assert (m.mob_p, m.mob_q, m.prolif_r, m.prolif_s) == (1, 1, 1, 1)
    assert cfg.dt == 1e-5 and cfg.ic == "three_tumors"
    assert cfg.domain == (-10.0, 10.0, -10.0, 10.0)


def test_test1_chi10_preset():
    cfg = load_config("scheme = fe\npreset = test1-chi10\n")
    assert cfg.model.chi0 == 10.0 and cfg.dt == 5e-6 and cfg.scheme == "fe"


def test_test2_reference_preset():
    cfg = load_config("scheme = dg\npreset = test2\n")
    m = cfg.model
    assert (m.cu, m.cn, m.p0, m.chi0) == (2.8, 2.8e-4, 0.5, 0.1)
    assert cfg.dt == 0.1 and cfg.ic == "irregular_growth"


def test_nonsymmetric_functions():
    m = load_config("scheme = dg\npreset = test2-nonsym\n").model
    assert (m.mob_p, m.mob_q, m.prolif_r, m.prolif_s) == (5, 1, 1, 3)


def test_all_presets_load():
    assert {"test1", "test1-chi10", "test2", "test2-nonsym"} <= set(preset_names())
    for name in preset_names():
        load_config(f"scheme = dg\npreset = {name}\n")


def test_overrides_and_sections():
    text = """
    [run]
    scheme = fe
    preset = test2
    nx = 10
    ny = 12
    dt = 0.05   # inline comment
    [model]
    chi0 = 3
    mob_n_p = 2
    mob_n_q = 2
    [newton]
    abs_tol = 1e-10
    max_iters = 12
    """
    cfg = load_config("\n".join(line.strip() for line in text.splitlines()))
    assert (cfg.nx, cfg.ny, cfg.dt) == (10, 12, 0.05)
    assert cfg.model.chi0 == 3.0 and cfg.model.cu == 2.8
    assert cfg.model.mobility_n.p == 2
    assert cfg.newton.abs_tol == 1e-10 and cfg.newton.max_iters == 12


def test_expression_ic_replaces_preset_ic():
    cfg = load_config("scheme = dg\npreset = test2\nu0 = 0.5*(tanh((1 - sqrt(x**2 + y**2))/eps) + 1)\n"
                      "n0 = 1 - u0\n")
    assert cfg.ic is None and "tanh" in cfg.u0


def test_no_preset_requires_ic():
    with pytest.raises(ConfigError, match="run.ic"):
        load_config("scheme = dg\n")
    assert load_config("scheme = dg\nic = zero\n").ic == "zero"


@pytest.mark.parametrize("text,match", [
    ("ic = zero\n", "run.scheme"),
    ("scheme = cg\nic = zero\n", "run.scheme"),
    ("scheme = dg\nic = zero\ndt = -1\n", "run.dt"),
    ("scheme = dg\nic = zero\ndt = 0.5\nt_end = 0.1\n", "run.t_end"),
    ("scheme = dg\nic = zero\ncadence = 0\n", "run.cadence"),
    ("scheme = dg\nic = zero\nnx = 2.5\n", "run.nx"),
    ("scheme = dg\nic = zero\ndomain = 0 1 2\n", "run.domain"),
    ("scheme = dg\nic = zero\ndomain = 1 0 0 1\n", "run.domain"),
    ("scheme = dg\nic = nowhere\n", "run.ic"),
    ("scheme = dg\nic = zero\nu0 = x\n", "run.ic"),
    ("scheme = dg\nu0 = x +\nn0 = 0\n", "run.u0"),
    ("scheme = dg\nu0 = x\nn0 = undefined_name\n", "run.n0"),
    ("scheme = dg\nic = zero\n[model]\ndelta = 0\n", "delta"),
    ("scheme = dg\nic = zero\n[model]\nfunctions = odd\n", "model.functions"),
    ("scheme = dg\nic = zero\n[model]\neps = abc\n", "model.eps"),
    ("scheme = dg\nic = zero\n[newton]\nmax_iters = 0\n", "max_iters"),
    ("scheme = dg\nic = zero\nbogus = 1\n", "run.bogus"),
    ("scheme = dg\nic = zero\n[extra]\na = 1\n", "extra"),
    ("scheme = dg\npreset = test9\n", "preset"),
])
def test_validation_errors_name_field(text, match):
    with pytest.raises(ConfigError, match=match):
        load_config(text)


def test_parse_error_reports_line():
    with pytest.raises(ConfigError, match="line 3"):
        load_config("scheme = dg\nic = zero\nthis line has no separator\n")
    with pytest.raises(ConfigError, match="line 3.*duplicate"):
        load_config("[run]\nscheme = dg\nscheme = fe\n")


def test_load_config_file(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("scheme = dg\npreset = test2\n", encoding="utf-8")
    assert load_config_file(path).scheme == "dg"
    with pytest.raises(ConfigError):
        load_config_file(tmp_path / "missing.ini")


def test_config_is_frozen():
    cfg = load_config("scheme = dg\nic = zero\n")
    with pytest.raises(dataclasses.FrozenInstanceError):
        cfg.dt = 1.0
    assert cfg.n_steps == 10
