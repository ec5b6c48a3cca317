"""Run configuration: sectioned ``key = value`` text with packaged presets.

Sections are ``[run]``, ``[model]`` and ``[newton]``; keys placed before
any section header belong to ``[run]``.  ``preset = <name>`` in ``[run]``
loads a packaged experiment file first and the remaining keys override it.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from ..model import ModelParams
from ..newton import NewtonSettings
from .ic import IC_PRESETS, compile_expression

SCHEMES = ("dg", "fe")
FUNCTION_CHOICES = {
    # (mobility p, q, proliferation r, s)
    "symmetric": (1, 1, 1, 1),
    "nonsymmetric": (5, 1, 1, 3),
}

_RUN_KEYS = {"scheme", "preset", "ic", "u0", "n0", "domain", "nx", "ny", "mesh_file", "dt", "t_end",
             "cadence", "output_dir", "max_halvings", "seed"}
_MODEL_KEYS = {"eps", "delta", "chi0", "p0", "cu", "cn", "functions", "mob_p", "mob_q", "prolif_r",
               "prolif_s", "mob_n_p", "mob_n_q"}
_NEWTON_KEYS = {"abs_tol", "rel_tol", "max_iters", "damping", "min_step"}
_SECTIONS = {"run": _RUN_KEYS, "model": _MODEL_KEYS, "newton": _NEWTON_KEYS}


class ConfigError(ValueError):
    """Malformed or invalid configuration; the message names the line or field."""


@dataclass(frozen=True)
class RunConfig:
    scheme: str
    domain: tuple = (-10.0, 10.0, -10.0, 10.0)
    nx: int = 40
    ny: int = 40
    mesh_file: str | None = None
    dt: float = 0.01
    t_end: float = 0.1
    cadence: int = 10
    model: ModelParams = field(default_factory=ModelParams)
    newton: NewtonSettings = field(default_factory=NewtonSettings)
    ic: str | None = None
    u0: str | None = None
    n0: str | None = None
    output_dir: str = "output"
    max_halvings: int = 8
    seed: int | None = None
    preset: str | None = None

    @property
    def n_steps(self) -> int:
        """Number of nominal steps needed to reach ``t_end``."""
        return max(1, int(math.ceil(self.t_end / self.dt - 1e-9)))


def preset_names() -> list[str]:
    files = resources.files("tumordg.presets").iterdir()
    return sorted(f.name[:-4] for f in files if f.name.endswith(".ini"))


def preset_text(name: str) -> str:
    if name not in preset_names():
        raise ConfigError(f"preset: unknown preset {name!r} (available: {', '.join(preset_names())})")
    return resources.files("tumordg.presets").joinpath(f"{name}.ini").read_text(encoding="utf-8")


def preset_summary(name: str) -> str:
    """First comment line of a preset file."""
    for line in preset_text(name).splitlines():
        if line.startswith("#"):
            return line.lstrip("# ").strip()
    return ""


def _with_header(text: str):
    """Prefix ``[run]`` when keys precede the first section; returns (text, line offset)."""
    for line in text.splitlines():
        s = line.strip()
        if not s or s[0] in "#;":
            continue
        if s.startswith("["):
            return text, 0
        return "[run]\n" + text, 1
    return text, 0


def _parse(parser: configparser.ConfigParser, text: str, source: str) -> None:
    body, offset = _with_header(text)
    try:
        parser.read_string(body, source=source)
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] - offset
        line = text.splitlines()[lineno - 1].strip()
        raise ConfigError(f"{source}: line {lineno}: cannot parse {line!r}") from exc
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        what = f"option {exc.option!r}" if hasattr(exc, "option") else "section"
        raise ConfigError(f"{source}: line {exc.lineno - offset}: duplicate {what} in [{exc.section}]") from exc
    except configparser.Error as exc:
        lineno = getattr(exc, "lineno", None)
        where = f"line {lineno - offset}: " if lineno else ""
        raise ConfigError(f"{source}: {where}{exc}") from exc


def _new_parser():
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str.lower
    return parser


def _get(parser, section, key, conv, default):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key).strip()
    try:
        return conv(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{section}.{key}: invalid value {raw!r} ({exc})") from exc


def _int(raw):
    value = float(raw)
    if not value.is_integer():
        raise ValueError("expected an integer")
    return int(value)


def _domain(raw):
    parts = raw.replace(",", " ").split()
    if len(parts) != 4:
        raise ValueError("expected four numbers: xmin xmax ymin ymax")
    return tuple(float(v) for v in parts)


def _str(raw):
    return raw


def _opt_int(raw):
    return None if raw.lower() in ("", "none") else _int(raw)


def load_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse and validate configuration text."""
    user = _new_parser()
    _parse(user, text, source)
    for section in user.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"{source}: unknown section [{section}]")
        for key in user.options(section):
            if key not in _SECTIONS[section]:
                raise ConfigError(f"{section}.{key}: unknown field")

    parser = _new_parser()
    preset = user.get("run", "preset", fallback=None)
    if preset:
        _parse(parser, preset_text(preset.strip()), f"preset {preset.strip()}")
    _parse(parser, text, source)
    for name in _SECTIONS:
        if not parser.has_section(name):
            parser.add_section(name)

    scheme = _get(parser, "run", "scheme", _str, None)
    if scheme is None:
        raise ConfigError("run.scheme: required field missing (dg or fe)")
    scheme = scheme.lower()
    if scheme not in SCHEMES:
        raise ConfigError(f"run.scheme: must be one of {SCHEMES}, got {scheme!r}")

    defaults = RunConfig(scheme=scheme)
    values = dict(
        domain=_get(parser, "run", "domain", _domain, defaults.domain),
        nx=_get(parser, "run", "nx", _int, defaults.nx),
        ny=_get(parser, "run", "ny", _int, defaults.ny),
        mesh_file=_get(parser, "run", "mesh_file", _str, None),
        dt=_get(parser, "run", "dt", float, defaults.dt),
        t_end=_get(parser, "run", "t_end", float, defaults.t_end),
        cadence=_get(parser, "run", "cadence", _int, defaults.cadence),
        output_dir=_get(parser, "run", "output_dir", _str, defaults.output_dir),
        max_halvings=_get(parser, "run", "max_halvings", _int, defaults.max_halvings),
        seed=_get(parser, "run", "seed", _opt_int, None),
        # user expressions replace a preset's initial condition
        ic=None if user.has_option("run", "u0") and not user.has_option("run", "ic")
        else _get(parser, "run", "ic", _str, None),
        u0=_get(parser, "run", "u0", _str, None),
        n0=_get(parser, "run", "n0", _str, None),
    )
    _validate_run(values)

    model_kw = {}
    functions = _get(parser, "model", "functions", str.lower, None)
    if functions is not None:
        if functions not in FUNCTION_CHOICES:
            raise ConfigError(f"model.functions: must be one of {sorted(FUNCTION_CHOICES)}, got {functions!r}")
        model_kw.update(zip(("mob_p", "mob_q", "prolif_r", "prolif_s"), FUNCTION_CHOICES[functions]))
    for key in ("eps", "delta", "chi0", "p0", "cu", "cn"):
        if parser.has_option("model", key):
            model_kw[key] = _get(parser, "model", key, float, None)
    for key in ("mob_p", "mob_q", "prolif_r", "prolif_s", "mob_n_p", "mob_n_q"):
        if parser.has_option("model", key):
            model_kw[key] = _get(parser, "model", key, _opt_int, None)
    model = _build("model", ModelParams, model_kw)

    newton_kw = {}
    for key in ("abs_tol", "rel_tol", "damping", "min_step"):
        if parser.has_option("newton", key):
            newton_kw[key] = _get(parser, "newton", key, float, None)
    if parser.has_option("newton", "max_iters"):
        newton_kw["max_iters"] = _get(parser, "newton", "max_iters", _int, None)
    newton = _build("newton", NewtonSettings, newton_kw)

    _validate_ic(values, model)
    return RunConfig(scheme=scheme, model=model, newton=newton, preset=preset.strip() if preset else None,
                     **values)


def load_config_file(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror or exc}") from exc
    return load_config(text, source=str(path))


def _build(section, cls, kw):
    try:
        return cls(**kw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {exc}") from exc


def _validate_run(v):
    if not (v["dt"] > 0 and math.isfinite(v["dt"])):
        raise ConfigError(f"run.dt: must be positive, got {v['dt']}")
    if not v["t_end"] >= v["dt"]:
        raise ConfigError(f"run.t_end: must be at least dt={v['dt']}, got {v['t_end']}")
    if v["cadence"] < 1:
        raise ConfigError(f"run.cadence: must be at least 1, got {v['cadence']}")
    if v["nx"] < 1 or v["ny"] < 1:
        raise ConfigError(f"run.nx/ny: need at least one cell per direction, got {v['nx']}x{v['ny']}")
    x0, x1, y0, y1 = v["domain"]
    if not (x1 > x0 and y1 > y0):
        raise ConfigError(f"run.domain: empty rectangle {v['domain']}")
    if v["max_halvings"] < 0:
        raise ConfigError(f"run.max_halvings: must be nonnegative, got {v['max_halvings']}")


def _validate_ic(v, model):
    if v["ic"] is not None:
        if v["u0"] is not None or v["n0"] is not None:
            raise ConfigError("run.ic: give either an ic preset or u0/n0 expressions, not both")
        if v["ic"] not in IC_PRESETS:
            raise ConfigError(f"run.ic: unknown initial condition {v['ic']!r} (available: {', '.join(IC_PRESETS)})")
        return
    if v["u0"] is None or v["n0"] is None:
        raise ConfigError("run.ic: required (or both run.u0 and run.n0 expressions)")
    probe = np.zeros(1)
    for key in ("u0", "n0"):
        try:
            compile_expression(v[key], key)(probe, probe, model, probe)
        except Exception as exc:  # any evaluation failure is a config error
            raise ConfigError(f"run.{key}: cannot evaluate {v[key]!r} ({exc})") from exc
