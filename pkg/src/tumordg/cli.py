"""Command-line interface: ``tumordg run | mesh-check | presets list``."""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys

from .app.config import ConfigError, load_config_file, preset_names, preset_summary
from .app.driver import EXIT_ABORT, EXIT_CONFIG, EXIT_OK, run
from .mesh import MeshError, check_admissibility, read_mesh


def _cmd_run(args) -> int:
    try:
        config = load_config_file(args.config)
        if args.seed is not None:
            config = dataclasses.replace(config, seed=args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run(config, output_dir=args.output_dir, max_steps=args.max_steps)
    except (MeshError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG if isinstance(exc, MeshError) else EXIT_ABORT
    if result.status != EXIT_OK:
        print(f"aborted: {result.message}", file=sys.stderr)
    else:
        last = result.diagnostics[-1]
        print(f"{config.scheme}: {last.step} steps, t={last.time:.6g}, mass={last.mass_total:.12g}, "
              f"u in [{last.min_u:.3e}, {last.max_u:.3e}], energy={last.energy:.8g}")
    return result.status


def _cmd_mesh_check(args) -> int:
    try:
        mesh = read_mesh(args.meshfile)
    except (MeshError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = check_admissibility(mesh, tol=args.tol)
    print(f"{mesh.n_vertices} vertices, {mesh.n_triangles} triangles, h={mesh.h:.6g}")
    print(report.summary())
    return EXIT_OK if report.passed else 1


def _cmd_presets(args) -> int:
    for name in preset_names():
        print(f"{name:14s} {preset_summary(name)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tumordg", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a simulation from a config file")
    p.add_argument("config")
    p.add_argument("--output-dir", help="override run.output_dir")
    p.add_argument("--seed", type=int, help="recorded only; the model is deterministic")
    p.add_argument("--max-steps", type=int, help="stop after this many accepted steps")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("mesh-check", help="check barycenter orthogonality of a mesh file")
    p.add_argument("meshfile")
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=_cmd_mesh_check)

    p = sub.add_parser("presets", help="packaged experiment presets")
    p.add_argument("action", choices=["list"])
    p.set_defaults(func=_cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
