"""Compare the compiled and numpy kernel backends.

    python benchmarks/bench_kernels.py [--n 70] [--repeat 5]

Times the edge-flux kernel alone, DG residual and Jacobian assembly, the
sparse LU factorization of that Jacobian, and one full DG step.  The
factorization does not depend on the backend and is listed to show where
a step spends its time.
"""
import argparse
import timeit

import numpy as np
from scipy.sparse.linalg import splu

from tumordg import backend, dg_scheme, upwind
from tumordg.newton import LU_OPTIONS
from tumordg.app.ic import sample_ic
from tumordg.mesh import generate_crisscross
from tumordg.model import ModelParams


def best(fn, repeat, number=1):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--n", type=int, default=70, help="cells per direction")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    params = ModelParams(eps=0.1, delta=0.01, chi0=0.1, p0=0.5, cu=2.8, cn=2.8e-4)
    mesh = generate_crisscross((-10.0, 10.0, -10.0, 10.0), args.n, args.n)
    u0, n0 = sample_ic("irregular_growth", mesh, params)
    state = dg_scheme.initial_state(u0, n0, mesh, params)
    x = np.concatenate([state.u, state.n, state.mu_u])
    ws = upwind.workspace(mesh)
    split = params.mobility_u
    jump = np.random.default_rng(0).normal(size=len(ws.owner))
    vk, vl = state.u[ws.owner], state.u[ws.neighbor]
    dt = 0.1

    print(f"mesh {args.n}x{args.n}: {mesh.n_triangles} triangles, {len(ws.owner)} interior edges, "
          f"{x.size} unknowns")
    rows = {}
    for name in ("python", "compiled"):
        try:
            backend.use(name)
        except ImportError:
            print(f"{name}: not available")
            continue
        k = backend.kernels
        rows[name] = dict(
            edge_kernel=best(lambda: k.upwind_edge_terms(jump, vk, vl, ws.weight, split.p, split.q, split.vstar,
                                                         split.kpq, split.mstar), args.repeat, 20),
            residual=best(lambda: dg_scheme.residual(state, x, dt, mesh, params), args.repeat, 5),
            jacobian=best(lambda: dg_scheme.jacobian(state, x, dt, mesh, params), args.repeat),
            step=best(lambda: dg_scheme.step(state, dt, mesh, params), max(1, args.repeat // 2)),
        )
    J = dg_scheme.jacobian(state, x, dt, mesh, params).tocsc()
    lu_time = best(lambda: splu(J, **LU_OPTIONS), max(1, args.repeat // 2))

    names = list(rows)
    print(f"{'operation':14s}" + "".join(f"{n:>14s}" for n in names) + ("     speedup" if len(names) == 2 else ""))
    for op in ("edge_kernel", "residual", "jacobian", "step"):
        vals = [rows[n][op] for n in names]
        line = f"{op:14s}" + "".join(f"{v * 1e3:12.3f}ms" for v in vals)
        if len(vals) == 2:
            line += f"{vals[0] / vals[1]:11.2f}x"
        print(line)
    print(f"{'splu (shared)':14s}{lu_time * 1e3:12.3f}ms")


if __name__ == "__main__":
    main()
