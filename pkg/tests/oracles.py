"""Independent reference computations used by several test modules."""
import numpy as np


def h11(v):
    return 4.0 * v * (1.0 - v) if 0.0 < v < 1.0 else 0.0


def dh11(v):
    return 4.0 - 8.0 * v if 0.0 < v < 1.0 else 0.0


def scalar_step(u_old, n_old, dt, eps, delta, chi0, p0, tol=1e-15, max_iter=50):
    """One step of the spatially constant reduction, plain Newton on (u, n, mu).

    u - u_old - dt*c*h(u)*n_+*d_+ = 0
    n - n_old + dt*c*h(u)*n_+*d_+ = 0
    mu - f(u, u_old) + chi0*n = 0,  d = n/delta - chi0*u_old - mu,  c = delta*p0
    """
    c = delta * p0
    fe = 0.25 * (4 * u_old ** 3 - 6 * u_old ** 2 - u_old)
    x = np.array([u_old, n_old, 0.75 * u_old + fe - chi0 * n_old])
    for _ in range(max_iter):
        u, n, mu = x
        d = n / delta - chi0 * u_old - mu
        npos, dpos = max(n, 0.0), max(d, 0.0)
        s = c * h11(u) * npos * dpos
        r = np.array([u - u_old - dt * s, n - n_old + dt * s, mu - 0.75 * u - fe + chi0 * n])
        ds_du = c * dh11(u) * npos * dpos
        ds_dn = c * h11(u) * ((n > 0) * dpos + npos * (d > 0) / delta)
        ds_dmu = -c * h11(u) * npos * (d > 0)
        J = np.array([[1 - dt * ds_du, -dt * ds_dn, -dt * ds_dmu],
                      [dt * ds_du, 1 + dt * ds_dn, dt * ds_dmu],
                      [-0.75, chi0, 1.0]])
        dx = np.linalg.solve(J, -r)
        x = x + dx
        if np.max(np.abs(dx)) <= tol * max(1.0, np.max(np.abs(x))):
            break
    return x


def fd_jacobian(f, x, rel=1e-6):
    """Central differences, one column at a time."""
    f0 = f(x)
    J = np.empty((len(f0), len(x)))
    for i in range(len(x)):
        t = rel * max(1.0, abs(x[i]))
        e = np.zeros_like(x)
        e[i] = t
        J[:, i] = (f(x + e) - f(x - e)) / (2 * t)
    return J
