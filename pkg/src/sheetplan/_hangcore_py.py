"""Pure numpy implementation of the hanging-point kernels.

The hot primitive of the whole toolkit: given ball centers at a common
height z_r above planar points r_i and radii rho_i (the cable lengths), find
the lowest point of the balls' intersection. Because all centers are
coplanar, every candidate is a planar trilateration point plus a vertical
drop, enumerated exactly over active subsets of size 1, 2 and 3.

`lowest_point` solves one instance; `lowest_point_grid` solves a batch that
shares the centers (one sheet-contact grid), vectorized over the batch.
A compiled twin lives in `_hangcore.pyx`; `kernels` picks one at import.
"""
import itertools

import numpy as np

FEAS_TOL = 1e-7     # slack allowed when testing membership in each ball
DROP_TOL = 1e-9     # tolerance on nonnegative squared drop


def lowest_point(centers, z_r, rho):
    """Lowest point of the intersection of balls B((r_i, z_r), rho_i).

    Parameters
    ----------
    centers : (N, 2) planar ball-center positions
    z_r : common center height
    rho : (N,) ball radii

    Returns
    -------
    (q, z) : horizontal position (2,) and height of the lowest point, or
        (None, +inf) when the intersection is numerically empty.
    """
    r = np.asarray(centers, dtype=float)
    rho = np.asarray(rho, dtype=float)
    n = len(r)
    rho2 = rho * rho
    best_q, best_z = None, np.inf

    def consider(q, drop2):
        nonlocal best_q, best_z
        if drop2 < -DROP_TOL:
            return
        drop2 = max(drop2, 0.0)
        z = z_r - np.sqrt(drop2)
        if z >= best_z:
            return
        d = r - q
        if np.all(d[:, 0] ** 2 + d[:, 1] ** 2 + drop2
                  <= rho2 + FEAS_TOL * (2.0 * rho + FEAS_TOL)):
            best_q, best_z = q, z

    for i in range(n):
        consider(r[i], rho2[i])
    for i, j in itertools.combinations(range(n), 2):
        d = r[j] - r[i]
        L2 = float(d @ d)
        if L2 < 1e-18:
            continue
        a = (rho2[i] - rho2[j] + L2) / (2.0 * L2)
        consider(r[i] + a * d, rho2[i] - a * a * L2)
    for i, j, k in itertools.combinations(range(n), 3):
        ax, ay = 2.0 * (r[j] - r[i])
        bx, by = 2.0 * (r[k] - r[i])
        det = ax * by - ay * bx
        if abs(det) < 1e-14:
            continue
        c1 = rho2[i] - rho2[j] + r[j] @ r[j] - r[i] @ r[i]
        c2 = rho2[i] - rho2[k] + r[k] @ r[k] - r[i] @ r[i]
        q = np.array([(c1 * by - ay * c2) / det, (ax * c2 - bx * c1) / det])
        consider(q, rho2[i] - float((q - r[i]) @ (q - r[i])))
    return best_q, best_z


def lowest_point_grid(centers, z_r, rho_grid):
    """Batched `lowest_point` over G contact candidates sharing the centers.

    Parameters
    ----------
    centers : (N, 2) planar ball-center positions
    z_r : common center height
    rho_grid : (G, N) radii, one row per candidate

    Returns
    -------
    (q, z) : (G, 2) lowest-point positions and (G,) heights; +inf where the
        intersection is empty.
    """
    r = np.asarray(centers, dtype=float)
    rho = np.asarray(rho_grid, dtype=float)
    G, n = rho.shape
    rho2 = rho * rho
    feas_rhs = rho2 + FEAS_TOL * (2.0 * rho + FEAS_TOL)
    best_z = np.full(G, np.inf)
    best_q = np.zeros((G, 2))

    def consider(q, drop2):
        ok = drop2 >= -DROP_TOL
        if not np.any(ok):
            return
        d2c = np.clip(drop2, 0.0, None)
        z = z_r - np.sqrt(d2c)
        cand = ok & (z < best_z)
        if not np.any(cand):
            return
        dd = np.sum((q[:, None, :] - r[None, :, :]) ** 2, axis=2) + d2c[:, None]
        cand &= np.all(dd <= feas_rhs, axis=1)
        best_z[cand] = z[cand]
        best_q[cand] = q[cand]

    for i in range(n):
        consider(np.broadcast_to(r[i], (G, 2)), rho2[:, i])
    for i, j in itertools.combinations(range(n), 2):
        d = r[j] - r[i]
        L2 = float(d @ d)
        if L2 < 1e-18:
            continue
        a = (rho2[:, i] - rho2[:, j] + L2) / (2.0 * L2)
        q = r[i][None, :] + a[:, None] * d[None, :]
        consider(q, rho2[:, i] - a * a * L2)
    for i, j, k in itertools.combinations(range(n), 3):
        ax, ay = 2.0 * (r[j] - r[i])
        bx, by = 2.0 * (r[k] - r[i])
        det = ax * by - ay * bx
        if abs(det) < 1e-14:
            continue
        c1 = rho2[:, i] - rho2[:, j] + r[j] @ r[j] - r[i] @ r[i]
        c2 = rho2[:, i] - rho2[:, k] + r[k] @ r[k] - r[i] @ r[i]
        q = np.column_stack([(c1 * by - ay * c2) / det, (ax * c2 - bx * c1) / det])
        consider(q, rho2[:, i] - np.sum((q - r[i]) ** 2, axis=1))
    return best_q, best_z
