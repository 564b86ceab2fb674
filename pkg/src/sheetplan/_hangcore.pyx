# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hanging-point kernels (see _hangcore_py for the reference twin)."""
from libc.math cimport INFINITY, fabs, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()

DEF FEAS_TOL = 1e-7
DEF DROP_TOL = 1e-9
DEF MAX_N = 32


cdef inline bint _feasible(const double* rx, const double* ry,
                           const double* rho, const double* rho2,
                           int n, double qx, double qy, double drop2) nogil:
    cdef int m
    cdef double dx, dy
    for m in range(n):
        dx = rx[m] - qx
        dy = ry[m] - qy
        if dx * dx + dy * dy + drop2 > rho2[m] + FEAS_TOL * (2.0 * rho[m] + FEAS_TOL):
            return False
    return True


cdef int _solve_one(const double* rx, const double* ry, int n,
                    const double* rho, double z_r,
                    double* out_qx, double* out_qy, double* out_z) nogil:
    """Core enumeration for a single radius vector. Returns 1 on success."""
    cdef double rho2[MAX_N]
    cdef double best_z = INFINITY
    cdef double best_qx = 0.0, best_qy = 0.0
    cdef int i, j, k
    cdef double dx, dy, L2, a, qx, qy, drop2, z
    cdef double ax, ay, bx, by, det, c1, c2, ri2, rj2, rk2

    for i in range(n):
        rho2[i] = rho[i] * rho[i]

    # singles
    for i in range(n):
        drop2 = rho2[i]
        z = z_r - sqrt(drop2)
        if z < best_z and _feasible(rx, ry, rho, rho2, n, rx[i], ry[i], drop2):
            best_z = z
            best_qx = rx[i]
            best_qy = ry[i]
    # pairs
    for i in range(n):
        for j in range(i + 1, n):
            dx = rx[j] - rx[i]
            dy = ry[j] - ry[i]
            L2 = dx * dx + dy * dy
            if L2 < 1e-18:
                continue
            a = (rho2[i] - rho2[j] + L2) / (2.0 * L2)
            qx = rx[i] + a * dx
            qy = ry[i] + a * dy
            drop2 = rho2[i] - a * a * L2
            if drop2 < -DROP_TOL:
                continue
            if drop2 < 0.0:
                drop2 = 0.0
            z = z_r - sqrt(drop2)
            if z < best_z and _feasible(rx, ry, rho, rho2, n, qx, qy, drop2):
                best_z = z
                best_qx = qx
                best_qy = qy
    # triples
    for i in range(n):
        ri2 = rx[i] * rx[i] + ry[i] * ry[i]
        for j in range(i + 1, n):
            rj2 = rx[j] * rx[j] + ry[j] * ry[j]
            ax = 2.0 * (rx[j] - rx[i])
            ay = 2.0 * (ry[j] - ry[i])
            for k in range(j + 1, n):
                rk2 = rx[k] * rx[k] + ry[k] * ry[k]
                bx = 2.0 * (rx[k] - rx[i])
                by = 2.0 * (ry[k] - ry[i])
                det = ax * by - ay * bx
                if fabs(det) < 1e-14:
                    continue
                c1 = rho2[i] - rho2[j] + rj2 - ri2
                c2 = rho2[i] - rho2[k] + rk2 - ri2
                qx = (c1 * by - ay * c2) / det
                qy = (ax * c2 - bx * c1) / det
                dx = qx - rx[i]
                dy = qy - ry[i]
                drop2 = rho2[i] - (dx * dx + dy * dy)
                if drop2 < -DROP_TOL:
                    continue
                if drop2 < 0.0:
                    drop2 = 0.0
                z = z_r - sqrt(drop2)
                if z < best_z and _feasible(rx, ry, rho, rho2, n, qx, qy, drop2):
                    best_z = z
                    best_qx = qx
                    best_qy = qy

    out_qx[0] = best_qx
    out_qy[0] = best_qy
    out_z[0] = best_z
    return 1 if best_z < INFINITY else 0


def lowest_point(centers, double z_r, rho):
    """Compiled twin of _hangcore_py.lowest_point."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] r = np.ascontiguousarray(centers, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rr = np.ascontiguousarray(rho, dtype=np.float64)
    cdef int n = r.shape[0]
    if n > MAX_N:
        raise ValueError(f"kernel supports up to {MAX_N} cables, got {n}")
    cdef double rx[MAX_N]
    cdef double ry[MAX_N]
    cdef int i
    for i in range(n):
        rx[i] = r[i, 0]
        ry[i] = r[i, 1]
    cdef double qx = 0.0, qy = 0.0, z = INFINITY
    if _solve_one(rx, ry, n, &rr[0], z_r, &qx, &qy, &z):
        return np.array([qx, qy]), z
    return None, np.inf


def lowest_point_grid(centers, double z_r, rho_grid):
    """Compiled twin of _hangcore_py.lowest_point_grid."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] r = np.ascontiguousarray(centers, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] rg = np.ascontiguousarray(rho_grid, dtype=np.float64)
    cdef int n = r.shape[0]
    cdef Py_ssize_t G = rg.shape[0]
    if rg.shape[1] != n:
        raise ValueError("rho_grid second dimension must match the center count")
    if n > MAX_N:
        raise ValueError(f"kernel supports up to {MAX_N} cables, got {n}")
    cdef double rx[MAX_N]
    cdef double ry[MAX_N]
    cdef int i
    for i in range(n):
        rx[i] = r[i, 0]
        ry[i] = r[i, 1]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] q = np.zeros((G, 2), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] z = np.full(G, np.inf, dtype=np.float64)
    cdef Py_ssize_t g
    cdef double qx, qy, zz
    with nogil:
        for g in range(G):
            qx = 0.0
            qy = 0.0
            zz = INFINITY
            if _solve_one(rx, ry, n, &rg[g, 0], z_r, &qx, &qy, &zz):
                q[g, 0] = qx
                q[g, 1] = qy
                z[g] = zz
    return q, z
