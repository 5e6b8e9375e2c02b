# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Signatures and semantics mirror ``_fallback``."""

from libc.math cimport log


def vortex_velocity(const double[::1] xy, const double[::1] gammas,
                    double eps2, double[::1] out):
    """Fill ``out`` with interleaved (xdot, ydot); return colliding pair code or -1."""
    cdef Py_ssize_t n = gammas.shape[0]
    cdef Py_ssize_t i, j
    cdef double a, b, r2, gi, gj
    for i in range(2 * n):
        out[i] = 0.0
    for i in range(n):
        gi = gammas[i]
        for j in range(i + 1, n):
            a = xy[2 * i] - xy[2 * j]
            b = xy[2 * i + 1] - xy[2 * j + 1]
            r2 = a * a + b * b
            if r2 < eps2:
                return i * n + j
            gj = gammas[j]
            a = a / r2
            b = b / r2
            out[2 * i] -= gj * b
            out[2 * i + 1] += gj * a
            out[2 * j] += gi * b
            out[2 * j + 1] -= gi * a
    return -1


def vortex_jacobian(const double[::1] xy, const double[::1] gammas,
                    double eps2, double[:, ::1] out):
    cdef Py_ssize_t n = gammas.shape[0]
    cdef Py_ssize_t i, j, p, q
    cdef double a, b, r2, r4, s, c, gi, gj
    for p in range(2 * n):
        for q in range(2 * n):
            out[p, q] = 0.0
    for i in range(n):
        gi = gammas[i]
        for j in range(i + 1, n):
            a = xy[2 * i] - xy[2 * j]
            b = xy[2 * i + 1] - xy[2 * j + 1]
            r2 = a * a + b * b
            if r2 < eps2:
                return i * n + j
            gj = gammas[j]
            r4 = r2 * r2
            s = 2.0 * a * b / r4
            c = (a * a - b * b) / r4
            # row i, derivative w.r.t. (a, b) of pair term, scaled by gamma_j
            out[2 * i, 2 * i] += gj * s
            out[2 * i, 2 * i + 1] -= gj * c
            out[2 * i + 1, 2 * i] -= gj * c
            out[2 * i + 1, 2 * i + 1] -= gj * s
            out[2 * i, 2 * j] -= gj * s
            out[2 * i, 2 * j + 1] += gj * c
            out[2 * i + 1, 2 * j] += gj * c
            out[2 * i + 1, 2 * j + 1] += gj * s
            # row j sees the same pair with (a, b) -> (-a, -b): s, c unchanged
            out[2 * j, 2 * j] += gi * s
            out[2 * j, 2 * j + 1] -= gi * c
            out[2 * j + 1, 2 * j] -= gi * c
            out[2 * j + 1, 2 * j + 1] -= gi * s
            out[2 * j, 2 * i] -= gi * s
            out[2 * j, 2 * i + 1] += gi * c
            out[2 * j + 1, 2 * i] += gi * c
            out[2 * j + 1, 2 * i + 1] += gi * s
    return -1


def vortex_energy(const double[::1] xy, const double[::1] gammas, double eps2):
    """Return (sum over ordered pairs n != m of g_n g_m ln|z_n - z_m|, pair code)."""
    cdef Py_ssize_t n = gammas.shape[0]
    cdef Py_ssize_t i, j
    cdef double a, b, r2, total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            a = xy[2 * i] - xy[2 * j]
            b = xy[2 * i + 1] - xy[2 * j + 1]
            r2 = a * a + b * b
            if r2 < eps2:
                return 0.0, i * n + j
            # 2 * g_i g_j * ln r = g_i g_j * ln r^2
            total += gammas[i] * gammas[j] * log(r2)
    return total, -1


def levi_civita_contract(const double[:, ::1] grads, const Py_ssize_t[:, ::1] perms,
                         const double[::1] signs, double[::1] out):
    """out[perm[0]] += sign * prod_i grads[i, perm[i + 1]] over every table row."""
    cdef Py_ssize_t rows = perms.shape[0]
    cdef Py_ssize_t p = grads.shape[0]
    cdef Py_ssize_t r, i
    cdef double prod
    for i in range(out.shape[0]):
        out[i] = 0.0
    for r in range(rows):
        prod = signs[r]
        for i in range(p):
            prod *= grads[i, perms[r, i + 1]]
        out[perms[r, 0]] += prod
