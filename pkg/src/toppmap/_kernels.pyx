# cython: boundscheck=False, wraparound=False, cdivision=False
"""Compiled hot loops.

Twin of ``_kernels_py.py``: same functions, same operation order, compiled
with -ffp-contract=off so results are bit-identical to the pure backend.
Keep the arithmetic expressions in the two files in sync.
"""

from libc.math cimport fabs

__all__ = ["iterate_into", "step_n", "converge", "period_scan"]


def iterate_into(double g0, double g1, double c, double s1, double s2,
                 double k, double d0, double r1, double r2,
                 double x, double y, double z, double[:, ::1] out):
    """See the pure twin: fills out with the orbit, returns the index of the
    first negative state or -1."""
    cdef Py_ssize_t n = out.shape[0] - 1
    cdef Py_ssize_t i
    cdef double xn, yn, zn
    out[0, 0] = x
    out[0, 1] = y
    out[0, 2] = z
    if x < 0.0 or y < 0.0 or z < 0.0:
        return 0
    for i in range(1, n + 1):
        xn = g0 + x * (1.0 - g1 - c * y)
        yn = s1 * x * x / (s2 + x * x) * z + (1.0 - k) * y
        zn = (1.0 - d0 + r1 * x - r2 * x * x) * z
        out[i, 0] = xn
        out[i, 1] = yn
        out[i, 2] = zn
        x = xn
        y = yn
        z = zn
        if x < 0.0 or y < 0.0 or z < 0.0:
            return i
    return -1


def step_n(double g0, double g1, double c, double s1, double s2,
           double k, double d0, double r1, double r2,
           double x, double y, double z, Py_ssize_t n):
    """See the pure twin: advance n steps, no storage."""
    cdef Py_ssize_t i
    cdef double xn, yn, zn
    if x < 0.0 or y < 0.0 or z < 0.0:
        return x, y, z, 0
    for i in range(1, n + 1):
        xn = g0 + x * (1.0 - g1 - c * y)
        yn = s1 * x * x / (s2 + x * x) * z + (1.0 - k) * y
        zn = (1.0 - d0 + r1 * x - r2 * x * x) * z
        x = xn
        y = yn
        z = zn
        if x < 0.0 or y < 0.0 or z < 0.0:
            return x, y, z, i
    return x, y, z, -1


def converge(double g0, double g1, double c, double s1, double s2,
             double k, double d0, double r1, double r2,
             double x, double y, double z,
             double[:, ::1] targets, double gx, double zstar,
             double tol, Py_ssize_t max_iter):
    """See the pure twin for the acceptance rule and return layout."""
    cdef Py_ssize_t m = targets.shape[0]
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t j
    cdef bint x_hyp = True
    cdef bint z_hyp = True
    cdef double xn, yn, zn, dx, dy, dz, resid, dist
    while True:
        if x < 0.0 or y < 0.0 or z < 0.0:
            return 2, i, x, y, z, -1, x_hyp, z_hyp
        x_hyp = x_hyp and (x > gx)
        z_hyp = z_hyp and (z > zstar)
        xn = g0 + x * (1.0 - g1 - c * y)
        yn = s1 * x * x / (s2 + x * x) * z + (1.0 - k) * y
        zn = (1.0 - d0 + r1 * x - r2 * x * x) * z
        dx = fabs(xn - x)
        dy = fabs(yn - y)
        dz = fabs(zn - z)
        resid = dx if dx > dy else dy
        if dz > resid:
            resid = dz
        if resid <= tol:
            for j in range(m):
                dx = fabs(x - targets[j, 0])
                dy = fabs(y - targets[j, 1])
                dz = fabs(z - targets[j, 2])
                dist = dx if dx > dy else dy
                if dz > dist:
                    dist = dz
                if dist <= tol:
                    return 0, i, x, y, z, j, x_hyp, z_hyp
        if i == max_iter:
            return 1, max_iter, x, y, z, -1, x_hyp, z_hyp
        x = xn
        y = yn
        z = zn
        i += 1


def period_scan(double g0, double g1, double c, double s1, double s2,
                double k, double d0, double r1, double r2,
                double x, double y, double z, Py_ssize_t pmax, double tol):
    """See the pure twin: smallest period p in 1..pmax at tolerance tol."""
    cdef double x0 = x
    cdef double y0 = y
    cdef double z0 = z
    cdef Py_ssize_t p
    cdef double xn, yn, zn, dx, dy, dz, dist
    for p in range(1, pmax + 1):
        xn = g0 + x * (1.0 - g1 - c * y)
        yn = s1 * x * x / (s2 + x * x) * z + (1.0 - k) * y
        zn = (1.0 - d0 + r1 * x - r2 * x * x) * z
        x = xn
        y = yn
        z = zn
        dx = fabs(x - x0)
        dy = fabs(y - y0)
        dz = fabs(z - z0)
        dist = dx if dx > dy else dy
        if dz > dist:
            dist = dz
        if dist <= tol:
            return p
    return 0
