"""Pure-Python hot loops: the import-time fallback when the compiled
extension is unavailable.

Every function here has a compiled twin in ``_kernels.pyx`` with identical
operation order, so the two backends produce bit-identical float64 results.
Keep the arithmetic expressions in the two files in sync.
"""

from __future__ import annotations

__all__ = ["iterate_into", "step_n", "converge", "period_scan"]


def iterate_into(g0, g1, c, s1, s2, k, d0, r1, r2, x, y, z, out):
    """Fill ``out`` (an (n+1, 3) float64 array) with the orbit of (x, y, z).

    Returns the index of the first stored state with a negative component,
    or -1; iteration stops at that state.
    """
    g0, g1, c, s1, s2, k, d0, r1, r2, x, y, z = map(
        float, (g0, g1, c, s1, s2, k, d0, r1, r2, x, y, z))
    n = out.shape[0] - 1
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
        x, y, z = xn, yn, zn
        if x < 0.0 or y < 0.0 or z < 0.0:
            return i
    return -1


def step_n(g0, g1, c, s1, s2, k, d0, r1, r2, x, y, z, n):
    """Advance n steps without storing the orbit.

    Returns (x, y, z, neg) where neg is the index of the first negative
    state (iteration stops there) or -1.
    """
    g0, g1, c, s1, s2, k, d0, r1, r2, x, y, z = map(
        float, (g0, g1, c, s1, s2, k, d0, r1, r2, x, y, z))
    if x < 0.0 or y < 0.0 or z < 0.0:
        return x, y, z, 0
    for i in range(1, n + 1):
        xn = g0 + x * (1.0 - g1 - c * y)
        yn = s1 * x * x / (s2 + x * x) * z + (1.0 - k) * y
        zn = (1.0 - d0 + r1 * x - r2 * x * x) * z
        x, y, z = xn, yn, zn
        if x < 0.0 or y < 0.0 or z < 0.0:
            return x, y, z, i
    return x, y, z, -1


def converge(g0, g1, c, s1, s2, k, d0, r1, r2, x, y, z,
             targets, gx, zstar, tol, max_iter):
    """Iterate until some target is reached or a budget/domain stop.

    A state u is accepted for target t when both sup|u - t| <= tol and the
    one-step residual sup|W(u) - u| <= tol.  ``targets`` is an (m, 3) array;
    the first matching target (lowest row index) wins.

    ``gx`` and ``zstar`` are the thresholds for the two orbit hypotheses
    x(n) > gx and z(n) > zstar, tracked over every visited state; pass NaN
    for zstar to force that flag to false.

    Returns (code, iters, x, y, z, target_idx, x_hyp, z_hyp) with code
    0 = converged, 1 = max_iter exhausted, 2 = left the nonnegative octant.
    """
    g0, g1, c, s1, s2, k, d0, r1, r2, x, y, z, gx, zstar, tol = map(
        float, (g0, g1, c, s1, s2, k, d0, r1, r2, x, y, z, gx, zstar, tol))
    rows = [(float(t[0]), float(t[1]), float(t[2])) for t in targets]
    x_hyp = True
    z_hyp = True
    i = 0
    while True:
        if x < 0.0 or y < 0.0 or z < 0.0:
            return 2, i, x, y, z, -1, x_hyp, z_hyp
        x_hyp = x_hyp and (x > gx)
        z_hyp = z_hyp and (z > zstar)
        xn = g0 + x * (1.0 - g1 - c * y)
        yn = s1 * x * x / (s2 + x * x) * z + (1.0 - k) * y
        zn = (1.0 - d0 + r1 * x - r2 * x * x) * z
        dx = abs(xn - x)
        dy = abs(yn - y)
        dz = abs(zn - z)
        resid = dx if dx > dy else dy
        if dz > resid:
            resid = dz
        if resid <= tol:
            for j, (tx, ty, tz) in enumerate(rows):
                dx = abs(x - tx)
                dy = abs(y - ty)
                dz = abs(z - tz)
                dist = dx if dx > dy else dy
                if dz > dist:
                    dist = dz
                if dist <= tol:
                    return 0, i, x, y, z, j, x_hyp, z_hyp
        if i == max_iter:
            return 1, max_iter, x, y, z, -1, x_hyp, z_hyp
        x, y, z = xn, yn, zn
        i += 1


def period_scan(g0, g1, c, s1, s2, k, d0, r1, r2, x, y, z, pmax, tol):
    """Smallest p in 1..pmax with sup|W^p(u) - u| <= tol, else 0."""
    g0, g1, c, s1, s2, k, d0, r1, r2, x, y, z, tol = map(
        float, (g0, g1, c, s1, s2, k, d0, r1, r2, x, y, z, tol))
    x0, y0, z0 = x, y, z
    for p in range(1, pmax + 1):
        xn = g0 + x * (1.0 - g1 - c * y)
        yn = s1 * x * x / (s2 + x * x) * z + (1.0 - k) * y
        zn = (1.0 - d0 + r1 * x - r2 * x * x) * z
        x, y, z = xn, yn, zn
        dx = abs(x - x0)
        dy = abs(y - y0)
        dz = abs(z - z0)
        dist = dx if dx > dy else dy
        if dz > dist:
            dist = dz
        if dist <= tol:
            return p
    return 0
