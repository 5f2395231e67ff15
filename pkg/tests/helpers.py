"""Shared test oracles, independent of the library's evaluation order."""

import numpy as np


def raw_step(p, x, y, z):
    """The one-step update in its original unfactored form; total (no
    domain checks), used as the independent oracle."""
    x1 = p.g0 - p.g1 * x - p.c * x * y + x
    y1 = p.s1 * x * x / (p.s2 + x * x) * z - p.k * y + y
    z1 = -p.d0 * z + p.r1 * x * z - p.r2 * x * x * z + z
    return x1, y1, z1


def fd_jacobian(p, s, h=1e-6):
    """Central finite differences of the raw-form map."""
    s = np.asarray(s, dtype=float)
    J = np.empty((3, 3))
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        plus = np.array(raw_step(p, *(s + e)))
        minus = np.array(raw_step(p, *(s - e)))
        J[:, j] = (plus - minus) / (2.0 * h)
    return J


def sup(a, b):
    """Sup-norm distance between two points."""
    return float(np.max(np.abs(np.asarray(a, float) - np.asarray(b, float))))
