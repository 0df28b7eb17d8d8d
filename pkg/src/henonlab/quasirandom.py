"""Deterministic low-discrepancy sequences used by the search routines.

Halton points are used everywhere a quasi-random sample is required so that
hunts, probes and sweeps are reproducible without seed bookkeeping.
"""

import numpy as np

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61)


def halton_value(index, base):
    """Radical-inverse of ``index`` in the given base (index >= 1)."""
    f = 1.0
    r = 0.0
    i = int(index)
    while i > 0:
        f /= base
        r += f * (i % base)
        i //= base
    return r


def halton_points(n, dim, start=1):
    """First ``n`` Halton points in [0,1)^dim, starting at ``start``.

    The sequence is fixed: the k-th call with identical arguments returns
    identical points, on any machine.
    """
    if dim > len(_PRIMES):
        raise ValueError(f"halton_points supports at most {len(_PRIMES)} dimensions")
    out = np.empty((n, dim))
    for j in range(dim):
        b = _PRIMES[j]
        for k in range(n):
            out[k, j] = halton_value(start + k, b)
    return out


def ball_points(n, dim, start=1):
    """``n`` low-discrepancy points in the unit ball of R^dim.

    Cube points with norm > 1 are rejected and the Halton index advanced, so
    the accepted set is deterministic.
    """
    pts = []
    idx = start
    while len(pts) < n:
        u = 2.0 * halton_points(1, dim, start=idx)[0] - 1.0
        idx += 1
        if np.dot(u, u) <= 1.0:
            pts.append(u)
    return np.array(pts)


def box_points(n, lo, hi, start=1):
    """``n`` low-discrepancy points in the box [lo, hi] (per-axis bounds)."""
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    u = halton_points(n, len(lo), start=start)
    return lo + u * (hi - lo)
