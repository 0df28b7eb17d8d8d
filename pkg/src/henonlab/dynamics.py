"""Long-run orbit diagnostics: Lyapunov spectra, attractor sampling, escape.

The escape predicate lives here and is shared by every module: a state has
escaped when any component is non-finite or its sup-norm exceeds 1e6 (the
dominant -z**2 term then forces monotone growth to infinity).

Lyapunov spectra use tangent-space evolution with modified Gram-Schmidt
re-orthonormalization every step.  For constant-Jacobian maps the exponent
sum equals log|b| identically, which the tests use as a hard identity.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import maps

ESCAPE_NORM = 1e6
DEFAULT_N_TRANSIENT = 10_000
DEFAULT_N_SAMPLE = 1_000_000
DEFAULT_SM = dict(t_transient=100.0, t_sample=1000.0, dt=1e-3)


class EscapeError(RuntimeError):
    """Orbit left the bounded region before the computation finished."""


def is_escaped(s):
    """True when the state is non-finite or |state|_inf > 1e6."""
    x, y, z = s
    return not (math.isfinite(x) and math.isfinite(y) and math.isfinite(z)
                and abs(x) <= ESCAPE_NORM and abs(y) <= ESCAPE_NORM
                and abs(z) <= ESCAPE_NORM)


@dataclass
class LyapunovResult:
    """Spectrum in nats per iteration (maps) or per unit time (flows).

    ``convergence_halfwidth`` is the largest channel-wise discrepancy between
    the full-run means and the means over the second half of the run.
    ``n_sample`` counts the steps actually accumulated; it is smaller than
    requested only when the orbit escaped (``escaped`` is then set).
    """

    exponents: np.ndarray
    n_transient: int
    n_sample: int
    convergence_halfwidth: float
    escaped: bool = False
    escape_step: Optional[int] = None

    @property
    def sum(self):
        return float(np.sum(self.exponents))


def pseudo_hyperbolicity_indicator(lr: LyapunovResult):
    """Sum of the two largest exponents; positive values are the numerical
    signature of area expansion transverse to the strong contraction (an
    indicator, not a proof of pseudo-hyperbolicity)."""
    return float(lr.exponents[0] + lr.exponents[1])


def iterate_map(map_id, p, x0, n, collect=False):
    """Iterate ``n`` steps with the escape check; optionally collect points.

    Returns (state, points, escaped, steps_done); ``points`` is None unless
    ``collect`` and contains the states after each completed step.
    """
    mid = maps.canonical_map_id(map_id)
    s = tuple(float(c) for c in x0)
    pts = np.empty((n, 3)) if collect else None
    for k in range(n):
        s = maps.map_step(mid, s, p)
        if is_escaped(s):
            if collect:
                pts = pts[:k]
            return s, pts, True, k
        if collect:
            pts[k] = s
    return s, pts, False, n


def _lyapunov_core(map_id, p, s, n_sample):
    """Hand-rolled tangent evolution + MGS; hot loop kept in plain floats."""
    mid = maps.canonical_map_id(map_id)
    if mid == maps.FORWARD:
        cb, cm, inv = p.b, p.m2, False
    elif mid == maps.INVERSE:
        cb, cm, inv = p.bh, p.m2h, True
    else:
        return _lyapunov_core_generic(mid, p, s, n_sample)
    x, y, z = s
    a1, b1, c1 = 1.0, 0.0, 0.0
    a2, b2, c2 = 0.0, 1.0, 0.0
    a3, b3, c3 = 0.0, 0.0, 1.0
    s1 = s2 = s3 = 0.0
    h1 = h2 = h3 = 0.0  # sums over the first half, for the convergence check
    half = n_sample // 2
    log = math.log
    sqrt = math.sqrt
    lim = ESCAPE_NORM
    for k in range(n_sample):
        if inv:
            t = -2.0 * y
            zn = p.m1h + cb * x + cm * z - y * y
            a1, b1, c1 = b1, c1, cb * a1 + t * b1 + cm * c1
            a2, b2, c2 = b2, c2, cb * a2 + t * b2 + cm * c2
            a3, b3, c3 = b3, c3, cb * a3 + t * b3 + cm * c3
        else:
            t = -2.0 * z
            zn = p.m1 + cb * x + cm * y - z * z
            a1, b1, c1 = b1, c1, cb * a1 + cm * b1 + t * c1
            a2, b2, c2 = b2, c2, cb * a2 + cm * b2 + t * c2
            a3, b3, c3 = b3, c3, cb * a3 + cm * b3 + t * c3
        x, y, z = y, z, zn
        if not (abs(x) <= lim and abs(y) <= lim and abs(z) <= lim):
            return (s1, s2, s3), (h1, h2, h3), (x, y, z), True, k
        n1 = sqrt(a1 * a1 + b1 * b1 + c1 * c1)
        r = 1.0 / n1
        a1 *= r; b1 *= r; c1 *= r
        r12 = a1 * a2 + b1 * b2 + c1 * c2
        a2 -= r12 * a1; b2 -= r12 * b1; c2 -= r12 * c1
        n2 = sqrt(a2 * a2 + b2 * b2 + c2 * c2)
        r = 1.0 / n2
        a2 *= r; b2 *= r; c2 *= r
        r13 = a1 * a3 + b1 * b3 + c1 * c3
        r23 = a2 * a3 + b2 * b3 + c2 * c3
        a3 -= r13 * a1 + r23 * a2
        b3 -= r13 * b1 + r23 * b2
        c3 -= r13 * c1 + r23 * c2
        n3 = sqrt(a3 * a3 + b3 * b3 + c3 * c3)
        r = 1.0 / n3
        a3 *= r; b3 *= r; c3 *= r
        s1 += log(n1); s2 += log(n2); s3 += log(n3)
        if k == half - 1:
            h1, h2, h3 = s1, s2, s3
    return (s1, s2, s3), (h1, h2, h3), (x, y, z), False, n_sample


def _lyapunov_core_generic(map_id, p, s, n_sample):
    Q = np.eye(3)
    tot = np.zeros(3)
    h = np.zeros(3)
    half = n_sample // 2
    for k in range(n_sample):
        J = maps.jacobian(map_id, s, p)
        s = maps.map_step(map_id, s, p)
        if is_escaped(s):
            return tuple(tot), tuple(h), s, True, k
        Q, R = np.linalg.qr(J @ Q)
        d = np.diag(R)
        sgn = np.where(d < 0, -1.0, 1.0)
        Q = Q * sgn
        tot += np.log(np.abs(d))
        if k == half - 1:
            h = tot.copy()
    return tuple(tot), tuple(h), s, False, n_sample


def lyapunov_spectrum(map_id, p, x0, n_transient=DEFAULT_N_TRANSIENT,
                      n_sample=DEFAULT_N_SAMPLE):
    """Lyapunov spectrum of a map orbit.

    Escape during the transient raises :class:`EscapeError`; escape during
    sampling returns a flagged result with the partial averages.  The run is
    strictly sequential, so identical inputs give bit-identical results.
    """
    s, _, escaped, k = iterate_map(map_id, p, x0, n_transient)
    if escaped:
        raise EscapeError(f"orbit escaped at transient step {k}")
    sums, halves, _, escaped, done = _lyapunov_core(map_id, p, s, n_sample)
    if done == 0:
        raise EscapeError("orbit escaped on the first sampled step")
    full = np.array(sums) / done
    half_n = n_sample // 2
    if not escaped and half_n > 0 and done > half_n:
        second = (np.array(sums) - np.array(halves)) / (done - half_n)
        halfwidth = float(np.max(np.abs(full - second)))
    else:
        halfwidth = math.inf
    order = np.argsort(-full)
    return LyapunovResult(exponents=full[order], n_transient=n_transient,
                          n_sample=done, convergence_halfwidth=halfwidth,
                          escaped=escaped, escape_step=None if not escaped else done)


@dataclass
class AttractorSample:
    """Post-transient orbit sample with residue-class component detection.

    Points are recorded after the transient; when the orbit escapes the
    sample is truncated at the escape step and flagged.  Component counting
    partitions points by index mod ``expected_period``: the count is
    reported only when the per-residue bounding boxes are pairwise disjoint
    (residue classes are visited cyclically by construction); otherwise
    ``component_count`` is None (unknown).  For ``expected_period == 1``
    the only positive confirmation is convergence to a point: the count is
    1 when the sample diameter is below 1e-5, unknown otherwise.
    """

    points: np.ndarray
    escaped: bool
    component_count: Optional[int]
    bounding_boxes: Optional[list]


_POINT_DIAMETER_TOL = 1e-5


def _boxes_disjoint(b1, b2):
    (lo1, hi1), (lo2, hi2) = b1, b2
    return bool(np.any((hi1 < lo2) | (hi2 < lo1)))


def residue_boxes(points, period):
    """Bounding boxes of the index-residue classes mod ``period``."""
    boxes = []
    for r in range(period):
        sub = points[r::period]
        if len(sub) == 0:
            return None
        boxes.append((sub.min(axis=0), sub.max(axis=0)))
    return boxes


def sample_attractor(map_id, p, x0, n_transient=DEFAULT_N_TRANSIENT,
                     n_sample=20_000, expected_period=1):
    """Iterate past the transient and record ``n_sample`` points.

    Raises :class:`EscapeError` when the orbit escapes during the transient;
    later escape yields a truncated, flagged sample.
    """
    if expected_period < 1:
        raise ValueError("expected_period must be >= 1")
    s, _, escaped, k = iterate_map(map_id, p, x0, n_transient)
    if escaped:
        raise EscapeError(f"orbit escaped at transient step {k}")
    _, pts, escaped, done = iterate_map(map_id, p, s, n_sample, collect=True)
    if escaped or done < n_sample or len(pts) < 2 * expected_period:
        return AttractorSample(points=pts, escaped=True, component_count=None,
                               bounding_boxes=None)
    boxes = residue_boxes(pts, expected_period)
    if expected_period > 1:
        confirmed = all(_boxes_disjoint(boxes[i], boxes[j])
                        for i in range(expected_period)
                        for j in range(i + 1, expected_period))
    else:
        lo, hi = boxes[0]
        confirmed = bool(np.max(hi - lo) < _POINT_DIAMETER_TOL)
    return AttractorSample(points=pts, escaped=False,
                           component_count=expected_period if confirmed else None,
                           bounding_boxes=boxes)


# ---------------------------------------------------------------------------
# Shimizu-Morioka flow

def _sm_rk4_step(X, dt, q):
    f = maps.sm_field
    k1 = np.array(f(X, q))
    k2 = np.array(f(X + 0.5 * dt * k1, q))
    k3 = np.array(f(X + 0.5 * dt * k2, q))
    k4 = np.array(f(X + dt * k3, q))
    return X + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def sm_integrate(q: maps.SMParams, x0, t_end, dt):
    """Classical fixed-step 4th-order integration of the Shimizu-Morioka
    field, sampled at every step (the initial state included)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = int(round(t_end / dt))
    traj = np.empty((n + 1, 3))
    X = np.array(x0, float)
    traj[0] = X
    for k in range(n):
        X = _sm_rk4_step(X, dt, q)
        if not np.all(np.isfinite(X)):
            raise EscapeError(f"non-finite state at step {k + 1}")
        traj[k + 1] = X
    return traj


def _sm_var_rk4(U, dt, q):
    """RK4 on the (3, 4) block [state | tangent frame]."""
    def rhs(Ub):
        X = Ub[:, 0]
        J = maps.sm_jacobian(X, q)
        out = np.empty_like(Ub)
        out[:, 0] = maps.sm_field(X, q)
        out[:, 1:] = J @ Ub[:, 1:]
        return out
    k1 = rhs(U)
    k2 = rhs(U + 0.5 * dt * k1)
    k3 = rhs(U + 0.5 * dt * k2)
    k4 = rhs(U + dt * k3)
    return U + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def sm_lyapunov(q: maps.SMParams, x0, t_transient=DEFAULT_SM["t_transient"],
                t_sample=DEFAULT_SM["t_sample"], dt=DEFAULT_SM["dt"]):
    """Lyapunov exponents of the flow in nats per unit time.

    The variational equations are integrated alongside the state with QR
    re-orthonormalization every step.  On bounded non-stationary orbits one
    exponent is the neutral flow-direction exponent (zero within a few 1e-3);
    the exponent sum equals the constant divergence -(lam + alpha).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_tr = int(round(t_transient / dt))
    n_s = int(round(t_sample / dt))
    X = np.array(x0, float)
    for k in range(n_tr):
        X = _sm_rk4_step(X, dt, q)
        if not np.all(np.isfinite(X)):
            raise EscapeError(f"non-finite state at transient step {k + 1}")
    U = np.empty((3, 4))
    U[:, 0] = X
    U[:, 1:] = np.eye(3)
    tot = np.zeros(3)
    halves = np.zeros(3)
    half = n_s // 2
    for k in range(n_s):
        U = _sm_var_rk4(U, dt, q)
        if not np.all(np.isfinite(U)):
            raise EscapeError(f"non-finite state at sample step {k + 1}")
        Q, R = np.linalg.qr(U[:, 1:])
        d = np.diag(R)
        sgn = np.where(d < 0, -1.0, 1.0)
        U[:, 1:] = Q * sgn
        tot += np.log(np.abs(d))
        if k == half - 1:
            halves = tot.copy()
    full = tot / t_sample
    if half > 0 and n_s > half:
        second = (tot - halves) / ((n_s - half) * dt)
        halfwidth = float(np.max(np.abs(full - second)))
    else:
        halfwidth = math.inf
    order = np.argsort(-full)
    return LyapunovResult(exponents=full[order], n_transient=n_tr,
                          n_sample=n_s, convergence_halfwidth=halfwidth)
