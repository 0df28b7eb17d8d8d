"""Parameter-plane scans and ball probes around bifurcation points.

Cells are classified from Lyapunov estimates with threshold 1e-3:

    escape      orbit left |state|_inf <= 1e6 (class, not an error)
    periodic    l1 < -1e-3 (fixed point or periodic/quasi-periodic motion)
    chaotic     l1 > 1e-3
    chaotic-ph  l1 > 1e-3 and l1 + l2 > 1e-3 (volume expansion signature)
    marginal    |l1| <= 1e-3 (neither side of the band)

Grid evaluation is deterministic and independent of the worker count: every
cell is classified by a self-contained computation and results are written
into the output grid by index.
"""

import math
import os
from dataclasses import dataclass

import numpy as np

from . import dynamics, maps, orbits
from .quasirandom import ball_points

CLASS_TOL = 1e-3
ESCAPE, PERIODIC, CHAOTIC, CHAOTIC_PH, MARGINAL = (
    "escape", "periodic", "chaotic", "chaotic-ph", "marginal")

_AXIS_NAMES = {"m1": 0, "m2": 1, "b": 2, "m1h": 0, "m2h": 1, "bh": 2}
_CHUNK = 512

DEGENERATE_Z = {maps.FORWARD: 0.5, maps.INVERSE: -0.5}


def worker_count(override=None):
    """Worker count: explicit override, else HENONLAB_WORKERS, else cpu count."""
    if override is not None:
        return max(1, int(override))
    env = os.environ.get("HENONLAB_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def classify_exponents(l1, l2, escaped, tol=CLASS_TOL):
    if escaped:
        return ESCAPE
    if l1 > tol:
        return CHAOTIC_PH if l1 + l2 > tol else CHAOTIC
    if l1 < -tol:
        return PERIODIC
    return MARGINAL


@dataclass
class CellClass:
    """Classification of one parameter cell plus the raw exponent estimates."""

    label: str
    exponents: np.ndarray


@dataclass(frozen=True)
class SweepSpec:
    """Grid scan over two of (m1, m2, b) with the third held fixed.

    ``seed_rule`` selects the per-cell initial condition:
      ("fixed-point", offset)      real fixed point nearest the degenerate z
                                   value, nudged along the most unstable
                                   eigenvector (default);
      ("orbit", zs, offset)        continue the period-n orbit with delay
                                   guess ``zs`` and nudge off its most
                                   unstable direction, falling back to the
                                   fixed-point rule when continuation fails;
      ("point", (x, y, z))         a literal initial state.
    """

    map_id: str
    fixed_param: tuple
    axis1: tuple  # (name, lo, hi, resolution)
    axis2: tuple
    n_transient: int = 2_000
    n_sample: int = 20_000
    seed_rule: tuple = ("fixed-point", 1e-3)

    def __post_init__(self):
        maps.canonical_map_id(self.map_id)
        names = {self._axis_index(self.axis1[0]), self._axis_index(self.axis2[0]),
                 self._axis_index(self.fixed_param[0])}
        if len(names) != 3:
            raise ValueError("fixed_param and the two axes must name distinct parameters")
        for name, lo, hi, res in (self.axis1, self.axis2):
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ValueError(f"axis {name} range must be finite")
            if res < 1:
                raise ValueError("axis resolution must be >= 1")
        if self.seed_rule[0] not in ("fixed-point", "orbit", "point"):
            raise ValueError(f"unknown seed rule {self.seed_rule[0]!r}")

    @staticmethod
    def _axis_index(name):
        try:
            return _AXIS_NAMES[name]
        except KeyError:
            raise ValueError(f"unknown parameter name {name!r}") from None

    def axis_values(self):
        a1 = np.linspace(self.axis1[1], self.axis1[2], int(self.axis1[3]))
        a2 = np.linspace(self.axis2[1], self.axis2[2], int(self.axis2[3]))
        return a1, a2

    def params_at(self, v1, v2):
        vec = [None, None, None]
        vec[self._axis_index(self.fixed_param[0])] = float(self.fixed_param[1])
        vec[self._axis_index(self.axis1[0])] = float(v1)
        vec[self._axis_index(self.axis2[0])] = float(v2)
        if maps.canonical_map_id(self.map_id) == maps.FORWARD:
            return maps.MapParams(m1=vec[0], m2=vec[1], b=vec[2])
        return maps.InvParams(m1h=vec[0], m2h=vec[1], bh=vec[2])


def real_fixed_points(map_id, p):
    """Real fixed points z of the delay map (roots of the fixed-point
    quadratic z**2 + (1 - b - m2) z - m1 = 0), descending by z."""
    mid = maps.canonical_map_id(map_id)
    if mid == maps.FORWARD:
        c, m1 = 1.0 - p.b - p.m2, p.m1
    elif mid == maps.INVERSE:
        c, m1 = 1.0 - p.bh - p.m2h, p.m1h
    else:
        raise ValueError("fixed-point formula applies to the delay maps")
    disc = c * c + 4.0 * m1
    if disc < 0.0:
        return []
    r = math.sqrt(disc)
    roots = sorted({(-c + r) / 2.0, (-c - r) / 2.0}, reverse=True)
    return roots


def _unstable_direction(map_id, point, p):
    w, v = np.linalg.eig(maps.jacobian(map_id, point, p))
    k = int(np.argmax(np.abs(w)))
    d = np.real(v[:, k])
    n = np.linalg.norm(d)
    return d / n if n > 0 else np.array([1.0, 0.0, 0.0])


def seed_candidates(map_id, p, seed_rule):
    """Initial states to try in order; the first bounded one is used."""
    kind = seed_rule[0]
    if kind == "point":
        return [tuple(float(c) for c in seed_rule[1])]
    if kind == "orbit":
        zs_guess, off = np.asarray(seed_rule[1], float), float(seed_rule[2])
        try:
            orb = orbits.find_periodic_orbit(map_id, p, len(zs_guess), zs_guess)
        except (orbits.ConvergenceError, orbits.SingularSystemError):
            return seed_candidates(map_id, p, ("fixed-point", off))
        d = _unstable_direction_monodromy(orb)
        p0 = np.array(orb.points[0])
        return [tuple(p0 + off * d), tuple(p0 - off * d)]
    off = float(seed_rule[1])
    roots = real_fixed_points(map_id, p)
    zdeg = DEGENERATE_Z[maps.canonical_map_id(map_id)]
    if not roots:
        # no real fixed point: start at the vertex of the quadratic
        mid = maps.canonical_map_id(map_id)
        c = 1.0 - p.b - p.m2 if mid == maps.FORWARD else 1.0 - p.bh - p.m2h
        z0 = -c / 2.0
        return [(z0, z0, z0)]
    z0 = min(roots, key=lambda z: abs(z - zdeg))
    d = _unstable_direction(map_id, (z0, z0, z0), p)
    s = np.array([z0, z0, z0]) + off * d
    return [tuple(s)]


def _unstable_direction_monodromy(orb):
    w, v = np.linalg.eig(orbits.monodromy(orb))
    k = int(np.argmax(np.abs(w)))
    d = np.real(v[:, k])
    n = np.linalg.norm(d)
    return d / n if n > 0 else np.array([1.0, 0.0, 0.0])


# ---------------------------------------------------------------------------
# batched cell evaluation (elementwise per cell, so batching never changes
# individual results)

def _lyap_batch(map_id, P1, CB, CM, seeds, n_transient, n_sample):
    """Spectrum estimates for K cells in lockstep.

    Parameters are arrays of shape (K,): P1 the constant, CB the Jacobian,
    CM the remaining coefficient; ``seeds`` is (K, 3).  Returns sorted
    exponents (K, 3) (NaN where escaped) and the escape mask.
    """
    inv = maps.canonical_map_id(map_id) == maps.INVERSE
    K = len(P1)
    x = seeds[:, 0].copy(); y = seeds[:, 1].copy(); z = seeds[:, 2].copy()
    esc = np.zeros(K, bool)
    lim = dynamics.ESCAPE_NORM

    def step_state():
        # escaped lanes are re-zeroed every time they grow past the limit,
        # so no lane can ever reach float overflow
        nonlocal x, y, z, esc
        with np.errstate(over="ignore", invalid="ignore"):
            if inv:
                zn = P1 + CB * x + CM * z - y * y
            else:
                zn = P1 + CB * x + CM * y - z * z
            x, y, z = y, z, zn
            bad = ~((np.abs(x) <= lim) & (np.abs(y) <= lim) & (np.abs(z) <= lim))
        newly = bad & ~esc
        if np.any(bad):
            esc |= newly
            x[bad] = 0.0; y[bad] = 0.0; z[bad] = 0.0
        return newly

    for _ in range(n_transient):
        step_state()
    a1 = np.ones(K); b1 = np.zeros(K); c1 = np.zeros(K)
    a2 = np.zeros(K); b2 = np.ones(K); c2 = np.zeros(K)
    a3 = np.zeros(K); b3 = np.zeros(K); c3 = np.ones(K)
    s = np.zeros((K, 3))
    cnt = np.zeros(K)
    for _ in range(n_sample):
        if inv:
            t = -2.0 * y
            na1, nb1, nc1 = b1, c1, CB * a1 + t * b1 + CM * c1
            na2, nb2, nc2 = b2, c2, CB * a2 + t * b2 + CM * c2
            na3, nb3, nc3 = b3, c3, CB * a3 + t * b3 + CM * c3
        else:
            t = -2.0 * z
            na1, nb1, nc1 = b1, c1, CB * a1 + CM * b1 + t * c1
            na2, nb2, nc2 = b2, c2, CB * a2 + CM * b2 + t * c2
            na3, nb3, nc3 = b3, c3, CB * a3 + CM * b3 + t * c3
        newly = step_state()
        a1, b1, c1 = na1, nb1, nc1
        a2, b2, c2 = na2, nb2, nc2
        a3, b3, c3 = na3, nb3, nc3
        if np.any(newly):
            for arr, e in ((a1, 1.0), (b1, 0.0), (c1, 0.0)):
                arr[newly] = e
            for arr, e in ((a2, 0.0), (b2, 1.0), (c2, 0.0)):
                arr[newly] = e
            for arr, e in ((a3, 0.0), (b3, 0.0), (c3, 1.0)):
                arr[newly] = e
        n1 = np.sqrt(a1 * a1 + b1 * b1 + c1 * c1)
        r = 1.0 / n1
        a1 *= r; b1 *= r; c1 *= r
        r12 = a1 * a2 + b1 * b2 + c1 * c2
        a2 = a2 - r12 * a1; b2 = b2 - r12 * b1; c2 = c2 - r12 * c1
        n2 = np.sqrt(a2 * a2 + b2 * b2 + c2 * c2)
        r = 1.0 / n2
        a2 *= r; b2 *= r; c2 *= r
        r13 = a1 * a3 + b1 * b3 + c1 * c3
        r23 = a2 * a3 + b2 * b3 + c2 * c3
        a3 = a3 - (r13 * a1 + r23 * a2)
        b3 = b3 - (r13 * b1 + r23 * b2)
        c3 = c3 - (r13 * c1 + r23 * c2)
        n3 = np.sqrt(a3 * a3 + b3 * b3 + c3 * c3)
        r = 1.0 / n3
        a3 *= r; b3 *= r; c3 *= r
        act = ~esc
        s[act, 0] += np.log(n1[act])
        s[act, 1] += np.log(n2[act])
        s[act, 2] += np.log(n3[act])
        cnt[act] += 1.0
    exps = np.full((K, 3), np.nan)
    ok = cnt > 0
    exps[ok] = s[ok] / cnt[ok, None]
    exps[ok] = -np.sort(-exps[ok], axis=1)
    exps[esc & ok] = np.nan  # partial estimates are not reported for cells that escaped
    return exps, esc


def _eval_cells(args):
    spec, pairs = args
    P1 = np.empty(len(pairs)); CB = np.empty(len(pairs)); CM = np.empty(len(pairs))
    seed_lists = []
    for k, (v1, v2) in enumerate(pairs):
        p = spec.params_at(v1, v2)
        if maps.canonical_map_id(spec.map_id) == maps.FORWARD:
            P1[k], CM[k], CB[k] = p.m1, p.m2, p.b
        else:
            P1[k], CM[k], CB[k] = p.m1h, p.m2h, p.bh
        seed_lists.append(seed_candidates(spec.map_id, p, spec.seed_rule))
    max_c = max(len(sl) for sl in seed_lists)
    exps = np.full((len(pairs), 3), np.nan)
    esc = np.ones(len(pairs), bool)
    for ci in range(max_c):
        todo = np.where(esc)[0]
        todo = np.array([k for k in todo if ci < len(seed_lists[k])], dtype=int)
        if len(todo) == 0:
            break
        seeds = np.array([seed_lists[k][ci] for k in todo])
        e, m = _lyap_batch(spec.map_id, P1[todo], CB[todo], CM[todo], seeds,
                           spec.n_transient, spec.n_sample)
        exps[todo] = e
        esc[todo] = m
    out = []
    for k in range(len(pairs)):
        l1, l2 = (exps[k, 0], exps[k, 1]) if not esc[k] else (math.nan, math.nan)
        out.append(CellClass(label=classify_exponents(l1, l2, bool(esc[k])),
                             exponents=exps[k]))
    return out


def run_sweep(spec: SweepSpec, n_workers=None):
    """Classify every cell of the grid; returns a res1 x res2 nested list.

    Deterministic for a given spec: cells are split into fixed chunks and
    merged by index, so the result does not depend on ``n_workers``.
    """
    a1, a2 = spec.axis_values()
    pairs = [(v1, v2) for v1 in a1 for v2 in a2]
    chunks = [(spec, pairs[i:i + _CHUNK]) for i in range(0, len(pairs), _CHUNK)]
    nw = worker_count(n_workers)
    if nw > 1 and len(chunks) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=nw) as ex:
            results = list(ex.map(_eval_cells, chunks))
    else:
        results = [_eval_cells(c) for c in chunks]
    flat = [c for chunk in results for c in chunk]
    grid = [[flat[i * len(a2) + j] for j in range(len(a2))] for i in range(len(a1))]
    return grid


@dataclass
class ProbeHit:
    """A probed parameter point whose attractor passed all hit criteria."""

    index: int
    params: object
    exponents: np.ndarray
    component_count: int


def _param_vector(p):
    if isinstance(p, maps.MapParams):
        return np.array([p.m1, p.m2, p.b])
    return np.array([p.m1h, p.m2h, p.bh])


def _params_from_vector(map_id, v):
    if maps.canonical_map_id(map_id) == maps.FORWARD:
        return maps.MapParams(m1=v[0], m2=v[1], b=v[2])
    return maps.InvParams(m1h=v[0], m2h=v[1], bh=v[2])


def _probe_one(args):
    (map_id, vec, expected_period, seed_rule,
     n_transient, n_sample, n_points, tol) = args
    try:
        p = _params_from_vector(map_id, vec)
    except ValueError:
        return None
    for seed in seed_candidates(map_id, p, seed_rule):
        try:
            lr = dynamics.lyapunov_spectrum(map_id, p, seed,
                                            n_transient=n_transient,
                                            n_sample=n_sample)
        except dynamics.EscapeError:
            continue
        if lr.escaped:
            continue
        l1, l2 = lr.exponents[0], lr.exponents[1]
        if not (l1 > tol and l1 + l2 > tol):
            return None
        try:
            samp = dynamics.sample_attractor(map_id, p, seed,
                                             n_transient=n_transient,
                                             n_sample=n_points,
                                             expected_period=expected_period)
        except dynamics.EscapeError:
            continue
        if samp.escaped or samp.component_count != expected_period:
            return None
        return (lr.exponents, expected_period)
    return None


def ball_probe(map_id, center_params, radius, n_probes, expected_period,
               seed_orbit=None, n_transient=20_000, n_sample=40_000,
               n_points=12_000, tol=CLASS_TOL, n_workers=None):
    """Probe quasi-random parameter points in a ball around ``center_params``.

    A probe is a hit when its orbit is bounded with l1 > tol and
    l1 + l2 > tol and the sampled attractor decomposes into
    ``expected_period`` disjoint cyclically-visited components.  Radius 0
    probes only the center.  ``seed_orbit`` supplies the delay coordinates
    of the organizing periodic orbit; the orbit is then re-continued at each
    probed point and the initial condition is taken beside it (falling back
    to the fixed-point rule).  Hits are returned in probe order.
    """
    center = _param_vector(center_params)
    if radius == 0:
        offsets = np.zeros((n_probes, 3))
    else:
        offsets = radius * ball_points(n_probes, 3)
    if seed_orbit is not None:
        seed_rule = ("orbit", tuple(float(z) for z in seed_orbit), 1e-4)
    else:
        seed_rule = ("fixed-point", 1e-3)
    tasks = [(map_id, center + offsets[i], expected_period, seed_rule,
              n_transient, n_sample, n_points, tol) for i in range(n_probes)]
    nw = worker_count(n_workers)
    if nw > 1 and n_probes > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=nw) as ex:
            raw = list(ex.map(_probe_one, tasks, chunksize=max(1, n_probes // (4 * nw))))
    else:
        raw = [_probe_one(t) for t in tasks]
    hits = []
    for i, r in enumerate(raw):
        if r is None:
            continue
        exps, cc = r
        hits.append(ProbeHit(index=i, params=_params_from_vector(map_id, center + offsets[i]),
                             exponents=exps, component_count=cc))
    return hits
