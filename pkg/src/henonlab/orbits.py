"""Newton solvers for periodic orbits and degenerate orbit/parameter pairs.

Both delay maps advance the scalar sequence

    forward:  z[i+3] = m1  + b*z[i]  + m2*z[i+1]  - z[i+2]**2
    inverse:  z[i+3] = m1h + bh*z[i] + m2h*z[i+2] - z[i+1]**2

so a period-n orbit is determined by n scalars z[0..n-1] with indices mod n,
the state at step k being (z[k], z[k+1], z[k+2]).

:func:`solve_degenerate` extends the n orbit equations by two spectral
conditions on the monodromy matrix M of the n-th iterate,

    tr M = -1      and      det(M - I) = 0,

with the map Jacobian fixed at +1 or -1 (the real roots of b**n = 1; for odd
n only +1 qualifies and a b = -1 search is rejected by the multiplier check),
so that the three multipliers are (-1, -1, +1).  The two spectral rows of the
Newton matrix are assembled by central finite differences; the orbit rows are
analytic.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import maps
from .quasirandom import box_points

NEWTON_RESIDUAL_TOL = 1e-12
NEWTON_STEP_TOL = 1e-13
NEWTON_MAX_ITER = 100
NEWTON_MAX_HALVINGS = 20
SPECTRAL_FD_STEP = 1e-7
ORBIT_RESIDUAL_TOL = 1e-10
MULTIPLIER_TOL = 1e-6
DEDUP_TOL = 1e-6
_COND_LIMIT = 1e14
_DIVERGENCE_NORM = 1e3

_DEGENERATE_TARGET = np.array([-1.0, -1.0, 1.0])


class ConvergenceError(RuntimeError):
    """Newton iteration failed to reach the residual tolerance."""


class SingularSystemError(RuntimeError):
    """Newton matrix numerically singular (condition number > 1e14)."""


def _delay_coeffs(map_id, p):
    """(const, c0, c2, sq): the recurrence reads
    z[i+3] = const + c0*z[i] + c2*z[i+3-sq] - z[i+sq]**2,
    with sq = 2 for the forward map and sq = 1 for the inverse one."""
    mid = maps.canonical_map_id(map_id)
    if mid == maps.FORWARD:
        return p.m1, p.b, p.m2, 2
    if mid == maps.INVERSE:
        return p.m1h, p.bh, p.m2h, 1
    raise ValueError("periodic-orbit solving supports the forward and inverse maps")


def delay_residual(map_id, zs, p):
    """Residuals g[i] = rhs(z) - z[(i+3) % n] of the period-n system."""
    zs = np.asarray(zs, float)
    n = len(zs)
    const, c0, c2, sq = _delay_coeffs(map_id, p)
    i = np.arange(n)
    zsq = zs[(i + sq) % n]
    lin = zs[(i + 3 - sq) % n]
    rhs = const + c0 * zs[i] + c2 * lin - zsq * zsq
    return rhs - zs[(i + 3) % n]


def delay_jacobian(map_id, zs, p):
    """Analytic derivative of :func:`delay_residual` w.r.t. the z's.

    Contributions are accumulated because slots coincide when n < 4.
    """
    zs = np.asarray(zs, float)
    n = len(zs)
    const, c0, c2, sq = _delay_coeffs(map_id, p)
    J = np.zeros((n, n))
    for i in range(n):
        J[i, i] += c0
        J[i, (i + 3 - sq) % n] += c2
        J[i, (i + sq) % n] += -2.0 * zs[(i + sq) % n]
        J[i, (i + 3) % n] += -1.0
    return J


def orbit_points(zs):
    """Phase-space points (z[k], z[k+1], z[k+2]) of a delay orbit."""
    n = len(zs)
    return [(zs[k], zs[(k + 1) % n], zs[(k + 2) % n]) for k in range(n)]


def _is_minimal(zs, tol=1e-8):
    n = len(zs)
    for d in range(1, n):
        if n % d == 0:
            if max(abs(zs[i] - zs[(i + d) % n]) for i in range(n)) < tol:
                return False
    return True


@dataclass
class PeriodicOrbit:
    """Period-n orbit of a delay map.

    The period is the one requested, never minimized; ``is_minimal`` records
    whether a proper divisor already closes the orbit.
    """

    map_id: str
    params: object
    period: int
    zs: np.ndarray
    residual: float
    is_minimal: bool = field(default=True)

    @property
    def points(self):
        return orbit_points(self.zs)

    def __post_init__(self):
        if self.residual > ORBIT_RESIDUAL_TOL:
            raise ValueError(
                f"orbit residual {self.residual:.3e} above {ORBIT_RESIDUAL_TOL}")


def _damped_newton(fun, jac, u0, max_iter=NEWTON_MAX_ITER,
                   res_tol=NEWTON_RESIDUAL_TOL, step_tol=NEWTON_STEP_TOL,
                   cond_limit=_COND_LIMIT):
    """Newton with residual-decrease damping; shared by both solvers."""
    u = np.asarray(u0, float).copy()
    F = fun(u)
    fn = np.max(np.abs(F))
    for _ in range(max_iter):
        if fn < res_tol:
            return u, fn
        J = jac(u)
        if not np.all(np.isfinite(J)):
            raise ConvergenceError("Newton matrix has non-finite entries")
        if np.linalg.cond(J) > cond_limit:
            raise SingularSystemError(
                f"Newton matrix condition number exceeds {cond_limit:.0e}")
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError(str(exc)) from exc
        lam = 1.0
        for _ in range(NEWTON_MAX_HALVINGS):
            u_new = u - lam * step
            F_new = fun(u_new)
            fn_new = np.max(np.abs(F_new))
            if math.isfinite(fn_new) and fn_new < fn:
                break
            lam *= 0.5
        else:
            raise ConvergenceError("residual does not decrease under damping")
        moved = lam * np.max(np.abs(step))
        u, F, fn = u_new, F_new, fn_new
        if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > _DIVERGENCE_NORM:
            raise ConvergenceError("iterates diverged")
        if moved < step_tol:
            break
    if fn < ORBIT_RESIDUAL_TOL:
        return u, fn
    raise ConvergenceError(f"no convergence (residual {fn:.3e})")


def find_periodic_orbit(map_id, p, period, guess, max_iter=NEWTON_MAX_ITER):
    """Locate a period-n orbit at fixed parameters by Newton iteration.

    ``guess`` is the list of n delay coordinates.  Raises
    :class:`ConvergenceError` / :class:`SingularSystemError` on failure.
    """
    if period < 1:
        raise ValueError("period must be >= 1")
    guess = np.asarray(guess, float)
    if guess.shape != (period,):
        raise ValueError(f"guess must supply {period} delay coordinates")
    zs, res = _damped_newton(
        lambda u: delay_residual(map_id, u, p),
        lambda u: delay_jacobian(map_id, u, p),
        guess, max_iter=max_iter)
    return PeriodicOrbit(map_id=maps.canonical_map_id(map_id), params=p,
                         period=period, zs=zs, residual=res,
                         is_minimal=_is_minimal(zs))


def monodromy(orbit: PeriodicOrbit):
    """Product of the step Jacobians around the orbit, rightmost factor at
    points[0]; its determinant is (map Jacobian)**period."""
    M = np.eye(3)
    for pt in orbit.points:
        M = maps.jacobian(orbit.map_id, pt, orbit.params) @ M
    return M


def _char_coeffs(m):
    """(trace, second invariant, determinant) of a 3x3 matrix, entrywise."""
    a, b, c = m[0]
    d, e, f = m[1]
    g, h, i = m[2]
    tr = a + e + i
    inv2 = (a * e - b * d) + (a * i - c * g) + (e * i - f * h)
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    return tr, inv2, det


def multipliers_of(m):
    """Eigenvalues of a 3x3 matrix from its characteristic cubic.

    Solved in closed form (trigonometric branch for three real roots,
    Cardano otherwise), then polished by a few complex Newton steps on the
    cubic.  Returned sorted by descending modulus, ties broken by the
    argument in [0, 2*pi).
    """
    m = np.asarray(m, float)
    tr, inv2, det = _char_coeffs(m)
    # monic cubic x^3 + a2 x^2 + a1 x + a0
    a2, a1, a0 = -tr, inv2, -det
    Q = (a2 * a2 - 3.0 * a1) / 9.0
    R = (2.0 * a2 ** 3 - 9.0 * a2 * a1 + 27.0 * a0) / 54.0
    if R * R <= Q ** 3:
        theta = math.acos(max(-1.0, min(1.0, R / math.sqrt(Q ** 3)))) if Q > 0 else 0.0
        rt = -2.0 * math.sqrt(max(Q, 0.0))
        roots = np.array([rt * math.cos(theta / 3.0) - a2 / 3.0,
                          rt * math.cos((theta + 2.0 * math.pi) / 3.0) - a2 / 3.0,
                          rt * math.cos((theta - 2.0 * math.pi) / 3.0) - a2 / 3.0],
                         dtype=complex)
    else:
        A = -math.copysign((abs(R) + math.sqrt(R * R - Q ** 3)) ** (1.0 / 3.0), R)
        B = Q / A if A != 0.0 else 0.0
        re = -0.5 * (A + B) - a2 / 3.0
        im = 0.5 * math.sqrt(3.0) * (A - B)
        roots = np.array([(A + B) - a2 / 3.0, re + 1j * im, re - 1j * im])

    def poly(x):
        return ((x + a2) * x + a1) * x + a0

    def dpoly(x):
        return (3.0 * x + 2.0 * a2) * x + a1

    scale = 1.0 + max(1.0, np.max(np.abs(m))) ** 3
    for k in range(3):
        x = roots[k]
        for _ in range(8):
            px = poly(x)
            if abs(px) < 1e-15 * scale:
                break
            dp = dpoly(x)
            if abs(dp) < 1e-12 * scale:
                break  # double root: Newton cannot improve further
            x = x - px / dp
        roots[k] = x
    order = sorted(range(3), key=lambda i: (-abs(roots[i]),
                                            np.angle(roots[i]) % (2.0 * math.pi)))
    return roots[order]


def _spectral_values(map_id, zs, p):
    """(tr M + 1, det(M - I)) of the period-n monodromy."""
    M = np.eye(3)
    for pt in orbit_points(np.asarray(zs, float)):
        M = maps.jacobian(map_id, pt, p) @ M
    return np.trace(M) + 1.0, float(np.linalg.det(M - np.eye(3)))


def _make_params(map_id, m1, m2, b):
    if maps.canonical_map_id(map_id) == maps.FORWARD:
        return maps.MapParams(m1=m1, m2=m2, b=b)
    return maps.InvParams(m1h=m1, m2h=m2, bh=b)


@dataclass
class DegenerateSolution:
    """Converged orbit/parameter pair with multipliers (-1, -1, +1)."""

    orbit: PeriodicOrbit
    params: object
    residuals: np.ndarray
    multipliers: np.ndarray

    @property
    def zs(self):
        return self.orbit.zs


def _degenerate_system(map_id, period, b_fixed):
    n = period

    def fun(u):
        p = _make_params(map_id, u[n], u[n + 1], b_fixed)
        g = delay_residual(map_id, u[:n], p)
        t, d = _spectral_values(map_id, u[:n], p)
        return np.concatenate([g, [t, d]])

    def jac(u):
        p = _make_params(map_id, u[n], u[n + 1], b_fixed)
        J = np.zeros((n + 2, n + 2))
        J[:n, :n] = delay_jacobian(map_id, u[:n], p)
        J[:n, n] = 1.0
        sq = _delay_coeffs(map_id, p)[3]
        i = np.arange(n)
        J[:n, n + 1] = u[:n][(i + 3 - sq) % n]
        h = SPECTRAL_FD_STEP
        # the monodromy does not involve m1, so that column stays zero
        for j in list(range(n)) + [n + 1]:
            up = u.copy(); up[j] += h
            um = u.copy(); um[j] -= h
            pp = _make_params(map_id, up[n], up[n + 1], b_fixed)
            pm = _make_params(map_id, um[n], um[n + 1], b_fixed)
            tp, dp = _spectral_values(map_id, up[:n], pp)
            tm, dm = _spectral_values(map_id, um[:n], pm)
            J[n, j] = (tp - tm) / (2.0 * h)
            J[n + 1, j] = (dp - dm) / (2.0 * h)
        return J

    return fun, jac


def _check_degenerate_multipliers(mults, tol=MULTIPLIER_TOL):
    by_re = np.sort_complex(mults)
    return bool(np.all(np.abs(by_re - _DEGENERATE_TARGET) < tol))


def solve_degenerate(map_id, period, b_fixed, guess, max_iter=NEWTON_MAX_ITER):
    """Newton-solve the n orbit equations plus the two spectral conditions
    for (z[0..n-1], m1, m2) at fixed map Jacobian ``b_fixed`` in {+1, -1}.

    The converged solution must carry multipliers within 1e-6 of
    (-1, -1, +1); anything else raises :class:`ConvergenceError`.
    """
    if b_fixed not in (1.0, -1.0, 1, -1):
        raise ValueError("b_fixed must be +1 or -1")
    if period < 1:
        raise ValueError("period must be >= 1")
    guess = np.asarray(guess, float)
    if guess.shape != (period + 2,):
        raise ValueError(f"guess must supply {period + 2} values (z..., m1, m2)")
    b_fixed = float(b_fixed)
    fun, jac = _degenerate_system(map_id, period, b_fixed)
    u, _ = _damped_newton(fun, jac, guess, max_iter=max_iter)
    n = period
    p = _make_params(map_id, u[n], u[n + 1], b_fixed)
    residuals = fun(u)
    if np.max(np.abs(residuals)) > ORBIT_RESIDUAL_TOL:
        raise ConvergenceError("residuals above tolerance after convergence")
    orbit = PeriodicOrbit(map_id=maps.canonical_map_id(map_id), params=p,
                          period=period, zs=u[:n],
                          residual=float(np.max(np.abs(residuals[:n]))),
                          is_minimal=_is_minimal(u[:n]))
    mults = multipliers_of(monodromy(orbit))
    if not _check_degenerate_multipliers(mults):
        raise ConvergenceError(
            f"converged to multipliers {mults} instead of (-1, -1, +1)")
    return DegenerateSolution(orbit=orbit, params=p,
                              residuals=residuals, multipliers=mults)


def canonical_rotation(zs):
    """Rotate a cyclic orbit so its smallest coordinate comes first."""
    zs = np.asarray(zs, float)
    return np.roll(zs, -int(np.argmin(zs)))


# ---------------------------------------------------------------------------
# batched seed triage for hunt_degenerate

_HUNT_CHUNK = 1024
_HUNT_MAX_ITER = 60


def _batch_spectral(map_id, Z, m2, b):
    """(tr M + 1, det(M - I)) for a batch of delay orbits Z of shape (K, n)."""
    K, n = Z.shape
    M = np.broadcast_to(np.eye(3), (K, 3, 3)).copy()
    J = np.zeros((K, 3, 3))
    J[:, 0, 1] = 1.0
    J[:, 1, 2] = 1.0
    fwd = maps.canonical_map_id(map_id) == maps.FORWARD
    J[:, 2, 0] = b
    for i in range(n):
        if fwd:
            J[:, 2, 1] = m2
            J[:, 2, 2] = -2.0 * Z[:, (i + 2) % n]
        else:
            J[:, 2, 1] = -2.0 * Z[:, (i + 1) % n]
            J[:, 2, 2] = m2
        M = J @ M
    t = M[:, 0, 0] + M[:, 1, 1] + M[:, 2, 2] + 1.0
    d = np.linalg.det(M - np.eye(3))
    return t, d


def _batch_residual(map_id, U, b):
    K, m = U.shape
    n = m - 2
    Z, m1, m2 = U[:, :n], U[:, n], U[:, n + 1]
    fwd = maps.canonical_map_id(map_id) == maps.FORWARD
    sq = 2 if fwd else 1
    F = np.empty((K, m))
    for i in range(n):
        zsq = Z[:, (i + sq) % n]
        lin = Z[:, (i + 3 - sq) % n]
        F[:, i] = m1 + b * Z[:, i] + m2 * lin - zsq * zsq - Z[:, (i + 3) % n]
    t, d = _batch_spectral(map_id, Z, m2, b)
    F[:, n] = t
    F[:, n + 1] = d
    return F


def _batch_jacobian(map_id, U, b):
    K, m = U.shape
    n = m - 2
    Z, m2 = U[:, :n], U[:, n + 1]
    fwd = maps.canonical_map_id(map_id) == maps.FORWARD
    sq = 2 if fwd else 1
    J = np.zeros((K, m, m))
    for i in range(n):
        J[:, i, i] += b
        J[:, i, (i + 3 - sq) % n] += m2
        J[:, i, (i + sq) % n] += -2.0 * Z[:, (i + sq) % n]
        J[:, i, (i + 3) % n] += -1.0
        J[:, i, n] = 1.0
        J[:, i, n + 1] = Z[:, (i + 3 - sq) % n]
    h = SPECTRAL_FD_STEP
    for j in list(range(n)) + [n + 1]:
        Up = U.copy(); Up[:, j] += h
        Um = U.copy(); Um[:, j] -= h
        tp, dp = _batch_spectral(map_id, Up[:, :n], Up[:, n + 1], b)
        tm, dm = _batch_spectral(map_id, Um[:, :n], Um[:, n + 1], b)
        J[:, n, j] = (tp - tm) / (2.0 * h)
        J[:, n + 1, j] = (dp - dm) / (2.0 * h)
    return J


def _triage_seeds(map_id, seeds, b_fixed, max_iter=_HUNT_MAX_ITER):
    """Run damped Newton on all seeds in lockstep; return converged vectors.

    Every operation is elementwise per seed, so results do not depend on how
    seeds are grouped into batches.
    """
    U = np.array(seeds, float)
    K = U.shape[0]
    active = np.ones(K, bool)
    F = _batch_residual(map_id, U, b_fixed)
    fn = np.max(np.abs(F), axis=1)
    for _ in range(max_iter):
        if not np.any(active):
            break
        done = active & (fn < NEWTON_RESIDUAL_TOL)
        active &= ~done
        if not np.any(active):
            break
        J = _batch_jacobian(map_id, U, b_fixed)
        ok = np.all(np.isfinite(J.reshape(K, -1)), axis=1) & active
        active &= ok
        step = np.zeros_like(U)
        if np.any(active):
            idx = np.where(active)[0]
            try:
                step[idx] = np.linalg.solve(J[idx], F[idx][..., None])[..., 0]
            except np.linalg.LinAlgError:
                for k in idx:
                    try:
                        step[k] = np.linalg.solve(J[k], F[k])
                    except np.linalg.LinAlgError:
                        active[k] = False
        bad = active & ~np.all(np.isfinite(step), axis=1)
        active &= ~bad
        lam = np.ones(K)
        accepted = np.zeros(K, bool)
        U_new, F_new, fn_new = U.copy(), F.copy(), fn.copy()
        for _ in range(NEWTON_MAX_HALVINGS + 1):
            trial = active & ~accepted
            if not np.any(trial):
                break
            cand = U - lam[:, None] * step
            Fc = _batch_residual(map_id, cand, b_fixed)
            fc = np.max(np.abs(Fc), axis=1)
            good = trial & np.isfinite(fc) & (fc < fn)
            U_new[good] = cand[good]
            F_new[good] = Fc[good]
            fn_new[good] = fc[good]
            accepted |= good
            lam[trial & ~good] *= 0.5
        active &= accepted
        U, F, fn = U_new, F_new, fn_new
        diverged = active & (np.max(np.abs(U), axis=1) > _DIVERGENCE_NORM)
        active &= ~diverged
    conv = fn < NEWTON_RESIDUAL_TOL
    return [U[k] for k in np.where(conv)[0]]


def _hunt_chunk(args):
    map_id, seeds, period, b_fixed = args
    out = []
    for u in _triage_seeds(map_id, seeds, b_fixed):
        try:
            out.append(solve_degenerate(map_id, period, b_fixed, u, max_iter=20))
        except (ConvergenceError, SingularSystemError, ValueError):
            continue
    return out


def hunt_degenerate(map_id, period, b_fixed, seed_box, n_seeds,
                    n_workers=None):
    """Search for degenerate solutions from quasi-random seeds.

    ``seed_box`` is either a scalar half-width w (box [-w, w]^(n+2)) or a
    (lo, hi) pair of per-axis bounds over (z-coordinates, m1, m2).  Distinct
    solutions are returned deduplicated up to cyclic rotation of the orbit
    with a 1e-6 sup-norm tolerance, sorted canonically; an empty list is a
    valid result.  Output is independent of the worker count: seeds are
    processed in fixed chunks and merged in seed order.
    """
    m = period + 2
    if np.isscalar(seed_box):
        lo = -float(seed_box) * np.ones(m)
        hi = float(seed_box) * np.ones(m)
    else:
        lo, hi = (np.asarray(v, float) for v in seed_box)
    seeds = box_points(n_seeds, lo, hi)
    chunks = [(map_id, seeds[i:i + _HUNT_CHUNK], period, float(b_fixed))
              for i in range(0, n_seeds, _HUNT_CHUNK)]
    if n_workers is not None and n_workers > 1 and len(chunks) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=n_workers) as ex:
            results = list(ex.map(_hunt_chunk, chunks))
    else:
        results = [_hunt_chunk(c) for c in chunks]
    found = []
    for sol in (s for chunk in results for s in chunk):
        zc = canonical_rotation(sol.zs)
        key = np.concatenate([zc, _param_vec(sol.params)])
        if any(np.max(np.abs(key - k)) < DEDUP_TOL for k in (f[0] for f in found)):
            continue
        found.append((key, sol))
    found.sort(key=lambda t: tuple(t[0]))
    return [sol for _, sol in found]


def _param_vec(p):
    if isinstance(p, maps.MapParams):
        return np.array([p.m1, p.m2])
    return np.array([p.m1h, p.m2h])
