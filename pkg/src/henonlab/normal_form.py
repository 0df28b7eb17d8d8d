"""Quadratic normal form at a fixed point with multipliers (-1, -1, +1).

Near such a point (with the -1 pair forming a single Jordan block) the n-th
iterate of the map can be written, after a linear change of coordinates and
removal of non-resonant quadratic terms, as

    u1 -> -u1 - u2
    u2 -> -u2 + a*u1*u3 + a1*u2*u3            + O(|u|^3)
    u3 ->  u3 + b*u1**2 + b1*u2**2 + b2*u1*u2 + b3*u3**2 + O(|u|^3).

The sign of a*b decides the outcome of generic perturbations: a*b > 0 births
a discrete Lorenz attractor, a*b < 0 a discrete Lorenz repeller.

The removable/resonant split is computed numerically: the homological
operator L(h) = A*h(u) - h(A*u) is assembled as an 18x18 matrix on the space
of quadratic vector fields (3 components x 6 monomials) and the quadratic
part of the map is decomposed by least squares against [L | resonant span].

For the Jordan-block linear part, L has rank 14, so the six resonant
monomials above overlap range(L) in exactly two directions; the overlap is
confined to the (b1, b2) coefficients.  (a, a1, b, b3) are therefore
canonical given the chart normalization, while (b1, b2) are reported under
the minimum-norm convention of the least-squares solve.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import maps
from .dynamics import EscapeError, is_escaped
from .orbits import multipliers_of

LORENZ_ATTRACTOR = "LorenzAttractor"
LORENZ_REPELLER = "LorenzRepeller"
DEGENERATE = "Degenerate"

CHART_MULTIPLIER_TOL = 1e-4
_JORDAN_REJECT = 1e-3
_COND_LIMIT = 1e8
_CLASSIFY_TOL = 1e-10

# target linear part: -1 pair in one Jordan block, +1 on the third axis
JORDAN_LINEAR_PART = np.array([[-1.0, -1.0, 0.0],
                               [0.0, -1.0, 0.0],
                               [0.0, 0.0, 1.0]])

# monomial basis u1^2, u2^2, u3^2, u1*u2, u1*u3, u2*u3
MONOMIALS = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))

# resonant slots (component, monomial) carrying (a, a1, b, b1, b2, b3)
RESONANT_SLOTS = ((1, 4), (1, 5), (2, 0), (2, 1), (2, 3), (2, 2))


class ChartError(RuntimeError):
    """Chart construction or reduction rejected the input matrix."""


@dataclass
class NormalFormChart:
    """Linear chart (columns v1, v2, v3) at a degenerate fixed point.

    ``jordan_defect`` is the residual of the generalized-eigenvector
    equation (A + I) v2 = -v1; it is small only when the -1 pair forms a
    genuine Jordan block.  ``linear_residual`` measures how far the
    transformed linear part is from the target Jordan form.
    """

    basis: np.ndarray
    origin: tuple
    jordan_defect: float
    linear_residual: float


@dataclass
class NormalFormCoeffs:
    """Resonant quadratic coefficients; attractor iff a*b > 0.

    ``orientation`` is -1 when the center direction v3 was flipped to make
    b <= 0 (the two orientations negate all six coefficients and leave the
    a*b classification unchanged).
    """

    a: float
    a1: float
    b: float
    b1: float
    b2: float
    b3: float
    orientation: int = 1

    def as_dict(self):
        return {"a": self.a, "a1": self.a1, "b": self.b,
                "b1": self.b1, "b2": self.b2, "b3": self.b3}


def iterate_jet2(map_id, p, x0, n):
    """Exact 2-jet of the n-th iterate along the orbit of ``x0``.

    Jacobians accumulate as products and second derivatives through the
    second-order chain rule; everything is closed form because the per-step
    jets are.  Raises :class:`EscapeError` if the orbit escapes first.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    jet = maps.identity_jet2(x0)
    s = tuple(x0)
    for _ in range(n):
        if is_escaped(s):
            raise EscapeError(f"orbit escaped before {n} steps")
        jet = maps.compose_jet2(maps.jet2(map_id, s, p), jet)
        s = jet.value
    return jet


def _sign_fix(v):
    """Deterministic orientation: first component above noise made positive."""
    for c in v:
        if abs(c) > 1e-12:
            return v if c > 0 else -v
    return v


def build_chart(jet):
    """Chart (v1, v2, v3) aligning the linear part with the Jordan form.

    v3 is the unit eigenvector nearest eigenvalue +1, v1 the unit minimizer
    of |(A+I)v| and v2 the minimum-norm solution of (A+I)v2 = -v1 taken
    orthogonal to v1.  Accepts a :class:`~henonlab.maps.Jet2` or a bare 3x3
    matrix.  Rejects matrices whose multipliers are not within 1e-4 of
    (-1, -1, +1), whose -1 pair is numerically semi-simple (the Jordan
    equation is then unsolvable) or whose basis is ill-conditioned.
    """
    if isinstance(jet, maps.Jet2):
        A = np.asarray(jet.jac, float)
        origin = tuple(jet.value)
    else:
        A = np.asarray(jet, float)
        origin = (0.0, 0.0, 0.0)
    mults = multipliers_of(A)
    target = np.array([-1.0, -1.0, 1.0])
    if np.max(np.abs(np.sort_complex(mults) - target)) > CHART_MULTIPLIER_TOL:
        raise ChartError(f"multipliers {mults} not within "
                         f"{CHART_MULTIPLIER_TOL} of (-1, -1, +1)")
    w, vecs = np.linalg.eig(A)
    k3 = int(np.argmin(np.abs(w - 1.0)))
    v3 = np.real(vecs[:, k3])
    v3 = _sign_fix(v3 / np.linalg.norm(v3))

    AI = A + np.eye(3)
    _, _, vt = np.linalg.svd(AI)
    v1 = _sign_fix(vt[-1])

    # least squares for v2 restricted to the plane orthogonal to v1
    W = np.linalg.svd(v1.reshape(1, 3))[2][1:].T
    t, *_ = np.linalg.lstsq(AI @ W, -v1, rcond=None)
    v2 = W @ t
    defect = float(np.linalg.norm(AI @ v2 + v1))
    if defect > _JORDAN_REJECT:
        raise ChartError(
            f"-1 pair is numerically semi-simple (Jordan defect {defect:.3e}); "
            "no single Jordan block, so this normal form does not apply")
    basis = np.column_stack([v1, v2, v3])
    cond = np.linalg.cond(basis)
    if cond > _COND_LIMIT:
        raise ChartError(f"chart basis ill-conditioned (cond {cond:.3e})")
    lin = np.linalg.solve(basis, A @ basis)
    return NormalFormChart(basis=basis, origin=origin, jordan_defect=defect,
                           linear_residual=float(np.max(np.abs(lin - JORDAN_LINEAR_PART))))


def _substitution_matrix(J):
    """S[beta, alpha] = coefficient of monomial beta in m_alpha(J u)."""
    S = np.zeros((6, 6))
    for a, (j, k) in enumerate(MONOMIALS):
        C = np.outer(J[j], J[k])
        C = 0.5 * (C + C.T)
        for b_, (p_, q_) in enumerate(MONOMIALS):
            S[b_, a] = C[p_, q_] * (1.0 if p_ == q_ else 2.0)
    return S


def homological_matrix(linear_part=JORDAN_LINEAR_PART):
    """Matrix of h -> A h(u) - h(A u) on quadratic coefficient space.

    Coefficients are ordered component-major: entry 6*i + alpha is the
    coefficient of monomial alpha in component i.
    """
    A = np.asarray(linear_part, float)
    return np.kron(A, np.eye(6)) - np.kron(np.eye(3), _substitution_matrix(A))


def resonant_selector():
    """18x6 selector of the resonant slots, columns ordered (a, a1, b, b1, b2, b3)."""
    E = np.zeros((18, 6))
    for col, (i, alpha) in enumerate(RESONANT_SLOTS):
        E[6 * i + alpha, col] = 1.0
    return E


def check_homological_structure(L=None, E=None):
    """Verify the rank structure the reduction relies on.

    For the Jordan linear part, L has rank exactly 14 (the Jordan block
    shrinks the kernel compared with the semi-simple count of 12) and the
    six resonant slots still span a complement of range(L), overlapping it
    only in the removable (b1, b2) directions.  Raises :class:`ChartError`
    if either fact fails numerically.
    """
    L = homological_matrix() if L is None else L
    E = resonant_selector() if E is None else E
    sv = np.linalg.svd(L, compute_uv=False)
    if not (sv[13] > 1e6 * max(sv[14], 1e-300)):
        raise ChartError("homological operator does not have rank 14")
    sv_full = np.linalg.svd(np.hstack([L, E]), compute_uv=False)
    if not (sv_full[17] > 1e-10 * sv_full[0]):
        raise ChartError("resonant span fails to complement range of the "
                         "homological operator")
    return sv


def quadratic_monomial_coeffs(hess):
    """Monomial coefficients of u -> 0.5 * hess[i, j, k] u_j u_k, shape (3, 6)."""
    q = np.empty((3, 6))
    for a, (j, k) in enumerate(MONOMIALS):
        q[:, a] = 0.5 * hess[:, j, j] if j == k else hess[:, j, k]
    return q


def quadratic_reduce(jet, chart: NormalFormChart):
    """Resonant quadratic coefficients of the map in chart coordinates.

    Transforms the quadratic part into the chart, removes everything in the
    range of the homological operator by least squares and reads off the six
    resonant coefficients.  The center orientation is then canonicalized so
    that b <= 0 (see :class:`NormalFormCoeffs`).  The projection residual
    must vanish to within 1e-8 of |Q|, otherwise the chart or the
    multipliers are off and :class:`ChartError` is raised.
    """
    V = chart.basis
    Vinv = np.linalg.inv(V)
    hess_chart = np.einsum("im,mpq,pj,qk->ijk", Vinv, np.asarray(jet.hess, float), V, V)
    q = quadratic_monomial_coeffs(hess_chart).reshape(-1)
    L = homological_matrix()
    E = resonant_selector()
    check_homological_structure(L, E)
    M = np.hstack([L, E])
    sol, *_ = np.linalg.lstsq(M, q, rcond=None)
    qn = np.linalg.norm(q)
    resid = np.linalg.norm(q - M @ sol)
    if resid > 1e-8 * max(qn, 1e-12):
        raise ChartError(f"projection residual {resid:.3e} too large relative "
                         f"to |Q| = {qn:.3e}")
    r = sol[18:]
    orientation = 1
    if r[2] > 0.0:
        r = -r
        orientation = -1
    return NormalFormCoeffs(a=float(r[0]), a1=float(r[1]), b=float(r[2]),
                            b1=float(r[3]), b2=float(r[4]), b3=float(r[5]),
                            orientation=orientation)


def classify(c: NormalFormCoeffs, tol=_CLASSIFY_TOL):
    """Attractor for a*b > tol, repeller for a*b < -tol, else degenerate."""
    ab = c.a * c.b
    if ab > tol:
        return LORENZ_ATTRACTOR
    if ab < -tol:
        return LORENZ_REPELLER
    return DEGENERATE


def jordan_defect_of(matrix):
    """Jordan defect of a bare matrix; inf when the chart is rejected."""
    try:
        return build_chart(np.asarray(matrix, float)).jordan_defect
    except ChartError:
        return math.inf


def reduce_solution(sol, n=None):
    """Full chart + coefficients + classification for a degenerate solution.

    Convenience wrapper used by the CLI and the verification suite: builds
    the 2-jet of the n-th iterate at the first orbit point, the chart at its
    Jacobian, and the reduced coefficients.
    """
    orbit = sol.orbit
    n = orbit.period if n is None else n
    jet = iterate_jet2(orbit.map_id, orbit.params, orbit.points[0], n)
    chart = build_chart(jet)
    coeffs = quadratic_reduce(jet, chart)
    return jet, chart, coeffs
