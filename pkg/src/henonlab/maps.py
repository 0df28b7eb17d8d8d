"""Three-dimensional quadratic delay maps and their exact derivatives.

The forward map

    (x, y, z) -> (y, z, m1 + b*x + m2*y - z**2)

is a polynomial diffeomorphism with constant Jacobian determinant ``b``.  Its
inverse is smoothly conjugate to a second delay map of the same family,

    (x, y, z) -> (y, z, m1h + bh*x + m2h*z - y**2),

under the parameter correspondence ``bh = 1/b, m1h = m1/b**2, m2h = -m2/b``
and the coordinate change implemented by :func:`inverse_conjugacy_defect`.

Because every map here is a quadratic polynomial, Jacobians and second
derivatives are exact closed forms; :func:`jet2` returns them as a
:class:`Jet2` and :func:`compose_jet2` chains them to second order.  The
module also evaluates the Shimizu-Morioka vector field and the closed-form
powers of the 2x2 block that smoothly interpolates between a resonant saddle
and a saddle-focus.
"""

import math
from dataclasses import dataclass

import numpy as np

FORWARD = "forward"
INVERSE = "inverse"
LIMIT_ORBIT_FLIP = "limit-orbit-flip"
LIMIT_GENERIC = "limit-generic"

# aliases kept for callers that index the two limit maps by letter
_MAP_ALIASES = {"limit-a": LIMIT_ORBIT_FLIP, "limit-b": LIMIT_GENERIC}
MAP_IDS = (FORWARD, INVERSE, LIMIT_ORBIT_FLIP, LIMIT_GENERIC)


def canonical_map_id(map_id):
    mid = _MAP_ALIASES.get(map_id, map_id)
    if mid not in MAP_IDS:
        raise ValueError(f"unknown map_id {map_id!r}; expected one of {MAP_IDS}")
    return mid


@dataclass(frozen=True)
class MapParams:
    """Parameters (m1, m2, b) of the forward map; ``b`` is its Jacobian."""

    m1: float
    m2: float
    b: float

    def __post_init__(self):
        if self.b == 0.0:
            raise ValueError("b must be nonzero (the map must be invertible)")


@dataclass(frozen=True)
class InvParams:
    """Parameters (m1h, m2h, bh) of the inverse-family map."""

    m1h: float
    m2h: float
    bh: float

    def __post_init__(self):
        if self.bh == 0.0:
            raise ValueError("bh must be nonzero (the map must be invertible)")


@dataclass(frozen=True)
class SMParams:
    """Shimizu-Morioka parameters; ``alpha > 0`` keeps the equilibria real."""

    lam: float
    alpha: float


@dataclass(frozen=True)
class BelyakovBlock:
    """2x2 linear block [[lam, 1], [mu2, lam]] near a double stable multiplier.

    Restricted to ``lam > 0``; the closed-form power below takes the principal
    branch of the angle variable, which is only single-valued there.
    """

    lam: float
    mu2: float

    def __post_init__(self):
        if self.lam <= 0.0:
            raise ValueError("BelyakovBlock requires lam > 0")
        if abs(self.mu2) >= self.lam * self.lam:
            raise ValueError("BelyakovBlock requires |mu2| < lam**2")

    def matrix(self):
        return np.array([[self.lam, 1.0], [self.mu2, self.lam]])


@dataclass
class Jet2:
    """Value, Jacobian and symmetric second derivative of a map at a point.

    ``hess[i, j, k]`` is the second derivative of output component ``i`` with
    respect to inputs ``j`` and ``k``; it is symmetric in (j, k).
    """

    value: tuple
    jac: np.ndarray
    hess: np.ndarray


def henon3d_step(s, p: MapParams):
    """One iteration of the forward map.  Non-finite output signals escape."""
    x, y, z = s
    return (y, z, p.m1 + p.b * x + p.m2 * y - z * z)


def henon3d_inv_step(s, p: InvParams):
    """One iteration of the inverse-family map."""
    x, y, z = s
    return (y, z, p.m1h + p.bh * x + p.m2h * z - y * y)


def limit_map_step(variant, s, p: MapParams):
    """Evaluate one of the two return-map limit forms.

    State ordering is (x1, x2, y).  The ``generic`` variant coincides with
    :func:`henon3d_step` under the relabeling (x2, x1, y) -> (x, y, z); the
    ``orbit-flip`` variant becomes generic (with m2 negated) after the change
    x1 -> (x1 - m2*x2) / (-b).
    """
    x1, x2, y = s
    if variant in ("generic", LIMIT_GENERIC, "limit-b"):
        # summands ordered as in henon3d_step so the positional relabeling
        # (x2, x1, y) -> (x, y, z) is bit-identical, not just equal
        return (y, x1, p.m1 + p.b * x2 + p.m2 * x1 - y * y)
    if variant in ("orbit-flip", LIMIT_ORBIT_FLIP, "limit-a"):
        return (-p.b * x2 + p.m2 * y, y, p.m1 - x1 - y * y)
    raise ValueError(f"unknown limit map variant {variant!r}")


def map_step(map_id, s, p):
    """Dispatch a single step of any supported map."""
    mid = canonical_map_id(map_id)
    if mid == FORWARD:
        return henon3d_step(s, p)
    if mid == INVERSE:
        return henon3d_inv_step(s, p)
    return limit_map_step(mid, s, p)


def jacobian(map_id, s, p):
    """Analytic 3x3 Jacobian of the selected map at state ``s``.

    The determinant is the constant ``b`` (forward, both limit maps) or
    ``bh`` (inverse) identically in ``s``.
    """
    mid = canonical_map_id(map_id)
    x, y, z = s
    if mid == FORWARD:
        return np.array([[0.0, 1.0, 0.0],
                         [0.0, 0.0, 1.0],
                         [p.b, p.m2, -2.0 * z]])
    if mid == INVERSE:
        return np.array([[0.0, 1.0, 0.0],
                         [0.0, 0.0, 1.0],
                         [p.bh, -2.0 * y, p.m2h]])
    if mid == LIMIT_GENERIC:
        return np.array([[0.0, 0.0, 1.0],
                         [1.0, 0.0, 0.0],
                         [p.m2, p.b, -2.0 * z]])
    # orbit-flip variant, state (x1, x2, y)
    return np.array([[0.0, -p.b, p.m2],
                     [0.0, 0.0, 1.0],
                     [-1.0, 0.0, -2.0 * z]])


def jet2(map_id, s, p):
    """Exact 2-jet of one map step.

    The quadratic part of each map is state independent: a single -2 entry in
    the component carrying the squared variable.
    """
    mid = canonical_map_id(map_id)
    hess = np.zeros((3, 3, 3))
    if mid == INVERSE:
        hess[2, 1, 1] = -2.0
    else:
        # forward and both limit maps square their third state component
        hess[2, 2, 2] = -2.0
    return Jet2(value=map_step(mid, s, p), jac=jacobian(mid, s, p), hess=hess)


def compose_jet2(outer: Jet2, inner: Jet2):
    """2-jet of (outer o inner); ``outer`` must be taken at ``inner.value``."""
    jac = outer.jac @ inner.jac
    hess = (np.einsum("im,mjk->ijk", outer.jac, inner.hess)
            + np.einsum("iml,mj,lk->ijk", outer.hess, inner.jac, inner.jac))
    return Jet2(value=outer.value, jac=jac, hess=hess)


def identity_jet2(s):
    return Jet2(value=tuple(s), jac=np.eye(3), hess=np.zeros((3, 3, 3)))


def param_correspondence(p: MapParams) -> InvParams:
    """Parameters at which the inverse-family map is conjugate to the
    inverse of the forward map: bh = 1/b, m1h = m1/b**2, m2h = -m2/b."""
    return InvParams(m1h=p.m1 / (p.b * p.b), m2h=-p.m2 / p.b, bh=1.0 / p.b)


def conjugacy_change(s, p: MapParams):
    """Coordinate change intertwining the two maps: reverse the coordinate
    order and scale by -1/b.  Its inverse reverses and scales by -b."""
    x, y, z = s
    c = -1.0 / p.b
    return (c * z, c * y, c * x)


def henon3d_inverse(s, p: MapParams):
    """Exact inverse of :func:`henon3d_step`."""
    x, y, z = s
    return ((z - p.m1 - p.m2 * x + y * y) / p.b, x, y)


def inverse_conjugacy_defect(p: MapParams, s):
    """Norm of C(H^-1(s)) - G(C(s)) where H is the forward map, G the
    inverse-family map at the corresponding parameters and C the coordinate
    change above.  Zero (to rounding) for every finite state."""
    ph = param_correspondence(p)
    lhs = conjugacy_change(henon3d_inverse(s, p), p)
    rhs = henon3d_inv_step(conjugacy_change(s, p), ph)
    return math.sqrt(sum((a - b) * (a - b) for a, b in zip(lhs, rhs)))


def sm_field(s, q: SMParams):
    """Shimizu-Morioka vector field (X' = Y, Y' = X(1-Z) - lam*Y,
    Z' = -alpha*Z + X^2); equivariant under (X, Y) -> (-X, -Y)."""
    x, y, z = s
    return (y, x * (1.0 - z) - q.lam * y, -q.alpha * z + x * x)


def sm_jacobian(s, q: SMParams):
    x, y, z = s
    return np.array([[0.0, 1.0, 0.0],
                     [1.0 - z, -q.lam, -x],
                     [2.0 * x, 0.0, -q.alpha]])


def sm_equilibria(q: SMParams):
    """The three equilibria (0,0,0) and (+-sqrt(alpha), 0, 1)."""
    if q.alpha < 0:
        return [(0.0, 0.0, 0.0)]
    r = math.sqrt(q.alpha)
    return [(0.0, 0.0, 0.0), (r, 0.0, 1.0), (-r, 0.0, 1.0)]


def belyakov_power(blk: BelyakovBlock, k):
    """k-th power of the Belyakov block in closed form.

    Uses the hyperbolic branch for mu2 > 0, the trigonometric branch for
    mu2 < 0 and the continuous limit S_k = k/lam at mu2 = 0.  (A published
    table states S_k = 0 at mu2 = 0, which contradicts the direct power
    [[lam, 1], [0, lam]]^k = lam^k [[1, k/lam], [0, 1]]; the continuous limit
    is the one consistent with the matrix product and is used here.)
    """
    if k < 0 or int(k) != k:
        raise ValueError("k must be a non-negative integer")
    k = int(k)
    if k == 0:
        return np.eye(2)
    lam, mu2 = blk.lam, blk.mu2
    pre = lam ** k * (1.0 - mu2 / (lam * lam)) ** (k / 2.0)
    if mu2 > 0.0:
        phi = math.atanh(math.sqrt(mu2) / lam)
        ck = math.cosh(k * phi)
        sk = math.sinh(k * phi) / math.sqrt(mu2)
    elif mu2 < 0.0:
        phi = -math.atan(math.sqrt(-mu2) / lam)
        ck = math.cos(k * phi)
        sk = -math.sin(k * phi) / math.sqrt(-mu2)
    else:
        ck = 1.0
        sk = k / lam
    return pre * np.array([[ck, sk], [mu2 * sk, ck]])
