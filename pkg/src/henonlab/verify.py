"""Pinned verification suite behind the ``verify-paper`` command.

Every check compares a library computation against a published reference
value, an exact algebraic identity, or an independent recomputation.  Hard
checks gate the exit status; soft checks (the normal-form coefficient
values, whose normalization is convention-dependent) are reported but
non-blocking.  The run is single-threaded and fully deterministic.

The check set is versioned: CHECKS_VERSION only ever increases, and bumping
it must not relax an existing check.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import dynamics, maps, normal_form, orbits
from .quasirandom import box_points

CHECKS_VERSION = 1

# Published period-6 degenerate solutions of the inverse-family map and the
# normal-form coefficients reported with them.
P6_ORIENT_REVERSING = {
    "zs": (1.1109087187819051, 0.5430803496704105, -0.018564282101437988,
           -1.0126053862814206, -0.3759675295870319, -0.6947447970072144),
    "m1": 0.3974562084897318,
    "m2": 0.2271356235631268,
    "b": -1.0,
    "a": -0.0555732,
    "b_coef": -1.6955,
}
P6_ORIENT_PRESERVING = {
    "zs": (0.913442745966901, 1.220643948207064, 1.3256709760748737,
           1.1287783775951246, 0.7765991221464961, 0.6638157026635255),
    "m1": -0.9336687216264129,
    "m2": 1.99067193080051,
    "b": 1.0,
    "a": -0.107789,
    "b_coef": -0.769823,
}

# Codimension-3 fixed points of the forward map.
CODIM3_ORIENTABLE = maps.MapParams(m1=-0.25, m2=1.0, b=1.0)      # z = 1/2 double
CODIM3_NONORIENTABLE = maps.MapParams(m1=1.75, m2=-1.0, b=-1.0)  # z = 1/2, (-1, +-i)

# Parameter point with the numerically observed 4-winged attractor.
FOUR_WING_PARAMS = maps.MapParams(m1=1.77, m2=-0.925, b=-0.95)


@dataclass
class Check:
    name: str
    kind: str          # "hard" | "soft"
    provenance: str    # "published" | "identity" | "derived"
    expected: object
    achieved: object
    tolerance: float
    passed: bool


@dataclass
class VerificationReport:
    version: int
    checks: list

    @property
    def status(self):
        return "pass" if all(c.passed for c in self.checks if c.kind == "hard") else "fail"

    def as_dict(self):
        return {
            "version": self.version,
            "status": self.status,
            "checks": [{
                "name": c.name, "kind": c.kind, "provenance": c.provenance,
                "expected": c.expected, "achieved": c.achieved,
                "tolerance": c.tolerance, "passed": bool(c.passed),
            } for c in self.checks],
        }

    def render_text(self):
        lines = [f"verification suite v{self.version}"]
        for c in self.checks:
            mark = "PASS" if c.passed else ("FAIL" if c.kind == "hard" else "soft-fail")
            ach = c.achieved if isinstance(c.achieved, str) else f"{float(c.achieved):.6g}"
            tol = "" if c.tolerance is None else f" (tol {c.tolerance:g})"
            note = " [normalization-dependent]" if (
                c.kind == "soft" and "coeff" in c.name) else ""
            lines.append(f"[{mark:9s}] {c.name}: {ach}{tol}{note}")
        lines.append(f"overall: {self.status}")
        return "\n".join(lines) + "\n"


def _solve_reference(ref):
    guess = np.array(ref["zs"] + (ref["m1"], ref["m2"]))
    return orbits.solve_degenerate("inverse", 6, ref["b"], guess)


def run_verification():
    """Run every pinned check and return the report."""
    checks = []

    def add(name, kind, provenance, achieved, tolerance, passed=None, expected=None):
        if passed is None:
            passed = bool(achieved < tolerance)
        checks.append(Check(name=name, kind=kind, provenance=provenance,
                            expected=expected, achieved=achieved,
                            tolerance=tolerance, passed=passed))

    for tag, ref in (("orientation-reversing", P6_ORIENT_REVERSING),
                     ("orientation-preserving", P6_ORIENT_PRESERVING)):
        try:
            sol = _solve_reference(ref)
        except (orbits.ConvergenceError, orbits.SingularSystemError) as exc:
            add(f"period6-{tag}-solve", "hard", "published",
                achieved=f"no convergence: {exc}", tolerance=1e-8, passed=False)
            continue
        err = max(float(np.max(np.abs(sol.zs - np.array(ref["zs"])))),
                  abs(sol.params.m1h - ref["m1"]), abs(sol.params.m2h - ref["m2"]))
        add(f"period6-{tag}-solve", "hard", "published", err, 1e-8)

        M = orbits.monodromy(sol.orbit)
        mult_err = float(np.max(np.abs(np.sort_complex(sol.multipliers)
                                       - np.array([-1.0, -1.0, 1.0]))))
        add(f"period6-{tag}-multipliers", "hard", "derived", mult_err, 1e-6)
        add(f"period6-{tag}-trace", "hard", "derived", abs(np.trace(M) + 1.0), 1e-8)
        add(f"period6-{tag}-det", "hard", "derived",
            abs(np.linalg.det(M) - 1.0), 1e-10)

        jet, chart, coeffs = normal_form.reduce_solution(sol)
        add(f"period6-{tag}-jordan-defect", "hard", "derived",
            chart.jordan_defect, 1e-6)
        cls = normal_form.classify(coeffs)
        add(f"period6-{tag}-classification", "hard", "published",
            achieved=cls, tolerance=None,
            passed=(cls == normal_form.LORENZ_ATTRACTOR
                    and coeffs.a < 0.0 and coeffs.b < 0.0),
            expected=normal_form.LORENZ_ATTRACTOR)
        add(f"period6-{tag}-coeff-a", "soft", "published",
            abs(coeffs.a - ref["a"]), 1e-4, expected=ref["a"])
        add(f"period6-{tag}-coeff-b", "soft", "published",
            abs(coeffs.b - ref["b_coef"]), 1e-4, expected=ref["b_coef"])

    # codimension-3 fixed points of the forward map
    J = maps.jacobian("forward", (0.5, 0.5, 0.5), CODIM3_ORIENTABLE)
    tr, inv2, det = orbits._char_coeffs(J)
    coeff_err = max(abs(tr - (-1.0)), abs(inv2 - (-1.0)), abs(det - 1.0))
    add("codim3-orientable-charpoly", "hard", "derived", coeff_err, 1e-12)
    mults = orbits.multipliers_of(J)
    add("codim3-orientable-multipliers", "hard", "published",
        float(np.max(np.abs(np.sort_complex(mults) - np.array([-1., -1., 1.])))),
        1e-6)
    J2 = maps.jacobian("forward", (0.5, 0.5, 0.5), CODIM3_NONORIENTABLE)
    mults2 = np.sort_complex(orbits.multipliers_of(J2))
    target2 = np.sort_complex(np.array([-1.0, 1j, -1j]))
    add("codim3-nonorientable-multipliers", "hard", "published",
        float(np.max(np.abs(mults2 - target2))), 1e-10)

    # exact conjugacy between the inverse of the forward map and the
    # inverse-family map at the corresponding parameters
    triples = [CODIM3_ORIENTABLE, CODIM3_NONORIENTABLE, FOUR_WING_PARAMS,
               maps.MapParams(0.3, 0.4, 0.7), maps.MapParams(-0.6, 1.2, -1.4)]
    pts = 4.0 * box_points(200, [0.0] * 3, [1.0] * 3) - 2.0
    worst = 0.0
    for p in triples:
        for s in pts:
            worst = max(worst, maps.inverse_conjugacy_defect(p, tuple(s)))
    add("inverse-conjugacy-defect", "hard", "identity", worst, 1e-12)

    # exponent-sum identities on bounded orbits
    from .sweep import seed_candidates
    worst = 0.0
    escaped = None
    for p in (FOUR_WING_PARAMS, maps.MapParams(0.0, 0.5, 0.3),
              maps.MapParams(0.1, 0.7, 0.4)):
        x0 = seed_candidates("forward", p, ("fixed-point", 1e-3))[0]
        try:
            lr = dynamics.lyapunov_spectrum("forward", p, x0,
                                            n_transient=2_000, n_sample=100_000)
        except dynamics.EscapeError as exc:
            escaped = f"unexpected escape: {exc}"
            break
        worst = max(worst, abs(lr.sum - math.log(abs(p.b))))
    if escaped is None:
        add("map-exponent-sum", "hard", "identity", worst, 1e-6)
    else:
        add("map-exponent-sum", "hard", "identity", achieved=escaped,
            tolerance=1e-6, passed=False)
    q = maps.SMParams(lam=0.9, alpha=0.45)
    lr = dynamics.sm_lyapunov(q, (0.1, 0.1, 0.1), t_transient=50.0,
                              t_sample=100.0, dt=1e-3)
    add("sm-exponent-sum", "hard", "identity",
        abs(lr.sum + q.lam + q.alpha), 1e-3)

    # closed-form powers of the Belyakov block against direct products
    worst = 0.0
    for lam in (0.3, 0.5, 0.9):
        for mu2 in (-0.04, 0.0, 0.04):
            blk = maps.BelyakovBlock(lam=lam, mu2=mu2)
            A = blk.matrix()
            P = np.eye(2)
            for k in range(1, 51):
                P = A @ P
                err = np.max(np.abs(maps.belyakov_power(blk, k) - P)) / np.max(np.abs(P))
                worst = max(worst, err)
    add("belyakov-power-vs-product", "hard", "identity", worst, 1e-10)
    cont = 0.0
    for lam in (0.3, 0.5, 0.9):
        up = maps.belyakov_power(maps.BelyakovBlock(lam=lam, mu2=1e-10), 7)
        dn = maps.belyakov_power(maps.BelyakovBlock(lam=lam, mu2=-1e-10), 7)
        cont = max(cont, float(np.max(np.abs(up - dn))))
    add("belyakov-continuity-at-zero", "hard", "identity", cont, 1e-6)

    return VerificationReport(version=CHECKS_VERSION, checks=checks)
