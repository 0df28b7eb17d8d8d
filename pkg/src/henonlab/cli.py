"""Command-line surface.

Every command is a thin dispatcher to a library operation: flags mirror the
operation parameters one-to-one, results are serialized in full round-trip
precision, and identical invocations produce byte-identical outputs.  A flat
``key=value`` config file can supply any flag (explicit flags win).

Exit codes: 0 success, 1 usage error, 2 numerical non-convergence (or a
failed verification).  Logs go to stderr; results go to --out or stdout.
"""

import argparse
import sys

import numpy as np

from . import dynamics, formats, maps, normal_form, orbits, sweep, verify


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _floats(text):
    return [float(t) for t in text.replace(",", " ").split()]


def _axis(text):
    name, lo, hi, res = text.split(":")
    return (name, float(lo), float(hi), int(res))


def _fixed(text):
    name, value = text.split("=")
    return (name, float(value))


def _boolean(text):
    return text.strip().lower() in ("1", "true", "yes", "on")


def _seed_rule(text):
    parts = text.split(":")
    if parts[0] == "fixed-point":
        return ("fixed-point", float(parts[1]) if len(parts) > 1 else 1e-3)
    if parts[0] == "point":
        return ("point", tuple(_floats(parts[1])))
    if parts[0] == "orbit":
        off = float(parts[2]) if len(parts) > 2 else 1e-4
        return ("orbit", tuple(_floats(parts[1])), off)
    raise ValueError(f"unknown seed rule {text!r}")


def _read_config(path):
    cfg = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line without '=': {line!r}")
            key, value = line.split("=", 1)
            cfg[key.strip()] = value.strip()
    return cfg


def _apply_config(args, parser_types):
    if not getattr(args, "config", None):
        return args
    cfg = _read_config(args.config)
    unknown = set(cfg) - set(parser_types)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key, raw in cfg.items():
        dest, caster, _ = parser_types[key]
        current = getattr(args, dest, None)
        # store_true flags default to False and can only be switched on here
        if current is None or current is False:
            setattr(args, dest, caster(raw))
    return args


def _apply_defaults(args, parser_types):
    for dest, _, default in parser_types.values():
        if getattr(args, dest, None) is None and default is not None:
            setattr(args, dest, default)
    return args


def _require(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_"), None) is None]
    if missing:
        raise ValueError(f"missing required option(s): {', '.join('--' + n for n in missing)}")


def _params(args):
    if maps.canonical_map_id(args.map) == maps.FORWARD:
        return maps.MapParams(m1=args.m1, m2=args.m2, b=args.b)
    return maps.InvParams(m1h=args.m1, m2h=args.m2, bh=args.b)


def _guess(args, expected=None):
    if getattr(args, "guess_file", None):
        with open(args.guess_file) as fh:
            vals = _floats(fh.read())
    elif getattr(args, "guess", None) is not None:
        vals = args.guess
    else:
        raise ValueError("a guess is required (--guess or --guess-file)")
    if expected is not None and len(vals) != expected:
        raise ValueError(f"guess must have {expected} values, got {len(vals)}")
    return vals


def _emit(text, args):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands

def cmd_fixed_points(args):
    p = _params(args)
    roots = sweep.real_fixed_points(args.map, p)
    entries = []
    if maps.canonical_map_id(args.map) == maps.FORWARD:
        disc = (1.0 - p.b - p.m2) ** 2 + 4.0 * p.m1
    else:
        disc = (1.0 - p.bh - p.m2h) ** 2 + 4.0 * p.m1h
    for z in roots:
        mults = orbits.multipliers_of(maps.jacobian(args.map, (z, z, z), p))
        entries.append({"z": z, "point": [z, z, z],
                        "multiplicity": 2 if disc == 0.0 else 1,
                        "multipliers": formats.complex_pairs(mults)})
    out = {"map": maps.canonical_map_id(args.map),
           "params": {"m1": args.m1, "m2": args.m2, "b": args.b},
           "fixed_points": entries}
    if args.format == "text":
        lines = []
        if not entries:
            lines.append("no real fixed points")
        for e in entries:
            ms = ", ".join(f"{m[0]:.6g}{m[1]:+.6g}i" for m in e["multipliers"])
            tag = " (double)" if e["multiplicity"] == 2 else ""
            lines.append(f"z = {formats.fmt6(e['z'])}{tag}  multipliers: {ms}")
        _emit("\n".join(lines) + "\n", args)
    else:
        _emit(formats.dump_json(out), args)
    return 0


def cmd_periodic(args):
    _require(args, "m1", "m2", "b", "period")
    p = _params(args)
    orbit = orbits.find_periodic_orbit(args.map, p, args.period,
                                       _guess(args, args.period))
    mults = orbits.multipliers_of(orbits.monodromy(orbit))
    _emit(formats.dump_json(formats.orbit_dict(orbit, mults)), args)
    return 0


def _solve_and_reduce(args):
    _require(args, "period", "b_fixed")
    sol = orbits.solve_degenerate(args.map, args.period, args.b_fixed,
                                  _guess(args, args.period + 2))
    try:
        _, chart, coeffs = normal_form.reduce_solution(sol)
        cls = normal_form.classify(coeffs)
    except normal_form.ChartError:
        chart, coeffs, cls = None, None, None
    return sol, chart, coeffs, cls


def cmd_degenerate(args):
    sol, chart, coeffs, cls = _solve_and_reduce(args)
    _emit(formats.dump_json(
        formats.degenerate_solution_dict(sol, chart, coeffs, cls)), args)
    return 0


def cmd_normal_form(args):
    sol, chart, coeffs, cls = _solve_and_reduce(args)
    if coeffs is None:
        raise normal_form.ChartError("no Jordan chart at the converged solution")
    out = {
        "chart": {"basis": [list(r) for r in chart.basis],
                  "origin": list(chart.origin),
                  "jordan_defect": chart.jordan_defect,
                  "linear_residual": chart.linear_residual},
        "coeffs": coeffs.as_dict(),
        "orientation": coeffs.orientation,
        "classification": cls,
        "ab": coeffs.a * coeffs.b,
    }
    _emit(formats.dump_json(out), args)
    return 0


def cmd_hunt(args):
    _require(args, "period", "b_fixed")
    sols = orbits.hunt_degenerate(args.map, args.period, args.b_fixed,
                                  args.box, args.seeds,
                                  n_workers=sweep.worker_count(args.threads))
    entries = []
    for sol in sols:
        try:
            _, chart, coeffs = normal_form.reduce_solution(sol)
            cls = normal_form.classify(coeffs)
        except normal_form.ChartError:
            chart, coeffs, cls = None, None, None
        entries.append(formats.degenerate_solution_dict(sol, chart, coeffs, cls))
    _emit(formats.dump_json({"period": args.period, "b": args.b_fixed,
                             "box": args.box, "n_seeds": args.seeds,
                             "solutions": entries}), args)
    return 0


def _initial_state(args, p):
    if args.x0 is not None:
        return tuple(args.x0)
    rule = args.seed_rule or ("fixed-point", 1e-3)
    cands = sweep.seed_candidates(args.map, p, rule)
    return cands[0]


def cmd_lyapunov(args):
    _require(args, "m1", "m2", "b")
    p = _params(args)
    lr = dynamics.lyapunov_spectrum(args.map, p, _initial_state(args, p),
                                    n_transient=args.transient,
                                    n_sample=args.sample)
    _emit(formats.dump_json(formats.lyapunov_dict(lr)), args)
    return 0


def cmd_attract(args):
    _require(args, "m1", "m2", "b")
    p = _params(args)
    samp = dynamics.sample_attractor(args.map, p, _initial_state(args, p),
                                     n_transient=args.transient,
                                     n_sample=args.sample,
                                     expected_period=args.period)
    if args.render:
        import io
        buf = io.StringIO()
        rows = [(str(i), pt[0], pt[1], pt[2]) for i, pt in enumerate(samp.points)]
        formats.write_csv(rows, formats.POINTCLOUD_CSV_HEADER, buf)
        _emit(buf.getvalue(), args)
    else:
        out = {"escaped": bool(samp.escaped),
               "component_count": samp.component_count,
               "n_points": int(len(samp.points)),
               "bounding_boxes": None if samp.bounding_boxes is None else
               [[list(lo), list(hi)] for lo, hi in samp.bounding_boxes]}
        _emit(formats.dump_json(out), args)
    return 0


def cmd_sweep(args):
    _require(args, "fixed", "axis1", "axis2")
    spec = sweep.SweepSpec(map_id=args.map, fixed_param=args.fixed,
                           axis1=args.axis1, axis2=args.axis2,
                           n_transient=args.transient, n_sample=args.sample,
                           seed_rule=args.seed_rule or ("fixed-point", 1e-3))
    grid = sweep.run_sweep(spec, n_workers=args.threads)
    rows = formats.sweep_rows(spec, grid)
    if args.format == "json":
        cells = [{"axis1": r[0], "axis2": r[1], "class": r[2],
                  "exponents": [r[3], r[4], r[5]]} for r in rows]
        out = {"map": maps.canonical_map_id(args.map),
               "fixed": {args.fixed[0]: args.fixed[1]},
               "axis1": {"name": spec.axis1[0], "lo": spec.axis1[1],
                         "hi": spec.axis1[2], "resolution": spec.axis1[3]},
               "axis2": {"name": spec.axis2[0], "lo": spec.axis2[1],
                         "hi": spec.axis2[2], "resolution": spec.axis2[3]},
               "cells": cells}
        _emit(formats.dump_json(out), args)
    else:
        import io
        buf = io.StringIO()
        formats.write_csv(rows, formats.SWEEP_CSV_HEADER, buf)
        _emit(buf.getvalue(), args)
    return 0


def cmd_ball_probe(args):
    _require(args, "center", "radius", "probes", "period")
    center = sweep._params_from_vector(args.map, np.array(args.center))
    hits = sweep.ball_probe(args.map, center, args.radius, args.probes,
                            args.period, seed_orbit=args.seed_orbit,
                            n_transient=args.transient, n_sample=args.sample,
                            n_points=args.points, n_workers=args.threads)
    out = {"map": maps.canonical_map_id(args.map), "center": list(args.center),
           "radius": args.radius, "n_probes": args.probes,
           "hits": [{"index": h.index,
                     "params": list(sweep._param_vector(h.params)),
                     "exponents": list(h.exponents),
                     "component_count": h.component_count} for h in hits]}
    _emit(formats.dump_json(out), args)
    return 0


def cmd_sm(args):
    q = maps.SMParams(lam=args.lam, alpha=args.alpha)
    x0 = tuple(args.x0) if args.x0 is not None else (0.1, 0.1, 0.1)
    if args.exponents:
        lr = dynamics.sm_lyapunov(q, x0, t_transient=args.t_transient,
                                  t_sample=args.t_sample, dt=args.dt)
        _emit(formats.dump_json(formats.lyapunov_dict(lr)), args)
    else:
        traj = dynamics.sm_integrate(q, x0, args.t_end, args.dt)
        import io
        buf = io.StringIO()
        rows = [(str(i), pt[0], pt[1], pt[2]) for i, pt in enumerate(traj)]
        formats.write_csv(rows, formats.POINTCLOUD_CSV_HEADER, buf)
        _emit(buf.getvalue(), args)
    return 0


def cmd_verify_paper(args):
    report = verify.run_verification()
    if args.format == "json":
        _emit(formats.dump_json(report.as_dict()), args)
    else:
        _emit(report.render_text(), args)
    return 0 if report.status == "pass" else 2


# ---------------------------------------------------------------------------

def _build_parser():
    ap = _Parser(prog="henonlab",
                 description="numerical laboratory for 3D Henon-family maps")
    sub = ap.add_subparsers(dest="command", required=True)
    types = {}

    def new(name, fn, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(fn=fn)
        t = types[name] = {}
        sp.add_argument("--config", help="flat key=value config file")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--threads", type=int,
                        help="worker count (default: HENONLAB_WORKERS or cpu count)")
        t["threads"] = ("threads", int, None)
        return sp, t

    def arg(sp, t, name, typ, **kw):
        # defaults are applied after the config merge so config values can
        # override them while explicit flags still win over both
        default = kw.pop("default", None)
        action = sp.add_argument(name, type=typ, default=None, **kw)
        t[name.lstrip("-")] = (action.dest, typ, default)

    def map_params(sp, t):
        arg(sp, t, "--map", str, default="forward",
            help="forward | inverse (default forward)")
        arg(sp, t, "--m1", float, help="m1 (m1h for the inverse map)")
        arg(sp, t, "--m2", float, help="m2 (m2h for the inverse map)")
        arg(sp, t, "--b", float, help="b (bh for the inverse map)")

    sp, t = new("fixed-points", cmd_fixed_points,
                help="real fixed points and their multipliers")
    map_params(sp, t)
    arg(sp, t, "--format", str, default="json", choices=("json", "text"))

    sp, t = new("periodic", cmd_periodic, help="Newton-solve a periodic orbit")
    map_params(sp, t)
    arg(sp, t, "--period", int)
    arg(sp, t, "--guess", _floats, help="comma-separated delay coordinates")
    arg(sp, t, "--guess-file", str)

    for name, fn in (("degenerate", cmd_degenerate), ("normal-form", cmd_normal_form)):
        sp, t = new(name, fn,
                    help="solve for a degenerate orbit with multipliers (-1,-1,+1)"
                    if name == "degenerate" else
                    "degenerate solve plus quadratic normal-form reduction")
        arg(sp, t, "--map", str, default="inverse")
        arg(sp, t, "--period", int)
        arg(sp, t, "--b-fixed", float, help="+1 or -1")
        arg(sp, t, "--guess", _floats, help="z1..zn,m1,m2")
        arg(sp, t, "--guess-file", str)

    sp, t = new("hunt", cmd_hunt, help="seeded search for degenerate solutions")
    arg(sp, t, "--map", str, default="inverse")
    arg(sp, t, "--period", int)
    arg(sp, t, "--b-fixed", float)
    arg(sp, t, "--box", float, default=2.0, help="seed box half-width")
    arg(sp, t, "--seeds", int, default=10_000)

    sp, t = new("lyapunov", cmd_lyapunov, help="Lyapunov spectrum of a map orbit")
    map_params(sp, t)
    arg(sp, t, "--x0", _floats, help="initial state x,y,z")
    arg(sp, t, "--seed-rule", _seed_rule)
    arg(sp, t, "--transient", int, default=dynamics.DEFAULT_N_TRANSIENT)
    arg(sp, t, "--sample", int, default=dynamics.DEFAULT_N_SAMPLE)

    sp, t = new("attract", cmd_attract, help="sample an attractor")
    map_params(sp, t)
    arg(sp, t, "--x0", _floats)
    arg(sp, t, "--seed-rule", _seed_rule)
    arg(sp, t, "--transient", int, default=dynamics.DEFAULT_N_TRANSIENT)
    arg(sp, t, "--sample", int, default=20_000)
    arg(sp, t, "--period", int, default=1, help="expected component count")
    sp.add_argument("--render", action="store_true",
                    help="emit the CSV point cloud instead of the summary")
    t["render"] = ("render", _boolean, False)

    sp, t = new("sweep", cmd_sweep, help="classify a parameter-plane grid")
    arg(sp, t, "--map", str, default="forward")
    arg(sp, t, "--fixed", _fixed, help="name=value of the held parameter")
    arg(sp, t, "--axis1", _axis, help="name:lo:hi:resolution")
    arg(sp, t, "--axis2", _axis, help="name:lo:hi:resolution")
    arg(sp, t, "--transient", int, default=2_000)
    arg(sp, t, "--sample", int, default=20_000)
    arg(sp, t, "--seed-rule", _seed_rule)
    arg(sp, t, "--format", str, default="csv", choices=("csv", "json"))

    sp, t = new("ball-probe", cmd_ball_probe,
                help="probe a parameter ball for periodic Lorenz attractors")
    arg(sp, t, "--map", str, default="inverse")
    arg(sp, t, "--center", _floats, help="m1,m2,b of the ball center")
    arg(sp, t, "--radius", float)
    arg(sp, t, "--probes", int)
    arg(sp, t, "--period", int, help="expected component count")
    arg(sp, t, "--seed-orbit", _floats, help="delay coordinates of the organizing orbit")
    arg(sp, t, "--transient", int, default=20_000)
    arg(sp, t, "--sample", int, default=40_000)
    arg(sp, t, "--points", int, default=12_000)

    sp, t = new("sm", cmd_sm, help="integrate the Shimizu-Morioka flow")
    arg(sp, t, "--lambda", float, dest="lam", help="damping parameter")
    arg(sp, t, "--alpha", float)
    arg(sp, t, "--x0", _floats)
    arg(sp, t, "--t-end", float, default=100.0)
    arg(sp, t, "--dt", float, default=1e-3)
    sp.add_argument("--exponents", action="store_true",
                    help="compute Lyapunov exponents instead of a trajectory")
    t["exponents"] = ("exponents", _boolean, False)
    arg(sp, t, "--t-transient", float, default=100.0)
    arg(sp, t, "--t-sample", float, default=200.0)

    sp, t = new("verify-paper", cmd_verify_paper,
                help="run the pinned verification suite")
    arg(sp, t, "--format", str, default="text", choices=("text", "json"))

    return ap, types


def main(argv=None):
    ap, types = _build_parser()
    args = ap.parse_args(argv)
    try:
        args = _apply_config(args, types[args.command])
        args = _apply_defaults(args, types[args.command])
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"henonlab {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (orbits.ConvergenceError, orbits.SingularSystemError,
            dynamics.EscapeError, normal_form.ChartError) as exc:
        print(f"henonlab {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
