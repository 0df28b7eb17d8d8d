"""Serialization: round-trip float formatting, CSV/JSON writers, schemas.

Numbers are written in shortest round-trip form (Python ``repr``), so
identical runs produce byte-identical files.  Human-readable tables round
to 6 significant digits; files always keep full precision.
"""

import json
import math
import os

import numpy as np

_SCHEMA_DIR = os.path.join(os.path.dirname(__file__), "schemas")


def fmt(x):
    """Shortest round-trip decimal form of a float."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def fmt6(x):
    """6-significant-digit form for human-readable tables."""
    x = float(x)
    return "nan" if math.isnan(x) else f"{x:.6g}"


def _pyify(obj):
    """Convert numpy scalars/arrays and NaN to JSON-friendly values."""
    if isinstance(obj, dict):
        return {k: _pyify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_pyify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_pyify(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return None if math.isnan(x) else x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dump_json(obj, fp=None):
    """Serialize to JSON with stable key order and full float precision."""
    text = json.dumps(_pyify(obj), indent=2, allow_nan=False) + "\n"
    if fp is not None:
        fp.write(text)
    return text


def write_csv(rows, header, fp):
    """Write rows of mixed str/float cells; floats in round-trip precision."""
    fp.write(",".join(header) + "\n")
    for row in rows:
        fp.write(",".join(c if isinstance(c, str) else fmt(c) for c in row) + "\n")


def complex_pairs(values):
    return [[float(v.real), float(v.imag)] for v in values]


def degenerate_solution_dict(sol, chart=None, coeffs=None, classification=None):
    """JSON form of a degenerate solution (plus normal-form data if given)."""
    p = sol.params
    out = {
        "orbit": [list(pt) for pt in sol.orbit.points],
        "zs": list(sol.orbit.zs),
        "params": {"m1": p.m1h, "m2": p.m2h, "b": p.bh}
        if hasattr(p, "m1h") else {"m1": p.m1, "m2": p.m2, "b": p.b},
        "map": sol.orbit.map_id,
        "period": sol.orbit.period,
        "is_minimal": bool(sol.orbit.is_minimal),
        "multipliers": complex_pairs(sol.multipliers),
        "residual": float(np.max(np.abs(sol.residuals))),
    }
    if chart is not None:
        out["jordan_defect"] = chart.jordan_defect
    if coeffs is not None:
        out["coeffs"] = coeffs.as_dict()
        out["orientation"] = coeffs.orientation
    if classification is not None:
        out["classification"] = classification
    return out


def orbit_dict(orbit, multipliers=None):
    out = {
        "map": orbit.map_id,
        "period": orbit.period,
        "zs": list(orbit.zs),
        "points": [list(pt) for pt in orbit.points],
        "residual": orbit.residual,
        "is_minimal": bool(orbit.is_minimal),
    }
    if multipliers is not None:
        out["multipliers"] = complex_pairs(multipliers)
    return out


def lyapunov_dict(lr):
    return {
        "exponents": list(lr.exponents),
        "n_transient": lr.n_transient,
        "n_sample": lr.n_sample,
        "convergence_halfwidth": lr.convergence_halfwidth,
        "escaped": bool(lr.escaped),
        "pseudo_hyperbolicity_indicator": float(lr.exponents[0] + lr.exponents[1]),
    }


def sweep_rows(spec, grid):
    """Flat (axis1, axis2, class, l1, l2, l3) rows in row-major grid order."""
    a1, a2 = spec.axis_values()
    rows = []
    for i, v1 in enumerate(a1):
        for j, v2 in enumerate(a2):
            cell = grid[i][j]
            e = cell.exponents
            rows.append((float(v1), float(v2), cell.label,
                         float(e[0]), float(e[1]), float(e[2])))
    return rows


SWEEP_CSV_HEADER = ("axis1", "axis2", "class", "lambda1", "lambda2", "lambda3")
POINTCLOUD_CSV_HEADER = ("iter", "x", "y", "z")


def load_schema(name):
    with open(os.path.join(_SCHEMA_DIR, name + ".schema.json")) as fh:
        return json.load(fh)


def validate_json(obj, schema):
    """Minimal JSON-schema validation (type/required/properties/items/enum).

    Covers the subset the shipped schemas use; raises ValueError with a
    path on the first violation.
    """
    if isinstance(schema, str):
        schema = load_schema(schema)

    def fail(path, msg):
        raise ValueError(f"schema violation at {path or '$'}: {msg}")

    def check(o, s, path):
        t = s.get("type")
        if t:
            ok = {
                "object": lambda v: isinstance(v, dict),
                "array": lambda v: isinstance(v, list),
                "string": lambda v: isinstance(v, str),
                "number": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
                "integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
                "boolean": lambda v: isinstance(v, bool),
                "null": lambda v: v is None,
            }
            types = t if isinstance(t, list) else [t]
            if not any(ok[tt](o) for tt in types):
                fail(path, f"expected type {t}, got {type(o).__name__}")
        if "enum" in s and o not in s["enum"]:
            fail(path, f"{o!r} not in enum {s['enum']}")
        if isinstance(o, dict):
            for req in s.get("required", ()):
                if req not in o:
                    fail(path, f"missing required key {req!r}")
            props = s.get("properties", {})
            if s.get("additionalProperties") is False:
                extra = set(o) - set(props)
                if extra:
                    fail(path, f"unexpected keys {sorted(extra)}")
            for k, v in o.items():
                if k in props:
                    check(v, props[k], f"{path}.{k}")
        if isinstance(o, list):
            items = s.get("items")
            if items is not None:
                for i, v in enumerate(o):
                    check(v, items, f"{path}[{i}]")
            n = s.get("minItems")
            if n is not None and len(o) < n:
                fail(path, f"expected at least {n} items")
            n = s.get("maxItems")
            if n is not None and len(o) > n:
                fail(path, f"expected at most {n} items")

    check(obj, schema, "")
    return True
