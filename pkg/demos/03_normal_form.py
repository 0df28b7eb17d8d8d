"""Quadratic normal-form reduction and attractor/repeller classification.

At a fixed point of the n-th iterate with multipliers (-1, -1, +1) and a
Jordan block on the -1 pair, the resonant quadratic coefficients (a, b)
decide what generic perturbations create: a*b > 0 births a discrete Lorenz
attractor, a*b < 0 a repeller.
"""

import numpy as np

from henonlab import normal_form, orbits

CASES = [
    ("period 6, bh = -1", 6, -1.0,
     [1.111, 0.543, -0.0186, -1.0126, -0.376, -0.695, 0.397, 0.227]),
    ("period 6, bh = +1", 6, 1.0,
     [0.913, 1.221, 1.326, 1.129, 0.777, 0.664, -0.934, 1.991]),
    # an exact period-3 point: at bh = 1 the period-3 system reduces to the
    # one-dimensional quadratic family, and (m1h, m2h) = (7, -2) is its
    # period-3 fold
    ("period 3, bh = +1", 3, 1.0,
     [3.494, -2.604, 0.110, 7.0, -2.0]),
    # a period-5 point whose normal form classifies as an attractor
    ("period 5, bh = +1", 5, 1.0,
     [0.5174, 0.2675, 0.8475, 1.3175, 1.1788, -0.4948, 1.6124]),
]

for tag, period, b, guess in CASES:
    sol = orbits.solve_degenerate("inverse", period, b, np.array(guess))
    jet, chart, co = normal_form.reduce_solution(sol)
    print(f"{tag}:")
    print(f"  (m1h, m2h) = ({sol.params.m1h:.9g}, {sol.params.m2h:.9g})")
    print(f"  jordan defect: {chart.jordan_defect:.2e}   "
          f"linear residual: {chart.linear_residual:.2e}")
    print(f"  a  = {co.a:+.7g}   a1 = {co.a1:+.7g}")
    print(f"  b  = {co.b:+.7g}   b1 = {co.b1:+.7g}   "
          f"b2 = {co.b2:+.7g}   b3 = {co.b3:+.7g}")
    print(f"  a*b = {co.a * co.b:+.6g}  ->  {normal_form.classify(co)}")
    print()
