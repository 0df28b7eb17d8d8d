"""Parameter-plane classification and ball probing.

Classifies a small (m1, m2) grid at fixed b around the 4-winged attractor of
the forward map, then probes a parameter ball inside the period-6 window of
the inverse-family map.
"""

from henonlab import maps, sweep

spec = sweep.SweepSpec(map_id="forward", fixed_param=("b", -0.95),
                       axis1=("m1", 1.70, 1.85, 7),
                       axis2=("m2", -1.00, -0.85, 7),
                       n_transient=3_000, n_sample=30_000)
grid = sweep.run_sweep(spec, n_workers=2)
a1, a2 = spec.axis_values()
symbol = {sweep.ESCAPE: ".", sweep.PERIODIC: "p", sweep.MARGINAL: "m",
          sweep.CHAOTIC: "c", sweep.CHAOTIC_PH: "C"}
print("class map around (1.77, -0.925) at b = -0.95")
print("(. escape, p periodic, m marginal, c chaotic, C chaotic + volume expansion)")
for j in reversed(range(len(a2))):
    print(f"  m2={a2[j]:+.3f}  " + " ".join(symbol[grid[i][j].label]
                                            for i in range(len(a1))))
print("   m1:        " + " ".join(f"{v:.2f}"[1:] for v in a1))

print()
center = maps.InvParams(m1h=0.1974562084897318, m2h=0.0471356235631268, bh=-0.95)
orbit = (1.1109087187819051, 0.5430803496704105, -0.018564282101437988,
         -1.0126053862814206, -0.3759675295870319, -0.6947447970072144)
hits = sweep.ball_probe("inverse", center, 0.01, 30, 6, seed_orbit=orbit,
                        n_workers=2)
print(f"ball probe (radius 0.01, 30 probes) inside the period-6 window: "
      f"{len(hits)} hits")
for h in hits:
    v = sweep._param_vector(h.params)
    print(f"  probe {h.index:2d}: (m1h, m2h, bh) = ({v[0]:+.6f}, {v[1]:+.6f}, "
          f"{v[2]:+.6f})  l1 = {h.exponents[0]:+.5f}  components = {h.component_count}")
