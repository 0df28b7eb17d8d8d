import numpy as np
import pytest

from henonlab import dynamics, maps, sweep

FOUR_WING = maps.MapParams(m1=1.77, m2=-0.925, b=-0.95)
P6_ATTRACTOR = maps.InvParams(m1h=0.1974562084897318, m2h=0.0471356235631268,
                              bh=-0.95)
P6_SEED_ORBIT = (1.1109087187819051, 0.5430803496704105, -0.018564282101437988,
                 -1.0126053862814206, -0.3759675295870319, -0.6947447970072144)


class TestClassifyExponents:
    def test_all_classes(self):
        assert sweep.classify_exponents(0.0, 0.0, True) == sweep.ESCAPE
        assert sweep.classify_exponents(0.02, 0.01, False) == sweep.CHAOTIC_PH
        assert sweep.classify_exponents(0.02, -0.05, False) == sweep.CHAOTIC
        assert sweep.classify_exponents(-0.02, -0.05, False) == sweep.PERIODIC
        assert sweep.classify_exponents(0.0005, -0.05, False) == sweep.MARGINAL


class TestSweepSpec:
    def test_axes_must_be_distinct(self):
        with pytest.raises(ValueError):
            sweep.SweepSpec(map_id="forward", fixed_param=("b", 1.0),
                            axis1=("m1", 0, 1, 3), axis2=("m1", 0, 1, 3))

    def test_unknown_parameter_name(self):
        with pytest.raises(ValueError):
            sweep.SweepSpec(map_id="forward", fixed_param=("q", 1.0),
                            axis1=("m1", 0, 1, 3), axis2=("m2", 0, 1, 3))

    def test_inverse_axis_aliases(self):
        spec = sweep.SweepSpec(map_id="inverse", fixed_param=("bh", -0.95),
                               axis1=("m1h", 0.0, 0.4, 2), axis2=("m2h", 0.0, 0.2, 2))
        p = spec.params_at(0.1, 0.2)
        assert p == maps.InvParams(m1h=0.1, m2h=0.2, bh=-0.95)


class TestSeedCandidates:
    def test_fixed_point_rule_prefers_degenerate_root(self):
        # roots 0.521 and -3.396; the one nearest z = 1/2 is picked
        seeds = sweep.seed_candidates("forward", FOUR_WING, ("fixed-point", 1e-3))
        assert len(seeds) == 1
        assert abs(seeds[0][2] - 0.5211746156521251) < 2e-3

    def test_vertex_fallback_without_real_roots(self):
        p = maps.MapParams(m1=-1.0, m2=0.2, b=0.3)   # negative discriminant
        seeds = sweep.seed_candidates("forward", p, ("fixed-point", 1e-3))
        c = 1.0 - p.b - p.m2
        assert seeds == [(-c / 2.0,) * 3]

    def test_point_rule_passthrough(self):
        seeds = sweep.seed_candidates("forward", FOUR_WING, ("point", (1.0, 2.0, 3.0)))
        assert seeds == [(1.0, 2.0, 3.0)]

    def test_orbit_rule_offers_both_sides(self):
        seeds = sweep.seed_candidates("inverse", P6_ATTRACTOR,
                                      ("orbit", P6_SEED_ORBIT, 1e-4))
        assert len(seeds) == 2
        mid = 0.5 * (np.array(seeds[0]) + np.array(seeds[1]))
        assert np.max(np.abs(np.array(seeds[0]) - mid)) < 1e-3

    def test_orbit_rule_falls_back_to_fixed_point(self):
        # continuation from a hopeless guess fails and the fixed-point rule
        # takes over
        seeds = sweep.seed_candidates("forward", FOUR_WING,
                                      ("orbit", (1e5, -1e5, 1e5), 1e-4))
        assert len(seeds) == 1
        assert abs(seeds[0][2] - 0.5211746156521251) < 2e-3


class TestRunSweep:
    def test_degenerate_grid_matches_direct_classification(self):
        spec = sweep.SweepSpec(map_id="forward", fixed_param=("b", -0.95),
                               axis1=("m1", 1.77, 1.77, 1),
                               axis2=("m2", -0.925, -0.925, 1),
                               n_transient=3_000, n_sample=30_000)
        grid = sweep.run_sweep(spec, n_workers=1)
        seed = sweep.seed_candidates("forward", FOUR_WING, ("fixed-point", 1e-3))[0]
        lr = dynamics.lyapunov_spectrum("forward", FOUR_WING, seed,
                                        n_transient=3_000, n_sample=30_000)
        direct = sweep.classify_exponents(lr.exponents[0], lr.exponents[1], False)
        assert grid[0][0].label == direct
        assert np.max(np.abs(grid[0][0].exponents - lr.exponents)) < 1e-9

    def test_grid_straddling_four_wing_point_has_chaotic_ph_cells(self):
        spec = sweep.SweepSpec(map_id="forward", fixed_param=("b", -0.95),
                               axis1=("m1", 1.70, 1.85, 4),
                               axis2=("m2", -1.0, -0.85, 4),
                               n_transient=3_000, n_sample=30_000)
        grid = sweep.run_sweep(spec, n_workers=1)
        labels = {cell.label for row in grid for cell in row}
        assert sweep.CHAOTIC_PH in labels

    def test_period6_window_grid_has_chaotic_ph_cells_with_six_components(self):
        # exploration anchored at the orientation-reversing period-6 point:
        # the attractor window sits at bh inside (-1, 0)
        spec = sweep.SweepSpec(
            map_id="inverse", fixed_param=("bh", -0.95),
            axis1=("m1h", P6_ATTRACTOR.m1h - 0.01, P6_ATTRACTOR.m1h + 0.01, 3),
            axis2=("m2h", P6_ATTRACTOR.m2h - 0.01, P6_ATTRACTOR.m2h + 0.01, 3),
            n_transient=20_000, n_sample=40_000,
            seed_rule=("orbit", P6_SEED_ORBIT, 1e-4))
        grid = sweep.run_sweep(spec, n_workers=1)
        a1, a2 = spec.axis_values()
        ph_cells = [(i, j) for i in range(3) for j in range(3)
                    if grid[i][j].label == sweep.CHAOTIC_PH]
        assert ph_cells
        i, j = ph_cells[0]
        p = spec.params_at(a1[i], a2[j])
        seed = sweep.seed_candidates("inverse", p, spec.seed_rule)[0]
        samp = dynamics.sample_attractor("inverse", p, seed, n_transient=20_000,
                                         n_sample=24_000, expected_period=6)
        assert samp.component_count == 6

    def test_worker_count_invariance(self, monkeypatch):
        monkeypatch.setattr(sweep, "_CHUNK", 5)
        spec = sweep.SweepSpec(map_id="forward", fixed_param=("b", 0.3),
                               axis1=("m1", -0.1, 0.1, 4),
                               axis2=("m2", 0.2, 0.6, 4),
                               n_transient=500, n_sample=4_000)
        grids = [sweep.run_sweep(spec, n_workers=w) for w in (1, 2)]
        for row1, row2 in zip(*grids):
            for c1, c2 in zip(row1, row2):
                assert c1.label == c2.label
                assert np.array_equal(c1.exponents, c2.exponents, equal_nan=True)

    def test_chaotic_ph_stable_under_budget_doubling(self):
        spec = sweep.SweepSpec(map_id="forward", fixed_param=("b", -0.95),
                               axis1=("m1", 1.74, 1.80, 3),
                               axis2=("m2", -0.95, -0.90, 3),
                               n_transient=3_000, n_sample=20_000)
        grid = sweep.run_sweep(spec, n_workers=1)
        a1, a2 = spec.axis_values()
        doubled = sweep.SweepSpec(map_id="forward", fixed_param=("b", -0.95),
                                  axis1=spec.axis1, axis2=spec.axis2,
                                  n_transient=3_000, n_sample=40_000)
        grid2 = sweep.run_sweep(doubled, n_workers=1)
        found = False
        for i in range(3):
            for j in range(3):
                if grid[i][j].label == sweep.CHAOTIC_PH:
                    found = True
                    assert grid2[i][j].exponents[0] > 0.0
        assert found

    def test_escape_cells_have_nan_exponents(self):
        spec = sweep.SweepSpec(map_id="forward", fixed_param=("b", 0.5),
                               axis1=("m1", 40.0, 50.0, 2),
                               axis2=("m2", 0.0, 0.1, 2),
                               n_transient=200, n_sample=500)
        grid = sweep.run_sweep(spec, n_workers=1)
        for row in grid:
            for cell in row:
                assert cell.label == sweep.ESCAPE
                assert np.all(np.isnan(cell.exponents))


class TestBallProbe:
    def test_radius_zero_probes_only_center(self):
        hits = sweep.ball_probe("inverse", P6_ATTRACTOR, 0.0, 2, 6,
                                seed_orbit=P6_SEED_ORBIT,
                                n_transient=20_000, n_sample=40_000,
                                n_points=12_000, n_workers=1)
        assert len(hits) == 2
        for h in hits:
            assert h.params == P6_ATTRACTOR
            assert h.component_count == 6

    def test_hits_inside_the_attractor_window(self):
        # regression anchor: the window around the pinned parameter point
        hits = sweep.ball_probe("inverse", P6_ATTRACTOR, 0.01, 30, 6,
                                seed_orbit=P6_SEED_ORBIT,
                                n_transient=20_000, n_sample=40_000,
                                n_points=12_000, n_workers=1)
        assert len(hits) >= 1
        first = hits[0]
        assert first.index == 1
        v = sweep._param_vector(first.params)
        assert np.allclose(v, [0.1924562084897318, 0.05046895689646013, -0.952],
                           atol=1e-12)
        assert first.exponents[0] > 1e-3
        assert first.exponents[0] + first.exponents[1] > 1e-3
        # a hit re-run individually reproduces its classification
        seed = sweep.seed_candidates("inverse", first.params,
                                     ("orbit", P6_SEED_ORBIT, 1e-4))[0]
        lr = dynamics.lyapunov_spectrum("inverse", first.params, seed,
                                        n_transient=20_000, n_sample=40_000)
        assert lr.exponents[0] > 1e-3
        assert lr.exponents[0] + lr.exponents[1] > 1e-3
        samp = dynamics.sample_attractor("inverse", first.params, seed,
                                         n_transient=20_000, n_sample=12_000,
                                         expected_period=6)
        assert samp.component_count == 6

    def test_worker_count_invariance(self):
        kw = dict(seed_orbit=P6_SEED_ORBIT, n_transient=10_000,
                  n_sample=20_000, n_points=6_000)
        a = sweep.ball_probe("inverse", P6_ATTRACTOR, 0.01, 12, 6,
                             n_workers=1, **kw)
        b = sweep.ball_probe("inverse", P6_ATTRACTOR, 0.01, 12, 6,
                             n_workers=2, **kw)
        assert [h.index for h in a] == [h.index for h in b]
        for ha, hb in zip(a, b):
            assert ha.params == hb.params
            assert np.array_equal(ha.exponents, hb.exponents)
