import math

import numpy as np
import pytest

from henonlab import maps

CODIM3_A = maps.MapParams(m1=-0.25, m2=1.0, b=1.0)
CODIM3_B = maps.MapParams(m1=1.75, m2=-1.0, b=-1.0)
FOUR_WING = maps.MapParams(m1=1.77, m2=-0.925, b=-0.95)

rng = np.random.RandomState(42)


def random_params(n):
    out = []
    for _ in range(n):
        b = rng.uniform(0.3, 2.0) * rng.choice([-1.0, 1.0])
        out.append(maps.MapParams(m1=rng.uniform(-2, 2), m2=rng.uniform(-2, 2), b=b))
    return out


class TestSteps:
    def test_forward_origin_fixed_when_m1_zero(self):
        p = maps.MapParams(m1=0.0, m2=0.7, b=-0.4)
        assert maps.henon3d_step((0.0, 0.0, 0.0), p) == (0.0, 0.0, 0.0)

    def test_forward_double_fixed_point(self):
        # z**2 + (1 - b - m2) z - m1 = (z - 1/2)**2 at the degenerate point
        s = maps.henon3d_step((0.5, 0.5, 0.5), CODIM3_A)
        assert s == (0.5, 0.5, 0.5)

    def test_forward_direct_evaluation(self):
        s = maps.henon3d_step((1.0, 2.0, 3.0), maps.MapParams(1.0, 0.5, -0.5))
        assert s == (2.0, 3.0, 1.0 - 0.5 + 1.0 - 9.0)

    def test_inverse_origin_fixed_when_m1_zero(self):
        p = maps.InvParams(m1h=0.0, m2h=-0.3, bh=2.0)
        assert maps.henon3d_inv_step((0.0, 0.0, 0.0), p) == (0.0, 0.0, 0.0)

    def test_inverse_double_fixed_point(self):
        p = maps.InvParams(m1h=-0.25, m2h=-1.0, bh=1.0)
        assert maps.henon3d_inv_step((-0.5, -0.5, -0.5), p) == (-0.5, -0.5, -0.5)

    def test_inverse_step_advances_period6_orbit(self):
        # published period-6 delay orbit: one step shifts the window by one
        zs = (1.1109087187819051, 0.5430803496704105, -0.018564282101437988,
              -1.0126053862814206, -0.3759675295870319, -0.6947447970072144)
        p = maps.InvParams(m1h=0.3974562084897318, m2h=0.2271356235631268, bh=-1.0)
        out = maps.henon3d_inv_step(zs[:3], p)
        assert out[0] == zs[1] and out[1] == zs[2]
        assert out[2] == pytest.approx(zs[3], abs=1e-12)

    def test_overflow_is_an_escape_signal_not_a_crash(self):
        p = maps.MapParams(0.0, 0.5, 0.5)
        s = (1e200, 1e200, 1e200)
        for _ in range(4):
            s = maps.henon3d_step(s, p)
        assert not all(math.isfinite(c) for c in s)

    def test_exact_inverse_roundtrip(self):
        for p in random_params(5):
            s = tuple(rng.uniform(-2, 2, 3))
            fwd = maps.henon3d_step(s, p)
            back = maps.henon3d_inverse(fwd, p)
            assert np.allclose(back, s, atol=1e-12)

    def test_zero_jacobian_rejected(self):
        with pytest.raises(ValueError):
            maps.MapParams(0.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            maps.InvParams(0.0, 0.0, 0.0)


class TestJacobian:
    def test_forward_rows(self):
        J = maps.jacobian("forward", (0.0, 0.0, 3.0), maps.MapParams(0.0, 2.0, 5.0))
        assert np.array_equal(J[0], [0.0, 1.0, 0.0])
        assert np.array_equal(J[1], [0.0, 0.0, 1.0])
        assert np.array_equal(J[2], [5.0, 2.0, -6.0])

    def test_inverse_rows(self):
        J = maps.jacobian("inverse", (0.1, -0.7, 0.3),
                          maps.InvParams(m1h=0.2, m2h=0.4, bh=-1.0))
        assert np.array_equal(J[2], [-1.0, 1.4, 0.4])

    def test_constant_determinant(self):
        # det equals the map Jacobian identically in the state
        for p in random_params(6):
            ph = maps.param_correspondence(p)
            for _ in range(4):
                s = tuple(rng.uniform(-3, 3, 3))
                for mid, d in (("forward", p.b), ("inverse", ph.bh),
                               ("limit-generic", p.b), ("limit-orbit-flip", p.b)):
                    pp = ph if mid == "inverse" else p
                    assert abs(np.linalg.det(maps.jacobian(mid, s, pp)) - d) < 1e-14 * max(1, abs(d))

    def test_unknown_map_id(self):
        with pytest.raises(ValueError):
            maps.jacobian("sideways", (0, 0, 0), CODIM3_A)

    def test_fd_oracle(self):
        # central differences reproduce the analytic Jacobian
        p = maps.MapParams(0.4, -1.1, 0.8)
        s = np.array([0.3, -0.2, 0.9])
        h = 1e-6
        J = maps.jacobian("forward", s, p)
        for j in range(3):
            e = np.zeros(3); e[j] = h
            fp = np.array(maps.henon3d_step(s + e, p))
            fm = np.array(maps.henon3d_step(s - e, p))
            assert np.allclose((fp - fm) / (2 * h), J[:, j], atol=1e-8)


class TestJet2:
    def test_forward_hessian_single_slot(self):
        jet = maps.jet2("forward", (0.2, 0.3, 0.4), CODIM3_A)
        expect = np.zeros((3, 3, 3)); expect[2, 2, 2] = -2.0
        assert np.array_equal(jet.hess, expect)

    def test_inverse_hessian_single_slot(self):
        jet = maps.jet2("inverse", (0.2, 0.3, 0.4),
                        maps.InvParams(0.1, 0.2, 0.5))
        expect = np.zeros((3, 3, 3)); expect[2, 1, 1] = -2.0
        assert np.array_equal(jet.hess, expect)

    def test_hessian_symmetry(self):
        for mid in maps.MAP_IDS:
            pp = maps.InvParams(0.1, 0.2, 0.5) if mid == "inverse" else CODIM3_A
            jet = maps.jet2(mid, (0.2, 0.3, 0.4), pp)
            assert np.array_equal(jet.hess, np.transpose(jet.hess, (0, 2, 1)))

    def test_composed_jet_matches_finite_differences(self):
        # 2-jet of F o F against a central-difference oracle, step 1e-4
        p = maps.MapParams(0.3, -0.6, 0.9)
        s0 = np.array([0.17, -0.45, 0.28])

        def f2(s):
            return np.array(maps.henon3d_step(maps.henon3d_step(tuple(s), p), p))

        inner = maps.jet2("forward", s0, p)
        outer = maps.jet2("forward", inner.value, p)
        jet = maps.compose_jet2(outer, inner)

        h = 1e-4
        assert np.allclose(jet.value, f2(s0), atol=1e-12)
        for j in range(3):
            e = np.zeros(3); e[j] = h
            col = (f2(s0 + e) - f2(s0 - e)) / (2 * h)
            assert np.allclose(col, jet.jac[:, j], atol=1e-6)
        for j in range(3):
            for k in range(3):
                ej = np.zeros(3); ej[j] = h
                ek = np.zeros(3); ek[k] = h
                hjk = (f2(s0 + ej + ek) - f2(s0 + ej - ek)
                       - f2(s0 - ej + ek) + f2(s0 - ej - ek)) / (4 * h * h)
                assert np.allclose(hjk, jet.hess[:, j, k], atol=1e-6)


class TestParamCorrespondence:
    def test_codim3_points(self):
        ph = maps.param_correspondence(CODIM3_A)
        assert (ph.m1h, ph.m2h, ph.bh) == (-0.25, -1.0, 1.0)
        ph = maps.param_correspondence(CODIM3_B)
        assert (ph.m1h, ph.m2h, ph.bh) == (1.75, -1.0, -1.0)

    def test_unit_jacobian_case(self):
        ph = maps.param_correspondence(maps.MapParams(0.37, -1.9, 1.0))
        assert (ph.m1h, ph.m2h, ph.bh) == (0.37, 1.9, 1.0)


class TestInverseConjugacy:
    def test_fixed_point_case(self):
        assert maps.inverse_conjugacy_defect(CODIM3_A, (0.5, 0.5, 0.5)) < 1e-14

    def test_origin_trivial(self):
        assert maps.inverse_conjugacy_defect(maps.MapParams(0.0, 0.0, 1.0),
                                             (0.0, 0.0, 0.0)) == 0.0

    def test_pointwise_identity_at_four_wing_params(self):
        worst = 0.0
        for _ in range(100):
            s = tuple(rng.uniform(-2, 2, 3))
            worst = max(worst, maps.inverse_conjugacy_defect(FOUR_WING, s))
        assert worst < 1e-12

    def test_pointwise_identity_random_params(self):
        for p in random_params(8):
            for _ in range(20):
                s = tuple(rng.uniform(-2, 2, 3))
                assert maps.inverse_conjugacy_defect(p, s) < 1e-12


class TestLimitMaps:
    def test_generic_variant_is_forward_map_relabeled(self):
        # states (x1, x2, y) = (y, x, z) make the generic variant the forward
        # map, bit-identically (same float operation order)
        for p in random_params(5):
            x, y, z = rng.uniform(-2, 2, 3)
            out = maps.limit_map_step("generic", (y, x, z), p)
            fwd = maps.henon3d_step((x, y, z), p)
            assert out[1] == fwd[0] and out[0] == fwd[1] and out[2] == fwd[2]

    def test_orbit_flip_reduces_to_generic_with_m2_negated(self):
        # the change (x1, x2, y) -> ((x1 - m2*x2)/(-b), x2, y) conjugates the
        # orbit-flip variant to the generic one with m2 -> -m2, i.e. (under
        # the same positional relabeling as above) to the forward map
        for p in random_params(5):
            pn = maps.MapParams(m1=p.m1, m2=-p.m2, b=p.b)

            def change(s):
                x1, x2, y = s
                return ((x1 - p.m2 * x2) / (-p.b), x2, y)

            for _ in range(10):
                s = tuple(rng.uniform(-2, 2, 3))
                lhs = change(maps.limit_map_step("orbit-flip", s, p))
                rhs = maps.henon3d_step(change(s), pn)
                assert np.allclose(lhs, rhs, atol=1e-12)

    def test_orbit_flip_origin(self):
        p = maps.MapParams(m1=0.0, m2=0.8, b=0.5)
        assert maps.limit_map_step("orbit-flip", (0.0, 0.0, 0.0), p) == (0.0, 0.0, 0.0)

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            maps.limit_map_step("diagonal", (0, 0, 0), CODIM3_A)

    def test_letter_aliases(self):
        s = (0.2, -0.4, 0.6)
        p = maps.MapParams(0.1, 0.3, 0.9)
        assert maps.map_step("limit-a", s, p) == maps.limit_map_step("orbit-flip", s, p)
        assert maps.map_step("limit-b", s, p) == maps.limit_map_step("generic", s, p)


class TestShimizuMorioka:
    def test_origin_equilibrium(self):
        q = maps.SMParams(lam=0.9, alpha=0.45)
        assert maps.sm_field((0.0, 0.0, 0.0), q) == (0.0, 0.0, 0.0)

    def test_nontrivial_equilibria(self):
        q = maps.SMParams(lam=0.7, alpha=0.3)
        for eq in maps.sm_equilibria(q)[1:]:
            assert np.allclose(maps.sm_field(eq, q), 0.0, atol=1e-14)

    def test_equivariance(self):
        q = maps.SMParams(lam=1.1, alpha=0.6)
        for _ in range(20):
            x, y, z = rng.uniform(-2, 2, 3)
            fx, fy, fz = maps.sm_field((x, y, z), q)
            gx, gy, gz = maps.sm_field((-x, -y, z), q)
            assert (gx, gy, gz) == (-fx, -fy, fz)

    def test_jacobian_fd(self):
        q = maps.SMParams(lam=0.9, alpha=0.45)
        s = np.array([0.2, -0.4, 0.8])
        J = maps.sm_jacobian(s, q)
        h = 1e-6
        for j in range(3):
            e = np.zeros(3); e[j] = h
            col = (np.array(maps.sm_field(s + e, q))
                   - np.array(maps.sm_field(s - e, q))) / (2 * h)
            assert np.allclose(col, J[:, j], atol=1e-8)


class TestBelyakovPower:
    def test_nilpotent_case_direct_product(self):
        blk = maps.BelyakovBlock(lam=0.5, mu2=0.0)
        A = blk.matrix()
        expect = A @ A @ A
        assert np.allclose(expect, [[0.125, 0.75], [0.0, 0.125]], atol=1e-15)
        assert np.allclose(maps.belyakov_power(blk, 3), expect, atol=1e-12)

    def test_first_power_is_the_block(self):
        for lam, mu2 in ((0.5, 0.04), (0.8, -0.1), (0.3, 0.0)):
            blk = maps.BelyakovBlock(lam=lam, mu2=mu2)
            assert np.allclose(maps.belyakov_power(blk, 1), blk.matrix(), atol=1e-12)

    def test_second_power_closed_form(self):
        # A^2 = [[lam^2 + mu2, 2 lam], [2 lam mu2, lam^2 + mu2]]
        blk = maps.BelyakovBlock(lam=0.5, mu2=0.04)
        assert np.allclose(maps.belyakov_power(blk, 2),
                           [[0.29, 1.0], [0.04, 0.29]], atol=1e-12)

    def test_matches_iterated_product_across_sign_change(self):
        for lam in (0.3, 0.5, 0.9):
            for mu2 in (-0.04, 0.0, 0.04):
                blk = maps.BelyakovBlock(lam=lam, mu2=mu2)
                A = blk.matrix()
                P = np.eye(2)
                for k in range(1, 51):
                    P = A @ P
                    got = maps.belyakov_power(blk, k)
                    assert np.max(np.abs(got - P)) < 1e-10 * np.max(np.abs(P))

    def test_continuous_at_mu2_zero(self):
        for lam in (0.3, 0.5, 0.9):
            for k in (1, 5, 20):
                up = maps.belyakov_power(maps.BelyakovBlock(lam=lam, mu2=1e-10), k)
                dn = maps.belyakov_power(maps.BelyakovBlock(lam=lam, mu2=-1e-10), k)
                assert np.max(np.abs(up - dn)) < 1e-6

    def test_zeroth_power_is_identity(self):
        blk = maps.BelyakovBlock(lam=0.5, mu2=0.01)
        assert np.array_equal(maps.belyakov_power(blk, 0), np.eye(2))

    def test_invalid_blocks_rejected(self):
        with pytest.raises(ValueError):
            maps.BelyakovBlock(lam=0.5, mu2=0.25)
        with pytest.raises(ValueError):
            maps.BelyakovBlock(lam=0.5, mu2=-0.3)
        with pytest.raises(ValueError):
            # negative double multipliers are outside the supported branch
            maps.BelyakovBlock(lam=-0.5, mu2=0.01)

    def test_negative_k_rejected(self):
        with pytest.raises(ValueError):
            maps.belyakov_power(maps.BelyakovBlock(lam=0.5, mu2=0.0), -1)
