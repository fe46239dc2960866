import numpy as np
import pytest
from conftest import random_rotation

from se3quad.control import (
    AttitudeCommand,
    ComputedAttitude,
    ComputedRateEstimator,
    Gains,
    PositionCommand,
    attitude_control,
    computed_attitude,
    estimate_computed_rates,
    position_control,
    robust_term_attitude,
    robust_term_position,
)
from se3quad.errors import (
    DegenerateThrust,
    HeadingParallel,
    NonPositiveGain,
    PsiOutOfRange,
    TauOutOfRange,
)
from se3quad.geometry import attitude_error_function, exp_so3
from se3quad.model import E3, RigidBodyState
from se3quad.sim import case2_scenario, elliptic_helix, hover_command, reference_gains, reference_params


def hover_cmd():
    return hover_command(0.0)


class TestGains:
    def test_positivity_enforced(self):
        with pytest.raises(NonPositiveGain):
            reference_gains(eps_R=0.0)
        with pytest.raises(NonPositiveGain):
            reference_gains(kx=-1.0)

    def test_tau_and_psi_ranges(self):
        with pytest.raises(TauOutOfRange):
            reference_gains(tau=2.0)
        with pytest.raises(PsiOutOfRange):
            reference_gains(psi1=1.0)
        with pytest.raises(PsiOutOfRange):
            reference_gains(psi2=2.0)


class TestRobustTerms:
    def test_attitude_zero_cases(self):
        np.testing.assert_array_equal(robust_term_attitude(np.zeros(3), 2.0, 0.04), np.zeros(3))
        np.testing.assert_array_equal(
            robust_term_attitude(np.array([1.0, -2.0, 3.0]), 0.0, 0.04), np.zeros(3))

    def test_position_zero_cases(self):
        np.testing.assert_array_equal(
            robust_term_position(np.zeros(3), 4.34, 0.04, 3.0), np.zeros(3))
        np.testing.assert_array_equal(
            robust_term_position(np.array([1.0, 2.0, 3.0]), 0.0, 0.04, 3.0), np.zeros(3))

    def test_attitude_magnitude_bound(self, rng):
        for _ in range(500):
            e = rng.normal(size=3) * rng.uniform(0, 100)
            mu = robust_term_attitude(e, 2.0, 0.04)
            assert np.linalg.norm(mu) <= 2.0 + 1e-12

    def test_position_magnitude_bound(self, rng):
        for tau in (2.5, 3.0, 5.0):
            for _ in range(300):
                e = rng.normal(size=3) * rng.uniform(0, 100)
                mu = robust_term_position(e, 4.34, 0.04, tau)
                assert np.linalg.norm(mu) <= 4.34 + 1e-12

    def test_attitude_dissipation_worst_case(self, rng):
        # worst admissible disturbance is aligned with the error direction
        delta, eps = 2.0, 0.04
        for _ in range(500):
            e = rng.normal(size=3) * rng.uniform(1e-8, 50)
            worst = delta * e / np.linalg.norm(e)
            mu = robust_term_attitude(e, delta, eps)
            assert e @ (worst + mu) <= eps + 1e-12

    def test_position_dissipation_worst_case(self, rng):
        delta, eps = 4.34, 0.04
        for tau in (2.5, 3.0, 5.0):
            for _ in range(300):
                e = rng.normal(size=3) * rng.uniform(1e-8, 50)
                worst = delta * e / np.linalg.norm(e)
                mu = robust_term_position(e, delta, eps, tau)
                assert e @ (worst + mu) <= eps + 1e-12

    def test_random_disturbances_dominated(self, rng):
        for _ in range(300):
            e = rng.normal(size=3) * rng.uniform(1e-6, 10)
            d = rng.normal(size=3)
            d = d / np.linalg.norm(d) * rng.uniform(0, 2.0)
            assert e @ (d + robust_term_attitude(e, 2.0, 0.04)) <= 0.04 + 1e-12


class TestComputedAttitude:
    def test_hover_is_identity(self):
        g, p = reference_gains(), reference_params()
        R_c, b3, A = computed_attitude(np.zeros(3), np.zeros(3), hover_cmd(), np.zeros(3), g, p)
        np.testing.assert_allclose(b3, E3, atol=1e-15)
        np.testing.assert_allclose(R_c, np.eye(3), atol=1e-15)
        np.testing.assert_allclose(A, [0.0, 0.0, -p.m * p.g], atol=1e-12)

    def test_unit_position_error(self):
        g, p = reference_gains(), reference_params()
        R_c, b3, A = computed_attitude(np.array([1.0, 0, 0]), np.zeros(3), hover_cmd(),
                                       np.zeros(3), g, p)
        np.testing.assert_allclose(A, [-59.02, 0.0, -42.5754], atol=1e-10)
        expected = -A / np.linalg.norm(A)  # oracle: direct normalization
        np.testing.assert_allclose(b3, expected, atol=1e-15)
        np.testing.assert_allclose(b3, [0.81100, 0.0, 0.58504], atol=2e-5)

    def test_rotation_structure(self, rng):
        g, p = reference_gains(), reference_params()
        for _ in range(300):
            e_x, e_v = rng.normal(size=3), rng.normal(size=3)
            mu = rng.normal(size=3)
            b1d = rng.normal(size=3)
            b1d /= np.linalg.norm(b1d)
            cmd = PositionCommand(np.zeros(3), np.zeros(3), rng.normal(size=3), b1d)
            try:
                R_c, b3, A = computed_attitude(e_x, e_v, cmd, mu, g, p)
            except (DegenerateThrust, HeadingParallel):
                continue
            assert np.abs(R_c.T @ R_c - np.eye(3)).max() < 1e-12
            np.testing.assert_allclose(R_c[:, 2], b3, atol=1e-15)
            assert abs(R_c[:, 0] @ b3) < 1e-12
            # first column lies in span{b1d, b3}
            assert abs(R_c[:, 0] @ np.cross(b1d, b3)) < 1e-12

    def test_direction_scale_invariance(self):
        # inputs scaled so the commanded force vector becomes lam * A
        g, p = reference_gains(), reference_params()
        e_x, e_v = np.array([0.3, -0.2, 0.1]), np.array([0.0, 0.5, -0.4])
        mu = np.array([0.2, 0.1, -0.3])
        lam = 2.5
        cmd1 = hover_cmd()
        a2 = lam * cmd1.a_d + (1.0 - lam) * p.g * E3
        cmd2 = PositionCommand(cmd1.x_d, cmd1.v_d, a2, cmd1.b1_d)
        _, b3_1, A1 = computed_attitude(e_x, e_v, cmd1, mu, g, p)
        _, b3_2, A2 = computed_attitude(lam * e_x, lam * e_v, cmd2, lam * mu, g, p)
        np.testing.assert_allclose(A2, lam * A1, atol=1e-12)
        np.testing.assert_allclose(b3_2, b3_1, atol=1e-14)

    def test_degenerate_thrust(self):
        g, p = reference_gains(), reference_params()
        cmd = PositionCommand(np.zeros(3), np.zeros(3), p.g * E3, np.array([1.0, 0, 0]))
        with pytest.raises(DegenerateThrust):
            computed_attitude(np.zeros(3), np.zeros(3), cmd, np.zeros(3), g, p)

    def test_heading_parallel(self):
        g, p = reference_gains(), reference_params()
        cmd = PositionCommand(np.zeros(3), np.zeros(3), np.zeros(3), np.array([0.0, 0, 1.0]))
        with pytest.raises(HeadingParallel):
            computed_attitude(np.zeros(3), np.zeros(3), cmd, np.zeros(3), g, p)


class TestRateEstimation:
    def test_constant_history(self):
        R = exp_so3([0.1, 0.2, 0.3])
        om, dom, ok = estimate_computed_rates([R, R, R], 1e-3)
        np.testing.assert_array_equal(om, np.zeros(3))
        np.testing.assert_array_equal(dom, np.zeros(3))
        assert ok

    def test_constant_rate(self):
        dt, w = 1e-3, 1.0
        hist = [exp_so3([0.0, 0.0, w * k * dt]) for k in range(3)]
        om, dom, ok = estimate_computed_rates(hist, dt)
        np.testing.assert_allclose(om, [0.0, 0.0, w], atol=1e-6)
        np.testing.assert_allclose(dom, np.zeros(3), atol=1e-6)

    def test_constant_acceleration(self):
        dt, a = 1e-3, 2.0
        ks = [5, 6, 7]  # interior samples of R(t) = exp(a t^2 / 2 about e3)
        hist = [exp_so3([0.0, 0.0, 0.5 * a * (k * dt) ** 2]) for k in ks]
        om, dom, _ = estimate_computed_rates(hist, dt)
        np.testing.assert_allclose(om, [0.0, 0.0, a * ks[-1] * dt], atol=1e-9)
        np.testing.assert_allclose(dom, [0.0, 0.0, a], atol=1e-3)

    def test_insufficient_history_flags(self):
        om, dom, ok = estimate_computed_rates([], 1e-3)
        assert not ok and not om.any() and not dom.any()
        om, dom, ok = estimate_computed_rates([np.eye(3)], 1e-3)
        assert not ok and not om.any() and not dom.any()

    def test_two_samples_one_sided(self):
        dt, w = 1e-3, 3.0
        hist = [exp_so3([0.0, 0.0, w * k * dt]) for k in range(2)]
        om, dom, ok = estimate_computed_rates(hist, dt)
        assert not ok
        np.testing.assert_allclose(om, [0.0, 0.0, w], atol=1e-6)
        np.testing.assert_array_equal(dom, np.zeros(3))

    def test_estimator_buffer(self):
        est = ComputedRateEstimator(1e-3)
        for k in range(5):
            om, dom, ok = est.push(exp_so3([0.0, 0.0, 2.0 * k * 1e-3]))
        assert ok
        np.testing.assert_allclose(om, [0.0, 0.0, 2.0], atol=1e-6)


class TestAttitudeControl:
    def test_perfect_tracking_zero_moment(self):
        g, p = reference_gains(), reference_params()
        R = exp_so3([0.2, -0.1, 0.4])
        state = RigidBodyState(np.zeros(3), np.zeros(3), R, np.zeros(3))
        cmd = AttitudeCommand(R, np.zeros(3), np.zeros(3))
        M, err = attitude_control(state, cmd, g, p, robust=False)
        np.testing.assert_allclose(M, np.zeros(3), atol=1e-12)
        assert err.Psi < 1e-12

    def test_pure_rate_error(self):
        g, p = reference_gains(), reference_params()
        state = RigidBodyState(np.zeros(3), np.zeros(3), np.eye(3), np.array([0.0, 0, 1.0]))
        cmd = AttitudeCommand(np.eye(3), np.zeros(3), np.zeros(3))
        M, err = attitude_control(state, cmd, g, p, robust=False)
        # diagonal inertia kills Omega x J Omega for a principal-axis rate
        np.testing.assert_allclose(M, [0.0, 0.0, -g.kOmega], atol=1e-12)
        np.testing.assert_array_equal(err.e_Omega, [0.0, 0.0, 1.0])

    def test_inverted_initial_error_diagnostic(self):
        # near-inverted start against the computed hover attitude
        sc = case2_scenario()
        cmd = sc.trajectory(0.0)
        e_x = sc.initial.x - cmd.x_d
        e_v = sc.initial.v - cmd.v_d
        e_B = e_v + sc.gains.c1 / sc.params.m * e_x
        mu = robust_term_position(e_B, sc.params.delta_x, sc.gains.eps_x, sc.gains.tau)
        R_c, _, _ = computed_attitude(e_x, e_v, cmd, mu, sc.gains, sc.params)
        psi0 = attitude_error_function(sc.initial.R, R_c)
        assert psi0 == pytest.approx(1.9995, abs=5e-4)


class TestPositionControl:
    def test_hover_equilibrium_wrench(self):
        g = reference_gains()
        p = reference_params()
        state = RigidBodyState(np.zeros(3), np.zeros(3), np.eye(3), np.zeros(3))
        comp = ComputedAttitude(np.eye(3), np.zeros(3), np.zeros(3), E3)
        (f, M), diag = position_control(state, hover_cmd(), comp, g, p, robust=False)
        assert f == pytest.approx(p.m * p.g, abs=1e-12)
        assert f == pytest.approx(42.5754, abs=1e-10)
        np.testing.assert_allclose(M, np.zeros(3), atol=1e-12)

    def test_thrust_formula_with_robust_term(self):
        g, p = reference_gains(), reference_params()
        state = RigidBodyState(np.array([0.2, -0.1, 0.3]), np.array([0.1, 0.0, -0.2]),
                               np.eye(3), np.zeros(3))
        cmd = hover_cmd()
        e_x, e_v = state.x - cmd.x_d, state.v - cmd.v_d
        mu = robust_term_position(e_v + g.c1 / p.m * e_x, p.delta_x, g.eps_x, g.tau)
        R_c, b3, A = computed_attitude(e_x, e_v, cmd, mu, g, p)
        comp = ComputedAttitude(R_c, np.zeros(3), np.zeros(3), b3)
        (f, M), diag = position_control(state, cmd, comp, g, p, robust=True)
        manual = (g.kx * e_x + g.kv * e_v + p.m * p.g * E3 - p.m * cmd.a_d - mu) @ (state.R @ E3)
        assert f == pytest.approx(manual, abs=1e-12)

    def test_thrust_projection_identity(self, rng):
        # f equals ||A|| times the cosine between the body and commanded axes
        g, p = reference_gains(), reference_params()
        for _ in range(300):
            state = RigidBodyState(rng.normal(size=3), rng.normal(size=3),
                                   random_rotation(rng), rng.normal(size=3))
            cmd = elliptic_helix(rng.uniform(0, 10))
            e_x, e_v = state.x - cmd.x_d, state.v - cmd.v_d
            mu = robust_term_position(e_v + g.c1 / p.m * e_x, p.delta_x, g.eps_x, g.tau)
            try:
                R_c, b3, A = computed_attitude(e_x, e_v, cmd, mu, g, p)
            except (DegenerateThrust, HeadingParallel):
                continue
            comp = ComputedAttitude(R_c, np.zeros(3), np.zeros(3), b3)
            (f, M), diag = position_control(state, cmd, comp, g, p)
            rhs = np.linalg.norm(diag.A) * (E3 @ (R_c.T @ (state.R @ E3)))
            assert abs(f - rhs) < 1e-12 * max(1.0, abs(f))

    def test_moment_matches_attitude_law_on_computed_command(self, rng):
        # tracking the computed attitude as an attitude command gives the
        # same moment as the position law
        g, p = reference_gains(), reference_params()
        for _ in range(100):
            state = RigidBodyState(rng.normal(size=3), rng.normal(size=3),
                                   random_rotation(rng), rng.normal(size=3))
            cmd = elliptic_helix(rng.uniform(0, 10))
            e_x, e_v = state.x - cmd.x_d, state.v - cmd.v_d
            mu = robust_term_position(e_v + g.c1 / p.m * e_x, p.delta_x, g.eps_x, g.tau)
            try:
                R_c, b3, _ = computed_attitude(e_x, e_v, cmd, mu, g, p)
            except (DegenerateThrust, HeadingParallel):
                continue
            om_c = rng.normal(size=3)
            dom_c = rng.normal(size=3)
            comp = ComputedAttitude(R_c, om_c, dom_c, b3)
            (f, M_pos), _ = position_control(state, cmd, comp, g, p)
            M_att, _ = attitude_control(state, AttitudeCommand(R_c, om_c, dom_c), g, p)
            np.testing.assert_allclose(M_pos, M_att, atol=1e-12)

    def test_case1_initial_wrench_sane(self):
        # one controller evaluation at the helix start: finite wrench, rotor
        # thrusts within a +-20 N envelope
        from se3quad.model import Wrench, allocate_rotors
        from se3quad.sim import case1_scenario

        sc = case1_scenario()
        cmd = sc.trajectory(0.0)
        e_x = sc.initial.x - cmd.x_d
        e_v = sc.initial.v - cmd.v_d
        mu = robust_term_position(e_v + sc.gains.c1 / sc.params.m * e_x,
                                  sc.params.delta_x, sc.gains.eps_x, sc.gains.tau)
        R_c, b3, _ = computed_attitude(e_x, e_v, cmd, mu, sc.gains, sc.params)
        comp = ComputedAttitude(R_c, np.zeros(3), np.zeros(3), b3)
        (f, M), _ = position_control(sc.initial, cmd, comp, sc.gains, sc.params)
        rotors = allocate_rotors(Wrench(f, M), sc.params)
        assert np.isfinite(f) and np.all(np.isfinite(M)) and np.all(np.isfinite(rotors))
        assert np.all(np.abs(rotors) <= 25.0)
        # frozen regression of the very first allocation
        np.testing.assert_allclose(
            rotors, [19.047606, -4.144873, 21.760761, 17.179324], atol=1e-5)
