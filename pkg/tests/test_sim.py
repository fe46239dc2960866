import numpy as np
import pytest

from se3quad.certify import certify_attitude
from se3quad.control import ComputedAttitude, Gains, PositionCommand
from se3quad.errors import InitialAttitudeError, NumericalBlowup
from se3quad.geometry import exp_so3
from se3quad.model import (
    DisturbanceModel,
    QuadrotorParams,
    RigidBodyState,
    Wrench,
    reference_disturbances,
)
from se3quad.sim import (
    Scenario,
    attitude_polynomial_command,
    auto_acceleration_bound,
    case1_scenario,
    case2_scenario,
    elliptic_helix,
    hover_command,
    lyapunov_monitors,
    polynomial_command,
    reference_gains,
    reference_params,
    run,
    step,
)

ZERO_W = Wrench(0.0, np.zeros(3))
NO_DIST = DisturbanceModel.none()


def attitude_test_scenario(dt=1e-3, duration=4.0, eps_R=0.04, robust=True, c2=0.05):
    """Slew about the third axis with a small initial tilt, full disturbances."""
    p = reference_params()
    g = reference_gains(c2=c2, eps_R=eps_R, psi2=1.0, B=75.0)
    traj = attitude_polynomial_command([0.0, 0.0, 1.0], [0.0, 0.3, 0.1])
    init = RigidBodyState(np.zeros(3), np.zeros(3), exp_so3([0.05, 0.0, 0.0]),
                          np.array([0.0, 0.0, 0.3]))
    return Scenario(params=p, gains=g, initial=init, trajectory=traj,
                    disturbances=reference_disturbances(), duration=duration,
                    dt=dt, mode="attitude", robust=robust)


class TestTrajectories:
    def test_helix_start(self):
        c = elliptic_helix(0.0)
        np.testing.assert_allclose(c.x_d, [0.0, 0.0, -0.6], atol=1e-15)
        np.testing.assert_allclose(c.v_d, [0.4, 0.4 * np.pi, 0.0], atol=1e-15)
        np.testing.assert_allclose(c.a_d, [0.0, 0.0, 0.6 * np.pi**2], atol=1e-12)
        np.testing.assert_array_equal(c.b1_d, [1.0, 0.0, 0.0])

    def test_helix_half_period(self):
        c = elliptic_helix(1.0)
        np.testing.assert_allclose(c.x_d, [0.4, 0.0, 0.6], atol=1e-15)
        # second derivative of -0.6 cos(pi t) is +0.6 pi^2 cos(pi t), i.e.
        # negative at t = 1
        np.testing.assert_allclose(c.a_d, [0.0, 0.0, -0.6 * np.pi**2], atol=1e-12)

    def test_helix_acceleration_bound(self):
        ts = np.linspace(0.0, 10.0, 5000)
        sup = max(np.linalg.norm(elliptic_helix(t).a_d) for t in ts)
        assert sup <= 0.6 * np.pi**2 + 1e-12
        assert sup == pytest.approx(5.9218, abs=1e-4)

    def test_hover(self):
        for t in (0.0, 1.7, 9.9):
            c = hover_command(t)
            np.testing.assert_array_equal(c.x_d, np.zeros(3))
            np.testing.assert_array_equal(c.a_d, np.zeros(3))
            np.testing.assert_array_equal(c.b1_d, [1.0, 0.0, 0.0])

    def test_polynomial(self):
        traj = polynomial_command([0.0, 1.0], [0.0, 0.0, 2.0], [5.0])
        c = traj(2.0)
        np.testing.assert_allclose(c.x_d, [2.0, 8.0, 5.0], atol=1e-15)
        np.testing.assert_allclose(c.v_d, [1.0, 8.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(c.a_d, [0.0, 4.0, 0.0], atol=1e-15)

    def test_auto_acceleration_bound(self):
        p = reference_params()
        B = auto_acceleration_bound(p, elliptic_helix, 10.0)
        assert B == pytest.approx(1.1 * (p.m * p.g + p.m * 0.6 * np.pi**2), rel=1e-6)


class TestStep:
    def test_rest_without_gravity(self):
        p = QuadrotorParams(m=1.0, J=np.eye(3), d=0.1, c_tau_f=0.01, g=0.0)
        s0 = RigidBodyState(np.zeros(3), np.zeros(3), np.eye(3), np.zeros(3))
        s1 = step(s0, ZERO_W, NO_DIST, p, 1e-2)
        np.testing.assert_array_equal(s1.x, np.zeros(3))
        np.testing.assert_array_equal(s1.v, np.zeros(3))
        np.testing.assert_allclose(s1.R, np.eye(3), atol=1e-15)

    def test_free_rotation_matches_exponential(self):
        p = QuadrotorParams(m=1.0, J=np.eye(3), d=0.1, c_tau_f=0.01)
        s = RigidBodyState(np.zeros(3), np.zeros(3), np.eye(3), np.array([0.0, 0.0, 1.0]))
        for k in range(1000):
            s = step(s, ZERO_W, NO_DIST, p, 1e-3, k * 1e-3)
        np.testing.assert_allclose(s.R, exp_so3([0.0, 0.0, 1.0]), atol=1e-6)
        np.testing.assert_allclose(s.Omega, [0.0, 0.0, 1.0], atol=1e-12)

    def test_ballistic_drop(self):
        p = reference_params()
        s = RigidBodyState(np.zeros(3), np.zeros(3), np.eye(3), np.zeros(3))
        for k in range(1000):
            s = step(s, ZERO_W, NO_DIST, p, 1e-3, k * 1e-3)
        np.testing.assert_allclose(s.x, [0.0, 0.0, 0.5 * p.g], atol=1e-9)

    def test_stage_sampled_disturbance(self):
        # a disturbance linear in t integrates exactly under the 4-stage rule
        p = QuadrotorParams(m=2.0, J=np.eye(3), d=0.1, c_tau_f=0.01, g=0.0)
        dist = DisturbanceModel(lambda t: np.array([2.0 * t, 0.0, 0.0]),
                                lambda t: np.zeros(3), 20.0, 0.0)
        s = RigidBodyState(np.zeros(3), np.zeros(3), np.eye(3), np.zeros(3))
        for k in range(100):
            s = step(s, ZERO_W, dist, p, 1e-2, k * 1e-2)
        # m dv = 2t -> v = t^2/2/... v(1) = 1/m * int 2t = 1/2
        assert s.v[0] == pytest.approx(0.5, abs=1e-12)

    def test_blowup_guard(self):
        p = reference_params()
        s = RigidBodyState(np.zeros(3), np.zeros(3), np.eye(3), np.zeros(3))
        with pytest.raises(NumericalBlowup):
            step(s, Wrench(1e9, np.zeros(3)), NO_DIST, p, 1.0)


class TestRun:
    def test_determinism(self):
        log1 = run(case1_scenario(duration=0.5))
        log2 = run(case1_scenario(duration=0.5))
        assert np.array_equal(log1.x, log2.x)
        assert np.array_equal(log1.V, log2.V)
        assert np.array_equal(log1.rotors, log2.rotors)

    def test_rotation_drift_stays_tiny(self):
        log = run(case1_scenario(duration=1.0))
        worst = max(np.linalg.norm(R.T @ R - np.eye(3)) for R in log.R)
        assert worst <= 1e-9

    def test_log_grid(self):
        log = run(case1_scenario(duration=0.25))
        assert len(log.t) == 251
        assert log.t[0] == 0.0 and log.t[-1] == pytest.approx(0.25)
        assert np.all(np.diff(log.t) > 0)

    def test_position_mode_rejects_inverted_start(self):
        sc = case2_scenario(duration=1.0)
        bad = Scenario(params=sc.params, gains=sc.gains, initial=sc.initial,
                       trajectory=sc.trajectory, disturbances=sc.disturbances,
                       duration=1.0, dt=1e-3, mode="position", robust=True)
        with pytest.raises(InitialAttitudeError):
            run(bad)

    def test_large_angle_mode_needs_psi2_headroom(self):
        sc = case2_scenario(duration=1.0)
        tight = Scenario(params=sc.params, gains=reference_gains(psi2=1.0, B=75.0),
                         initial=sc.initial, trajectory=sc.trajectory,
                         disturbances=sc.disturbances, duration=1.0, dt=1e-3,
                         mode="position-with-large-angle", robust=True)
        with pytest.raises(InitialAttitudeError):
            run(tight)

    def test_switch_recorded_and_stable(self):
        log = run(case2_scenario(duration=3.0))
        assert log.switch_time is not None and log.switch_time > 0.0
        after = log.Psi[log.t >= log.switch_time]
        assert np.all(after < log.Psi[0])

    def test_attitude_mode_runs(self):
        log = run(attitude_test_scenario(duration=1.0))
        assert log.mode == "attitude"
        assert np.all(log.e_x == 0.0)  # no position command in this mode
        assert log.Psi[-1] < log.Psi[0]


class TestMonitors:
    def test_zero_error_monitors(self):
        g, p = reference_gains(B=75.0), reference_params()
        state = RigidBodyState(np.zeros(3), np.zeros(3), np.eye(3), np.zeros(3))
        comp = ComputedAttitude(np.eye(3), np.zeros(3), np.zeros(3),
                                np.array([0.0, 0.0, 1.0]))
        vals = lyapunov_monitors(state, hover_command(0.0), comp, g, p)
        np.testing.assert_allclose(vals, np.zeros(5), atol=1e-15)

    def test_rate_energy_term(self):
        # pure angular-rate error with the smallest principal moment
        g, p = reference_gains(B=75.0), reference_params()
        state = RigidBodyState(np.zeros(3), np.zeros(3), np.eye(3),
                               np.array([1.0, 0.0, 0.0]))
        comp = ComputedAttitude(np.eye(3), np.zeros(3), np.zeros(3),
                                np.array([0.0, 0.0, 1.0]))
        psi, v1, v2, v, v3 = lyapunov_monitors(state, hover_command(0.0), comp, g, p)
        assert psi == 0.0 and v1 == 0.0 and v3 == 0.0
        assert v2 == pytest.approx(0.5 * 0.0820, abs=1e-15)
        assert v == pytest.approx(v2, abs=1e-15)

    def test_attitude_energy_rate_identity(self):
        # dPsi/dt equals e_R . e_Omega along the flow, to second order in dt
        residuals = {}
        for dt in (1e-3, 5e-4):
            log = run(attitude_test_scenario(dt=dt))
            dpsi = np.gradient(log.Psi, dt)
            prod = np.einsum("ij,ij->i", log.e_R, log.e_Omega)
            residuals[dt] = np.abs(dpsi - prod)[2:-2].max()
        assert residuals[1e-3] < 3e-4
        assert residuals[1e-3] / residuals[5e-4] > 3.0  # second-order decay

    def test_error_vector_rate_bounded_by_rate_error(self):
        log = run(attitude_test_scenario())
        de = np.gradient(log.e_R, 1e-3, axis=0)
        lhs = np.linalg.norm(de, axis=1)[2:-2]
        rhs = np.linalg.norm(log.e_Omega, axis=1)[2:-2]
        assert np.all(lhs <= rhs + 1e-4)

    def test_attitude_ultimate_bound_holds(self):
        # certified attitude gains: terminal squared errors within twice the
        # certified bound (the factor covers discretization)
        sc = attitude_test_scenario(eps_R=1e-3, duration=10.0)
        cert = certify_attitude(sc.gains, sc.params)
        assert cert.satisfied
        log = run(sc)
        z2 = np.linalg.norm(log.e_R[-1]) ** 2 + np.linalg.norm(log.e_Omega[-1]) ** 2
        assert z2 <= 2.0 * cert.ultimate_bound

    def test_monitor_columns_finite_and_consistent(self):
        log = run(case1_scenario(duration=0.5))
        assert np.all(np.isfinite(log.V))
        np.testing.assert_allclose(log.V, log.V1 + log.V2, atol=1e-12)
        assert np.all(log.V3 >= 0.0)
