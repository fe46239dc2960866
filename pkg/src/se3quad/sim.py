"""Fixed-step closed-loop simulation with built-in scenarios and monitors.

A scenario couples the rigid-body model with one of the tracking controllers
at the integrator rate (there is no separate discrete control rate).  Every
run is strictly deterministic: identical scenarios produce bit-identical logs
on one platform.
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .control import (
    AttitudeCommand,
    ComputedAttitude,
    ComputedRateEstimator,
    Gains,
    PositionCommand,
    _attitude_errors,
    attitude_control,
    computed_attitude,
    position_control,
    robust_term_position,
)
from .errors import DegenerateThrust, HeadingParallel, InitialAttitudeError, NumericalBlowup
from .geometry import exp_so3, log_so3, project_to_rotation
from .model import (
    E3,
    DisturbanceModel,
    QuadrotorParams,
    RigidBodyState,
    Wrench,
    _derivative,
    allocate_rotors,
    reference_disturbances,
)

MODES = ("attitude", "position", "position-with-large-angle")

BLOWUP_LIMIT = 1e6


def elliptic_helix(t):
    """Elliptic helix command x_d = [0.4 t, 0.4 sin(pi t), -0.6 cos(pi t)] m,
    heading fixed along the inertial first axis."""
    pt = np.pi * t
    return PositionCommand(
        x_d=np.array([0.4 * t, 0.4 * np.sin(pt), -0.6 * np.cos(pt)]),
        v_d=np.array([0.4, 0.4 * np.pi * np.cos(pt), 0.6 * np.pi * np.sin(pt)]),
        a_d=np.array([0.0, -0.4 * np.pi**2 * np.sin(pt), 0.6 * np.pi**2 * np.cos(pt)]),
        b1_d=np.array([1.0, 0.0, 0.0]),
    )


def hover_command(t):
    """Hover at the origin, heading fixed along the inertial first axis."""
    z = np.zeros(3)
    return PositionCommand(x_d=z, v_d=z, a_d=z, b1_d=np.array([1.0, 0.0, 0.0]))


def polynomial_command(coeffs_x, coeffs_y, coeffs_z, b1_d=(1.0, 0.0, 0.0)):
    """Position command with per-axis polynomial coordinates (ascending coeffs)."""
    polys = [np.polynomial.Polynomial(c) for c in (coeffs_x, coeffs_y, coeffs_z)]
    vels = [p.deriv() for p in polys]
    accs = [v.deriv() for v in vels]
    b1 = np.asarray(b1_d, dtype=float)
    b1 = b1 / np.linalg.norm(b1)

    def sample(t):
        return PositionCommand(
            x_d=np.array([p(t) for p in polys]),
            v_d=np.array([v(t) for v in vels]),
            a_d=np.array([a(t) for a in accs]),
            b1_d=b1,
        )

    return sample


def attitude_polynomial_command(axis, angle_coeffs):
    """Attitude command rotating about a fixed axis by a polynomial angle.

    With a constant axis the commanded rates are exactly Omega_d = axis *
    dtheta/dt and Omega_d_dot = axis * d2theta/dt2.
    """
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    theta = np.polynomial.Polynomial(angle_coeffs)
    dtheta = theta.deriv()
    ddtheta = dtheta.deriv()

    def sample(t):
        return AttitudeCommand(exp_so3(a * theta(t)), a * dtheta(t), a * ddtheta(t))

    return sample


@dataclass(frozen=True)
class Scenario:
    """Closed-loop scenario: plant, gains, initial state, commands, run grid."""

    params: QuadrotorParams
    gains: Gains
    initial: RigidBodyState
    trajectory: Callable  # t -> PositionCommand (position modes) or AttitudeCommand
    disturbances: DisturbanceModel
    duration: float
    dt: float
    mode: str = "position"
    robust: bool = True
    name: str = ""

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not self.dt > 0.0 or self.duration < self.dt:
            raise ValueError("need dt > 0 and duration >= dt")


@dataclass
class TrajectoryLog:
    """Per-step records of a run on a uniform time grid.

    e_x/e_v are zero in attitude mode (no position command).  The Lyapunov
    columns V1, V2, V, V3 are monitor quantities computed after the run from
    the logged states, using central-difference computed-attitude rates; eW
    is the causal angular-velocity error the controller acted on.
    """

    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    R: np.ndarray
    Omega: np.ndarray
    f: np.ndarray
    M: np.ndarray
    rotors: np.ndarray
    e_x: np.ndarray
    e_v: np.ndarray
    e_R: np.ndarray
    e_Omega: np.ndarray
    Psi: np.ndarray
    V1: np.ndarray
    V2: np.ndarray
    V: np.ndarray
    V3: np.ndarray
    dist_force_norm: np.ndarray
    dist_moment_norm: np.ndarray
    R_cmd: np.ndarray            # attitude command actually tracked (R_c or R_d)
    mode: str = "position"
    switch_time: Optional[float] = None

    def terminal_position_error(self):
        return float(np.linalg.norm(self.e_x[-1]))


def step(state, wrench, dist, p, dt, t=0.0):
    """One classical 4-stage explicit step of the rigid-body dynamics.

    The wrench is frozen over the step (zero-order hold); the disturbance is
    an explicit function of time and is sampled at the stage times.  The
    rotation is reprojected onto SO(3) after the step.
    """
    def deriv(x, v, R, W, tau):
        return _derivative(x, v, R, W, wrench.f, wrench.M,
                           dist.force(tau), dist.moment(tau), p)

    x, v, R, W = state.x, state.v, state.R, state.Omega
    h = dt
    k1 = deriv(x, v, R, W, t)
    k2 = deriv(x + 0.5 * h * k1[0], v + 0.5 * h * k1[1], R + 0.5 * h * k1[2],
               W + 0.5 * h * k1[3], t + 0.5 * h)
    k3 = deriv(x + 0.5 * h * k2[0], v + 0.5 * h * k2[1], R + 0.5 * h * k2[2],
               W + 0.5 * h * k2[3], t + 0.5 * h)
    k4 = deriv(x + h * k3[0], v + h * k3[1], R + h * k3[2], W + h * k3[3], t + h)

    x1 = x + (h / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
    v1 = v + (h / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
    R1 = R + (h / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
    W1 = W + (h / 6.0) * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3])

    if max(np.max(np.abs(x1)), np.max(np.abs(v1)), np.max(np.abs(W1)),
           np.max(np.abs(R1))) > BLOWUP_LIMIT:
        raise NumericalBlowup(f"state exceeded {BLOWUP_LIMIT:.0e} at t = {t + dt:.6f} s")
    return RigidBodyState(x1, v1, project_to_rotation(R1), W1)


def lyapunov_monitors(state, cmd, computed, g, p):
    """Monitor tuple (Psi, V1, V2, V, V3) for one position-mode sample.

        V1 = kx ||e_x||^2 / 2 + m ||e_v||^2 / 2 + c1 e_x . e_v
        V2 = e_Omega . J e_Omega / 2 + kR Psi + c2 e_R . e_Omega
        V  = V1 + V2
        V3 = ||e_x||^2 / 2 + m ||e_v||^2 / 2
    """
    e_x = state.x - cmd.x_d
    e_v = state.v - cmd.v_d
    err = _attitude_errors(state, computed.R_c, computed.Omega_c, g, p)
    V1, V2, V, V3 = _lyapunov_values(e_x, e_v, err.e_R, err.e_Omega, err.Psi, g, p)
    return err.Psi, V1, V2, V, V3


def _lyapunov_values(e_x, e_v, e_R, e_Omega, Psi, g, p):
    V1 = 0.5 * g.kx * (e_x @ e_x) + 0.5 * p.m * (e_v @ e_v) + g.c1 * (e_x @ e_v)
    V2 = 0.5 * (e_Omega @ (p.J @ e_Omega)) + g.kR * Psi + g.c2 * (e_R @ e_Omega)
    V3 = 0.5 * (e_x @ e_x) + 0.5 * p.m * (e_v @ e_v)
    return V1, V2, V1 + V2, V3


def _posthoc_command_rates(R_cmd, dt):
    """Central-difference rates of the logged attitude-command sequence.

    Second-order in the interior, one-sided second-order at the ends; used
    only by the monitors, never by the controller.
    """
    n = len(R_cmd)
    omega = np.zeros((n, 3))
    if n == 1:
        return omega
    logs = np.empty((n - 1, 3))
    for k in range(n - 1):
        logs[k] = log_so3(R_cmd[k].T @ R_cmd[k + 1]) / dt  # mean rate over [k, k+1]
    for k in range(n):
        if k == 0:
            omega[k] = 1.5 * logs[0] - 0.5 * logs[1] if n > 2 else logs[0]
        elif k == n - 1:
            omega[k] = 1.5 * logs[-1] - 0.5 * logs[-2] if n > 2 else logs[-1]
        else:
            omega[k] = 0.5 * (logs[k - 1] + logs[k])
    return omega


def run(sc: Scenario) -> TrajectoryLog:
    """Run a scenario to completion and return the full log.

    Position mode requires an initial attitude error below 1; with mode
    "position-with-large-angle" the moment controller instead tracks the
    computed attitude as a pure attitude command until Psi drops below psi1,
    after which the run proceeds in position mode (the applied wrench is
    identical in both phases; the switch instant is recorded).
    """
    p, g, dt = sc.params, sc.gains, sc.dt
    n = int(round(sc.duration / dt))
    est = ComputedRateEstimator(dt)

    t = np.arange(n + 1) * dt
    x = np.zeros((n + 1, 3)); v = np.zeros((n + 1, 3))
    R = np.zeros((n + 1, 3, 3)); Om = np.zeros((n + 1, 3))
    f = np.zeros(n + 1); M = np.zeros((n + 1, 3)); rotors = np.zeros((n + 1, 4))
    e_x = np.zeros((n + 1, 3)); e_v = np.zeros((n + 1, 3))
    e_R = np.zeros((n + 1, 3)); e_Om = np.zeros((n + 1, 3))
    Psi = np.zeros(n + 1)
    dfn = np.zeros(n + 1); dmn = np.zeros(n + 1)
    R_cmd = np.zeros((n + 1, 3, 3))

    state = sc.initial
    capture = sc.mode == "position-with-large-angle"
    switch_time = None

    for k in range(n + 1):
        tk = float(t[k])
        if sc.mode == "attitude":
            cmd = sc.trajectory(tk)
            Mk, err = attitude_control(state, cmd, g, p, robust=sc.robust)
            fk = p.m * p.g  # thrust is free in attitude mode; hold hover magnitude
            R_cmd[k] = cmd.R_d
        else:
            cmd = sc.trajectory(tk)
            ex = state.x - cmd.x_d
            ev = state.v - cmd.v_d
            if sc.robust:
                mu_x = robust_term_position(ev + (g.c1 / p.m) * ex, p.delta_x, g.eps_x, g.tau)
            else:
                mu_x = np.zeros(3)
            try:
                R_c, b3, A = computed_attitude(ex, ev, cmd, mu_x, g, p)
            except (DegenerateThrust, HeadingParallel) as exc:
                raise type(exc)(f"{exc} (t = {tk:.6f} s)") from exc
            Om_c, dOm_c, _ = est.push(R_c)
            comp = ComputedAttitude(R_c, Om_c, dOm_c, b3)
            if capture:
                acmd = AttitudeCommand(R_c, Om_c, dOm_c)
                Mk, err = attitude_control(state, acmd, g, p, robust=sc.robust)
                # thrust follows the position law in the capture phase too
                fk = float(-A @ (state.R @ E3))
                if err.Psi < g.psi1:
                    capture = False
                    switch_time = tk
            else:
                (fk, Mk), diag = position_control(state, cmd, comp, g, p, robust=sc.robust)
                err = diag.attitude
            if k == 0:
                if sc.mode == "position" and not err.Psi < 1.0:
                    raise InitialAttitudeError(
                        f"initial attitude error {err.Psi:.4f} >= 1 needs the large-angle mode")
                if sc.mode == "position-with-large-angle" and not err.Psi < g.psi2:
                    raise InitialAttitudeError(
                        f"initial attitude error {err.Psi:.4f} is not below psi2 = {g.psi2}")
            e_x[k], e_v[k] = ex, ev
            R_cmd[k] = R_c

        wrench = Wrench(fk, Mk)
        x[k], v[k], R[k], Om[k] = state.x, state.v, state.R, state.Omega
        f[k], M[k] = wrench.f, wrench.M
        rotors[k] = allocate_rotors(wrench, p)
        e_R[k], e_Om[k], Psi[k] = err.e_R, err.e_Omega, err.Psi
        dfn[k] = np.linalg.norm(sc.disturbances.force(tk))
        dmn[k] = np.linalg.norm(sc.disturbances.moment(tk))
        if k < n:
            state = step(state, wrench, sc.disturbances, p, dt, tk)

    # Monitor pass: recompute the angular-velocity error with the smoother
    # post-hoc command rates, then assemble the Lyapunov columns.
    om_cmd = _posthoc_command_rates(R_cmd, dt)
    V1 = np.zeros(n + 1); V2 = np.zeros(n + 1); V = np.zeros(n + 1); V3 = np.zeros(n + 1)
    for k in range(n + 1):
        e_om = Om[k] - R[k].T @ (R_cmd[k] @ om_cmd[k])
        V1[k], V2[k], V[k], V3[k] = _lyapunov_values(
            e_x[k], e_v[k], e_R[k], e_om, Psi[k], g, p)

    return TrajectoryLog(
        t=t, x=x, v=v, R=R, Omega=Om, f=f, M=M, rotors=rotors,
        e_x=e_x, e_v=e_v, e_R=e_R, e_Omega=e_Om, Psi=Psi,
        V1=V1, V2=V2, V=V, V3=V3,
        dist_force_norm=dfn, dist_moment_norm=dmn,
        R_cmd=R_cmd, mode=sc.mode, switch_time=switch_time,
    )


# ---------------------------------------------------------------------------
# Built-in scenarios

def reference_params():
    """Parameters of the 4.34 kg quadrotor used by the bundled scenarios."""
    return QuadrotorParams(
        m=4.34,
        J=np.array([0.0820, 0.0845, 0.1377]),
        d=0.315,
        c_tau_f=8.004e-3,
        g=9.81,
        delta_x=4.34,
        delta_R=2.0,
    )


def reference_gains(**overrides):
    """Tracking gains used by the bundled scenarios."""
    base = dict(
        kx=59.02, kv=24.30, kR=8.81, kOmega=1.54,
        c1=3.6, c2=0.6, eps_x=0.04, eps_R=0.04,
        tau=3.0, psi1=0.9, psi2=1.0, ex_max=1.0, B=None,
    )
    base.update(overrides)
    return Gains(**base)


def auto_acceleration_bound(params, trajectory, duration, margin=1.1):
    """Default bound B on ||m g e3 - m a_d|| from the commanded trajectory:
    margin * (m g + m sup||a_d||), the sup taken over a dense grid."""
    ts = np.linspace(0.0, duration, 4097)
    sup = max(float(np.linalg.norm(trajectory(float(tt)).a_d)) for tt in ts)
    return margin * (params.m * params.g + params.m * sup)


def _with_auto_bound(gains, params, trajectory, duration):
    if gains.B is not None:
        return gains
    return replace(gains, B=auto_acceleration_bound(params, trajectory, duration))


def case1_scenario(robust=True, dt=1e-3, duration=10.0):
    """Helix tracking under the reference disturbances (small initial tilt)."""
    p = reference_params()
    g = _with_auto_bound(reference_gains(psi2=1.0), p, elliptic_helix, duration)
    initial = RigidBodyState(
        x=np.array([0.1, 0.0, 0.0]), v=np.zeros(3), R=np.eye(3), Omega=np.zeros(3))
    return Scenario(
        params=p, gains=g, initial=initial, trajectory=elliptic_helix,
        disturbances=reference_disturbances(), duration=duration, dt=dt,
        mode="position", robust=robust, name="case1",
    )


def case2_scenario(robust=True, dt=1e-3, duration=10.0):
    """Hover recovery from a near-inverted initial attitude."""
    p = reference_params()
    g = _with_auto_bound(reference_gains(psi2=1.99995), p, hover_command, duration)
    initial = RigidBodyState(
        x=np.array([0.1, 0.0, 0.0]), v=np.zeros(3),
        R=exp_so3(np.array([0.99 * np.pi, 0.0, 0.0])), Omega=np.zeros(3))
    return Scenario(
        params=p, gains=g, initial=initial, trajectory=hover_command,
        disturbances=reference_disturbances(), duration=duration, dt=dt,
        mode="position-with-large-angle", robust=robust, name="case2",
    )
