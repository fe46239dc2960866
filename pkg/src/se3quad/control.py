"""Tracking controllers: robust attitude mode and robust position mode.

The position controller points the thrust axis along a computed direction
built from position/velocity feedback, gravity compensation, the acceleration
feedforward and a bounded robust term; the moment controller then tracks that
computed attitude.  Robust feedback terms dominate bounded disturbances up to
an epsilon-sized leakage.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DegenerateThrust,
    HeadingParallel,
    NonPositiveGain,
    PsiOutOfRange,
    TauOutOfRange,
)
from .geometry import (
    angular_velocity_error,
    attitude_error_function,
    attitude_error_vector,
    hat,
    log_so3,
)
from .model import E3

_ZERO3 = np.zeros(3)


@dataclass(frozen=True)
class Gains:
    """Controller gains, robust-term parameters and certificate constants.

    B is the assumed bound on ||m g e3 - m xdd_d||; leave it None to have the
    scenario builder derive it from the commanded trajectory.
    """

    kx: float
    kv: float
    kR: float
    kOmega: float
    c1: float
    c2: float
    eps_x: float
    eps_R: float
    tau: float = 3.0
    psi1: float = 0.9
    psi2: float = 1.0
    ex_max: float = 1.0
    B: Optional[float] = None

    def __post_init__(self):
        for name in ("kx", "kv", "kR", "kOmega", "c1", "c2", "eps_x", "eps_R", "ex_max"):
            if not getattr(self, name) > 0.0:
                raise NonPositiveGain(f"{name} must be strictly positive")
        if not self.tau > 2.0:
            raise TauOutOfRange("tau must be strictly greater than 2")
        if not 0.0 < self.psi1 < 1.0:
            raise PsiOutOfRange("psi1 must lie in (0, 1)")
        if not 0.0 < self.psi2 < 2.0:
            raise PsiOutOfRange("psi2 must lie in (0, 2)")
        if self.B is not None and not self.B > 0.0:
            raise NonPositiveGain("B must be strictly positive when given")


@dataclass(frozen=True)
class AttitudeCommand:
    """Commanded attitude, angular velocity and angular acceleration.

    Consistency hat(Omega_d) = R_d' dR_d/dt is the caller's responsibility.
    """

    R_d: np.ndarray
    Omega_d: np.ndarray
    Omega_d_dot: np.ndarray


@dataclass(frozen=True)
class PositionCommand:
    """Commanded position, velocity, acceleration and heading direction b1_d."""

    x_d: np.ndarray
    v_d: np.ndarray
    a_d: np.ndarray
    b1_d: np.ndarray

    def __post_init__(self):
        for name in ("x_d", "v_d", "a_d", "b1_d"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if abs(np.linalg.norm(self.b1_d) - 1.0) > 1e-9:
            raise ValueError("b1_d must be a unit vector")


@dataclass(frozen=True)
class ComputedAttitude:
    """Computed attitude command: rotation, rates and the thrust axis b3_c."""

    R_c: np.ndarray
    Omega_c: np.ndarray
    Omega_c_dot: np.ndarray
    b3_c: np.ndarray


@dataclass(frozen=True)
class AttitudeErrors:
    e_R: np.ndarray
    e_Omega: np.ndarray
    e_A: np.ndarray
    Psi: float


@dataclass(frozen=True)
class PositionDiagnostics:
    e_x: np.ndarray
    e_v: np.ndarray
    e_B: np.ndarray
    A: np.ndarray
    attitude: AttitudeErrors


def robust_term_attitude(e_A, delta_R, eps_R):
    """Bounded robust moment term mu_R = -delta_R^2 e_A / (delta_R ||e_A|| + eps_R).

    ||mu_R|| <= delta_R, and e_A . (Delta + mu_R) <= eps_R for every
    disturbance with ||Delta|| <= delta_R.
    """
    if delta_R < 0.0 or not eps_R > 0.0:
        raise NonPositiveGain("need delta_R >= 0 and eps_R > 0")
    e_A = np.asarray(e_A, dtype=float)
    return -(delta_R**2) * e_A / (delta_R * np.linalg.norm(e_A) + eps_R)


def robust_term_position(e_B, delta_x, eps_x, tau):
    """Bounded robust force term

        mu_x = -delta_x^(tau+2) e_B ||e_B||^tau
               / (delta_x^(tau+1) ||e_B||^(tau+1) + eps_x^(tau+1)).

    ||mu_x|| <= delta_x, and e_B . (Delta + mu_x) <= eps_x for every
    disturbance with ||Delta|| <= delta_x.
    """
    if delta_x < 0.0 or not eps_x > 0.0:
        raise NonPositiveGain("need delta_x >= 0 and eps_x > 0")
    if not tau > 2.0:
        raise TauOutOfRange("tau must be strictly greater than 2")
    e_B = np.asarray(e_B, dtype=float)
    nb = np.linalg.norm(e_B)
    num = delta_x ** (tau + 2.0) * nb**tau
    den = delta_x ** (tau + 1.0) * nb ** (tau + 1.0) + eps_x ** (tau + 1.0)
    return -(num / den) * e_B


def _attitude_errors(state, R_d, Omega_d, g, p):
    e_R = attitude_error_vector(state.R, R_d)
    e_Omega = angular_velocity_error(state.R, R_d, state.Omega, Omega_d)
    e_A = e_Omega + g.c2 * (p.J_inv @ e_R)
    Psi = attitude_error_function(state.R, R_d)
    return AttitudeErrors(e_R, e_Omega, e_A, Psi)


def _moment(state, R_d, Omega_d, Omega_d_dot, err, g, p, robust):
    # The robust term is applied directly to the moment, matching the
    # attitude-mode law and the error dynamics used by the certificates.
    mu_R = robust_term_attitude(err.e_A, p.delta_R, g.eps_R) if robust else _ZERO3
    RtRd = state.R.T @ R_d
    return (
        -g.kR * err.e_R
        - g.kOmega * err.e_Omega
        + np.cross(state.Omega, p.J @ state.Omega)
        - p.J @ (hat(state.Omega) @ (RtRd @ Omega_d) - RtRd @ Omega_d_dot)
        + mu_R
    )


def attitude_control(state, cmd, g, p, robust=True):
    """Moment command tracking an attitude command; returns (M, AttitudeErrors)."""
    err = _attitude_errors(state, cmd.R_d, cmd.Omega_d, g, p)
    M = _moment(state, cmd.R_d, cmd.Omega_d, cmd.Omega_d_dot, err, g, p, robust)
    return M, err


def computed_attitude(e_x, e_v, cmd, mu_x, g, p):
    """Computed attitude realizing the commanded translational force.

    Returns (R_c, b3_c, A) where A = -kx e_x - kv e_v - m g e3 + m a_d + mu_x,
    the thrust axis is b3_c = -A/||A||, and the first column of R_c is the
    normalized projection of b1_d onto the plane perpendicular to b3_c.
    """
    A = -g.kx * e_x - g.kv * e_v - p.m * p.g * E3 + p.m * cmd.a_d + mu_x
    nA = np.linalg.norm(A)
    if nA < 1e-9:
        raise DegenerateThrust("commanded force vanished; thrust axis undefined")
    b3 = -A / nA
    c = np.cross(b3, cmd.b1_d)
    if np.linalg.norm(c) < 1e-9:
        raise HeadingParallel("heading direction is parallel to the thrust axis")
    b1 = -np.cross(b3, c)
    b1 = b1 / np.linalg.norm(b1)
    R_c = np.column_stack((b1, np.cross(b3, b1), b3))
    return R_c, b3, A


def estimate_computed_rates(history, dt):
    """Finite-difference rates of a computed-attitude sample history.

    history holds time-ordered rotation samples at fixed step dt, newest last.
    Returns (Omega_c, Omega_c_dot, complete).  With fewer than 2 samples both
    rates are zero and complete is False (insufficient history); with exactly
    2 samples Omega_c is a one-sided estimate and Omega_c_dot is zero.  With
    >= 3 samples Omega_c is a second-order causal estimate at the newest
    sample and Omega_c_dot lags by one step.
    """
    n = len(history)
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if n < 2:
        return _ZERO3.copy(), _ZERO3.copy(), False
    v2 = log_so3(history[-2].T @ history[-1]) / dt
    if n == 2:
        return v2, _ZERO3.copy(), False
    v1 = log_so3(history[-3].T @ history[-2]) / dt
    return 1.5 * v2 - 0.5 * v1, (v2 - v1) / dt, True


class ComputedRateEstimator:
    """Causal rate estimator over the stream of computed attitudes of one run."""

    def __init__(self, dt):
        self.dt = dt
        self._hist = []

    def push(self, R_c):
        self._hist.append(R_c)
        if len(self._hist) > 3:
            self._hist.pop(0)
        return estimate_computed_rates(self._hist, self.dt)


def position_control(state, cmd, computed, g, p, robust=True):
    """Thrust and moment tracking a position command; returns (Wrench-parts, diagnostics).

    computed must be the computed attitude produced from the current errors.
    Returns ((f, M), PositionDiagnostics).
    """
    e_x = state.x - cmd.x_d
    e_v = state.v - cmd.v_d
    e_B = e_v + (g.c1 / p.m) * e_x
    mu_x = robust_term_position(e_B, p.delta_x, g.eps_x, g.tau) if robust else _ZERO3
    A = -g.kx * e_x - g.kv * e_v - p.m * p.g * E3 + p.m * cmd.a_d + mu_x
    f = float(-A @ (state.R @ E3))
    err = _attitude_errors(state, computed.R_c, computed.Omega_c, g, p)
    M = _moment(state, computed.R_c, computed.Omega_c, computed.Omega_c_dot, err, g, p, robust)
    return (f, M), PositionDiagnostics(e_x, e_v, e_B, A, err)
