"""Quadrotor rigid-body model: dynamics, rotor allocation, disturbance models.

Frame conventions: the inertial third axis e3 points along gravity (downward),
so the gravity term in the translational dynamics is +m g e3.  The collective
thrust f acts along -R e3 (upward when the vehicle is level and f > 0); f may
be negative, i.e. thrust reversal is permitted by the model.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import SingularAllocation
from .geometry import check_rotation, hat

E3 = np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True)
class QuadrotorParams:
    """Physical parameters and assumed disturbance bounds.

    J may be given as the 3 principal moments or as a full symmetric matrix;
    it is stored as a 3x3 array either way.
    """

    m: float                 # mass, kg
    J: np.ndarray            # inertia about the body axes, kg m^2
    d: float                 # arm length from center of mass to each rotor, m
    c_tau_f: float           # rotor torque per unit thrust, m
    g: float = 9.81          # gravity, m/s^2
    delta_x: float = 0.0     # assumed bound on the translational disturbance, N
    delta_R: float = 0.0     # assumed bound on the rotational disturbance, N m

    def __post_init__(self):
        J = np.asarray(self.J, dtype=float)
        if J.shape == (3,):
            J = np.diag(J)
        if J.shape != (3, 3) or np.linalg.norm(J - J.T) > 1e-12:
            raise ValueError("J must be 3 principal moments or a symmetric 3x3 matrix")
        if np.linalg.eigvalsh(J)[0] <= 0.0:
            raise ValueError("inertia matrix must be positive definite")
        if self.m <= 0.0 or self.g < 0.0:
            raise ValueError("mass must be positive and gravity non-negative")
        if self.d == 0.0 or self.c_tau_f == 0.0:
            raise SingularAllocation("d and c_tau_f must be nonzero")
        if self.delta_x < 0.0 or self.delta_R < 0.0:
            raise ValueError("disturbance bounds must be non-negative")
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "J_inv", np.linalg.inv(J))

    def inertia_range(self):
        """(smallest, largest) eigenvalue of the inertia matrix."""
        w = np.linalg.eigvalsh(self.J)
        return float(w[0]), float(w[-1])


@dataclass(frozen=True)
class RigidBodyState:
    """Rigid-body state (x, v, R, Omega); x, v inertial, Omega body frame."""

    x: np.ndarray
    v: np.ndarray
    R: np.ndarray
    Omega: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        object.__setattr__(self, "R", check_rotation(self.R))
        object.__setattr__(self, "Omega", np.asarray(self.Omega, dtype=float))
        for name in ("x", "v", "Omega"):
            a = getattr(self, name)
            if a.shape != (3,) or not np.all(np.isfinite(a)):
                raise ValueError(f"{name} must be a finite 3-vector")


@dataclass(frozen=True)
class Wrench:
    """Collective thrust f (N, along -R e3) and body moment M (N m)."""

    f: float
    M: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "M", np.asarray(self.M, dtype=float))
        if not (np.isfinite(self.f) and np.all(np.isfinite(self.M))):
            raise ValueError("wrench must be finite")


@dataclass(frozen=True)
class StateDerivative:
    dx: np.ndarray
    dv: np.ndarray
    dR: np.ndarray
    dOmega: np.ndarray


@dataclass(frozen=True)
class DisturbanceModel:
    """Exogenous force (inertial, N) and moment (body, N m) as functions of time.

    The declared bounds are sup-norm bounds on the respective signals.
    """

    force: Callable[[float], np.ndarray]
    moment: Callable[[float], np.ndarray]
    bound_force: float = 0.0
    bound_moment: float = 0.0

    @staticmethod
    def none():
        zero = np.zeros(3)
        return DisturbanceModel(lambda t: zero, lambda t: zero, 0.0, 0.0)


def reference_disturbances():
    """Constant force offset plus a multi-tone oscillatory moment.

    Force [2.50, 1.25, 2.00] N (norm 3.44, declared bound 4.34) and moment
    (2/sqrt(3)) [sin 8 pi t, sin pi t, cos 4 pi t] N m (declared bound 2).
    """
    const = np.array([2.50, 1.25, 2.00])
    amp = 2.0 / np.sqrt(3.0)

    def moment(t):
        return amp * np.array([np.sin(8.0 * np.pi * t), np.sin(np.pi * t), np.cos(4.0 * np.pi * t)])

    return DisturbanceModel(lambda t: const, moment, bound_force=4.34, bound_moment=2.0)


def _derivative(x, v, R, Omega, f, M, dist_force, dist_moment, p):
    """Equations of motion evaluated on raw arrays (R need not be orthogonal)."""
    dv = p.g * E3 - (f / p.m) * (R @ E3) + dist_force / p.m
    dR = R @ hat(Omega)
    dOmega = p.J_inv @ (M - np.cross(Omega, p.J @ Omega) + dist_moment)
    return v, dv, dR, dOmega


def dynamics(state, wrench, disturbance, p):
    """State derivative of the rigid body under a wrench and disturbances.

    disturbance is the pair (force, moment) sampled at the current instant.

        dx/dt     = v
        m dv/dt   = m g e3 - f R e3 + force
        dR/dt     = R hat(Omega)
        J dOmega/dt = M - Omega x J Omega + moment
    """
    dist_force, dist_moment = disturbance
    dx, dv, dR, dOmega = _derivative(
        state.x, state.v, state.R, state.Omega, wrench.f, wrench.M,
        np.asarray(dist_force, dtype=float), np.asarray(dist_moment, dtype=float), p,
    )
    return StateDerivative(dx, dv, dR, dOmega)


def allocation_matrix(p):
    """4x4 map from per-rotor thrusts [f1..f4] to [f, M1, M2, M3].

    Rotors 1 and 3 spin opposite to rotors 2 and 4; the reaction torque of
    rotor i about the body third axis is (-1)^i c_tau_f f_i.  The determinant
    is 8 c_tau_f d^2.
    """
    d, c = p.d, p.c_tau_f
    return np.array([
        [1.0, 1.0, 1.0, 1.0],
        [0.0, -d, 0.0, d],
        [d, 0.0, -d, 0.0],
        [-c, c, -c, c],
    ])


def wrench_from_rotors(rotors, p):
    """Collective thrust and body moment produced by four rotor thrusts."""
    f1, f2, f3, f4 = np.asarray(rotors, dtype=float)
    f = f1 + f2 + f3 + f4
    M = np.array([
        p.d * (f4 - f2),
        p.d * (f1 - f3),
        p.c_tau_f * (-f1 + f2 - f3 + f4),
    ])
    return Wrench(f, M)


def allocate_rotors(w, p):
    """Per-rotor thrusts realizing a wrench; exact inverse of wrench_from_rotors."""
    if p.d == 0.0 or p.c_tau_f == 0.0:
        raise SingularAllocation("allocation matrix is singular (d or c_tau_f is zero)")
    qf = 0.25 * w.f
    m1 = w.M[0] / (2.0 * p.d)
    m2 = w.M[1] / (2.0 * p.d)
    m3 = w.M[2] / (4.0 * p.c_tau_f)
    return np.array([qf + m2 - m3, qf - m1 + m3, qf - m2 - m3, qf + m1 + m3])
