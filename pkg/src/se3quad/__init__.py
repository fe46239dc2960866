"""Robust geometric tracking control of a quadrotor UAV on SE(3).

Library layout:
    geometry  - SO(3) primitives and attitude error functions
    model     - rigid-body dynamics, rotor allocation, disturbance models
    control   - robust attitude / position tracking controllers
    certify   - Lyapunov gain conditions and ultimate-bound formulas
    sim       - fixed-step closed-loop simulator and bundled scenarios
    cli       - scenario configs, run/certify/sweep commands, CSV output
"""

from . import certify, cli, control, errors, geometry, model, sim
from .certify import certify_attitude, certify_large_angle, certify_position
from .control import (
    AttitudeCommand,
    ComputedAttitude,
    Gains,
    PositionCommand,
    attitude_control,
    computed_attitude,
    estimate_computed_rates,
    position_control,
    robust_term_attitude,
    robust_term_position,
)
from .geometry import (
    attitude_error_function,
    attitude_error_vector,
    angular_velocity_error,
    error_jacobian,
    exp_so3,
    hat,
    log_so3,
    project_to_rotation,
    vee,
)
from .model import (
    DisturbanceModel,
    QuadrotorParams,
    RigidBodyState,
    Wrench,
    allocate_rotors,
    dynamics,
    reference_disturbances,
    wrench_from_rotors,
)
from .sim import (
    Scenario,
    TrajectoryLog,
    case1_scenario,
    case2_scenario,
    elliptic_helix,
    hover_command,
    lyapunov_monitors,
    run,
    step,
)

__version__ = "0.1.0"
