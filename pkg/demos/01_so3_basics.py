"""Tour of the SO(3) primitives: hat/vee, the exponential map, and the
attitude error function the controllers are built on."""

import numpy as np

from se3quad import (
    attitude_error_function,
    attitude_error_vector,
    exp_so3,
    hat,
    project_to_rotation,
    vee,
)

# The hat map turns a 3-vector into the matrix that implements its cross
# product; vee is the exact inverse.
v = np.array([1.0, 2.0, 3.0])
print("hat(v) =\n", hat(v))
print("vee(hat(v)) =", vee(hat(v)))

# exp_so3 gives the rotation by |v| radians about v/|v|.
R = exp_so3([0.0, 0.0, np.pi / 2])
print("\nquarter turn about e3 maps e1 to", R @ [1.0, 0.0, 0.0])

# A rotation matrix polluted by integration drift is cleaned up by projecting
# onto the nearest rotation (never silently: validation elsewhere rejects).
drifted = R + 1e-6 * np.ones((3, 3))
fixed = project_to_rotation(drifted)
print("orthogonality defect before/after projection: %.2e / %.2e"
      % (np.linalg.norm(drifted.T @ drifted - np.eye(3)),
         np.linalg.norm(fixed.T @ fixed - np.eye(3))))

# The attitude error function Psi ranges over [0, 2]: 0 at perfect alignment,
# 2 at a half turn.  Its companion error vector has norm sqrt(Psi (2 - Psi)).
for angle in (0.0, np.pi / 6, np.pi / 2, np.pi):
    Rd = exp_so3([angle, 0.0, 0.0])
    psi = attitude_error_function(Rd, np.eye(3))
    e_R = attitude_error_vector(Rd, np.eye(3))
    print("angle %5.2f rad: Psi = %.4f  |e_R| = %.4f  sqrt(Psi(2-Psi)) = %.4f"
          % (angle, psi, np.linalg.norm(e_R), np.sqrt(psi * (2 - psi))))
