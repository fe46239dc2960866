"""SO(3) primitives: hat/vee maps, exponential/log, attitude error functions.

Rotation matrices map body-frame vectors into the inertial frame.  All
functions are pure and operate on plain float64 numpy arrays.
"""

import numpy as np

from .errors import DegenerateMatrix, NotARotation, NotSkewSymmetric

ROTATION_TOL = 1e-9  # Frobenius bound on R'R - I and |det R - 1|

_EYE3 = np.eye(3)


def hat(v):
    """Skew-symmetric matrix of a 3-vector, so that hat(v) @ w == cross(v, w)."""
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def vee(S, tol=1e-8):
    """Inverse of hat; reads the three independent entries of a skew matrix.

    Raises NotSkewSymmetric when ||S + S'||_F exceeds tol.
    """
    S = np.asarray(S, dtype=float)
    asym = np.linalg.norm(S + S.T, "fro")
    if asym > tol:
        raise NotSkewSymmetric(f"||S + S'||_F = {asym:.3e} exceeds {tol:.1e}")
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def exp_so3(v):
    """Rotation by angle ||v|| about axis v/||v|| (Rodrigues formula).

    Falls back to the second-order series below ||v|| = 1e-12 to avoid 0/0.
    """
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(v)
    V = hat(v)
    if theta < 1e-12:
        return _EYE3 + V + 0.5 * (V @ V)
    return _EYE3 + (np.sin(theta) / theta) * V + ((1.0 - np.cos(theta)) / theta**2) * (V @ V)


def log_so3(R):
    """Rotation vector of R; inverse of exp_so3 with angle in [0, pi]."""
    c = min(1.0, max(-1.0, (np.trace(R) - 1.0) / 2.0))
    theta = np.arccos(c)
    w = np.array([R[2, 1] - R[1, 2], R[0, 2] - R[2, 0], R[1, 0] - R[0, 1]])  # 2 sin(theta) * axis
    if theta < 1e-6:
        # sin(theta)/theta ~ 1 - theta^2/6
        return 0.5 * w * (1.0 + theta * theta / 6.0)
    if theta > np.pi - 1e-6:
        # w degenerates near a half turn; recover the axis from the symmetric part
        aaT = ((R + R.T) / 2.0 - c * _EYE3) / (1.0 - c)
        k = int(np.argmax(np.diagonal(aaT)))
        axis = aaT[:, k] / np.sqrt(aaT[k, k])
        if w[k] < 0.0:
            axis = -axis
        return theta * axis
    return (theta / (2.0 * np.sin(theta))) * w


def check_rotation(R, tol=ROTATION_TOL):
    """Validate the SO(3) invariants; raises NotARotation instead of projecting."""
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3) or not np.all(np.isfinite(R)):
        raise NotARotation("rotation must be a finite 3x3 matrix")
    ortho = np.linalg.norm(R.T @ R - _EYE3, "fro")
    if ortho > tol:
        raise NotARotation(f"||R'R - I||_F = {ortho:.3e} exceeds {tol:.1e}")
    det = np.linalg.det(R)
    if abs(det - 1.0) > tol:
        raise NotARotation(f"det R = {det:.12f} is not 1 within {tol:.1e}")
    return R


def project_to_rotation(M, tol=1e-14, max_iter=100):
    """Nearest rotation to M in the Frobenius norm (orthogonal polar factor).

    Uses the Newton polar iteration X <- (X + X^-T)/2, which converges
    quadratically for any nonsingular M with det M > 0.  Idempotent on
    rotations.  Raises DegenerateMatrix for det M <= 0 or rank deficiency.
    """
    X = np.asarray(M, dtype=float)
    if X.shape != (3, 3) or not np.all(np.isfinite(X)):
        raise DegenerateMatrix("projection needs a finite 3x3 matrix")
    if np.linalg.det(X) <= 0.0:
        raise DegenerateMatrix("matrix has non-positive determinant")
    for _ in range(max_iter):
        try:
            Xn = 0.5 * (X + np.linalg.inv(X).T)
        except np.linalg.LinAlgError as exc:
            raise DegenerateMatrix("matrix is rank deficient") from exc
        if np.linalg.norm(Xn - X, "fro") < tol:
            return Xn
        X = Xn
    return X


def attitude_error_function(R, Rd):
    """Attitude error Psi = tr(I - Rd'R)/2; ranges over [0, 2], zero iff R == Rd."""
    return 0.5 * (3.0 - np.trace(Rd.T @ R))


def attitude_error_vector(R, Rd):
    """Attitude error vector e_R = vee(Rd'R - R'Rd)/2.

    Its norm equals sqrt(Psi (2 - Psi)), the sine of the eigen-axis angle
    between R and Rd.
    """
    A = Rd.T @ R
    return 0.5 * vee(A - A.T)


def angular_velocity_error(R, Rd, Omega, Omega_d):
    """Angular velocity error e_Omega = Omega - R'Rd Omega_d (body frame)."""
    return Omega - R.T @ (Rd @ Omega_d)


def error_jacobian(R, Rd):
    """Matrix E(R, Rd) = (tr(R'Rd) I - R'Rd)/2 mapping e_Omega to d(e_R)/dt.

    Its spectral norm never exceeds 1.
    """
    A = R.T @ Rd
    return 0.5 * (np.trace(A) * _EYE3 - A)
