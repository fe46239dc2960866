"""Gain certification: Lyapunov comparison matrices, sufficient conditions,
ultimate-bound formulas.

The conditions are sufficient, never necessary: a failing certificate does not
prevent simulation, it only means the ultimate-bound guarantee is not
established for that gain set.  All condition margins are reported signed so
failures are quantified rather than clamped.
"""

from dataclasses import dataclass
from math import inf, sqrt
from typing import List, Tuple

import numpy as np

from .errors import NonPositiveGain, PsiOrdering, PsiOutOfRange


@dataclass(frozen=True)
class Condition:
    name: str
    satisfied: bool
    margin: float  # positive iff satisfied; bound minus value (or value minus bound)


def sym2_eigvals(M):
    """Closed-form (min, max) eigenvalues of a symmetric 2x2 matrix."""
    a, b, d = float(M[0, 0]), float(M[0, 1]), float(M[1, 1])
    s = 0.5 * (a + d)
    r = sqrt((0.5 * (a - d)) ** 2 + b * b)
    return s - r, s + r


def _attitude_matrices(g, lmJ, lMJ, psi):
    M21 = 0.5 * np.array([[g.kR, -g.c2], [-g.c2, lmJ]])
    M22 = 0.5 * np.array([[2.0 * g.kR / (2.0 - psi), g.c2], [g.c2, lMJ]])
    W2 = np.array([
        [g.c2 * g.kR / lMJ, -g.c2 * g.kOmega / (2.0 * lmJ)],
        [-g.c2 * g.kOmega / (2.0 * lmJ), g.kOmega - g.c2],
    ])
    return M21, M22, W2


def _c2_max(g, lmJ, lMJ):
    return min(
        g.kOmega,
        4.0 * g.kOmega * g.kR * lmJ**2 / (g.kOmega**2 * lMJ + 4.0 * g.kR * lmJ**2),
        sqrt(g.kR * lmJ),
    )


@dataclass(frozen=True)
class AttitudeCertificate:
    """Certificate for the attitude mode with error region Psi < psi2."""

    M21: np.ndarray
    M22: np.ndarray
    W2: np.ndarray
    c2_max: float
    eps_R_max: float
    ultimate_bound: float        # certified bound on ||e_R||^2 + ||e_Omega||^2
    decrease_threshold: float    # d1: the Lyapunov value above which dV2/dt < 0
    conditions: List[Condition]

    @property
    def satisfied(self):
        return all(c.satisfied for c in self.conditions)


def certify_attitude(g, p):
    """Builds the attitude-mode certificate for gains g and parameters p."""
    lmJ, lMJ = p.inertia_range()
    M21, M22, W2 = _attitude_matrices(g, lmJ, lMJ, g.psi2)
    c2_max = _c2_max(g, lmJ, lMJ)
    lm_M21, _ = sym2_eigvals(M21)
    _, lM_M22 = sym2_eigvals(M22)
    lm_W2, _ = sym2_eigvals(W2)
    eps_R_max = lm_M21 * lm_W2 / lM_M22 * g.psi2 * (2.0 - g.psi2)
    if lm_M21 > 0.0 and lm_W2 > 0.0:
        ultimate_bound = lM_M22 * g.eps_R / (lm_M21 * lm_W2)
    else:
        ultimate_bound = inf
    decrease_threshold = lM_M22 * g.eps_R / lm_W2 if lm_W2 > 0.0 else inf
    conditions = [
        Condition("c2_bound", g.c2 < c2_max, c2_max - g.c2),
        Condition("eps_R_bound", g.eps_R < eps_R_max, eps_R_max - g.eps_R),
    ]
    return AttitudeCertificate(
        M21, M22, W2, c2_max, eps_R_max, ultimate_bound, decrease_threshold, conditions
    )


@dataclass(frozen=True)
class PositionCertificate:
    """Certificate for the position mode with Psi < psi1 and ||e_x|| < ex_max."""

    M11: np.ndarray
    M12: np.ndarray
    M21: np.ndarray
    M22p: np.ndarray
    W1: np.ndarray
    W12: np.ndarray
    W2: np.ndarray
    W: np.ndarray
    alpha: float
    c1_max: float
    c2_max: float
    eps_sum_max: float
    ultimate_bound: float        # certified bound on the summed squared errors
    decrease_threshold: float    # d1: the Lyapunov value above which dV/dt < 0
    conditions: List[Condition]

    @property
    def satisfied(self):
        return all(c.satisfied for c in self.conditions)


def certify_position(g, p):
    """Builds the position-mode certificate for gains g and parameters p.

    Requires g.B (the bound on the commanded acceleration force) to be set.
    """
    if g.B is None:
        raise NonPositiveGain("certify_position needs gains.B to be resolved")
    if not 0.0 < g.psi1 < 1.0:
        raise PsiOutOfRange("psi1 must lie in (0, 1)")
    lmJ, lMJ = p.inertia_range()
    alpha = sqrt(g.psi1 * (2.0 - g.psi1))

    M11 = 0.5 * np.array([[g.kx, -g.c1], [-g.c1, p.m]])
    M12 = 0.5 * np.array([[g.kx, g.c1], [g.c1, p.m]])
    M21, M22p, W2 = _attitude_matrices(g, lmJ, lMJ, g.psi1)
    W1 = np.array([
        [g.c1 * g.kx / p.m * (1.0 - alpha), -g.c1 * g.kv / (2.0 * p.m) * (1.0 + alpha)],
        [-g.c1 * g.kv / (2.0 * p.m) * (1.0 + alpha), g.kv * (1.0 - alpha) - g.c1],
    ])
    W12 = np.array([
        [g.c1 / p.m * (g.B + p.delta_x), 0.0],
        [g.B + p.delta_x + g.kx * g.ex_max, 0.0],
    ])
    # W12 has a zero second column, so its spectral norm is the Euclidean
    # norm of the first column.
    nW12 = float(np.hypot(W12[0, 0], W12[1, 0]))
    lm_W1, _ = sym2_eigvals(W1)
    lm_W2, _ = sym2_eigvals(W2)
    W = np.array([[lm_W1, -0.5 * nW12], [-0.5 * nW12, lm_W2]])

    c1_max = min(
        g.kv * (1.0 - alpha),
        4.0 * p.m * g.kx * g.kv * (1.0 - alpha) ** 2
        / (g.kv**2 * (1.0 + alpha) ** 2 + 4.0 * p.m * g.kx * (1.0 - alpha)),
        sqrt(g.kx * p.m),
    )
    c2_max = _c2_max(g, lmJ, lMJ)

    lm_M11, _ = sym2_eigvals(M11)
    _, lM_M12 = sym2_eigvals(M12)
    lm_M21, _ = sym2_eigvals(M21)
    _, lM_M22p = sym2_eigvals(M22p)
    lm_W, _ = sym2_eigvals(W)

    min_M = min(lm_M11, lm_M21)
    max_M = max(lM_M12, lM_M22p)
    eps_sum_max = min_M * min(g.ex_max**2, g.psi1 * (2.0 - g.psi1)) / max_M * lm_W
    eps_sum = g.eps_x + g.eps_R

    if lm_W > 0.0 and min_M > 0.0:
        ultimate_bound = max_M * eps_sum / (min_M * lm_W)
    else:
        ultimate_bound = inf
    decrease_threshold = max_M * eps_sum / lm_W if lm_W > 0.0 else inf

    coupling_rhs = nW12**2 / (4.0 * lm_W1) if lm_W1 > 0.0 else inf
    conditions = [
        Condition("c1_bound", g.c1 < c1_max, c1_max - g.c1),
        Condition("c2_bound", g.c2 < c2_max, c2_max - g.c2),
        Condition("coupling_bound", lm_W2 > coupling_rhs,
                  lm_W2 - coupling_rhs if coupling_rhs < inf else -inf),
        Condition("eps_sum_bound", eps_sum < eps_sum_max, eps_sum_max - eps_sum),
    ]
    return PositionCertificate(
        M11, M12, M21, M22p, W1, W12, W2, W, alpha, c1_max, c2_max,
        eps_sum_max, ultimate_bound, decrease_threshold, conditions,
    )


def certify_large_angle(g, p) -> Tuple[bool, float]:
    """Eps_R smallness check allowing recovery from initial errors with
    psi1 <= Psi(0) < psi2 via an attitude-capture phase.

    Returns (satisfied, eps_R_max) with
    eps_R_max = lm(M21) lm(W2) psi1 (2 - psi1) / lM(M22), where M22 is built
    with psi2.
    """
    if not (g.psi1 < 1.0 <= g.psi2 < 2.0):
        raise PsiOrdering("need psi1 < 1 <= psi2 < 2")
    lmJ, lMJ = p.inertia_range()
    M21, M22, W2 = _attitude_matrices(g, lmJ, lMJ, g.psi2)
    lm_M21, _ = sym2_eigvals(M21)
    _, lM_M22 = sym2_eigvals(M22)
    lm_W2, _ = sym2_eigvals(W2)
    eps_R_max = lm_M21 * lm_W2 * g.psi1 * (2.0 - g.psi1) / lM_M22
    return g.eps_R < eps_R_max, eps_R_max
