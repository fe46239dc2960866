"""Sweep the robust-term leakage constant eps_R on an attitude-mode scenario.

Larger eps_R means a softer robust term: the certified error ball (and, less
sharply, the simulated terminal error) grows with it.
"""

import numpy as np

from se3quad.certify import certify_attitude
from se3quad.model import RigidBodyState, reference_disturbances
from se3quad.geometry import exp_so3
from se3quad.sim import (
    Scenario,
    attitude_polynomial_command,
    reference_gains,
    reference_params,
    run,
)

params = reference_params()
trajectory = attitude_polynomial_command([0.0, 0.0, 1.0], [0.0, 0.3, 0.1])
initial = RigidBodyState(np.zeros(3), np.zeros(3), exp_so3([0.05, 0.0, 0.0]),
                         np.array([0.0, 0.0, 0.3]))

print("eps_R    terminal |e_R|^2+|e_W|^2    certified bound")
for eps_R in (0.0005, 0.001, 0.002, 0.004):
    gains = reference_gains(c2=0.05, eps_R=eps_R, psi2=1.0, B=75.0)
    cert = certify_attitude(gains, params)
    sc = Scenario(params=params, gains=gains, initial=initial,
                  trajectory=trajectory, disturbances=reference_disturbances(),
                  duration=6.0, dt=1e-3, mode="attitude", robust=True)
    log = run(sc)
    z2 = np.linalg.norm(log.e_R[-1]) ** 2 + np.linalg.norm(log.e_Omega[-1]) ** 2
    print("%7.4f  %.3e                   %.3e%s"
          % (eps_R, z2, cert.ultimate_bound,
             "" if cert.satisfied else "  (conditions not all met)"))
