"""Closed-loop helix tracking under disturbances, with and without the
robust feedback terms, written out as CSV logs."""

import numpy as np

from se3quad.cli import write_log_csv
from se3quad.sim import case1_scenario, run

for robust in (True, False):
    log = run(case1_scenario(robust=robust))
    label = "robust on " if robust else "robust off"
    print("%s: terminal |e_x| = %6.4f m   max Psi = %.4f   max rotor thrust = %5.1f N"
          % (label, log.terminal_position_error(), log.Psi.max(), np.abs(log.rotors).max()))
    out = "helix_robust.csv" if robust else "helix_ablation.csv"
    write_log_csv(log, out)
    print("  wrote %s (%d rows)" % (out, len(log.t)))

# With the robust terms active the tracking error settles around a
# centimetre despite a 3.4 N constant force offset and a 2 N m oscillatory
# moment; removing them leaves a persistent error an order of magnitude
# larger, dominated by the un-rejected disturbances.
