"""Evaluate the Lyapunov gain certificates for the bundled gain set.

The conditions are sufficient, not necessary: the bundled gains track very
well in simulation yet fail several of the conservative bounds, and the
certificates report that truthfully instead of gating anything.
"""

from se3quad import certify_attitude, certify_large_angle, certify_position
from se3quad.sim import reference_gains, reference_params

params = reference_params()
gains = reference_gains(B=75.1)

att = certify_attitude(gains, params)
print("attitude-mode certificate (error region Psi < %.2f):" % gains.psi2)
print("  admissible c2 up to %.4f (using c2 = %.2f)" % (att.c2_max, gains.c2))
print("  admissible eps_R up to %.3g (using eps_R = %.3g)" % (att.eps_R_max, gains.eps_R))
for c in att.conditions:
    print("  %-12s %s margin %+.4g" % (c.name, "ok " if c.satisfied else "FAIL", c.margin))
print("  certified terminal error ball: |e_R|^2 + |e_W|^2 <= %.4g" % att.ultimate_bound)
print("  Lyapunov value guaranteed to decrease above d1 = %.4g" % att.decrease_threshold)

pos = certify_position(gains, params)
print("\nposition-mode certificate (Psi < %.2f, |e_x| < %.2f):" % (gains.psi1, gains.ex_max))
for c in pos.conditions:
    print("  %-14s %s margin %+.4g" % (c.name, "ok " if c.satisfied else "FAIL", c.margin))
print("  ultimate bound: %s" % pos.ultimate_bound)

ok, eps_max = certify_large_angle(gains, params)
print("\nlarge-initial-error recovery needs eps_R < %.3g: %s"
      % (eps_max, "satisfied" if ok else "not satisfied"))

# Shrinking the robust-term leakage constants shrinks the certified ball
# linearly; that is the knob for tightening terminal accuracy.
small = reference_gains(eps_R=0.004, B=75.1)
print("\nwith eps_R -> 0.004 the attitude bound scales to %.4g"
      % certify_attitude(small, params).ultimate_bound)
