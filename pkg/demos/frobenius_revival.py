"""Watch a point seed come back at powers of k under the identity-plus-sum rule.

In characteristic p, (I + B)^(p^m) = I + B^(p^m): after p^m steps the
seed sits in the middle and one copy moves out along each mask offset.
"""

from modlap import builtin, builtin_seed, run, Schedule
from modlap.lattice import format_figure
from modlap.metrics import MetricsRecorder
from modlap.periodicity import detect_replication

seed = builtin_seed("point")
mask = builtin("von-neumann")

for k in (2, 3, 5):
    rec = MetricsRecorder(k, tau=k)
    traj = run(seed, mask, Schedule.constant(k), "identity-plus-sum", k * k, observers=[rec])
    print(f"k={k}")
    for t in (k, k * k):
        ev = detect_replication(seed.figure, traj[t], tau=t)
        print(f"  t={t:3d} rho={rec.rho[t]:.4f} {ev.log_line() if ev else 'no decomposition'}")

print("state after 4 binary steps:")
print(format_figure(run(seed, mask, Schedule.constant(2), "identity-plus-sum", 4)[4], with_origin=False))
