"""A small [2,k,2^s] sweep and the repetitive [2,3,2,2] figure.

Frames of the repetitive run go to ./carpet_frames as PPM files; convert
them with any netpbm-aware tool, e.g. ``magick frame_00080.ppm out.png``.
"""

import os

from modlap import builtin, builtin_seed, run, Schedule
from modlap.experiments import SweepSpec, run_sweep
from modlap.render import Palette, render_pgm
from modlap.taxonomy import CarpetCriteria, classify

spec = SweepSpec.family(
    ("point", "neumann", "moore"), ("von-neumann", "moore", "diag-neumann"),
    "2k2s", ks=(3, 4, 5, 7), ss=(1, 2, 3), horizon=80,
)
result = run_sweep(spec)
print(result.counts_csv())

sched = Schedule.parse("[2,3,2,2]*")
traj = run(builtin_seed("point"), builtin("diag-neumann"), sched, "laplacian", 80)
fc = classify(traj, CarpetCriteria())
print(f"point x diag-neumann under {sched}: {fc.verdict}, min rho {fc.min_rho:.3f} at t={fc.min_rho_t}")

os.makedirs("carpet_frames", exist_ok=True)
for t in (20, 40, 80):
    with open(f"carpet_frames/frame_{t:05d}.ppm", "wb") as fh:
        fh.write(render_pgm(traj[t], Palette.default(3), scale=2))
