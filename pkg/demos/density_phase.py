"""Binary density minima sit at t = 0 mod 8; one ternary step shifts them."""

from modlap import builtin, builtin_seed, Schedule
from modlap.experiments import density_fingerprint

seed, mask = builtin_seed("point"), builtin("von-neumann")
for text in ("2*", "2,3,[2]*"):
    rep = density_fingerprint(seed, mask, Schedule.parse(text), horizon=96)
    print(f"{text:10s} minima {list(rep.minima)}")
    print(f"{'':10s} modal class mod 8 = {rep.phase8} (share {rep.regularity8:.2f})")
