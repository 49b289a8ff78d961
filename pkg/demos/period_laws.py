"""Compare observed replication times with the predicted law for each k."""

import sys

from modlap import builtin, random_seed
from modlap.experiments import period_scan

k = int(sys.argv[1]) if len(sys.argv) > 1 else 3
seed = random_seed("medium", 0.5, rng_seed=2, k=k)
scan = period_scan(seed, builtin("moore"), k, "laplacian", horizon=120)

print(f"k={k}: law = {scan.law.description}")
for ev in scan.events[:10]:
    print(f"  t={ev.tau} kind={ev.kind} copies={ev.s}")
print("times outside the law:", scan.outside_law or "none")
if scan.first_big:
    ev = scan.first_big
    print(f"first big copy set at t={ev.tau}: w={ev.grid_width}, seed extent {ev.extent}, "
          f"2t >= w*s is {scan.lemma_holds}; predicted t_big = {scan.t_big_predicted}")
