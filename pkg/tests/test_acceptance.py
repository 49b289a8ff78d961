"""Acceptance criteria, one test per criterion.

Each test records a ``criterion N: PASS|FAIL`` line that is echoed in the
terminal summary.  Run ``python3 tests/test_acceptance.py`` to print the
lines without pytest.
"""

import functools
import io
import itertools
import math
import time
from dataclasses import replace

import numpy as np
import pytest

from modlap import masks, seeds
from modlap.dynamics import IDENTITY_PLUS_SUM, LAPLACIAN, RULES, Schedule, modulus_bound, run, step
from modlap.experiments import SweepSpec, density_fingerprint, period_scan, pooled_phase, run_sweep, sweep_cells
from modlap.lattice import LatticeState, bounding_box
from modlap.metrics import MetricsRecorder, compute_row
from modlap.periodicity import BIG, detect_replication, detect_return, lucas_multinomial_odd, predict_times
from modlap.render import Palette, render_pgm
from modlap.symmetry import DOUBLE
from modlap.taxonomy import CARPET, RUG_CHAOTIC, CarpetCriteria, classify

from oracle import multinomial, oracle_decompose, oracle_step

pytestmark = pytest.mark.acceptance

SMALL_SEEDS = seeds.BUILTIN_SEEDS
PERIOD_MASKS = ("von-neumann", "moore")
ASYMMETRIC_SEED = "11.\n..1\n1..\n"

# (seed, mask, schedule, rule, horizon) for every run behind criteria 1-7
RUNS: dict[int, list] = {}


def _double_pairs():
    out = []
    for s in SMALL_SEEDS:
        for m in masks.BUILTIN_MASKS:
            if seeds.builtin_seed(s).symmetry.klass == DOUBLE and masks.builtin(m).symmetry.klass == DOUBLE:
                out.append((s, m))
    return out


def _revival_times(k, limit):
    out, t = [], 1
    while t <= limit:
        out.append(t)
        t *= k
    return out


@functools.cache
def criterion_1():
    failures, slowest = [], 0.0
    RUNS[1] = []
    for sname, mname, k in itertools.product(("point", "neumann"), PERIOD_MASKS, (2, 3, 5, 7)):
        RUNS[1].append((sname, mname, f"{k}*", IDENTITY_PLUS_SUM, 64))
        t0 = time.perf_counter()
        traj = run(seeds.builtin_seed(sname), masks.builtin(mname), Schedule.constant(k), IDENTITY_PLUS_SUM, 64)
        found = set(detect_return(traj))
        slowest = max(slowest, time.perf_counter() - t0)
        missing = [t for t in _revival_times(k, 64) if t not in found]
        if missing:
            failures.append(f"{sname}/{mname}/k={k} missing {missing}")
    ok = not failures and slowest < 1.0
    detail = f"16 cases, slowest {slowest:.2f}s"
    if failures:
        detail += "; " + "; ".join(failures)
    return ok, detail


@functools.cache
def criterion_2():
    seed = seeds.builtin_seed("point")
    mask = masks.builtin("von-neumann")
    RUNS[2] = [("point", "von-neumann", "2*", IDENTITY_PLUS_SUM, 64)]
    t0 = time.perf_counter()
    traj = run(seed, mask, Schedule.constant(2), IDENTITY_PLUS_SUM, 64)
    event = None
    for t in range(1, 65):
        ev = detect_replication(seed.figure, traj[t], tau=t)
        if ev is not None and ev.kind == BIG:
            event = ev
            break
    elapsed = time.perf_counter() - t0
    if event is None:
        return False, "no big replication event within 64 steps"
    translated = set(event.translated)
    a = max(abs(dx) + abs(dy) for dx, dy in translated) if translated else 0
    cross = translated == {(a, 0), (-a, 0), (0, a), (0, -a)}
    decomps = oracle_decompose(seed.figure, traj[event.tau])
    oracle_ok = sorted(event.shifts) in [sorted(d) for d in decomps]
    ok = event.s == 4 and cross and oracle_ok and elapsed < 1.0
    detail = (
        f"first big event tau={event.tau} s={event.s} identity={event.identity} "
        f"translated={sorted(translated)} symmetric_cross={cross} oracle_agrees={oracle_ok} ({elapsed:.2f}s)"
    )
    return ok, detail


def _law_scan(ks, check_lemma):
    bad, lemma_bad, n = [], [], 0
    for k, sname, mname in itertools.product(ks, SMALL_SEEDS, PERIOD_MASKS):
        n += 1
        scan = period_scan(seeds.builtin_seed(sname), masks.builtin(mname), k, LAPLACIAN, 200)
        if scan.outside_law:
            bad.append(f"{sname}/{mname}/k={k} at {scan.outside_law[:6]}")
        if check_lemma and scan.first_big is not None and not scan.lemma_holds:
            ev = scan.first_big
            lemma_bad.append(f"{sname}/{mname}/k={k} t={ev.tau} w={ev.grid_width} s={ev.extent}")
    return n, bad, lemma_bad


@functools.cache
def criterion_3():
    RUNS[3] = [(s, m, f"{k}*", LAPLACIAN, 200) for k in (3, 5, 7) for s in SMALL_SEEDS for m in PERIOD_MASKS]
    t0 = time.perf_counter()
    n, bad, lemma_bad = _law_scan((3, 5, 7), check_lemma=True)
    elapsed = time.perf_counter() - t0
    ok = not bad and not lemma_bad and elapsed < 30
    detail = f"{n} scans in {elapsed:.1f}s, {len(bad)} with times outside the law, {len(lemma_bad)} lemma violations"
    if bad:
        detail += "; outside: " + "; ".join(bad[:4])
    if lemma_bad:
        detail += "; lemma: " + "; ".join(lemma_bad[:4])
    return ok, detail


@functools.cache
def criterion_4():
    RUNS[4] = [(s, m, f"{k}*", LAPLACIAN, 200) for k in (4, 8, 9) for s in SMALL_SEEDS for m in PERIOD_MASKS]
    parts = []
    ok = True
    for k in (4, 8, 9):
        n, bad, _ = _law_scan((k,), check_lemma=False)
        law = predict_times(k, 200)
        parts.append(f"k={k} ({law.description}): {n - len(bad)}/{n} subset")
        if bad:
            ok = False
            parts[-1] += " [" + "; ".join(bad[:3]) + "]"
    return ok, "; ".join(parts)


@functools.cache
def criterion_5():
    pairs = _double_pairs()
    shifted = Schedule.parse("2,3,[2]*")
    RUNS[5] = [(s, m, sch, LAPLACIAN, 64) for s, m in pairs for sch in ("2*", str(shifted))]
    t0 = time.perf_counter()
    binary, shifted_reports, bad = [], [], []
    for sname, mname in pairs:
        seed, mask = seeds.builtin_seed(sname), masks.builtin(mname)
        rep = density_fingerprint(seed, mask, Schedule.constant(2), 64)
        binary.append(rep)
        if rep.phase8 != 0 or rep.regularity8 < 0.8:
            bad.append(f"{sname}/{mname} phase={rep.phase8} reg={rep.regularity8}")
        shifted_reports.append(density_fingerprint(seed, mask, shifted, 64))
    base, _ = pooled_phase(binary)
    phase, share = pooled_phase(shifted_reports)
    per_pair = [r.phase8 for r in shifted_reports]
    elapsed = time.perf_counter() - t0
    shift_ok = base is not None and phase == (base + 2) % 8
    ok = not bad and shift_ok and elapsed < 10
    detail = (
        f"{len(pairs)} pairs binary class 0 with regularity>=0.8: {not bad}; "
        f"2,3,[2]* pooled class {phase} (share {share:.2f}) vs binary {base}; "
        f"per-pair classes {per_pair} ({elapsed:.1f}s)"
    )
    if bad:
        detail += "; " + "; ".join(bad)
    return ok, detail


SWEEP_KS = (3, 4, 5, 6, 7, 8, 9, 11)


def _sweep_spec():
    return SweepSpec.family(
        SMALL_SEEDS, masks.BUILTIN_MASKS, "2k2s", SWEEP_KS, range(1, 9),
        horizon=80, criteria=CarpetCriteria(horizon=80),
    )


@functools.cache
def criterion_6():
    spec = _sweep_spec()
    t0 = time.perf_counter()
    res = run_sweep(spec)
    elapsed = time.perf_counter() - t0
    RUNS[6] = [(c.cell.seed, c.cell.mask, c.cell.schedule, spec.rule, spec.horizon) for c in res.cells]
    by_k = res.count_by_k()
    even_zero = all(by_k.get(k, 0) == 0 for k in SWEEP_KS if k % 2 == 0)
    three_some = by_k.get(3, 0) >= 1
    three_max = all(by_k.get(3, 0) >= by_k.get(k, 0) for k in SWEEP_KS)
    per_s = [res.counts.get((3, s), 0) for s in range(1, 9)]
    ok = even_zero and three_some and three_max and elapsed < 300
    detail = (
        f"{len(res.cells)} cells in {elapsed:.0f}s; carpets by k {dict(sorted(by_k.items()))}; "
        f"k=3 by s {per_s}; even zero={even_zero}, k=3 dominant={three_max}"
    )
    return ok, detail


@functools.cache
def criterion_7():
    sched = Schedule.parse("[2,3,2,2]*")
    mask = masks.builtin("diag-neumann")
    RUNS[7] = [("point", "diag-neumann", str(sched), LAPLACIAN, 80), (ASYMMETRIC_SEED, "diag-neumann", str(sched), LAPLACIAN, 80)]
    t0 = time.perf_counter()
    sym = classify(run(seeds.builtin_seed("point"), mask, sched, LAPLACIAN, 80))
    asym = classify(run(seeds.load_seed(ASYMMETRIC_SEED), mask, sched, LAPLACIAN, 80))
    elapsed = time.perf_counter() - t0
    ok = sym.verdict == CARPET and asym.verdict == RUG_CHAOTIC and elapsed < 5
    detail = (
        f"point x diag-neumann -> {sym.verdict} (min rho {sym.min_rho:.3f} at t={sym.min_rho_t}, "
        f"stripe {sym.worst_stripe:.3f}, hole {sym.worst_hole:.3f}); asymmetric seed -> {asym.verdict} ({elapsed:.1f}s)"
    )
    return ok, detail


class IdentityTally:
    """Observer checking the residue-density identities on every step."""

    def __init__(self):
        self.steps = 0
        self.violations = []

    def observer(self, K, label):
        def check(t, state):
            row = compute_row(t, state, K)
            self.steps += 1
            total = sum(row.rho_c)
            expect = 0.0 if state.is_empty() else 1.0
            if abs(total - expect) > 1e-12:
                self.violations.append((label, t, "sum"))
            if not state.is_empty() and abs(row.rho - (1 - row.rho_c[0])) > 1e-12:
                self.violations.append((label, t, "rho"))
            if not 0 <= row.entropy <= math.log(K) + 1e-12:
                self.violations.append((label, t, "entropy"))

        return check


def _seed_of(name):
    return seeds.builtin_seed(name) if name in seeds.BUILTIN_SEEDS else seeds.load_seed(name)


@functools.cache
def criterion_8():
    if 6 not in RUNS:
        RUNS[6] = [(c.seed, c.mask, c.schedule, LAPLACIAN, 80) for c in sweep_cells(_sweep_spec())[0]]
    for fn in (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_7):
        fn()
    tally = IdentityTally()
    configs = {cfg for n in range(1, 8) for cfg in RUNS.get(n, [])}
    for sname, mname, sched_text, rule, horizon in sorted(configs):
        sched = Schedule.parse(sched_text)
        obs = tally.observer(modulus_bound(sched), (sname, mname, sched_text))
        run(_seed_of(sname), masks.builtin(mname), sched, rule, horizon, observers=[obs], keep="last")
    ok = not tally.violations
    detail = f"{len(configs)} distinct runs, {tally.steps} steps checked, {len(tally.violations)} violations"
    return ok, detail


@functools.cache
def criterion_9():
    rng = np.random.default_rng(20240601)
    mismatches, tuples = [], 0
    for mname, k, rule in itertools.product(masks.BUILTIN_MASKS, range(2, 10), RULES):
        mask = masks.builtin(mname)
        for _ in range(1000):
            h, w = rng.integers(1, 5, size=2)
            vals = rng.integers(0, k, size=(h, w))
            vals[rng.random((h, w)) < 0.3] = 0
            state = LatticeState(vals, tuple(rng.integers(-3, 4, size=2)))
            tuples += 1
            if step(state, mask, k, rule) != oracle_step(state, mask, k, rule):
                mismatches.append((mname, k, rule))
    lucas_bad, lucas_n = 0, 0
    for p in (2, 3, 5):
        for t in range(13):
            for parts in _compositions(t, 5):
                lucas_n += 1
                if lucas_multinomial_odd(t, parts, p) != (multinomial(parts) % p != 0):
                    lucas_bad += 1
    ok = not mismatches and not lucas_bad
    detail = f"{tuples} step tuples, {len(mismatches)} mismatches; {lucas_n} multinomials, {lucas_bad} Lucas mismatches"
    return ok, detail


def _compositions(t, n):
    if n == 1:
        yield (t,)
        return
    for first in range(t + 1):
        for rest in _compositions(t - first, n - 1):
            yield (first,) + rest


@functools.cache
def criterion_10():
    spec = SweepSpec.family(
        ("point", "neumann", "moore"), ("von-neumann", "moore", "diag-neumann"), "2k2s", (3, 5), (1, 2),
        horizon=40, criteria=CarpetCriteria(horizon=40),
    )
    one = run_sweep(spec)
    many = run_sweep(replace(spec, workers=4))
    sweep_same = one.classification_csv() == many.classification_csv() and one.counts_csv() == many.counts_csv()

    def outputs():
        buf = io.StringIO()
        sched = Schedule.parse("2,3,[2]*")
        traj = run(seeds.builtin_seed("diag"), masks.builtin("moore"), sched, LAPLACIAN, 30,
                   observers=[MetricsRecorder(3, stream=buf)], keep="last")
        return buf.getvalue().encode(), render_pgm(traj.final, Palette.default(3))

    bytes_same = outputs() == outputs()
    t0 = time.perf_counter()
    traj = run(seeds.builtin_seed("point"), masks.builtin("von-neumann"), Schedule.constant(2), LAPLACIAN, 1000, keep="last")
    elapsed = time.perf_counter() - t0
    box = bounding_box(traj.final)
    box_ok = (box.width, box.height) == (2001, 2001)
    fast = elapsed < 10
    ok = sweep_same and bytes_same and box_ok
    detail = (
        f"sweep CSV identical for 1 and 4 workers: {sweep_same}; repeated CSV/PPM identical: {bytes_same}; "
        f"1000 binary steps in {elapsed:.2f}s, box {box.width}x{box.height}"
        + ("" if fast else " (performance target missed)")
    )
    return ok, detail


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
}


def _check(n, report):
    ok, detail = CRITERIA[n]()
    report(n, ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def test_criterion_01_frobenius_revival(report):
    _check(1, report)


def test_criterion_02_point_replicates_into_a_cross(report):
    _check(2, report)


def test_criterion_03_prime_period_laws(report):
    _check(3, report)


def test_criterion_04_prime_power_reduction(report):
    _check(4, report)


def test_criterion_05_binary_density_fingerprint(report):
    _check(5, report)


def test_criterion_06_carpet_sweep_structure(report):
    _check(6, report)


def test_criterion_07_repetitive_2322_carpet(report):
    _check(7, report)


def test_criterion_08_metric_identities(report):
    _check(8, report)


def test_criterion_09_oracle_equivalence(report):
    _check(9, report)


def test_criterion_10_determinism_and_speed(report):
    _check(10, report)


if __name__ == "__main__":
    for n, fn in CRITERIA.items():
        ok, detail = fn()
        print(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}", flush=True)
