"""Experiment campaigns: period scans, density fingerprints and carpet sweeps."""

from __future__ import annotations

import json
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import masks as masks_mod
from . import seeds as seeds_mod
from .dynamics import LAPLACIAN, Schedule, check_rule, modulus_bound, run
from .metrics import MetricsRecorder
from .periodicity import (
    BIG,
    PredictedLaw,
    ReplicationEvent,
    detect_replication,
    is_return,
    predict_times,
    t_big,
)
from .taxonomy import (
    CARPET,
    CARPET_POSSIBLE,
    CarpetCriteria,
    FigureClass,
    StepEvidence,
    predict_class,
    verdict_from_evidence,
)


class SweepError(ValueError):
    pass


# schedule templates: name -> function(k, s) giving a Schedule
TEMPLATES = {
    "2k2s": lambda k, s: Schedule((2, k) + (2,) * s),
    "2k": lambda k, s: Schedule((2, k)),
    "2k-then-2": lambda k, s: Schedule((2,), (2, k)),
    "constant": lambda k, s: Schedule((k,)),
}


@dataclass(frozen=True)
class SweepCell:
    seed: str
    mask: str
    schedule: str
    k: int
    s: int


@dataclass(frozen=True)
class SweepSpec:
    seeds: tuple
    masks: tuple
    cells: tuple = ()
    rule: str = LAPLACIAN
    horizon: int = 80
    criteria: CarpetCriteria = CarpetCriteria()
    campaign: str = "carpet"
    output_dir: Optional[str] = None
    workers: int = 1
    schedules: tuple = ()

    def __post_init__(self):
        check_rule(self.rule)
        if not self.seeds or not self.masks:
            raise SweepError("seed and mask lists must be nonempty")
        if not self.schedules:
            raise SweepError("schedule list must be nonempty")
        if self.horizon < self.criteria.horizon:
            raise SweepError("horizon must cover the criteria horizon")

    @classmethod
    def family(
        cls, seeds, masks, template: str, ks: Sequence[int], ss: Sequence[int] = (0,), **kw
    ) -> "SweepSpec":
        """Schedules generated by a template over ``k`` and ``s`` ranges."""
        if template not in TEMPLATES:
            raise SweepError(f"unknown schedule template {template!r}")
        scheds = tuple((k, s, str(TEMPLATES[template](k, s))) for k in ks for s in ss)
        return cls(tuple(seeds), tuple(masks), schedules=scheds, **kw)

    @classmethod
    def from_config(cls, config: dict) -> "SweepSpec":
        crit = replace(CarpetCriteria(), **config.get("criteria", {}))
        horizon = int(config.get("horizon", crit.horizon))
        if "criteria" not in config or "horizon" not in config.get("criteria", {}):
            crit = replace(crit, horizon=min(crit.horizon, horizon))
        common = dict(
            rule=config.get("rule", LAPLACIAN),
            horizon=horizon,
            criteria=crit,
            campaign=config.get("campaign", "carpet"),
            output_dir=config.get("output_dir"),
            workers=int(config.get("workers", 1)),
        )
        seeds = tuple(config.get("seeds", ()))
        masks = tuple(config.get("masks", ()))
        if "schedule" in config:
            sch = config["schedule"]
            return cls.family(seeds, masks, sch["template"], sch["k"], sch.get("s", [0]), **common)
        scheds = tuple((0, 0, str(Schedule.parse(s))) for s in config.get("schedules", ()))
        return cls(seeds, masks, schedules=scheds, **common)


@dataclass(frozen=True)
class CellResult:
    cell: SweepCell
    figure: FigureClass
    rho: tuple = ()


@dataclass
class SweepResult:
    cells: list
    counts: dict
    skipped: list = field(default_factory=list)

    def recount(self) -> dict:
        c = Counter()
        for r in self.cells:
            c[(r.cell.k, r.cell.s)] += r.figure.verdict == CARPET
        return dict(c)

    def count_by_k(self) -> dict:
        out: dict = {}
        for (k, _), n in self.counts.items():
            out[k] = out.get(k, 0) + n
        return out

    def classification_csv(self) -> str:
        lines = ["seed,mask,schedule,verdict,min_rho,worst_stripe,worst_hole,sym_persisted"]
        for r in self.cells:
            sched = '"' + r.cell.schedule + '"'
            lines.append(",".join([r.cell.seed, r.cell.mask, sched] + r.figure.csv_fields()))
        return "\n".join(lines) + "\n"

    def counts_csv(self) -> str:
        lines = ["k,s,carpets"]
        for (k, s) in sorted(self.counts):
            lines.append(f"{k},{s},{self.counts[(k, s)]}")
        return "\n".join(lines) + "\n"


def _run_cell(args) -> CellResult:
    cell, rule, criteria, keep_trace = args
    seed = seeds_mod.resolve(cell.seed)
    mask = masks_mod.resolve(cell.mask)
    ev = StepEvidence()
    run(seed, mask, Schedule.parse(cell.schedule), rule, criteria.horizon, observers=[ev], keep="last")
    fig = verdict_from_evidence(ev, criteria)
    return CellResult(cell, fig, tuple(ev.rho) if keep_trace else ())


def sweep_cells(spec: SweepSpec) -> tuple[list, list]:
    """Cells of the cartesian product, and the seed/mask pairs filtered out."""
    cells, skipped = [], []
    for sname in spec.seeds:
        seed = seeds_mod.resolve(sname)
        for mname in spec.masks:
            mask = masks_mod.resolve(mname)
            if spec.campaign == "carpet":
                label = predict_class(seed.symmetry, mask.symmetry)
                if label != CARPET_POSSIBLE:
                    skipped.append((sname, mname, label))
                    continue
            for k, s, sched in spec.schedules:
                cells.append(SweepCell(sname, mname, sched, k, s))
    return cells, skipped


def run_sweep(spec: SweepSpec, keep_traces: bool = False) -> SweepResult:
    cells, skipped = sweep_cells(spec)
    jobs = [(c, spec.rule, spec.criteria, keep_traces) for c in cells]
    if spec.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            results = list(pool.map(_run_cell, jobs, chunksize=max(1, len(jobs) // (4 * spec.workers))))
    else:
        results = [_run_cell(j) for j in jobs]
    results.sort(key=lambda r: (r.cell.k, r.cell.s, r.cell.schedule, r.cell.seed, r.cell.mask))
    counts: Counter = Counter()
    for r in results:
        counts[(r.cell.k, r.cell.s)] += r.figure.verdict == CARPET
    result = SweepResult(results, dict(sorted(counts.items())), skipped)
    if spec.output_dir:
        write_sweep(result, spec.output_dir)
    return result


def write_sweep(result: SweepResult, output_dir: str) -> None:
    os.makedirs(output_dir, exist_ok=True)
    with open(os.path.join(output_dir, "classification.csv"), "w", newline="") as fh:
        fh.write(result.classification_csv())
    with open(os.path.join(output_dir, "counts.csv"), "w", newline="") as fh:
        fh.write(result.counts_csv())


def load_config(path: str) -> SweepSpec:
    with open(path) as fh:
        return SweepSpec.from_config(json.load(fh))


# period scans


@dataclass
class PeriodScan:
    k: int
    rule: str
    horizon: int
    law: PredictedLaw
    returns: list
    events: list
    first_big: Optional[ReplicationEvent]
    t_big_predicted: Optional[int]
    lemma_holds: Optional[bool]

    @property
    def replication_times(self) -> list:
        return [e.tau for e in self.events]

    @property
    def outside_law(self) -> list:
        return [t for t in sorted(set(self.returns) | set(self.replication_times)) if t not in self.law]


def period_scan(seed, mask, k: int, rule: str = LAPLACIAN, horizon: int = 200, exact: bool = True) -> PeriodScan:
    """Run constant ``k`` and compare every seed return and replication with the law."""
    law = predict_times(k, max(horizon, 1))
    events: list = []
    returns: list = []
    fig = seed.figure

    def observe(t, state):
        if t == 0 or state.is_empty():
            return
        ev = detect_replication(fig, state, exact=exact, tau=t)
        if ev is not None:
            events.append(ev)
        if is_return(state, fig, exact):
            returns.append(t)

    if horizon >= 1:
        run(seed, mask, Schedule.constant(k), rule, horizon, observers=[observe], keep="last")
    first_big = next((e for e in events if e.kind == BIG), None)
    predicted = holds = None
    if first_big is not None:
        w = max(2, first_big.grid_width)
        holds = 2 * first_big.tau >= w * first_big.extent
        try:
            predicted = t_big(first_big.extent, w, law, limit=max(horizon, 10_000))
        except ValueError:
            predicted = None
    return PeriodScan(k, rule, horizon, law, returns, events, first_big, predicted, holds)


# density fingerprints


@dataclass(frozen=True)
class FingerprintReport:
    minima: tuple
    phase8: Optional[int]
    regularity8: Optional[float]
    phase16: Optional[int]
    regularity16: Optional[float]


def local_minima(rho: Sequence[float], half_window: int = 4) -> list[int]:
    """Steps whose density is the minimum of a window of ``2*half_window+1`` steps.

    The value must also drop from the previous step, and the whole right
    half of the window must lie inside the trace.
    """
    rho = np.asarray(rho, dtype=float)
    out = []
    for t in range(1, len(rho) - half_window):
        lo = max(0, t - half_window)
        if rho[t] < rho[t - 1] and rho[t] <= rho[lo : t + half_window + 1].min():
            out.append(t)
    return out


def modal_class(times: Sequence[int], modulus: int) -> tuple[Optional[int], Optional[float]]:
    """Most common residue (smallest on ties) and the fraction of times in it."""
    if not times:
        return None, None
    c = Counter(t % modulus for t in times)
    best = max(sorted(c), key=lambda r: c[r])
    return best, c[best] / len(times)


def fingerprint_from_trace(rho: Sequence[float], half_window: int = 4) -> FingerprintReport:
    mins = local_minima(rho, half_window)
    p8, r8 = modal_class(mins, 8)
    p16, r16 = modal_class(mins, 16)
    return FingerprintReport(tuple(mins), p8, r8, p16, r16)


def density_trace(seed, mask, schedule: Schedule, horizon: int, rule: str = LAPLACIAN) -> list[float]:
    rec = MetricsRecorder(modulus_bound(schedule))
    run(seed, mask, schedule, rule, horizon, observers=[rec], keep="last")
    return rec.rho


def density_fingerprint(
    seed, mask, schedule: Schedule, horizon: int = 64, rule: str = LAPLACIAN, half_window: int = 4
) -> FingerprintReport:
    if horizon < 32:
        raise ValueError("horizon must be at least 32")
    return fingerprint_from_trace(density_trace(seed, mask, schedule, horizon, rule), half_window)


def pooled_phase(reports: Sequence[FingerprintReport], modulus: int = 8) -> tuple[Optional[int], Optional[float]]:
    """Modal class over the minima of several runs taken together."""
    times = [t for r in reports for t in r.minima]
    return modal_class(times, modulus)


# entropy fluctuations for composite k

ENTROPY_REFERENCE_TIMES = (8, 16, 27, 32, 54, 64, 81, 128)


@dataclass(frozen=True)
class EntropyReport:
    jump_times: tuple
    score: float


def entropy_fluctuations(seed, mask, k: int = 6, horizon: int = 140, rule: str = LAPLACIAN, top: int = 8) -> EntropyReport:
    """Times of the largest entropy jumps and the fraction near reference times."""
    rec = MetricsRecorder(k)
    run(seed, mask, Schedule.constant(k), rule, horizon, observers=[rec], keep="last")
    H = np.array([r.entropy for r in rec.rows])
    jumps = np.abs(np.diff(H))
    order = np.argsort(-jumps, kind="stable")[:top]
    times = tuple(sorted(int(i) + 1 for i in order))
    near = sum(any(abs(t - r) <= 1 for r in ENTROPY_REFERENCE_TIMES) for t in times)
    return EntropyReport(times, near / len(times) if times else 0.0)


def carpet_matrix(seed_names, mask_names, schedules, rule: str = LAPLACIAN, criteria: CarpetCriteria = CarpetCriteria()):
    """For each seed/mask pair, the schedules whose run classifies as a carpet."""
    out = {}
    for sname in seed_names:
        for mname in mask_names:
            hits = []
            for sched in schedules:
                cell = SweepCell(sname, mname, str(sched), 0, 0)
                if _run_cell((cell, rule, criteria, False)).figure.verdict == CARPET:
                    hits.append(str(sched))
            out[(sname, mname)] = hits
    return out
