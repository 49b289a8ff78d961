"""Rug / quasi-carpet / carpet classification of trajectories."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import figure_symmetry
from .lattice import LatticeState, bounding_box
from .symmetry import ASYMMETRIC, DOUBLE, SINGLE, SymmetrySignature

CARPET = "carpet"
QUASI_CARPET = "quasi-carpet"
RUG_CHAOTIC = "rug-chaotic"
RUG_DISAPPEARING = "rug-disappearing"
RUG_SOLID = "rug-solid"
VERDICTS = (CARPET, QUASI_CARPET, RUG_CHAOTIC, RUG_DISAPPEARING, RUG_SOLID)


class HorizonNotReached(ValueError):
    pass


@dataclass(frozen=True)
class CarpetCriteria:
    min_density: float = 0.056
    max_stripe_fraction: float = 0.10
    max_hole_fraction: float = 0.10
    horizon: int = 80

    def __post_init__(self):
        for name in ("min_density", "max_stripe_fraction", "max_hole_fraction"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")


@dataclass(frozen=True)
class AuditRecord:
    """Empty stripes and central hole, in cells and as fractions of a reference size."""

    stripe_rows: int
    stripe_cols: int
    hole_side: int
    horizontal_stripe: float
    vertical_stripe: float
    hole: float
    threshold: float

    @property
    def stripe(self) -> float:
        return max(self.horizontal_stripe, self.vertical_stripe)

    @property
    def passed(self) -> bool:
        return self.stripe <= self.threshold and self.hole <= self.threshold


def _longest_run(flags: np.ndarray) -> int:
    if not flags.any():
        return 0
    padded = np.r_[False, flags, False].astype(np.int8)
    d = np.diff(padded)
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    return int((ends - starts).max())


def central_hole_side(box_values: np.ndarray) -> int:
    """Side of the largest all-zero square whose center lies in the middle half of the box."""
    H, W = box_values.shape
    filled = (box_values != 0).astype(np.int64)
    S = np.zeros((H + 1, W + 1), dtype=np.int64)
    S[1:, 1:] = filled.cumsum(0).cumsum(1)

    def fits(a: int) -> bool:
        sums = S[a:, a:] - S[:-a, a:] - S[a:, :-a] + S[:-a, :-a]
        # top-left r with center r + a/2 in [H/4, 3H/4]
        r0 = max(0, int(np.ceil(H / 4 - a / 2)))
        r1 = min(H - a, int(np.floor(3 * H / 4 - a / 2)))
        c0 = max(0, int(np.ceil(W / 4 - a / 2)))
        c1 = min(W - a, int(np.floor(3 * W / 4 - a / 2)))
        if r0 > r1 or c0 > c1:
            return False
        return bool((sums[r0 : r1 + 1, c0 : c1 + 1] == 0).any())

    lo, hi = 0, min(H, W)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if fits(mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


def raw_audit(state: LatticeState) -> tuple[int, int, int, int, int]:
    """(stripe rows, stripe cols, hole side, box height, box width) in cells."""
    box = bounding_box(state)
    if box is None:
        return 0, 0, 0, 0, 0
    vals = state.window(box)
    rows = _longest_run(~vals.any(axis=1))
    cols = _longest_run(~vals.any(axis=0))
    return rows, cols, central_hole_side(vals), box.height, box.width


def stripe_and_hole_audit(
    state: LatticeState, fraction: float = 0.10, lattice: Optional[tuple[int, int]] = None
) -> AuditRecord:
    """Widest empty bands and central hole inside the bounding box.

    Fractions are relative to the box itself unless ``lattice`` gives a
    reference ``(height, width)``.
    """
    if state.is_empty():
        raise ValueError("audit of an empty state")
    rows, cols, hole, h, w = raw_audit(state)
    ref_h, ref_w = lattice if lattice is not None else (h, w)
    return AuditRecord(rows, cols, hole, rows / ref_h, cols / ref_w, hole / min(ref_h, ref_w), fraction)


@dataclass(frozen=True)
class FigureClass:
    verdict: str
    min_rho: float
    min_rho_t: int
    worst_stripe: float
    worst_hole: float
    sym_persisted: bool
    sym_record: tuple
    vanish_times: tuple
    seed_scale_times: tuple
    lattice: tuple = ()

    @property
    def is_carpet(self) -> bool:
        return self.verdict == CARPET

    def csv_fields(self) -> list[str]:
        return [
            self.verdict,
            format(self.min_rho, ".9g"),
            format(self.worst_stripe, ".9g"),
            format(self.worst_hole, ".9g"),
            "true" if self.sym_persisted else "false",
        ]


@dataclass
class StepEvidence:
    """Per-step raw measurements, independent of the criteria thresholds."""

    rho: list = field(default_factory=list)
    support: list = field(default_factory=list)
    sym: list = field(default_factory=list)
    audit: list = field(default_factory=list)

    def observe(self, t: int, state: LatticeState) -> None:
        box = bounding_box(state)
        if box is None:
            self.rho.append(0.0)
            self.support.append(0)
            self.sym.append(None)
            self.audit.append((0, 0, 0, 0, 0))
            return
        vals = state.window(box)
        n = int(np.count_nonzero(vals))
        self.rho.append(n / vals.size)
        self.support.append(n)
        self.sym.append(figure_symmetry(state))
        self.audit.append(raw_audit(state))

    __call__ = observe


def evidence_of(trajectory, horizon: int) -> StepEvidence:
    ev = StepEvidence()
    for t in range(horizon + 1):
        ev.observe(t, trajectory[t])
    return ev


def _periodic_times(times: list[int]) -> bool:
    if len(times) < 2:
        return False
    gaps = np.diff(times)
    stride = int(gaps.min())
    return stride > 0 and bool((gaps % stride == 0).all())


def verdict_from_evidence(ev: StepEvidence, criteria: CarpetCriteria) -> FigureClass:
    """Apply the class definitions to measurements over ``t = 0..horizon``.

    Stripe and hole widths are measured inside each step's bounding box and
    expressed as fractions of the box at the horizon, the canvas the
    pattern has grown into.  When the horizon state is empty each step uses
    its own box.
    """
    T = criteria.horizon
    if len(ev.rho) < T + 1:
        raise HorizonNotReached(f"need {T + 1} steps of evidence, got {len(ev.rho)}")
    rho = ev.rho[: T + 1]
    sym = ev.sym[: T + 1]
    audit = ev.audit[: T + 1]
    final_h, final_w = audit[T][3], audit[T][4]
    worst_stripe = 0.0
    worst_hole = 0.0
    for rows, cols, hole, h, w in audit:
        if h == 0:
            continue
        ref_h, ref_w = (final_h, final_w) if final_h else (h, w)
        worst_stripe = max(worst_stripe, rows / ref_h, cols / ref_w)
        worst_hole = max(worst_hole, hole / min(ref_h, ref_w))
    min_t = int(np.argmin(rho))
    min_rho = float(rho[min_t])
    classes = tuple("empty" if s is None else s.klass for s in sym)
    sym_persisted = all(c == DOUBLE for c in classes)
    vanish = tuple(t for t, r in enumerate(rho) if r == 0)
    seed_n = ev.support[0]
    seed_scale = tuple(t for t in range(1, T + 1) if 0 < ev.support[t] <= 2 * seed_n)
    ok = (
        min_rho >= criteria.min_density
        and worst_stripe <= criteria.max_stripe_fraction
        and worst_hole <= criteria.max_hole_fraction
    )
    if sym_persisted:
        verdict = CARPET if ok else QUASI_CARPET
    elif vanish or _periodic_times(list(seed_scale)):
        verdict = RUG_DISAPPEARING
    elif all(c in (SINGLE, DOUBLE) for c in classes):
        verdict = RUG_SOLID
    else:
        verdict = RUG_CHAOTIC
    return FigureClass(
        verdict, min_rho, min_t, worst_stripe, worst_hole, sym_persisted, classes,
        vanish, seed_scale, (final_h, final_w),
    )


def classify(trajectory, criteria: CarpetCriteria = CarpetCriteria()) -> FigureClass:
    if trajectory.t_max < criteria.horizon:
        raise HorizonNotReached(f"trajectory has {trajectory.t_max} steps, need {criteria.horizon}")
    return verdict_from_evidence(evidence_of(trajectory, criteria.horizon), criteria)


# expected outcome from seed and mask symmetry
CARPET_POSSIBLE = "carpet-possible"
SINGLE_AXIS_SURVIVES = "single-axis-survives"
SINGLE_AXIS_PERSISTS = "single-axis-persists"
SINGLE_AXIS_IF_CONCORDANT = "single-axis-persists-if-concordant"
CHAOTIC = "chaotic-no-carpet"
SINGLE_AXIS_MAY_APPEAR = "single-axis-may-appear"
ONE_AXIS_POSSIBLE = "one-axis-reflection-possible"
FULLY_CHAOTIC = "fully-chaotic"

_TABLE = {
    (DOUBLE, DOUBLE): CARPET_POSSIBLE,
    (DOUBLE, SINGLE): SINGLE_AXIS_SURVIVES,
    (DOUBLE, ASYMMETRIC): CHAOTIC,
    (SINGLE, DOUBLE): SINGLE_AXIS_PERSISTS,
    (SINGLE, SINGLE): SINGLE_AXIS_IF_CONCORDANT,
    (SINGLE, ASYMMETRIC): CHAOTIC,
    (ASYMMETRIC, DOUBLE): SINGLE_AXIS_MAY_APPEAR,
    (ASYMMETRIC, SINGLE): ONE_AXIS_POSSIBLE,
    (ASYMMETRIC, ASYMMETRIC): FULLY_CHAOTIC,
}


def predict_class(seed_sym: SymmetrySignature, mask_sym: SymmetrySignature) -> str:
    return _TABLE[(seed_sym.klass, mask_sym.klass)]
