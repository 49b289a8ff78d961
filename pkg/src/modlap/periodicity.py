"""Seed returns, replication events and predicted replication laws."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Optional, Sequence

import numpy as np

from .lattice import BoundingBox, LatticeState, bounding_box

Coord = tuple[int, int]

SMALL = "small"
BIG = "big"


@dataclass(frozen=True)
class ReplicationEvent:
    """``G`` is the union of copies ``F + T`` for ``T`` in ``shifts``.

    ``shifts`` lists every copy, the untranslated one included as ``(0, 0)``
    when present, so ``s == len(shifts)``.
    """

    tau: Optional[int]
    shifts: tuple
    kind: str
    shifted_by: int = 0
    exact: bool = True
    extent: int = 1

    @property
    def s(self) -> int:
        return len(self.shifts)

    @property
    def identity(self) -> bool:
        return (0, 0) in self.shifts

    @property
    def translated(self) -> tuple:
        return tuple(t for t in self.shifts if t != (0, 0))

    @property
    def grid_width(self) -> int:
        """Largest number of copies sharing one row or one column of the copy grid."""
        rows: dict[int, int] = {}
        cols: dict[int, int] = {}
        for dx, dy in self.shifts:
            rows[dy] = rows.get(dy, 0) + 1
            cols[dx] = cols.get(dx, 0) + 1
        return max(max(rows.values()), max(cols.values()))

    def log_line(self) -> str:
        shifts = ",".join(f"({dx},{dy})" for dx, dy in self.shifts)
        return (
            f"t={self.tau} kind={self.kind} s={self.s} shifts=[{shifts}] "
            f"exact={'true' if self.exact else 'false'}"
        )


def rectangles_disjoint(shifts: Sequence[Coord], width: int, height: int) -> bool:
    """True iff the equal-sized rectangles placed at ``shifts`` are pairwise disjoint."""
    bins: dict[tuple, list] = {}
    for sx, sy in shifts:
        bins.setdefault((sx // width, sy // height), []).append((sx, sy))
    for (bx, by), members in bins.items():
        for nx in (bx - 1, bx, bx + 1):
            for ny in (by - 1, by, by + 1):
                for a in members:
                    for b in bins.get((nx, ny), ()):
                        if a != b and abs(a[0] - b[0]) < width and abs(a[1] - b[1]) < height:
                            return False
    return True


def _placements(F: LatticeState, G: LatticeState, exact: bool):
    """Top-left offsets (rows, cols) in G's array of every valid copy of F."""
    fv = F.values if exact else (F.values != 0).astype(np.uint8)
    gv = G.values if exact else (G.values != 0).astype(np.uint8)
    fy, fx = np.nonzero(fv)
    vals = fv[fy, fx]
    fh, fw = fv.shape
    gh, gw = gv.shape
    # anchor: first cell of F in row-major order
    ay, ax, av = fy[0], fx[0], vals[0]
    cy, cx = np.nonzero(gv[ay : gh - fh + 1 + ay, ax : gw - fw + 1 + ax] == av)
    for y, x, v in zip(fy[1:], fx[1:], vals[1:]):
        if cy.size == 0:
            break
        keep = gv[cy + y, cx + x] == v
        cy, cx = cy[keep], cx[keep]
    return cy, cx, fy, fx


def detect_replication(
    F: LatticeState,
    G: LatticeState,
    *,
    exact: bool = True,
    tau: Optional[int] = None,
    shifted_by: int = 0,
    min_copies: int = 2,
) -> Optional[ReplicationEvent]:
    """Decompose ``G`` into translated copies of ``F``.

    Copies may overlap but must agree with ``G`` wherever they land; their
    union must be exactly the support of ``G``.  Redundant copies are dropped
    greedily in row-major order.  Returns ``None`` when no decomposition
    exists or it has fewer than ``min_copies`` copies.
    """
    F, G = F.trimmed(), G.trimmed()
    if F.is_empty():
        raise ValueError("F must be nonempty")
    if G.is_empty() or G.height < F.height or G.width < F.width:
        return None
    cy, cx, fy, fx = _placements(F, G, exact)
    if cy.size == 0:
        return None
    cover = np.zeros(G.values.shape, dtype=np.int32)
    for y, x in zip(fy, fx):
        cover[cy + y, cx + x] += 1
    if not np.array_equal(cover > 0, G.values != 0):
        return None
    if cover.max() > 1:
        chosen = _greedy_cover(cy, cx, fy, fx, cover.shape)
        cy, cx = cy[chosen], cx[chosen]
    if cy.size < min_copies:
        return None
    gx0, gy0 = G.origin
    fx0, fy0 = F.origin
    shifts = sorted(
        (int(x) + gx0 - fx0, int(y) + gy0 - fy0) for y, x in zip(cy, cx)
    )
    kind = BIG if rectangles_disjoint(shifts, F.width, F.height) else SMALL
    return ReplicationEvent(
        tau, tuple(shifts), kind, shifted_by, exact, max(F.width, F.height)
    )


def _greedy_cover(cy, cx, fy, fx, shape) -> np.ndarray:
    order = np.lexsort((cx, cy))
    covered = np.zeros(shape, dtype=bool)
    keep = []
    for i in order:
        rows, cols = cy[i] + fy, cx[i] + fx
        if not covered[rows, cols].all():
            covered[rows, cols] = True
            keep.append(i)
    counts = np.zeros(shape, dtype=np.int32)
    for i in keep:
        counts[cy[i] + fy, cx[i] + fx] += 1
    final = []
    for i in reversed(keep):
        rows, cols = cy[i] + fy, cx[i] + fx
        if (counts[rows, cols] > 1).all():
            counts[rows, cols] -= 1
        else:
            final.append(i)
    return np.array(sorted(final), dtype=np.intp)


def reconstruct(F: LatticeState, shifts: Iterable[Coord]) -> LatticeState:
    """Union of translated copies of ``F`` (later copies win on overlap)."""
    cells: dict = {}
    fcells = F.cells()
    for sx, sy in shifts:
        for (x, y), v in fcells.items():
            cells[(x + sx, y + sy)] = v
    return LatticeState.from_cells(cells)


def seed_window_matches(state: LatticeState, seed: LatticeState, exact: bool = True) -> bool:
    seed = seed.trimmed()
    box = bounding_box(seed)
    win = state.window(box)
    ref = seed.values
    if exact:
        return np.array_equal(win, ref)
    return np.array_equal(win != 0, ref != 0)


def is_return(state: LatticeState, seed: LatticeState, exact: bool = True) -> bool:
    """Seed visible in its own window and the whole state made of seed copies."""
    if not seed_window_matches(state, seed, exact):
        return False
    if state == seed:
        return True
    return detect_replication(seed, state, exact=exact) is not None


def detect_return(trajectory, seed=None, exact: bool = True) -> list[int]:
    """Steps ``t >= 1`` at which the seed returns in its central window."""
    if seed is None:
        seed = trajectory.seed
    fig = getattr(seed, "figure", seed)
    return [t for t, st in trajectory.items() if t >= 1 and is_return(st, fig, exact)]


def scan_shifted_periods(trajectory, t0_values, tau_values, exact: bool = True) -> list[ReplicationEvent]:
    """Replication of the state at ``t0`` inside the state at ``t0 + tau``."""
    events = []
    for t0 in t0_values:
        F = trajectory[t0]
        if F.is_empty():
            continue
        for tau in tau_values:
            if t0 + tau > trajectory.t_max:
                continue
            ev = detect_replication(F, trajectory[t0 + tau], exact=exact, tau=tau, shifted_by=t0)
            if ev is not None:
                events.append(ev)
    events.sort(key=lambda e: (e.tau, e.shifted_by, e.shifts))
    return events


# predicted laws


@dataclass(frozen=True)
class PredictedLaw:
    """Predicted replication times for constant modulus ``k``.

    ``kind`` is ``multiples`` (of ``base``), ``binary`` (powers of two and
    multiples of 8) or ``intersection`` of component laws.
    """

    k: int
    kind: str
    description: str
    provenance: str
    base: int = 0
    parts: tuple = ()
    horizon: int = 200

    def contains(self, t: int) -> bool:
        if t <= 0:
            return False
        if self.kind == "multiples":
            return t % self.base == 0
        if self.kind == "binary":
            return (t & (t - 1)) == 0 or t % 8 == 0
        return all(p.contains(t) for p in self.parts)

    __contains__ = contains

    @property
    def times(self) -> tuple:
        return tuple(t for t in range(1, self.horizon + 1) if self.contains(t))

    def first_at_least(self, x: float, limit: int | None = None) -> int:
        limit = self.horizon if limit is None else limit
        start = max(1, int(np.ceil(x)))
        for t in range(start, limit + 1):
            if self.contains(t):
                return t
        raise LawError("empty-law-within-horizon")


class LawError(ValueError):
    pass


def _prime_factors(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and _prime_factors(n) == {n: 1}


# observed constants where they differ from the generic m*p^2 rule
_PRIME_POWER_BASES = {(3, 1): 27, (3, 2): 81, (5, 1): 25, (7, 1): 49}


def _prime_power_law(p: int, a: int, horizon: int) -> PredictedLaw:
    k = p**a
    if p == 2:
        return PredictedLaw(
            k, "binary", "powers of two and multiples of 8",
            "binary scale law, shared by powers of two", horizon=horizon,
        )
    base = _PRIME_POWER_BASES.get((p, a), k * k if a == 1 else p ** (a + 2))
    return PredictedLaw(
        k, "multiples", f"multiples of {base}",
        "tabulated constant" if (p, a) in _PRIME_POWER_BASES else "m*p^2 rule",
        base=base, horizon=horizon,
    )


def predict_times(k: int, horizon: int = 200) -> PredictedLaw:
    if not 2 <= k <= 16:
        raise LawError(f"unsupported-k: {k}")
    factors = _prime_factors(k)
    if len(factors) == 1:
        (p, a), = factors.items()
        return _prime_power_law(p, a, horizon)
    parts = tuple(_prime_power_law(p, a, horizon) for p, a in sorted(factors.items()))
    desc = " and ".join(f"({part.description})" for part in parts)
    return PredictedLaw(
        k, "intersection", desc, "intersection of the prime-power component laws",
        parts=parts, horizon=horizon,
    )


def t_big(extent: int, copies: int, law: PredictedLaw, limit: int | None = None) -> int:
    """Smallest law time ``t`` with ``2t >= copies * extent``."""
    if extent < 1 or copies < 2:
        raise ValueError("need extent >= 1 and copies >= 2")
    return law.first_at_least(copies * extent / 2, limit)


def lucas_multinomial_odd(t: int, parts: Sequence[int], p: int) -> bool:
    """Whether the multinomial coefficient ``t! / prod(parts!)`` is nonzero mod ``p``.

    Lucas: it is nonzero iff adding the parts in base ``p`` has no carries.
    """
    if not is_prime(p):
        raise ValueError(f"non-prime-p: {p}")
    if sum(parts) != t or any(n < 0 for n in parts):
        raise ValueError("parts must be non-negative and sum to t")
    parts = list(parts)
    while t:
        digit_sum = sum(n % p for n in parts)
        if digit_sum != t % p:
            return False
        t //= p
        parts = [n // p for n in parts]
    return True
