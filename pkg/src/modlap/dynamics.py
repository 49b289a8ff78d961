"""The stepping engine.

Three linear rules are supported, all reduced with a floored modulo:

* ``laplacian``: sum over neighbours of ``u(g) - u(p)``
* ``identity-plus-sum``: ``u(p) + sum u(g)`` (the operator ``I + B``)
* ``neighbor-sum``: ``sum u(g)`` (the operator ``B``)

Modulus 2 takes a bit-plane path that packs eight cells per byte and
replaces the neighbour sum by XORs of shifted rows.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .lattice import LatticeState
from .masks import Mask
from .seeds import Seed

LAPLACIAN = "laplacian"
IDENTITY_PLUS_SUM = "identity-plus-sum"
NEIGHBOR_SUM = "neighbor-sum"
RULES = (LAPLACIAN, IDENTITY_PLUS_SUM, NEIGHBOR_SUM)


def check_rule(rule: str) -> str:
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}; expected one of {', '.join(RULES)}")
    return rule


def center_weight(rule: str, degree: int) -> int:
    """Coefficient of ``u(p)`` in the update."""
    if rule == LAPLACIAN:
        return -degree
    if rule == IDENTITY_PLUS_SUM:
        return 1
    return 0


@dataclass(frozen=True)
class Schedule:
    """Eventually periodic modulus sequence: ``prefix`` then ``cycle`` forever."""

    cycle: tuple
    prefix: tuple = ()

    def __post_init__(self):
        cyc = tuple(int(k) for k in self.cycle)
        pre = tuple(int(k) for k in self.prefix)
        if not cyc:
            raise ValueError("schedule cycle must be nonempty")
        if any(k < 2 for k in cyc + pre):
            raise ValueError("moduli must be at least 2")
        object.__setattr__(self, "cycle", cyc)
        object.__setattr__(self, "prefix", pre)

    @classmethod
    def constant(cls, k: int) -> "Schedule":
        return cls((k,))

    @classmethod
    def parse(cls, text: str) -> "Schedule":
        """Parse ``"2*"``, ``"[2,3]*"``, ``"2,3,[2]*"`` or ``"2,[3,2,2]*"``."""
        s = re.sub(r"\s+", "", text)
        m = re.fullmatch(r"(?:((?:\d+,)*)\[(\d+(?:,\d+)*)\]|((?:\d+,)*)(\d+))\*", s)
        if not m:
            raise ValueError(f"bad schedule {text!r}")
        if m.group(2) is not None:
            prefix, cycle = m.group(1), m.group(2)
        else:
            prefix, cycle = m.group(3), m.group(4)
        pre = [int(x) for x in prefix.split(",") if x] if prefix else []
        return cls(tuple(int(x) for x in cycle.split(",")), tuple(pre))

    def modulus_at(self, t: int) -> int:
        if t < len(self.prefix):
            return self.prefix[t]
        return self.cycle[(t - len(self.prefix)) % len(self.cycle)]

    def moduli(self, n: int) -> list[int]:
        return [self.modulus_at(t) for t in range(n)]

    def __str__(self) -> str:
        head = "".join(f"{k}," for k in self.prefix)
        if not self.prefix and len(self.cycle) == 1:
            return f"{self.cycle[0]}*"
        return head + "[" + ",".join(str(k) for k in self.cycle) + "]*"


def modulus_bound(schedule: Schedule) -> int:
    return max(schedule.prefix + schedule.cycle)


def step(state: LatticeState, mask: Mask, k: int, rule: str = LAPLACIAN) -> LatticeState:
    """One update with modulus ``k``; the result is trimmed to its bounding box."""
    if k < 2:
        raise ValueError("modulus must be at least 2")
    check_rule(rule)
    state = state.trimmed()
    if state.is_empty():
        return LatticeState.empty()
    if k == 2:
        plane = BitPlane.from_state(state)
        return plane.step(mask, rule).to_state()
    return _step_generic(state, mask, k, rule)


def _step_generic(state: LatticeState, mask: Mask, k: int, rule: str) -> LatticeState:
    r = mask.radius
    h, w = state.height, state.width
    src = np.pad(state.values.astype(np.int32), 2 * r)
    H, W = h + 2 * r, w + 2 * r
    acc = np.zeros((H, W), dtype=np.int32)
    for dx, dy in mask.offsets:
        acc += src[r + dy : r + dy + H, r + dx : r + dx + W]
    cw = center_weight(rule, mask.degree)
    if cw:
        acc += cw * src[r : r + H, r : r + W]
    out = np.mod(acc, k).astype(np.uint8)
    ox, oy = state.origin
    return LatticeState._wrap(out, (ox - r, oy - r)).trimmed()


def _shift_bits(packed: np.ndarray, s: int, nbytes: int) -> np.ndarray:
    """Columns ``s, s+1, ...`` of little-endian packed rows, repacked from bit 0."""
    q, b = divmod(s, 8)
    need = q + nbytes + 1
    if packed.shape[1] < need:
        packed = np.pad(packed, ((0, 0), (0, need - packed.shape[1])))
    lo = packed[:, q : q + nbytes]
    if b == 0:
        return lo.copy()
    hi = packed[:, q + 1 : q + 1 + nbytes]
    return (lo >> b) | (hi << (8 - b))


class BitPlane:
    """A binary field packed eight cells per byte along x (little bit order)."""

    __slots__ = ("packed", "width", "origin")

    def __init__(self, packed: np.ndarray, width: int, origin):
        self.packed = packed
        self.width = width
        self.origin = origin

    @classmethod
    def from_state(cls, state: LatticeState) -> "BitPlane":
        bits = (state.values & 1).astype(bool)
        return cls(np.packbits(bits, axis=1, bitorder="little"), state.width, state.origin)

    def to_state(self) -> LatticeState:
        bits = np.unpackbits(self.packed, axis=1, count=self.width, bitorder="little")
        return LatticeState._wrap(bits, self.origin)

    @property
    def height(self) -> int:
        return self.packed.shape[0]

    def popcount(self) -> int:
        return int(np.bitwise_count(self.packed).sum())

    def is_empty(self) -> bool:
        return not self.packed.any()

    def step(self, mask: Mask, rule: str) -> "BitPlane":
        r = mask.radius
        h, w = self.height, self.width
        H, W = h + 2 * r, w + 2 * r
        nb = (W + 7) // 8
        # source grid padded by 2r rows; columns padded by 2r on the left via bit shift
        left = 2 * r
        src_bytes = (w + 2 * left + 7) // 8 + 1
        rows = np.zeros((h + 4 * r, src_bytes), dtype=np.uint8)
        rows[2 * r : 2 * r + h] = _place_bits(self.packed, left, src_bytes)
        terms = [(dx, dy) for dx, dy in mask.offsets]
        if center_weight(rule, mask.degree) % 2:
            terms.append((0, 0))
        by_dx: dict[int, list[int]] = {}
        for dx, dy in terms:
            by_dx.setdefault(dx, []).append(dy)
        out = np.zeros((H, nb), dtype=np.uint8)
        for dx, dys in by_dx.items():
            shifted = _shift_bits(rows, r + dx, nb)
            for dy in dys:
                out ^= shifted[r + dy : r + dy + H]
        # clear bits past the logical width
        tail = W % 8
        if tail:
            out[:, -1] &= np.uint8((1 << tail) - 1)
        plane = BitPlane(out, W, (self.origin[0] - r, self.origin[1] - r))
        return plane.trimmed()

    def trimmed(self) -> "BitPlane":
        rows_any = self.packed.any(axis=1)
        if not rows_any.any():
            return BitPlane(np.zeros((0, 0), dtype=np.uint8), 0, (0, 0))
        ridx = np.flatnonzero(rows_any)
        r0, r1 = int(ridx[0]), int(ridx[-1])
        colbits = np.unpackbits(
            np.bitwise_or.reduce(self.packed[r0 : r1 + 1], axis=0), count=self.width, bitorder="little"
        )
        cidx = np.flatnonzero(colbits)
        c0, c1 = int(cidx[0]), int(cidx[-1])
        w = c1 - c0 + 1
        nb = (w + 7) // 8
        packed = _shift_bits(self.packed[r0 : r1 + 1], c0, nb)
        tail = w % 8
        if tail:
            packed[:, -1] &= np.uint8((1 << tail) - 1)
        return BitPlane(packed, w, (self.origin[0] + c0, self.origin[1] + r0))


def _place_bits(packed: np.ndarray, offset: int, nbytes: int) -> np.ndarray:
    """Move packed rows right by ``offset`` bits into ``nbytes`` bytes."""
    q, b = divmod(offset, 8)
    out = np.zeros((packed.shape[0], nbytes), dtype=np.uint8)
    n = packed.shape[1]
    if b == 0:
        out[:, q : q + n] = packed
        return out
    out[:, q : q + n] |= packed << b
    out[:, q + 1 : q + 1 + n] |= packed >> (8 - b)
    return out


Observer = Callable[[int, LatticeState], None]


@dataclass
class Trajectory:
    """States of one run.

    ``kept`` lists the step indices whose states are stored in ``states``;
    ``traj[t]`` looks a state up by step index.
    """

    seed: Seed
    mask: Mask
    schedule: Schedule
    rule: str
    t_max: int
    states: list = field(default_factory=list)
    kept: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.states)

    def __getitem__(self, t: int) -> LatticeState:
        if t < 0:
            t += self.t_max + 1
        try:
            return self.states[self.kept.index(t)]
        except ValueError:
            raise IndexError(f"step {t} was not kept") from None

    @property
    def final(self) -> LatticeState:
        return self.states[-1]

    @property
    def moduli(self) -> list[int]:
        return self.schedule.moduli(self.t_max)

    def items(self):
        return zip(self.kept, self.states)


def run(
    seed: Seed | LatticeState,
    mask: Mask,
    schedule: Schedule,
    rule: str = LAPLACIAN,
    t_max: int = 0,
    observers: Iterable[Observer] = (),
    keep: str = "all",
) -> Trajectory:
    """Iterate ``t_max`` steps, using ``schedule.modulus_at(t)`` at step ``t``.

    Observers are called as ``observer(t, state)`` for ``t = 0`` (the seed)
    and after each step.  ``keep`` is ``"all"`` or ``"last"``.  Runs of
    modulus-2 steps stay bit-packed between steps unless a state is needed.
    """
    if t_max < 0:
        raise ValueError("t_max must be non-negative")
    if keep not in ("all", "last"):
        raise ValueError("keep must be 'all' or 'last'")
    check_rule(rule)
    if not isinstance(seed, Seed):
        seed = Seed(seed)
    observers = list(observers)
    traj = Trajectory(seed, mask, schedule, rule, t_max)
    state, plane = seed.figure, None
    for obs in observers:
        obs(0, state)
    if keep == "all":
        traj.states.append(state)
        traj.kept.append(0)
    for t in range(t_max):
        k = schedule.modulus_at(t)
        if k == 2:
            if plane is None:
                plane = BitPlane.from_state(state)
            plane = plane.step(mask, rule)
            state = None
            if observers or keep == "all":
                state = plane.to_state()
        else:
            if state is None:
                state = plane.to_state()
            plane = None
            state = step(state, mask, k, rule)
        for obs in observers:
            obs(t + 1, state)
        if keep == "all":
            traj.states.append(state)
            traj.kept.append(t + 1)
    if keep == "last":
        traj.states.append(plane.to_state() if state is None else state)
        traj.kept.append(t_max)
    return traj
