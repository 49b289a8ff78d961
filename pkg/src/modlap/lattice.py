"""Lattice states: residues on a finite window of the infinite square lattice.

A state stores a dense ``uint8`` array indexed ``values[y - oy, x - ox]``
where ``(ox, oy)`` is the window origin (its minimum corner).  Everything
outside the window is zero.  Text formats print the largest ``y`` first so
that pictures read with "up" at the top.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

Coord = tuple[int, int]

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class BoundingBox:
    min_x: int
    min_y: int
    max_x: int
    max_y: int

    @property
    def width(self) -> int:
        return self.max_x - self.min_x + 1

    @property
    def height(self) -> int:
        return self.max_y - self.min_y + 1

    @property
    def area(self) -> int:
        return self.width * self.height

    def contains(self, p: Coord) -> bool:
        return self.min_x <= p[0] <= self.max_x and self.min_y <= p[1] <= self.max_y

    def disjoint(self, other: "BoundingBox") -> bool:
        return (
            self.max_x < other.min_x
            or other.max_x < self.min_x
            or self.max_y < other.min_y
            or other.max_y < self.min_y
        )

    def shifted(self, dx: int, dy: int) -> "BoundingBox":
        return BoundingBox(self.min_x + dx, self.min_y + dy, self.max_x + dx, self.max_y + dy)


class LatticeState:
    """Immutable residue field with finite support.

    Equality compares the fields on the whole lattice, so zero padding of
    the window is not observable.
    """

    __slots__ = ("_values", "_origin")

    def __init__(self, values, origin: Coord = (0, 0)):
        arr = np.array(values, dtype=np.uint8, copy=True)
        if arr.ndim != 2:
            raise ValueError("values must be a 2D array")
        arr.flags.writeable = False
        self._values = arr
        self._origin = (int(origin[0]), int(origin[1]))

    @classmethod
    def _wrap(cls, arr: np.ndarray, origin: Coord) -> "LatticeState":
        # trusted constructor: takes ownership of a uint8 array without copying
        obj = cls.__new__(cls)
        arr.flags.writeable = False
        obj._values = arr
        obj._origin = (int(origin[0]), int(origin[1]))
        return obj

    @classmethod
    def empty(cls) -> "LatticeState":
        return cls._wrap(np.zeros((0, 0), dtype=np.uint8), (0, 0))

    @classmethod
    def from_cells(cls, cells: dict[Coord, int] | Iterable[Coord]) -> "LatticeState":
        """Build a state from ``{(x, y): residue}`` or from a set of cells set to 1."""
        if not isinstance(cells, dict):
            cells = {tuple(p): 1 for p in cells}
        cells = {p: v for p, v in cells.items() if v}
        if not cells:
            return cls.empty()
        xs = [p[0] for p in cells]
        ys = [p[1] for p in cells]
        ox, oy = min(xs), min(ys)
        arr = np.zeros((max(ys) - oy + 1, max(xs) - ox + 1), dtype=np.uint8)
        for (x, y), v in cells.items():
            if not 0 <= v < 256:
                raise ValueError(f"residue {v} out of range")
            arr[y - oy, x - ox] = v
        return cls._wrap(arr, (ox, oy))

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def origin(self) -> Coord:
        return self._origin

    @property
    def width(self) -> int:
        return self._values.shape[1]

    @property
    def height(self) -> int:
        return self._values.shape[0]

    @property
    def modulus_bound(self) -> int:
        """Smallest integer strictly greater than every stored value."""
        if self._values.size == 0:
            return 1
        return int(self._values.max()) + 1

    def is_empty(self) -> bool:
        return not self._values.any()

    def value_at(self, p: Coord) -> int:
        r, c = p[1] - self._origin[1], p[0] - self._origin[0]
        if 0 <= r < self.height and 0 <= c < self.width:
            return int(self._values[r, c])
        return 0

    def trimmed(self) -> "LatticeState":
        """Return the same field on its tight bounding box."""
        box = bounding_box(self)
        if box is None:
            return LatticeState.empty()
        ox, oy = self._origin
        if (box.min_x, box.min_y) == (ox, oy) and (box.width, box.height) == self._values.shape[::-1]:
            return self
        sub = self._values[box.min_y - oy : box.max_y - oy + 1, box.min_x - ox : box.max_x - ox + 1]
        return LatticeState._wrap(sub.copy(), (box.min_x, box.min_y))

    def padded(self, n: int) -> "LatticeState":
        arr = np.pad(self._values, n)
        return LatticeState._wrap(arr, (self._origin[0] - n, self._origin[1] - n))

    def translated(self, dx: int, dy: int) -> "LatticeState":
        return LatticeState._wrap(self._values.copy(), (self._origin[0] + dx, self._origin[1] + dy))

    def window(self, box: BoundingBox) -> np.ndarray:
        """Values on ``box`` as a fresh array, zero outside the stored window."""
        out = np.zeros((box.height, box.width), dtype=np.uint8)
        ox, oy = self._origin
        x0, x1 = max(box.min_x, ox), min(box.max_x, ox + self.width - 1)
        y0, y1 = max(box.min_y, oy), min(box.max_y, oy + self.height - 1)
        if x0 <= x1 and y0 <= y1:
            out[y0 - box.min_y : y1 - box.min_y + 1, x0 - box.min_x : x1 - box.min_x + 1] = (
                self._values[y0 - oy : y1 - oy + 1, x0 - ox : x1 - ox + 1]
            )
        return out

    def cells(self) -> dict[Coord, int]:
        ys, xs = np.nonzero(self._values)
        ox, oy = self._origin
        return {
            (int(x) + ox, int(y) + oy): int(self._values[y, x]) for y, x in zip(ys, xs)
        }

    def __eq__(self, other) -> bool:
        if not isinstance(other, LatticeState):
            return NotImplemented
        a, b = self.trimmed(), other.trimmed()
        return a._origin == b._origin and np.array_equal(a._values, b._values)

    __hash__ = None

    def __repr__(self) -> str:
        box = bounding_box(self)
        return f"LatticeState(box={box}, support={int(np.count_nonzero(self._values))})"


def support(state: LatticeState) -> set[Coord]:
    """The set of nonzero cells."""
    return set(state.cells())


def bounding_box(state: LatticeState) -> BoundingBox | None:
    vals = state.values
    if vals.size == 0:
        return None
    rows = np.flatnonzero(vals.any(axis=1))
    if rows.size == 0:
        return None
    cols = np.flatnonzero(vals.any(axis=0))
    ox, oy = state.origin
    return BoundingBox(
        int(cols[0]) + ox, int(rows[0]) + oy, int(cols[-1]) + ox, int(rows[-1]) + oy
    )


def translate_equal(a: LatticeState, b: LatticeState, shift: Coord) -> bool:
    """True iff ``b`` equals ``a`` translated by ``shift``."""
    return a.translated(shift[0], shift[1]) == b


def add_mod(a: LatticeState, b: LatticeState, k: int) -> LatticeState:
    """Cell-wise sum of two states modulo ``k``."""
    if a.is_empty():
        return LatticeState._wrap(np.mod(b.values, k).astype(np.uint8), b.origin).trimmed()
    if b.is_empty():
        return LatticeState._wrap(np.mod(a.values, k).astype(np.uint8), a.origin).trimmed()
    ba, bb = bounding_box(a), bounding_box(b)
    box = BoundingBox(
        min(ba.min_x, bb.min_x), min(ba.min_y, bb.min_y),
        max(ba.max_x, bb.max_x), max(ba.max_y, bb.max_y),
    )
    total = a.window(box).astype(np.int32) + b.window(box)
    return LatticeState._wrap(np.mod(total, k).astype(np.uint8), (box.min_x, box.min_y)).trimmed()


def parse_figure(text: str) -> LatticeState:
    """Parse the figure text format.

    ``'.'`` is 0, ``'1'``-``'9'`` and ``'a'``-``'z'`` are residues 1 to 35.
    Lines starting with ``#`` are comments; a comment ``# origin: x y``
    places the bottom-left cell at ``(x, y)``.
    """
    origin = None
    rows = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("origin:"):
                parts = body[len("origin:"):].split()
                origin = (int(parts[0]), int(parts[1]))
            continue
        rows.append(line)
    if not rows:
        return LatticeState.empty()
    width = max(len(r) for r in rows)
    arr = np.zeros((len(rows), width), dtype=np.uint8)
    for i, row in enumerate(reversed(rows)):
        for j, ch in enumerate(row):
            if ch == ".":
                continue
            v = _DIGITS.find(ch.lower())
            if v <= 0:
                raise ValueError(f"bad figure character {ch!r}")
            arr[i, j] = v
    if origin is None:
        origin = (-(width // 2), -(len(rows) // 2))
    return LatticeState._wrap(arr, origin)


def format_figure(state: LatticeState, with_origin: bool = True) -> str:
    """Inverse of :func:`parse_figure` on the tight bounding box."""
    st = state.trimmed()
    if st.is_empty():
        return "# empty\n"
    if int(st.values.max()) >= len(_DIGITS):
        raise ValueError("residue too large for the figure format")
    lines = []
    if with_origin:
        lines.append(f"# origin: {st.origin[0]} {st.origin[1]}")
    for row in st.values[::-1]:
        lines.append("".join("." if v == 0 else _DIGITS[v] for v in row))
    return "\n".join(lines) + "\n"
