"""Reflection symmetry of finite point sets and residue figures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

Coord = tuple[int, int]

DOUBLE = "double-symmetric"
SINGLE = "single-axis"
ASYMMETRIC = "asymmetric"


@dataclass(frozen=True)
class SymmetrySignature:
    """Invariance flags for the four reflections about the box center.

    ``horizontal`` is the mirror in a horizontal axis (y flips), ``vertical``
    the mirror in a vertical axis (x flips); the diagonals are ``y = x`` and
    ``y = -x`` through the center.
    """

    horizontal: bool
    vertical: bool
    main_diagonal: bool
    anti_diagonal: bool

    @property
    def klass(self) -> str:
        flags = (self.horizontal, self.vertical, self.main_diagonal, self.anti_diagonal)
        if all(flags):
            return DOUBLE
        if not any(flags):
            return ASYMMETRIC
        return SINGLE

    @property
    def axis_count(self) -> int:
        return sum((self.horizontal, self.vertical, self.main_diagonal, self.anti_diagonal))


def _reflections(min_x, min_y, max_x, max_y):
    # doubled coordinates keep half-integer centers exact
    sx, sy = min_x + max_x, min_y + max_y
    return {
        "horizontal": lambda x, y: (x, sy - y),
        "vertical": lambda x, y: (sx - x, y),
        # x - cx = y - cy  ->  (x, y) -> (y + (sx - sy)/2, x - (sx - sy)/2)
        "main_diagonal": lambda x, y: (y + (sx - sy) // 2, x - (sx - sy) // 2),
        "anti_diagonal": lambda x, y: ((sx + sy) // 2 - y, (sx + sy) // 2 - x),
    }


def signature_of(cells: Mapping[Coord, int] | Iterable[Coord]) -> SymmetrySignature:
    """Reflection flags of a support set or a ``{cell: residue}`` mapping."""
    if not isinstance(cells, Mapping):
        cells = {tuple(p): 1 for p in cells}
    if not cells:
        return SymmetrySignature(True, True, True, True)
    xs = [p[0] for p in cells]
    ys = [p[1] for p in cells]
    min_x, max_x, min_y, max_y = min(xs), max(xs), min(ys), max(ys)
    square = (max_x - min_x) == (max_y - min_y)
    flags = {}
    for name, f in _reflections(min_x, min_y, max_x, max_y).items():
        if name.endswith("diagonal") and not square:
            flags[name] = False
            continue
        flags[name] = all(cells.get(f(x, y), 0) == v for (x, y), v in cells.items())
    return SymmetrySignature(**flags)


def dihedral_closure(points: Iterable[Coord]) -> set[Coord]:
    """Close a set of offsets under the eight symmetries of the square about the origin."""
    out = set()
    for x, y in points:
        for a, b in ((x, y), (y, x)):
            for sa in (1, -1):
                for sb in (1, -1):
                    out.add((sa * a, sb * b))
    return out
