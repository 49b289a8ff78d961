"""Neighbourhood masks: the support of the convolution operator B.

Mask files are character grids with ``o`` on the origin cell, ``X`` on
each neighbour offset and ``.`` elsewhere.  The top line is the largest
``y``.  Rows may also be separated by ``/`` on a single line.  ``@``
marks an origin that is also listed as a neighbour and is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .symmetry import SymmetrySignature, dihedral_closure, signature_of

Coord = tuple[int, int]

BUILTIN_MASKS = (
    "von-neumann",
    "diag-neumann",
    "moore",
    "hexagonal",
    "tannenbaum",
    "kite",
    "rocket",
    "roof",
    "l-shaped",
)


class MaskError(ValueError):
    pass


@dataclass(frozen=True)
class Mask:
    offsets: frozenset
    name: str = "custom"

    def __post_init__(self):
        offs = frozenset((int(x), int(y)) for x, y in self.offsets)
        if not offs:
            raise MaskError("empty-mask")
        if (0, 0) in offs:
            raise MaskError("origin-marked-as-neighbor")
        object.__setattr__(self, "offsets", offs)

    @property
    def radius(self) -> int:
        return max(max(abs(x), abs(y)) for x, y in self.offsets)

    @property
    def degree(self) -> int:
        return len(self.offsets)

    def sorted_offsets(self) -> list[Coord]:
        # row-major from the top, matching the file layout
        return sorted(self.offsets, key=lambda p: (-p[1], p[0]))

    @property
    def symmetry(self) -> SymmetrySignature:
        return symmetry(self.offsets)


def symmetry(offsets) -> SymmetrySignature:
    """Reflection signature of an offset or support set about its own center."""
    return signature_of(set(offsets))


def symmetrize(offsets) -> set[Coord]:
    return dihedral_closure(offsets)


def load_mask(text: str, name: str = "custom") -> Mask:
    lines = []
    for raw in text.replace("/", "\n").splitlines():
        line = raw.strip().replace(" ", "")
        if line and not line.startswith("#"):
            lines.append(line)
    origin = None
    marks = []
    for r, line in enumerate(lines):
        for c, ch in enumerate(line):
            if ch in "oO":
                if origin is not None:
                    raise MaskError("multiple-origins")
                origin = (r, c)
            elif ch == "X":
                marks.append((r, c))
            elif ch == "@":
                raise MaskError("origin-marked-as-neighbor")
            elif ch != ".":
                raise MaskError(f"bad mask character {ch!r}")
    if origin is None:
        raise MaskError("no-origin")
    if not marks:
        raise MaskError("empty-mask")
    r0, c0 = origin
    return Mask(frozenset((c - c0, r0 - r) for r, c in marks), name)


def format_mask(mask: Mask) -> str:
    r = mask.radius
    lines = []
    for y in range(r, -r - 1, -1):
        row = []
        for x in range(-r, r + 1):
            if (x, y) == (0, 0):
                row.append("o")
            elif (x, y) in mask.offsets:
                row.append("X")
            else:
                row.append(".")
        lines.append("".join(row))
    return "\n".join(lines) + "\n"


def builtin(name: str) -> Mask:
    if name not in BUILTIN_MASKS:
        raise MaskError(f"unknown-name: {name}")
    text = resources.files("modlap.data.masks").joinpath(f"{name}.txt").read_text()
    return load_mask(text, name)


def resolve(spec: str) -> Mask:
    """A builtin name or a path to a mask file."""
    if spec in BUILTIN_MASKS:
        return builtin(spec)
    with open(spec) as fh:
        return load_mask(fh.read(), name=spec)
