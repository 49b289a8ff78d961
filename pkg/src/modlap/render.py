"""Plain-text PGM/PPM export of lattice states."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import LatticeState, bounding_box

# residue 0 is the white background; the rest are distinct, high-contrast colors
DEFAULT_COLORS = (
    (255, 255, 255),
    (0, 0, 0),
    (220, 40, 40),
    (40, 90, 220),
    (30, 160, 60),
    (240, 180, 20),
    (140, 60, 170),
    (20, 170, 180),
    (240, 110, 20),
    (120, 80, 40),
    (230, 90, 170),
    (128, 128, 128),
)


class PaletteError(ValueError):
    pass


@dataclass(frozen=True)
class Palette:
    colors: tuple

    def __post_init__(self):
        if len(self.colors) < 2:
            raise PaletteError("a palette needs at least two colors")
        if len(set(self.colors)) != len(self.colors):
            raise PaletteError("palette colors must be distinct")

    @classmethod
    def default(cls, K: int) -> "Palette":
        if not 2 <= K <= len(DEFAULT_COLORS):
            raise PaletteError(f"default palette covers 2..{len(DEFAULT_COLORS)} colors")
        return cls(DEFAULT_COLORS[:K])

    def __len__(self) -> int:
        return len(self.colors)


def render_pgm(state: LatticeState, palette: Palette, scale: int = 1) -> bytes:
    """Text netpbm image of the bounding box with a one-cell margin.

    Two-color palettes give a P2 graymap (background 255, foreground 0);
    larger palettes give a P3 pixmap.  The top row is the largest ``y``.
    """
    if scale < 1:
        raise ValueError("scale must be at least 1")
    if state.modulus_bound > len(palette):
        raise PaletteError("palette-too-small")
    box = bounding_box(state)
    if box is None:
        idx = np.zeros((1, 1), dtype=np.intp)
    else:
        idx = np.pad(state.window(box), 1)[::-1].astype(np.intp)
        idx = np.kron(idx, np.ones((scale, scale), dtype=np.intp))
    h, w = idx.shape
    if len(palette) == 2:
        gray = np.where(idx == 0, 255, 0)
        header = f"P2\n{w} {h}\n255\n"
        body = "\n".join(" ".join(str(v) for v in row) for row in gray)
    else:
        colors = np.array(palette.colors, dtype=np.int64)
        rgb = colors[idx]
        header = f"P3\n{w} {h}\n255\n"
        body = "\n".join(" ".join(str(v) for v in row.ravel()) for row in rgb)
    return (header + body + "\n").encode("ascii")
