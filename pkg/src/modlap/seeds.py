"""Named seeds, size classes and reproducible random seeds."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import numpy as np

from .geometry import figure_symmetry
from .lattice import LatticeState, bounding_box, format_figure, parse_figure
from .symmetry import SymmetrySignature

BUILTIN_SEEDS = ("point", "neumann", "diag", "moore", "peano")

SIZE_LIMITS = {"small": 3, "medium": 18, "large": 84}


class SeedError(ValueError):
    pass


def size_class_of(figure: LatticeState) -> str:
    box = bounding_box(figure)
    if box is None:
        raise SeedError("empty seed")
    side = max(box.width, box.height)
    for name, limit in SIZE_LIMITS.items():
        if side <= limit:
            return name
    raise SeedError(f"seed extent {side} exceeds the large class")


@dataclass(frozen=True, eq=False)
class Seed:
    figure: LatticeState
    name: str = "custom"
    size_class: str = ""

    def __post_init__(self):
        fig = self.figure.trimmed()
        if fig.is_empty():
            raise SeedError("seed support must be nonempty")
        object.__setattr__(self, "figure", fig)
        actual = size_class_of(fig)
        if not self.size_class:
            object.__setattr__(self, "size_class", actual)
        elif SIZE_LIMITS[actual] > SIZE_LIMITS[self.size_class]:
            raise SeedError(f"seed does not fit the {self.size_class} class")

    @property
    def extent(self) -> int:
        """Side of the smallest enclosing square."""
        box = bounding_box(self.figure)
        return max(box.width, box.height)

    @property
    def symmetry(self) -> SymmetrySignature:
        return figure_symmetry(self.figure)

    def to_text(self) -> str:
        return format_figure(self.figure)


def builtin_seed(name: str) -> Seed:
    if name not in BUILTIN_SEEDS:
        raise SeedError(f"unknown-name: {name}")
    text = resources.files("modlap.data.seeds").joinpath(f"{name}.txt").read_text()
    return Seed(parse_figure(text), name)


def load_seed(text: str, name: str = "custom") -> Seed:
    return Seed(parse_figure(text), name)


def random_seed(size_class: str, fill_probability: float, rng_seed: int, k: int = 2) -> Seed:
    """Fill a square of the class's side with random residues in ``1..k-1``.

    The same ``rng_seed`` always yields the same figure.
    """
    if not 0 < fill_probability < 1:
        raise SeedError("fill_probability must lie in (0, 1)")
    if size_class not in SIZE_LIMITS:
        raise SeedError(f"unknown size class {size_class!r}")
    side = SIZE_LIMITS[size_class]
    rng = np.random.default_rng(rng_seed)
    while True:
        mask = rng.random((side, side)) < fill_probability
        if mask.any():
            break
    vals = np.where(mask, rng.integers(1, k, size=(side, side)), 0).astype(np.uint8)
    fig = LatticeState(vals, (-(side // 2), -(side // 2))).trimmed()
    return Seed(fig, f"random-{size_class}-{rng_seed}", size_class)


def resolve(spec: str, rng_seed: int | None = None) -> Seed:
    """A builtin name, ``random:<class>:<fill>`` or a path to a figure file."""
    if spec in BUILTIN_SEEDS:
        return builtin_seed(spec)
    if spec.startswith("random:"):
        _, cls, fill = spec.split(":")
        return random_seed(cls, float(fill), 0 if rng_seed is None else rng_seed)
    with open(spec) as fh:
        return load_seed(fh.read(), name=spec)
