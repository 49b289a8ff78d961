"""Discrete Laplacians iterated modulo eventually periodic modulus schedules."""

from .dynamics import (
    IDENTITY_PLUS_SUM,
    LAPLACIAN,
    NEIGHBOR_SUM,
    RULES,
    Schedule,
    Trajectory,
    modulus_bound,
    run,
    step,
)
from .lattice import BoundingBox, LatticeState, bounding_box, support, translate_equal
from .masks import Mask, builtin, load_mask
from .seeds import Seed, builtin_seed, random_seed

__all__ = [
    "BoundingBox",
    "IDENTITY_PLUS_SUM",
    "LAPLACIAN",
    "LatticeState",
    "Mask",
    "NEIGHBOR_SUM",
    "RULES",
    "Schedule",
    "Seed",
    "Trajectory",
    "bounding_box",
    "builtin",
    "builtin_seed",
    "load_mask",
    "modulus_bound",
    "random_seed",
    "run",
    "step",
    "support",
    "translate_equal",
]

__version__ = "0.1.0"
