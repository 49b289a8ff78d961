"""Per-step observables: relative density, period ratio, residue densities, entropy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Optional, Sequence

import numpy as np

from .lattice import BoundingBox, LatticeState, bounding_box


class MetricsError(ValueError):
    pass


def _box_values(state: LatticeState) -> np.ndarray:
    box = bounding_box(state)
    if box is None:
        return np.zeros((0, 0), dtype=np.uint8)
    return state.window(box)


def density(state: LatticeState) -> float:
    """Nonzero cells over the area of the tight bounding box; 0 when empty."""
    vals = _box_values(state)
    if vals.size == 0:
        return 0.0
    return np.count_nonzero(vals) / vals.size


def per_residue_densities(state: LatticeState, K: int) -> np.ndarray:
    """Fraction of cells of each residue ``0..K-1`` inside the bounding box."""
    vals = _box_values(state)
    if vals.size and int(vals.max()) >= K:
        raise MetricsError("color-count-too-small")
    if vals.size == 0:
        return np.zeros(K)
    return np.bincount(vals.ravel(), minlength=K)[:K] / vals.size


def color_entropy(state: LatticeState, K: int) -> float:
    """Shannon entropy in nats of the residue classes inside the bounding box."""
    if K < 2:
        raise MetricsError("color count must be at least 2")
    p = per_residue_densities(state, K)
    p = p[p > 0]
    if p.size == 0:
        return 0.0
    return float(-(p * np.log(p)).sum()) + 0.0


def period_ratio(trace: Sequence[float], t: int, tau: int) -> float:
    """``rho[t + tau] / rho[t]``."""
    if t < 0 or t + tau >= len(trace):
        raise MetricsError("t + tau outside the trace")
    if trace[t] == 0:
        raise MetricsError("division-by-zero-density")
    return trace[t + tau] / trace[t]


@dataclass(frozen=True)
class MetricsRow:
    t: int
    rho: float
    kappa: Optional[float]
    rho_c: tuple
    entropy: float
    box: Optional[BoundingBox]
    support_size: int


def compute_row(t: int, state: LatticeState, K: int, kappa: Optional[float] = None) -> MetricsRow:
    vals = _box_values(state)
    support_size = int(np.count_nonzero(vals))
    rho_c = per_residue_densities(state, K)
    rho = support_size / vals.size if vals.size else 0.0
    p = rho_c[rho_c > 0]
    entropy = float(-(p * np.log(p)).sum()) + 0.0 if p.size else 0.0
    return MetricsRow(t, rho, kappa, tuple(float(x) for x in rho_c), entropy, bounding_box(state), support_size)


def csv_header(K: int) -> str:
    cols = ["t", "rho", "kappa", "entropy", "support", "box_w", "box_h"]
    cols += [f"rho_{c}" for c in range(K)]
    return ",".join(cols)


def fmt(x: Optional[float]) -> str:
    """Nine significant digits, locale independent; empty for missing values."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return format(float(x), ".9g")


def format_row(row: MetricsRow) -> str:
    w = row.box.width if row.box else 0
    h = row.box.height if row.box else 0
    fields = [str(row.t), fmt(row.rho), fmt(row.kappa), fmt(row.entropy), str(row.support_size), str(w), str(h)]
    fields += [fmt(x) for x in row.rho_c]
    return ",".join(fields)


class MetricsRecorder:
    """Run observer that computes a row per step and optionally streams CSV.

    The row for step ``t`` carries ``kappa = rho[t] / rho[t - tau]``, the
    period ratio ending at ``t``; it is absent for ``t < tau`` or when the
    earlier density is zero.
    """

    def __init__(self, K: int, tau: int = 8, stream: IO[str] | None = None):
        self.K = K
        self.tau = tau
        self.stream = stream
        self.rows: list[MetricsRow] = []
        self.rho: list[float] = []
        if stream is not None:
            stream.write(csv_header(K) + "\n")

    def __call__(self, t: int, state: LatticeState) -> None:
        kappa = None
        row = compute_row(t, state, self.K)
        if t >= self.tau and self.rho[t - self.tau] > 0:
            kappa = row.rho / self.rho[t - self.tau]
            row = MetricsRow(row.t, row.rho, kappa, row.rho_c, row.entropy, row.box, row.support_size)
        self.rows.append(row)
        self.rho.append(row.rho)
        if self.stream is not None:
            self.stream.write(format_row(row) + "\n")
