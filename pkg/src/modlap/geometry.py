"""Outline descriptors of a figure: convex hull, inertia axes, outline class."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .lattice import LatticeState
from .symmetry import SymmetrySignature, signature_of

Coord = tuple[int, int]

OUTLINE_CLASSES = ("square", "diamond", "triangle", "pentagon", "hexagon", "irregular")


def _cross(o: Coord, a: Coord, b: Coord) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Coord]) -> list[Coord]:
    """Counterclockwise extreme points (Andrew's monotone chain, integer arithmetic)."""
    pts = sorted(set((int(x), int(y)) for x, y in points))
    if len(pts) <= 2:
        return pts
    lower: list[Coord] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Coord] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def support_points(state: LatticeState) -> np.ndarray:
    ys, xs = np.nonzero(state.values)
    return np.column_stack((xs + state.origin[0], ys + state.origin[1]))


def hull_of_state(state: LatticeState) -> list[Coord]:
    pts = support_points(state)
    if len(pts) == 0:
        return []
    # only boundary cells of each row can be extreme
    order = np.lexsort((pts[:, 0], pts[:, 1]))
    pts = pts[order]
    ys = pts[:, 1]
    first = np.r_[True, ys[1:] != ys[:-1]]
    last = np.r_[ys[1:] != ys[:-1], True]
    cand = pts[first | last]
    return convex_hull(map(tuple, cand.tolist()))


def _turn_angles(poly: Sequence[Coord]) -> list[float]:
    """Exterior angle at each vertex in degrees."""
    n = len(poly)
    out = []
    for i in range(n):
        a, b, c = poly[i - 1], poly[i], poly[(i + 1) % n]
        d1 = (b[0] - a[0], b[1] - a[1])
        d2 = (c[0] - b[0], c[1] - b[1])
        ang = math.atan2(d1[0] * d2[1] - d1[1] * d2[0], d1[0] * d2[0] + d1[1] * d2[1])
        out.append(math.degrees(ang))
    return out


def merge_vertices(hull: Sequence[Coord], tolerance: float = 15.0, min_edge: float = 0.1) -> list[tuple]:
    """Reduce a lattice hull to its salient corners.

    Vertices turning by less than ``tolerance`` degrees are dropped, then
    edges shorter than ``min_edge`` times the perimeter are collapsed into
    the intersection of their neighbouring edges.
    """
    poly = [tuple(map(float, p)) for p in hull]
    changed = True
    while changed and len(poly) > 3:
        changed = False
        angles = _turn_angles(poly)
        i = min(range(len(poly)), key=lambda j: abs(angles[j]))
        if abs(angles[i]) < tolerance:
            del poly[i]
            changed = True
            continue
        perim = sum(math.dist(poly[j], poly[(j + 1) % len(poly)]) for j in range(len(poly)))
        lengths = [math.dist(poly[j], poly[(j + 1) % len(poly)]) for j in range(len(poly))]
        j = min(range(len(poly)), key=lambda m: lengths[m])
        if lengths[j] < min_edge * perim:
            n = len(poly)
            p0, p1, p2, p3 = poly[j - 1], poly[j], poly[(j + 1) % n], poly[(j + 2) % n]
            x = _line_intersection(p0, p1, p2, p3)
            if x is not None:
                poly[j] = x
                del poly[(j + 1) % n]
                changed = True
    return poly


def _line_intersection(p0, p1, p2, p3):
    d1 = (p1[0] - p0[0], p1[1] - p0[1])
    d2 = (p3[0] - p2[0], p3[1] - p2[1])
    den = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(den) < 1e-12:
        return None
    t = ((p2[0] - p0[0]) * d2[1] - (p2[1] - p0[1]) * d2[0]) / den
    return (p0[0] + t * d1[0], p0[1] + t * d1[1])


@dataclass(frozen=True)
class OutlineDescriptor:
    hull: tuple
    axes: tuple
    anisotropy: float
    salient: tuple
    salient_angles: tuple
    outline_class: str


def inertia(points: np.ndarray) -> tuple[tuple, float]:
    """Principal directions (major first) and sqrt of the eigenvalue ratio."""
    pts = np.asarray(points, dtype=float)
    if len(pts) < 2:
        return ((1.0, 0.0), (0.0, 1.0)), 1.0
    cov = np.cov(pts.T, bias=True)
    w, v = np.linalg.eigh(cov)
    major, minor = v[:, 1], v[:, 0]
    lo, hi = max(w[0], 0.0), max(w[1], 0.0)
    if hi <= 1e-12:
        ratio = 1.0
    elif lo <= 1e-12 * hi:
        ratio = math.inf
    else:
        ratio = max(1.0, math.sqrt(hi / lo))
    return (tuple(major), tuple(minor)), ratio


def _edge_family(a, b, tolerance: float) -> str:
    ang = math.degrees(math.atan2(b[1] - a[1], b[0] - a[0])) % 90.0
    if min(ang, 90.0 - ang) < tolerance:
        return "axis"
    if abs(ang - 45.0) < tolerance:
        return "diagonal"
    return "other"


def classify_polygon(salient: Sequence[tuple], tolerance: float = 15.0) -> str:
    n = len(salient)
    if n == 4:
        fams = {_edge_family(salient[i], salient[(i + 1) % 4], tolerance) for i in range(4)}
        if fams == {"axis"}:
            return "square"
        if fams == {"diagonal"}:
            return "diamond"
        return "irregular"
    return {3: "triangle", 5: "pentagon", 6: "hexagon"}.get(n, "irregular")


def describe(state: LatticeState, tolerance: float = 15.0) -> OutlineDescriptor:
    hull = hull_of_state(state)
    if not hull:
        raise ValueError("outline of an empty figure")
    axes, ratio = inertia(support_points(state))
    salient = merge_vertices(hull, tolerance) if len(hull) >= 3 else [tuple(map(float, p)) for p in hull]
    angles = tuple(round(a, 6) for a in _turn_angles(salient)) if len(salient) >= 3 else ()
    cls = classify_polygon(salient, tolerance)
    return OutlineDescriptor(tuple(hull), axes, ratio, tuple(salient), angles, cls)


def classify_outline(descriptor: OutlineDescriptor, tolerance: float = 15.0) -> str:
    salient = merge_vertices(descriptor.hull, tolerance) if len(descriptor.hull) >= 3 else descriptor.hull
    return classify_polygon(salient, tolerance)


def figure_symmetry(state: LatticeState, exact: bool = True) -> SymmetrySignature:
    """Reflection flags about the bounding-box center; residues must match when ``exact``."""
    st = state.trimmed()
    if st.is_empty():
        raise ValueError("symmetry of an empty figure")
    v = st.values if exact else (st.values != 0)
    h = bool(np.array_equal(v, v[::-1, :]))
    vert = bool(np.array_equal(v, v[:, ::-1]))
    if v.shape[0] == v.shape[1]:
        main = bool(np.array_equal(v, v.T))
        anti = bool(np.array_equal(v, v[::-1, ::-1].T))
    else:
        main = anti = False
    return SymmetrySignature(h, vert, main, anti)


def descriptor_row(t: int, d: OutlineDescriptor) -> str:
    return f"{t},{d.outline_class},{len(d.hull)},{d.anisotropy:.9g}"
