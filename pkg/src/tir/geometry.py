"""Planar polygon and polyline helpers used across the garment graph.

All coordinates are centimetres in piece-local frames. Boundaries are
closed polylines: edge i runs from vertex i to vertex (i + 1) mod n.
"""

from __future__ import annotations

import math

import numpy as np

Point2 = tuple[float, float]

# Below this, segments and polygon sides are treated as degenerate.
EPS_CM = 1e-9


def as_array(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("expected an (n, 2) point array")
    return arr


def signed_area(points) -> float:
    """Shoelace signed area of a closed polygon (positive for CCW)."""
    p = as_array(points)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def polygon_area(points) -> float:
    return abs(signed_area(points))


def is_ccw(points) -> bool:
    return signed_area(points) > 0.0


def edge_vectors(points) -> np.ndarray:
    p = as_array(points)
    return np.roll(p, -1, axis=0) - p


def edge_lengths(points) -> np.ndarray:
    return np.linalg.norm(edge_vectors(points), axis=1)


def perimeter(points) -> float:
    return float(edge_lengths(points).sum())


def point_on_edge(points, edge_index: int, t: float) -> Point2:
    """Point at arclength fraction t along edge edge_index."""
    p = as_array(points)
    n = len(p)
    a = p[edge_index % n]
    b = p[(edge_index + 1) % n]
    q = a + t * (b - a)
    return (float(q[0]), float(q[1]))


def _segments_properly_intersect(a, b, c, d) -> bool:
    """True when open segments ab and cd cross at an interior point."""

    def orient(p, q, r):
        v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
        if v > EPS_CM:
            return 1
        if v < -EPS_CM:
            return -1
        return 0

    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    return o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4)


def is_simple_polygon(points) -> bool:
    """Check that no two non-adjacent boundary edges cross.

    O(n^2) sweep-free test; boundaries stay small enough (hundreds of
    vertices) that this is not a bottleneck.
    """
    p = as_array(points)
    n = len(p)
    if n < 3:
        return False
    if np.any(edge_lengths(p) < EPS_CM):
        return False
    for i in range(n):
        a, b = p[i], p[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            c, d = p[j], p[(j + 1) % n]
            if _segments_properly_intersect(a, b, c, d):
                return False
    return True


def rotate(points, degrees: float, about: Point2 = (0.0, 0.0)) -> np.ndarray:
    p = as_array(points)
    th = math.radians(degrees)
    c, s = math.cos(th), math.sin(th)
    rot = np.array([[c, -s], [s, c]])
    origin = np.asarray(about, dtype=float)
    return (p - origin) @ rot.T + origin


def translate(points, dx: float, dy: float) -> np.ndarray:
    return as_array(points) + np.array([dx, dy])


def bounding_box(points) -> tuple[float, float, float, float]:
    """(min_x, min_y, max_x, max_y)."""
    p = as_array(points)
    lo = p.min(axis=0)
    hi = p.max(axis=0)
    return (float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))


def resample_segment(a: Point2, b: Point2, count: int) -> np.ndarray:
    """count points evenly spaced from a to b inclusive."""
    if count < 2:
        raise ValueError("count must be >= 2")
    t = np.linspace(0.0, 1.0, count)[:, None]
    return (1.0 - t) * np.asarray(a, dtype=float) + t * np.asarray(b, dtype=float)


def angle_difference_deg(a: float, b: float, period: float = 180.0) -> float:
    """Smallest absolute difference between two angles modulo period.

    Grainlines are bidirectional, hence the 180 degree default period.
    """
    d = (a - b) % period
    return min(d, period - d)
