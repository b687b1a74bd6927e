"""Plane geometry primitives for the 4g-gon drawing model."""

from __future__ import annotations

import math

TWO_PI = 2.0 * math.pi
EPS_GEOM = 1e-12


def wrap_angle(a: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    a = math.fmod(a, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    elif a > math.pi:
        a -= TWO_PI
    return a


def direction(p, q) -> float:
    """Angle of the vector from p to q."""
    return math.atan2(q[1] - p[1], q[0] - p[0])


def unit(theta: float):
    return (math.cos(theta), math.sin(theta))


def cross(o, a, b) -> float:
    """Cross product (a-o) x (b-o)."""
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def polyline_turning(points) -> float:
    """Total signed interior turning of a directed polyline (sum of bends)."""
    total = 0.0
    prev = None
    for i in range(len(points) - 1):
        d = direction(points[i], points[i + 1])
        if prev is not None:
            total += wrap_angle(d - prev)
        prev = d
    return total


def polyline_length(points) -> float:
    return sum(math.dist(points[i], points[i + 1]) for i in range(len(points) - 1))


def base_polygon(genus: int):
    """Vertices of the regular 4g-gon inscribed in the unit circle.

    Side z_k (1-indexed) runs from vertex k-1 to vertex k, anticlockwise,
    with vertex 0 at angle 0.
    """
    n = 4 * genus
    return [unit(TWO_PI * k / n) for k in range(n)]


def point_in_convex_polygon(p, poly, eps: float = EPS_GEOM) -> int:
    """+1 strictly inside, -1 strictly outside, 0 within eps of the boundary."""
    n = len(poly)
    min_side = math.inf
    for i in range(n):
        c = cross(poly[i], poly[(i + 1) % n], p)
        min_side = min(min_side, c)
    if min_side > eps:
        return 1
    if min_side < -eps:
        return -1
    return 0


def segment_crossings_with_polygon(p, q, poly):
    """Proper crossings of segment p->q with the polygon boundary.

    Returns a list of (t, side_index, outward) sorted by the parameter t along
    p->q, where side_index is 0-based and outward is True when the segment
    leaves the polygon interior at that crossing.
    """
    out = []
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        d1 = cross(a, b, p)
        d2 = cross(a, b, q)
        if d1 * d2 >= 0:
            continue
        d3 = cross(p, q, a)
        d4 = cross(p, q, b)
        if d3 * d4 >= 0:
            continue
        t = d1 / (d1 - d2)
        out.append((t, i, d1 > 0))
    out.sort()
    return out


def segments_properly_intersect(p1, p2, q1, q2) -> bool:
    """True when the open segments p1p2 and q1q2 cross transversally."""
    d1 = cross(q1, q2, p1)
    d2 = cross(q1, q2, p2)
    d3 = cross(p1, p2, q1)
    d4 = cross(p1, p2, q2)
    return d1 * d2 < 0 and d3 * d4 < 0


def count_polyline_crossings(points_a, points_b) -> int:
    """Number of transversal crossings between two polylines."""
    count = 0
    for i in range(len(points_a) - 1):
        for j in range(len(points_b) - 1):
            if segments_properly_intersect(points_a[i], points_a[i + 1],
                                           points_b[j], points_b[j + 1]):
                count += 1
    return count


def clip_polyline_outside(points, poly):
    """Pieces of a polyline lying outside the polygon (split at boundary crossings)."""
    pieces = []
    current = []
    inside = point_in_convex_polygon(points[0], poly) >= 0
    if not inside:
        current.append(points[0])
    for i in range(len(points) - 1):
        p, q = points[i], points[i + 1]
        hits = segment_crossings_with_polygon(p, q, poly)
        for t, _side, outward in hits:
            x = (p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]))
            if outward:
                current = [x]
            else:
                current.append(x)
                pieces.append(current)
                current = []
            inside = not outward
        if not inside:
            current.append(q)
    if current and len(current) >= 2:
        pieces.append(current)
    return pieces


def circumcircle_fit(points):
    """Least-squares circle through points: returns (center, radius, residual spread).

    Raises ValueError for degenerate (collinear) input.
    """
    import numpy as np

    pts = np.asarray(points, dtype=float)
    a = np.column_stack([2.0 * pts[:, 0], 2.0 * pts[:, 1], np.ones(len(pts))])
    b = (pts ** 2).sum(axis=1)
    sol, _res, rank, _sv = np.linalg.lstsq(a, b, rcond=None)
    if rank < 3:
        raise ValueError("degenerate face: collinear vertices")
    center = (sol[0], sol[1])
    radii = np.hypot(pts[:, 0] - center[0], pts[:, 1] - center[1])
    return center, float(radii.mean()), float(radii.max() - radii.min())


def point_in_polygon_general(p, poly, eps: float = 1e-9) -> bool:
    """Point-in-polygon (closure) for a simple, possibly non-convex polygon."""
    x, y = p
    n = len(poly)
    inside = False
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        # on-boundary check
        if min(x1, x2) - eps <= x <= max(x1, x2) + eps and \
           min(y1, y2) - eps <= y <= max(y1, y2) + eps:
            if abs(cross((x1, y1), (x2, y2), p)) <= eps * max(1.0, math.dist((x1, y1), (x2, y2))):
                return True
        if (y1 > y) != (y2 > y):
            xt = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if xt > x:
                inside = not inside
    return inside


def polygon_signed_area(points) -> float:
    total = 0.0
    n = len(points)
    for i in range(n):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % n]
        total += x1 * y2 - x2 * y1
    return 0.5 * total
