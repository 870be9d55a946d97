"""Independent test oracles.

The cone oracle works by explicit development: it embeds both points in the
unrolled plane sector for each admissible unrolling direction, plus the
broken path through the apex, and minimizes over the enumerated candidates.
No code is shared with the closed-form implementation in the package.
"""

import math

import numpy as np


def cone_unfold_candidates(total_angle, r1, p1, r2, p2):
    """All candidate geodesics between two cone points, as developed segments.

    Each candidate is ``(length, kind, data)``: ``kind == "side"`` carries
    the two planar endpoints of the developed segment (first point on the
    positive x-axis), ``kind == "apex"`` the broken radial path.
    """
    candidates = []
    a = np.array([r1, 0.0])
    gap_ccw = (p2 - p1) % total_angle
    for gap in (gap_ccw, gap_ccw - total_angle):
        # unroll counterclockwise or clockwise; a straight segment stays on
        # the cone surface only when the swept angle is below pi
        if abs(gap) < math.pi:
            b = np.array([r2 * math.cos(gap), r2 * math.sin(gap)])
            candidates.append((float(np.linalg.norm(b - a)), "side", (a, b, gap)))
    candidates.append((r1 + r2, "apex", None))
    return candidates


def cone_unfold_distance(total_angle, x, y):
    """Minimal length over the enumerated developments."""
    cands = cone_unfold_candidates(total_angle, x[0], x[1], y[0], y[1])
    return min(c[0] for c in cands)


def cone_unfold_geodesic_point(total_angle, x, y, s):
    """Point at arc length ``s`` along a shortest enumerated path."""
    cands = cone_unfold_candidates(total_angle, x[0], x[1], y[0], y[1])
    length, kind, data = min(cands, key=lambda c: c[0])
    if kind == "apex":
        if s <= x[0]:
            return np.array([x[0] - s, x[1]])
        return np.array([s - x[0], y[1]])
    a, b, gap = data
    q = a + (s / length) * (b - a)
    r = float(np.linalg.norm(q))
    if r == 0.0:
        return np.array([0.0, 0.0])
    ang = math.atan2(q[1], q[0])
    return np.array([r, (x[1] + ang) % total_angle])


def cone_unfold_is_unique(total_angle, x, y, tol=1e-12):
    """Uniqueness by enumerating the candidates and counting the minimizers.

    Side candidates that degenerate onto the apex path (gap exactly pi) are
    identified with it.
    """
    if x[0] == 0.0 or y[0] == 0.0:
        return True
    cands = cone_unfold_candidates(total_angle, x[0], x[1], y[0], y[1])
    best = min(c[0] for c in cands)
    distinct = set()
    for length, kind, data in cands:
        if length > best + tol:
            continue
        if kind == "side" and abs(abs(data[2]) - math.pi) <= tol:
            kind, data = "apex", None
        key = "apex" if kind == "apex" else round(data[2], 9)
        distinct.add(key)
    return len(distinct) == 1


def sphere_arccos_distance(curvature, x, y):
    """Second route to the sphere distance (arccos of the inner product)."""
    dot = float(np.clip(np.dot(x, y), -1.0, 1.0))
    return math.acos(dot) / math.sqrt(curvature)


def euclidean_from_cone(point):
    """The isometry from the 2*pi cone onto the plane."""
    r, phi = point
    return np.array([r * math.cos(phi), r * math.sin(phi)])
