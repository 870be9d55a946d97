"""Scalar geometry kernels for the three model surfaces.

Raw-float primitives shared by the public :mod:`alexot.spaces` API and by the
pure-Python kernel backend.  The compiled backend mirrors these functions in
C; any change here must be replicated in ``_kernels/_fast.pyx``.

Conventions
-----------
plane   point = (x, y)
sphere  point = unit vector in R^3, metric scaled by 1/sqrt(curvature)
cone    point = (r, phi) with r >= 0 and phi in [0, total_angle)

All functions are pure and operate on plain floats, so they are safe to call
from multiple threads.
"""

import math

PI = math.pi

# space kind codes shared with the kernel backends
KIND_PLANE = 0
KIND_SPHERE = 1
KIND_CONE = 2


def wrap_signed(delta: float, period: float) -> float:
    """Reduce an angle difference to the half-open interval (-period/2, period/2].

    The positive boundary is kept, which fixes the tie-break used when two
    angular gaps are exactly equal.
    """
    d = math.fmod(delta, period)
    half = 0.5 * period
    if d > half:
        d -= period
    elif d <= -half:
        d += period
    return d


# ---------------------------------------------------------------------------
# distances


def plane_dist(ax, ay, bx, by):
    return math.hypot(bx - ax, by - ay)


def sphere_dist(curvature, a, b):
    """Arc distance between unit vectors a, b, scaled by 1/sqrt(curvature).

    Uses atan2 of the cross/dot pair, which stays accurate near antipodes
    where arccos of the inner product loses half the significant digits.
    """
    cx = a[1] * b[2] - a[2] * b[1]
    cy = a[2] * b[0] - a[0] * b[2]
    cz = a[0] * b[1] - a[1] * b[0]
    s = math.sqrt(cx * cx + cy * cy + cz * cz)
    c = a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    return math.atan2(s, c) / math.sqrt(curvature)


def cone_dist(total_angle, r1, p1, r2, p2):
    """Geodesic distance on the cone of the given total apex angle.

    Below an angular gap of pi the minimizing path misses the apex and its
    length is the chord of the developed sector; from pi on, the path runs
    through the apex.
    """
    g = abs(wrap_signed(p2 - p1, total_angle))
    if g < PI:
        s = math.sin(0.5 * g)
        val = (r1 - r2) * (r1 - r2) + 4.0 * r1 * r2 * s * s
        return math.sqrt(val if val > 0.0 else 0.0)
    return r1 + r2


# ---------------------------------------------------------------------------
# geodesic point evaluation (arc-length parametrized, from x toward y)


def plane_geo_point(ax, ay, bx, by, s):
    length = math.hypot(bx - ax, by - ay)
    if length == 0.0:
        return ax, ay
    u = s / length
    return ax + u * (bx - ax), ay + u * (by - ay)


def sphere_geo_point(curvature, a, b, s):
    """Point at arc length ``s`` along the minimal geodesic from a toward b.

    Caller must keep a, b away from the antipodal locus; there the initial
    direction is not determined by the endpoints.
    """
    dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    ux = b[0] - dot * a[0]
    uy = b[1] - dot * a[1]
    uz = b[2] - dot * a[2]
    un = math.sqrt(ux * ux + uy * uy + uz * uz)
    if un == 0.0:
        return (a[0], a[1], a[2])
    tau = s * math.sqrt(curvature)
    ct, st = math.cos(tau), math.sin(tau)
    px = ct * a[0] + st * ux / un
    py = ct * a[1] + st * uy / un
    pz = ct * a[2] + st * uz / un
    n = math.sqrt(px * px + py * py + pz * pz)
    return (px / n, py / n, pz / n)


def cone_geo_point(total_angle, r1, p1, r2, p2, s):
    """Point at arc length ``s`` along a minimal geodesic from (r1,p1) to (r2,p2).

    Ties between the two side developments break toward positive angular
    offset (the `wrap_signed` boundary convention).
    """
    if r1 == 0.0:
        return (s, p2 % total_angle)
    if r2 == 0.0:
        return (r1 - s, p1) if s <= r1 else (s - r1, (p1 + PI) % total_angle)
    d = wrap_signed(p2 - p1, total_angle)
    if abs(d) >= PI:
        # through the apex: radial in, then radial out
        if s <= r1:
            return (r1 - s, p1)
        return (s - r1, p2 % total_angle)
    bx = r2 * math.cos(d)
    by = r2 * math.sin(d)
    length = math.hypot(bx - r1, by)
    if length == 0.0:
        return (r1, p1)
    u = s / length
    px = r1 + u * (bx - r1)
    py = u * by
    r = math.hypot(px, py)
    if r == 0.0:
        return (0.0, 0.0)
    ang = math.atan2(py, px)
    return (r, (p1 + ang) % total_angle)


# ---------------------------------------------------------------------------
# constant-curvature model triangles


def tri_angle(k, a, b, c):
    """Angle between the sides of lengths a, b whose opposite side is c,
    in the surface of constant curvature k.

    Half-angle form, stable at both degenerate ends; arguments that violate
    the triangle inequality by rounding are clamped.
    """
    if a == 0.0 or b == 0.0:
        return 0.0
    if k == 0.0:
        num = c * c - (a - b) * (a - b)
        den = (a + b) * (a + b) - c * c
    elif k > 0.0:
        s = math.sqrt(k)
        sc = math.sin(0.5 * s * c)
        sm = math.sin(0.5 * s * (a - b))
        sp = math.sin(0.5 * s * (a + b))
        num = sc * sc - sm * sm
        den = sp * sp - sc * sc
    else:
        s = math.sqrt(-k)
        sc = math.sinh(0.5 * s * c)
        sm = math.sinh(0.5 * s * (a - b))
        sp = math.sinh(0.5 * s * (a + b))
        num = sc * sc - sm * sm
        den = sp * sp - sc * sc
    if num < 0.0:
        num = 0.0
    if den < 0.0:
        den = 0.0
    return 2.0 * math.atan2(math.sqrt(num), math.sqrt(den))


def model_dist(k, a, b, angle):
    """Side opposite ``angle`` in the model triangle with adjacent sides a, b."""
    h = math.sin(0.5 * angle)
    h = h * h
    if k == 0.0:
        val = (a - b) * (a - b) + 4.0 * a * b * h
        return math.sqrt(val if val > 0.0 else 0.0)
    if k > 0.0:
        s = math.sqrt(k)
        sm = math.sin(0.5 * s * (a - b))
        q = sm * sm + math.sin(s * a) * math.sin(s * b) * h
        if q < 0.0:
            q = 0.0
        elif q > 1.0:
            q = 1.0
        return 2.0 * math.atan2(math.sqrt(q), math.sqrt(1.0 - q)) / s
    s = math.sqrt(-k)
    sm = math.sinh(0.5 * s * (a - b))
    q = sm * sm + math.sinh(s * a) * math.sinh(s * b) * h
    if q < 0.0:
        q = 0.0
    return 2.0 * math.asinh(math.sqrt(q)) / s
