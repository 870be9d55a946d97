"""Exact geodesic geometry for the three model surfaces.

Supported spaces: the Euclidean plane, the round sphere of curvature k > 0,
and the flat cone of total apex angle theta > 0.  Points are plain numpy
arrays: ``(x, y)`` on the plane, a unit 3-vector on the sphere, ``(r, phi)``
with ``phi in [0, theta)`` on the cone (the apex is exactly ``(0, 0)``).

Tangent vectors carry components in a fixed orthonormal frame per point:
global axes on the plane, (radial, angular) on the cone, and the
(polar, azimuthal) frame on the sphere with the phi=0 limit used at the
poles.  All operations are pure functions of immutable inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _geom
from ._geom import KIND_CONE, KIND_PLANE, KIND_SPHERE
from .errors import (
    ChartError,
    DegenerateInputError,
    SingularPointError,
    ValidationError,
)

TWO_PI = 2.0 * math.pi

_SPHERE_NORM_TOL = 1e-12
_ANGLE_TIE_TOL = 1e-12
_ANTIPODAL_TOL = 1e-12


# ---------------------------------------------------------------------------
# descriptors and domain types


@dataclass(frozen=True)
class SpaceDescriptor:
    """Which model surface, plus its parameter.

    ``kind`` is one of ``"plane"``, ``"sphere"`` (with ``curvature > 0``) or
    ``"cone"`` (with ``total_angle > 0``).  Cones with total angle above
    2*pi are accepted so that curvature certification has a genuine
    counterexample to find; they are not Alexandrov spaces of curvature >= 0.
    """

    kind: str
    curvature: Optional[float] = None
    total_angle: Optional[float] = None

    def __post_init__(self):
        if self.kind == "plane":
            if self.curvature is not None or self.total_angle is not None:
                raise ValidationError("plane takes no parameters")
        elif self.kind == "sphere":
            if self.curvature is None or not self.curvature > 0:
                raise ValidationError("sphere requires curvature > 0")
            if self.total_angle is not None:
                raise ValidationError("sphere takes no total_angle")
        elif self.kind == "cone":
            if self.total_angle is None or not self.total_angle > 0:
                raise ValidationError("cone requires total_angle > 0")
            if self.curvature is not None:
                raise ValidationError("cone takes no curvature")
        else:
            raise ValidationError(f"unknown space kind {self.kind!r}")

    @property
    def dim(self) -> int:
        """Length of the coordinate vector of a point."""
        return 3 if self.kind == "sphere" else 2


def plane() -> SpaceDescriptor:
    return SpaceDescriptor("plane")


def sphere(curvature: float = 1.0) -> SpaceDescriptor:
    return SpaceDescriptor("sphere", curvature=curvature)


def cone(total_angle: float) -> SpaceDescriptor:
    return SpaceDescriptor("cone", total_angle=total_angle)


def kind_code(space: SpaceDescriptor) -> int:
    """Integer kind code shared with the kernel backends."""
    return {"plane": KIND_PLANE, "sphere": KIND_SPHERE, "cone": KIND_CONE}[space.kind]


def space_param(space: SpaceDescriptor) -> float:
    """The scalar parameter passed to the kernel backends."""
    if space.kind == "sphere":
        return space.curvature
    if space.kind == "cone":
        return space.total_angle
    return 0.0


@dataclass(frozen=True)
class TangentVector:
    """A tangent vector at a regular point, in the local orthonormal frame.

    ``tie_broken`` is set by `log_map` when several minimal geodesics exist
    and the documented tie-break picked one.
    """

    base: np.ndarray
    components: np.ndarray
    tie_broken: bool = False

    @property
    def norm(self) -> float:
        return float(math.hypot(self.components[0], self.components[1]))


@dataclass(frozen=True)
class Geodesic:
    """Unit-speed minimal geodesic segment.

    ``passes_through_apex`` marks cone geodesics that run through the apex;
    those store their endpoint because the initial direction alone does not
    determine the outgoing ray on cones with total angle above 2*pi.
    """

    space: SpaceDescriptor
    start: np.ndarray
    direction: TangentVector
    length: float
    passes_through_apex: bool = False
    end: Optional[np.ndarray] = None

    def point_at(self, t: float) -> np.ndarray:
        """Point at arc length ``t`` from the start."""
        if self.passes_through_apex and self.end is not None:
            r, p = _geom.cone_geo_point(
                self.space.total_angle,
                self.start[0],
                self.start[1],
                self.end[0],
                self.end[1],
                t,
            )
            return np.array([r, p])
        comps = self.direction.components * t
        return exp_map(self.space, TangentVector(self.start, comps))


# ---------------------------------------------------------------------------
# validation and constructors


def validate_point(space: SpaceDescriptor, p) -> np.ndarray:
    """Check coordinates against the space's encoding; return them as float64."""
    arr = np.asarray(p, dtype=np.float64)
    if arr.shape != (space.dim,):
        raise ValidationError(
            f"{space.kind} point must have shape ({space.dim},), got {arr.shape}"
        )
    if not np.all(np.isfinite(arr)):
        raise ValidationError("point coordinates must be finite")
    if space.kind == "sphere":
        if abs(float(np.linalg.norm(arr)) - 1.0) > _SPHERE_NORM_TOL:
            raise ValidationError("sphere point must be a unit 3-vector")
    elif space.kind == "cone":
        r, phi = float(arr[0]), float(arr[1])
        if r < 0.0:
            raise ValidationError("cone radius must be nonnegative")
        if r == 0.0 and phi != 0.0:
            raise ValidationError("cone apex is canonicalized to (0, 0)")
        if r > 0.0 and not (0.0 <= phi < space.total_angle):
            raise ValidationError("cone angle must lie in [0, total_angle)")
    return arr


def cone_point(space: SpaceDescriptor, r: float, phi: float) -> np.ndarray:
    """Build a valid cone point, canonicalizing the angle (and the apex)."""
    if r < 0.0:
        raise ValidationError("cone radius must be nonnegative")
    if r == 0.0:
        return np.array([0.0, 0.0])
    return np.array([r, phi % space.total_angle])


def sphere_point(v) -> np.ndarray:
    """Normalize a nonzero 3-vector onto the unit sphere."""
    arr = np.asarray(v, dtype=np.float64)
    n = float(np.linalg.norm(arr))
    if n == 0.0:
        raise ValidationError("cannot normalize the zero vector")
    return arr / n


def points_equal(space: SpaceDescriptor, x, y) -> bool:
    return bool(np.array_equal(np.asarray(x, float), np.asarray(y, float)))


# ---------------------------------------------------------------------------
# metric and geodesics


def distance(space: SpaceDescriptor, x, y) -> float:
    """Geodesic distance between two valid points."""
    x = validate_point(space, x)
    y = validate_point(space, y)
    if space.kind == "plane":
        return _geom.plane_dist(x[0], x[1], y[0], y[1])
    if space.kind == "sphere":
        return _geom.sphere_dist(space.curvature, x, y)
    return _geom.cone_dist(space.total_angle, x[0], x[1], y[0], y[1])


def is_regular(space: SpaceDescriptor, x) -> bool:
    """False exactly at the apex of a cone whose total angle is not 2*pi."""
    x = validate_point(space, x)
    if space.kind != "cone":
        return True
    if x[0] > 0.0:
        return True
    return abs(space.total_angle - TWO_PI) <= _ANGLE_TIE_TOL


def geodesic_is_unique(space: SpaceDescriptor, x, y) -> bool:
    """Whether exactly one minimal geodesic joins two distinct points.

    On a cone of total angle theta != 2*pi the only ambiguous pairs are
    those whose two angular gaps are equal (both side developments tie);
    pairs involving the apex are joined by a single radial segment.
    """
    x = validate_point(space, x)
    y = validate_point(space, y)
    if points_equal(space, x, y):
        raise DegenerateInputError("geodesic uniqueness needs distinct points")
    if space.kind == "plane":
        return True
    if space.kind == "sphere":
        return float(np.linalg.norm(x + y)) > _ANTIPODAL_TOL
    theta = space.total_angle
    if x[0] == 0.0 or y[0] == 0.0:
        return True
    if abs(theta - TWO_PI) <= _ANGLE_TIE_TOL:
        return True
    g = abs(_geom.wrap_signed(y[1] - x[1], theta))
    gaps_tie = abs(2.0 * g - theta) <= _ANGLE_TIE_TOL * max(1.0, theta)
    if theta < TWO_PI:
        return not gaps_tie
    # total angle > 2*pi: side paths of equal gaps both exceed pi and
    # degenerate to the single broken radial through the apex
    return True


def _sphere_frame(x):
    """Orthonormal (polar, azimuthal) frame, phi=0 limit at the poles."""
    s = math.hypot(x[0], x[1])
    if s <= 1e-12:
        sign = 1.0 if x[2] > 0 else -1.0
        return np.array([sign, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
    e1 = np.array([x[2] * x[0] / s, x[2] * x[1] / s, -s])
    e2 = np.array([-x[1] / s, x[0] / s, 0.0])
    return e1, e2


def exp_map(space: SpaceDescriptor, v: TangentVector) -> np.ndarray:
    """Follow the geodesic leaving the base point with the given frame vector.

    The geodesic is followed for the full vector length even beyond the
    minimal range.  A cone geodesic aimed exactly at the apex continues by
    straight-line development: it leaves on the ray at angular offset pi
    from where it came in (mod the total angle).
    """
    base = validate_point(space, v.base)
    comps = np.asarray(v.components, dtype=np.float64)
    if comps.shape != (2,):
        raise ValidationError("tangent components must be a 2-vector")
    if space.kind == "plane":
        return base + comps
    if space.kind == "sphere":
        norm = math.hypot(comps[0], comps[1])
        if norm == 0.0:
            return base.copy()
        e1, e2 = _sphere_frame(base)
        dir3 = (comps[0] * e1 + comps[1] * e2) / norm
        tau = norm * math.sqrt(space.curvature)
        out = math.cos(tau) * base + math.sin(tau) * dir3
        return out / np.linalg.norm(out)
    theta = space.total_angle
    if base[0] == 0.0:
        if abs(theta - TWO_PI) > _ANGLE_TIE_TOL:
            raise SingularPointError("no tangent space at the cone apex")
        norm = math.hypot(comps[0], comps[1])
        if norm == 0.0:
            return base.copy()
        return np.array([norm, math.atan2(comps[1], comps[0]) % theta])
    dev_x = base[0] + comps[0]
    dev_y = comps[1]
    r = math.hypot(dev_x, dev_y)
    if r == 0.0:
        return np.array([0.0, 0.0])
    ang = math.atan2(dev_y, dev_x)
    return np.array([r, (base[1] + ang) % theta])


def log_map(space: SpaceDescriptor, x, y) -> TangentVector:
    """Initial vector of a minimal geodesic from x to y, with |v| = d(x, y).

    Where several minimal geodesics exist the one with the smallest frame
    angle in [0, 2*pi) is returned and ``tie_broken`` is set.  ``x = y``
    yields the zero vector.
    """
    x = validate_point(space, x)
    y = validate_point(space, y)
    if space.kind == "cone" and x[0] == 0.0 and abs(space.total_angle - TWO_PI) > _ANGLE_TIE_TOL:
        raise SingularPointError("no tangent space at the cone apex")
    if points_equal(space, x, y):
        return TangentVector(x, np.zeros(2))
    if space.kind == "plane":
        return TangentVector(x, y - x)
    if space.kind == "sphere":
        d = _geom.sphere_dist(space.curvature, x, y)
        if float(np.linalg.norm(x + y)) <= _ANTIPODAL_TOL:
            # antipodal: every direction is minimal; frame angle 0 wins
            return TangentVector(x, np.array([d, 0.0]), tie_broken=True)
        u = y - float(np.dot(x, y)) * x
        un = float(np.linalg.norm(u))
        if un == 0.0:
            return TangentVector(x, np.zeros(2))
        e1, e2 = _sphere_frame(x)
        dir3 = u / un
        comps = d * np.array([float(np.dot(dir3, e1)), float(np.dot(dir3, e2))])
        return TangentVector(x, comps)
    theta = space.total_angle
    if x[0] == 0.0:
        # apex of the 2*pi cone: frame is the developed plane at angle 0
        return TangentVector(
            x, np.array([y[0] * math.cos(y[1]), y[0] * math.sin(y[1])])
        )
    if y[0] == 0.0:
        return TangentVector(x, np.array([-x[0], 0.0]))
    delta = _geom.wrap_signed(y[1] - x[1], theta)
    g = abs(delta)
    if g >= math.pi:
        return TangentVector(x, np.array([-(x[0] + y[0]), 0.0]))
    tie = abs(2.0 * g - theta) <= _ANGLE_TIE_TOL * max(1.0, theta) and abs(
        theta - TWO_PI
    ) > _ANGLE_TIE_TOL
    comps = np.array(
        [y[0] * math.cos(delta) - x[0], y[0] * math.sin(delta)]
    )
    return TangentVector(x, comps, tie_broken=tie)


def geodesic_between(space: SpaceDescriptor, x, y) -> Geodesic:
    """A minimal unit-speed geodesic from x to y (deterministic tie-break).

    The start must admit a tangent frame, so on cones with total angle
    other than 2*pi the apex can only appear as the endpoint ``y``.
    """
    x = validate_point(space, x)
    y = validate_point(space, y)
    if points_equal(space, x, y):
        raise DegenerateInputError("no geodesic between identical points")
    vec = log_map(space, x, y)
    length = vec.norm
    unit = TangentVector(x, vec.components / length, tie_broken=vec.tie_broken)
    through_apex = False
    end = None
    if space.kind == "cone":
        if y[0] == 0.0:
            through_apex = True
            end = y
        elif x[0] > 0.0:
            g = abs(_geom.wrap_signed(y[1] - x[1], space.total_angle))
            if g >= math.pi:
                through_apex = True
                end = y
    return Geodesic(space, x, unit, length, through_apex, end)


# ---------------------------------------------------------------------------
# charts


class LocalChart:
    """Bilipschitz chart of a metric ball onto plane coordinates.

    Exactly isometric on the plane and on the cone (sector development);
    normal coordinates on the sphere, with metric distortion of order
    ``curvature * radius**2`` on the chart ball.  The chart frame at the
    center agrees with the `TangentVector` frame.
    """

    def __init__(self, space: SpaceDescriptor, center, radius: float):
        center = validate_point(space, center)
        if radius <= 0.0:
            raise ChartError("chart radius must be positive")
        if not is_regular(space, center):
            raise ChartError("no chart at a singular point")
        if space.kind == "sphere":
            limit = 0.5 * math.pi / math.sqrt(space.curvature)
            if radius >= limit:
                raise ChartError(f"sphere chart radius must be below {limit:.6g}")
        elif space.kind == "cone" and center[0] > 0.0:
            theta = space.total_angle
            limit = center[0]
            if theta < math.pi:
                # keep the developed ball clear of the sector cut
                limit = center[0] * math.sin(0.5 * theta)
            if radius >= limit:
                raise ChartError(f"cone chart radius must be below {limit:.6g}")
        self.space = space
        self.center = center
        self.radius = radius

    def forward(self, p) -> np.ndarray:
        p = validate_point(self.space, p)
        space = self.space
        if space.kind == "plane":
            return p - self.center
        if space.kind == "sphere":
            return log_map(space, self.center, p).components
        theta = space.total_angle
        if self.center[0] == 0.0:
            return np.array([p[0] * math.cos(p[1]), p[0] * math.sin(p[1])])
        delta = _geom.wrap_signed(p[1] - self.center[1], theta)
        return np.array(
            [p[0] * math.cos(delta) - self.center[0], p[0] * math.sin(delta)]
        )

    def inverse(self, uv) -> np.ndarray:
        uv = np.asarray(uv, dtype=np.float64)
        space = self.space
        if space.kind == "plane":
            return self.center + uv
        if space.kind == "sphere":
            return exp_map(space, TangentVector(self.center, uv))
        theta = space.total_angle
        if self.center[0] == 0.0:
            r = math.hypot(uv[0], uv[1])
            if r == 0.0:
                return np.array([0.0, 0.0])
            return np.array([r, math.atan2(uv[1], uv[0]) % theta])
        dev_x = self.center[0] + uv[0]
        r = math.hypot(dev_x, uv[1])
        if r == 0.0:
            return np.array([0.0, 0.0])
        ang = math.atan2(uv[1], dev_x)
        return np.array([r, (self.center[1] + ang) % theta])


def local_chart(space: SpaceDescriptor, x, radius: float) -> LocalChart:
    return LocalChart(space, x, radius)


# ---------------------------------------------------------------------------
# regions and sampling


@dataclass(frozen=True)
class RectRegion:
    """Axis-aligned rectangle in the plane."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValidationError("rectangle must have positive extent")


@dataclass(frozen=True)
class AnnulusRegion:
    """Radial annulus on the cone; full angular range unless restricted."""

    r_min: float
    r_max: float
    phi_min: float = 0.0
    phi_max: Optional[float] = None

    def __post_init__(self):
        if not (0.0 <= self.r_min < self.r_max):
            raise ValidationError("annulus needs 0 <= r_min < r_max")


@dataclass(frozen=True)
class CapRegion:
    """Geodesic cap around the north pole, of the given polar opening angle."""

    angle: float = math.pi

    def __post_init__(self):
        if not (0.0 < self.angle <= math.pi):
            raise ValidationError("cap angle must lie in (0, pi]")


def sample_region(space: SpaceDescriptor, region, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` points i.i.d. uniformly w.r.t. surface area in the region.

    Deterministic given the seed.  Cone sampling uses the ``r dr dphi``
    density; sphere caps sample the height coordinate uniformly.
    """
    if n < 0:
        raise ValidationError("sample count must be nonnegative")
    rng = np.random.default_rng(seed)
    if isinstance(region, RectRegion):
        if space.kind != "plane":
            raise ValidationError("rectangle regions live on the plane")
        xs = rng.uniform(region.xmin, region.xmax, size=n)
        ys = rng.uniform(region.ymin, region.ymax, size=n)
        return np.column_stack([xs, ys])
    if isinstance(region, AnnulusRegion):
        if space.kind != "cone":
            raise ValidationError("annulus regions live on the cone")
        theta = space.total_angle
        phi_max = theta if region.phi_max is None else region.phi_max
        if not (0.0 <= region.phi_min < phi_max <= theta):
            raise ValidationError("annulus angular range outside [0, total_angle]")
        u = rng.random(n)
        rs = np.sqrt(region.r_min**2 + u * (region.r_max**2 - region.r_min**2))
        phis = rng.uniform(region.phi_min, phi_max, size=n)
        # exact upper bound would collide with the [0, theta) encoding
        phis = np.minimum(phis, np.nextafter(phi_max, 0.0))
        return np.column_stack([rs, phis])
    if isinstance(region, CapRegion):
        if space.kind != "sphere":
            raise ValidationError("cap regions live on the sphere")
        zmin = math.cos(region.angle)
        zs = rng.uniform(zmin, 1.0, size=n)
        phis = rng.uniform(0.0, TWO_PI, size=n)
        ss = np.sqrt(np.maximum(1.0 - zs * zs, 0.0))
        pts = np.column_stack([ss * np.cos(phis), ss * np.sin(phis), zs])
        return pts / np.linalg.norm(pts, axis=1, keepdims=True)
    raise ValidationError(f"unsupported region {type(region).__name__}")


def default_region(space: SpaceDescriptor):
    """Sampling domain used when the caller does not pin one down."""
    if space.kind == "plane":
        return RectRegion(-1.0, 1.0, -1.0, 1.0)
    if space.kind == "sphere":
        return CapRegion(math.pi)
    return AnnulusRegion(0.0, 2.0)


def grid_points(rect: RectRegion, nx: int, ny: int) -> np.ndarray:
    """Deterministic nx-by-ny grid with inclusive endpoints."""
    if nx < 1 or ny < 1:
        raise ValidationError("grid needs at least one point per axis")
    xs = np.linspace(rect.xmin, rect.xmax, nx)
    ys = np.linspace(rect.ymin, rect.ymax, ny)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def pad3(points: np.ndarray) -> np.ndarray:
    """Pad 2-column point arrays to the 3-column kernel layout."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise ValidationError("expected an (n, dim) point array")
    if pts.shape[1] == 3:
        return pts
    out = np.zeros((pts.shape[0], 3))
    out[:, : pts.shape[1]] = pts
    return out
