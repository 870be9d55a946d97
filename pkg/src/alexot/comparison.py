"""Curvature comparison certification on the model surfaces.

Monte-Carlo certification of the triangle comparison inequality against the
constant-curvature model of a given ``k``, comparison angles, strainer
predicates and a numerical first-variation check for distance functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _geom, _kernels, spaces
from .errors import DegenerateInputError, DomainError, ValidationError
from .spaces import Geodesic, SpaceDescriptor

T_GRID_DEFAULT = tuple(0.1 * i for i in range(1, 10))


def model_distance(k: float, a: float, b: float, angle: float) -> float:
    """Side opposite ``angle`` in the model triangle with adjacent sides a, b.

    Euclidean law of cosines for k = 0, spherical/hyperbolic for k != 0,
    evaluated in half-angle form so degenerate triangles stay accurate.
    """
    if a < 0.0 or b < 0.0:
        raise DomainError("triangle sides must be nonnegative")
    if not (0.0 <= angle <= math.pi + 1e-12):
        raise DomainError("angle must lie in [0, pi]")
    if k > 0.0:
        diameter = math.pi / math.sqrt(k)
        if a > diameter + 1e-12 or b > diameter + 1e-12:
            raise DomainError("side exceeds the diameter of the model sphere")
    return _geom.model_dist(k, a, b, min(angle, math.pi))


def angle_from_sides(k: float, a: float, b: float, c: float) -> float:
    """Vertex angle of the k-model triangle with adjacent sides a, b and
    opposite side c; the inverse of `model_distance` in the angle argument.
    """
    if a < 0.0 or b < 0.0 or c < 0.0:
        raise DomainError("triangle sides must be nonnegative")
    return _geom.tri_angle(k, a, b, c)


def comparison_angle_full(
    space: SpaceDescriptor, vertex, x, y, k: float
) -> Tuple[float, bool]:
    """Comparison angle at ``vertex`` plus a flag for degenerate clamping."""
    a = spaces.distance(space, vertex, x)
    b = spaces.distance(space, vertex, y)
    if a == 0.0 or b == 0.0:
        raise DegenerateInputError("comparison angle needs points distinct from the vertex")
    c = spaces.distance(space, x, y)
    if k > 0.0:
        diameter = math.pi / math.sqrt(k)
        if a > diameter + 1e-12 or b > diameter + 1e-12 or c > diameter + 1e-12:
            raise DomainError("side exceeds the diameter of the model sphere")
    scale = max(a, b, c)
    slack_tol = 1e-12 * max(1.0, scale)
    clamped = c > a + b + slack_tol or c < abs(a - b) - slack_tol
    return _geom.tri_angle(k, a, b, c), clamped


def comparison_angle(space: SpaceDescriptor, vertex, x, y, k: float) -> float:
    """Angle at the comparison vertex in the model of curvature ``k``."""
    return comparison_angle_full(space, vertex, x, y, k)[0]


# ---------------------------------------------------------------------------
# triangle comparison sweep


@dataclass(frozen=True)
class ComparisonWitness:
    """Quadruple achieving the extreme slack, with both distances."""

    p: np.ndarray
    start: np.ndarray
    end: np.ndarray
    t: float
    slack: float


@dataclass(frozen=True)
class ComparisonReport:
    """Outcome of a sampled triangle-comparison sweep.

    ``min_slack`` below ``-tol`` means the sweep found a counterexample to
    the comparison inequality; the witness quadruple reproduces it.
    """

    samples: int
    skipped: int
    evaluations: int
    min_slack: float
    mean_slack: float
    tol: float
    witness: Optional[ComparisonWitness]
    config: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.min_slack >= -self.tol


def check_triangle_comparison(
    space: SpaceDescriptor,
    k: float,
    n_samples: int,
    seed: int,
    tol: float = 1e-9,
    region=None,
    n_random_t: int = 2,
) -> ComparisonReport:
    """Sample quadruples (p, geodesic, t) and compare against the k-model.

    For each sampled geodesic the comparison configuration with matching
    length and endpoint distances is rebuilt in the model surface, and the
    slack d(p, gamma(t)) - model distance is recorded on the fixed t-grid
    {0.1, ..., 0.9} plus ``n_random_t`` random parameters.  Samples with no
    model triangle (k > 0 with oversized perimeter) or with a degenerate
    geodesic are skipped and counted.
    """
    if n_samples < 0:
        raise ValidationError("sample count must be nonnegative")
    if region is None:
        region = spaces.default_region(space)
    seeds = np.random.SeedSequence(seed).spawn(4)
    pts_p = spaces.sample_region(space, region, n_samples, seeds[0])
    pts_x = spaces.sample_region(space, region, n_samples, seeds[1])
    pts_y = spaces.sample_region(space, region, n_samples, seeds[2])
    t_rand = np.random.default_rng(seeds[3]).random((n_samples, n_random_t))
    t_grid = np.asarray(T_GRID_DEFAULT)

    (min_slack, min_index, min_t, evaluated, skipped, slack_sum, n_evals) = (
        _kernels.comparison_scan(
            spaces.kind_code(space),
            spaces.space_param(space),
            k,
            spaces.pad3(pts_p),
            spaces.pad3(pts_x),
            spaces.pad3(pts_y),
            t_grid,
            t_rand,
        )
    )
    witness = None
    if min_index >= 0:
        witness = ComparisonWitness(
            p=pts_p[min_index].copy(),
            start=pts_x[min_index].copy(),
            end=pts_y[min_index].copy(),
            t=float(min_t),
            slack=float(min_slack),
        )
    mean = slack_sum / n_evals if n_evals else math.nan
    config = {
        "space": space,
        "k": k,
        "n_samples": n_samples,
        "seed": seed,
        "region": region,
        "n_random_t": n_random_t,
    }
    return ComparisonReport(
        samples=evaluated,
        skipped=skipped,
        evaluations=n_evals,
        min_slack=float(min_slack) if n_evals else math.nan,
        mean_slack=float(mean),
        tol=tol,
        witness=witness,
        config=config,
    )


def witness_slack(space: SpaceDescriptor, k: float, witness: ComparisonWitness) -> float:
    """Recompute the comparison slack of a witness quadruple from scratch."""
    geo = spaces.geodesic_between(space, witness.start, witness.end)
    a = spaces.distance(space, witness.p, witness.start)
    b = spaces.distance(space, witness.p, witness.end)
    angle = _geom.tri_angle(k, a, geo.length, b)
    gamma_t = geo.point_at(witness.t * geo.length)
    measured = spaces.distance(space, witness.p, gamma_t)
    return measured - _geom.model_dist(k, a, witness.t * geo.length, angle)


# ---------------------------------------------------------------------------
# first variation


@dataclass(frozen=True)
class FirstVariationRow:
    t: float
    measured: float
    predicted: float
    error: float


def minimal_directions(space: SpaceDescriptor, x, a) -> Optional[List[np.ndarray]]:
    """Unit frame components of every minimal geodesic from x to a.

    Returns ``None`` on the sphere when ``a`` is antipodal to ``x`` (all
    directions are minimal there).
    """
    x = spaces.validate_point(space, x)
    a = spaces.validate_point(space, a)
    if spaces.points_equal(space, x, a):
        raise DegenerateInputError("need distinct points")
    if space.kind == "sphere" and float(np.linalg.norm(x + a)) <= 1e-12:
        return None
    if space.kind == "cone" and x[0] > 0.0 and a[0] > 0.0:
        theta = space.total_angle
        delta = _geom.wrap_signed(a[1] - x[1], theta)
        g = abs(delta)
        if g < math.pi:
            dirs = [np.array([a[0] * math.cos(g) - x[0], a[0] * math.sin(g) * math.copysign(1.0, delta)])]
            if abs(2.0 * g - theta) <= 1e-12 * max(1.0, theta) and abs(
                theta - 2.0 * math.pi
            ) > 1e-12:
                dirs.append(np.array([dirs[0][0], -dirs[0][1]]))
            return [d / np.linalg.norm(d) for d in dirs]
        return [np.array([-1.0, 0.0])]
    vec = spaces.log_map(space, x, a)
    return [vec.components / vec.norm]


def check_first_variation(
    space: SpaceDescriptor,
    a,
    geodesic: Geodesic,
    t_values: Sequence[float] = (1e-1, 1e-2, 1e-3, 1e-4),
) -> List[FirstVariationRow]:
    """Measure d(a, gamma(t)) against its first-order expansion.

    The predicted slope is -cos of the smallest angle between the geodesic
    and the minimal geodesics from gamma(0) to ``a``; the error column must
    vanish faster than t for the expansion to hold.
    """
    a = spaces.validate_point(space, a)
    x = geodesic.start
    if spaces.points_equal(space, x, a):
        raise DegenerateInputError("base point of the variation must differ from a")
    if not spaces.is_regular(space, x):
        raise ValidationError("geodesic must start at a regular point")
    d0 = spaces.distance(space, a, x)
    dirs = minimal_directions(space, x, a)
    if dirs is None:
        angle_min = 0.0
    else:
        g = geodesic.direction.components
        angle_min = math.pi
        for d in dirs:
            cross = d[0] * g[1] - d[1] * g[0]
            dot = d[0] * g[0] + d[1] * g[1]
            angle_min = min(angle_min, math.atan2(abs(cross), dot))
    slope = -math.cos(angle_min)
    rows = []
    for t in t_values:
        measured = spaces.distance(space, a, geodesic.point_at(t))
        predicted = d0 + slope * t
        rows.append(FirstVariationRow(t, measured, predicted, measured - predicted))
    return rows


# ---------------------------------------------------------------------------
# strainers


def is_strained(space: SpaceDescriptor, p, pairs, epsilon: float) -> bool:
    """Whether the point pairs form a 2-strainer for ``p`` at quality ``epsilon``.

    Comparison angles are taken against the flat model.  Opposite points of
    one pair must subtend an angle above pi - epsilon at p, and all cross
    angles must exceed pi/2 - 10*epsilon (strict inequalities).
    """
    pairs = list(pairs)
    if len(pairs) != 2:
        raise ValidationError("model surfaces are 2-dimensional: need exactly 2 pairs")
    p = spaces.validate_point(space, p)
    pts = []
    for xi, yi in pairs:
        xi = spaces.validate_point(space, xi)
        yi = spaces.validate_point(space, yi)
        if spaces.points_equal(space, xi, p) or spaces.points_equal(space, yi, p):
            raise ValidationError("strainer points must be distinct from p")
        pts.append((xi, yi))
    for xi, yi in pts:
        if not comparison_angle(space, p, xi, yi, 0.0) > math.pi - epsilon:
            return False
    cross_bound = 0.5 * math.pi - 10.0 * epsilon
    (x1, y1), (x2, y2) = pts
    for u, v in ((x1, x2), (x1, y2), (x2, y1), (y1, y2)):
        if not comparison_angle(space, p, u, v, 0.0) > cross_bound:
            return False
    return True
