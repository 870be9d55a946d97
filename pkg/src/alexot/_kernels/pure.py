"""Pure-Python kernel backend.

Implements the same interface as the compiled ``_fast`` extension:
``pairwise_distances`` and ``comparison_scan``.  This module is the reference
implementation; the extension is a mechanical C translation of the same
arithmetic.
"""

import math

import numpy as np

from .. import _geom
from .._geom import KIND_CONE, KIND_PLANE, KIND_SPHERE

BACKEND_NAME = "pure"

_DEGENERATE_LEN = 1e-12
_ANTIPODAL_GUARD = 1e-9


def pairwise_distances(kind, param, a, b):
    """Distance matrix between two point arrays of one model surface.

    ``a`` is (n, 3), ``b`` is (m, 3); plane and cone points occupy the first
    two columns.  Returns an (n, m) float64 array.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if kind == KIND_PLANE:
        dx = a[:, 0, None] - b[None, :, 0]
        dy = a[:, 1, None] - b[None, :, 1]
        return np.hypot(dx, dy)
    if kind == KIND_SPHERE:
        dots = a @ b.T
        crosses = np.cross(a[:, None, :], b[None, :, :])
        sines = np.sqrt(np.sum(crosses * crosses, axis=-1))
        return np.arctan2(sines, dots) / math.sqrt(param)
    if kind == KIND_CONE:
        r1 = a[:, 0, None]
        r2 = b[None, :, 0]
        d = a[:, 1, None] - b[None, :, 1]
        w = np.mod(d, param)
        w = np.where(w > 0.5 * param, w - param, w)
        g = np.abs(w)
        s = np.sin(0.5 * g)
        chord = np.sqrt(np.maximum((r1 - r2) ** 2 + 4.0 * r1 * r2 * s * s, 0.0))
        return np.where(g < math.pi, chord, r1 + r2)
    raise ValueError(f"unknown space kind code {kind}")


def _dist(kind, param, p, q):
    if kind == KIND_PLANE:
        return _geom.plane_dist(p[0], p[1], q[0], q[1])
    if kind == KIND_SPHERE:
        return _geom.sphere_dist(param, p, q)
    return _geom.cone_dist(param, p[0], p[1], q[0], q[1])


def _geo_point(kind, param, x, y, s):
    if kind == KIND_PLANE:
        gx, gy = _geom.plane_geo_point(x[0], x[1], y[0], y[1], s)
        return (gx, gy, 0.0)
    if kind == KIND_SPHERE:
        return _geom.sphere_geo_point(param, x, y, s)
    gr, gp = _geom.cone_geo_point(param, x[0], x[1], y[0], y[1], s)
    return (gr, gp, 0.0)


def comparison_scan(kind, param, kcmp, pts_p, pts_x, pts_y, t_fixed, t_rand):
    """Sampled curvature-comparison sweep.

    For each quadruple (p, x, y, t) the triangle with vertex x, sides
    d(x,p) and d(x,y), is rebuilt in the constant-curvature-``kcmp`` model
    and the slack d(p, gamma(t)) - model distance is recorded, where gamma
    is the minimal geodesic from x to y evaluated at arc length t*L.

    Returns ``(min_slack, min_index, min_t, evaluated, skipped, slack_sum,
    n_evals)``; ``min_index`` is -1 when nothing was evaluated.
    """
    pts_p = np.asarray(pts_p, dtype=np.float64)
    pts_x = np.asarray(pts_x, dtype=np.float64)
    pts_y = np.asarray(pts_y, dtype=np.float64)
    t_fixed = np.asarray(t_fixed, dtype=np.float64)
    t_rand = np.asarray(t_rand, dtype=np.float64)

    n = pts_p.shape[0]
    min_slack = math.inf
    min_index = -1
    min_t = 0.0
    evaluated = 0
    skipped = 0
    slack_sum = 0.0
    n_evals = 0

    model_diam = math.inf
    if kcmp > 0.0:
        model_diam = math.pi / math.sqrt(kcmp)

    for i in range(n):
        p = pts_p[i]
        x = pts_x[i]
        y = pts_y[i]
        length = _dist(kind, param, x, y)
        if length < _DEGENERATE_LEN:
            skipped += 1
            continue
        if kind == KIND_SPHERE:
            # slerp direction is ill-conditioned near the antipodal locus
            if math.pi - length * math.sqrt(param) < _ANTIPODAL_GUARD:
                skipped += 1
                continue
        a = _dist(kind, param, p, x)
        b = _dist(kind, param, p, y)
        if kcmp > 0.0:
            # no comparison triangle in the positively curved model
            if a > model_diam or b > model_diam or length > model_diam:
                skipped += 1
                continue
            if a + b + length > 2.0 * model_diam:
                skipped += 1
                continue
        angle = _geom.tri_angle(kcmp, a, length, b)
        evaluated += 1
        for block in (t_fixed, t_rand[i]):
            for t in block:
                g = _geo_point(kind, param, x, y, t * length)
                measured = _dist(kind, param, p, g)
                model = _geom.model_dist(kcmp, a, t * length, angle)
                slack = measured - model
                slack_sum += slack
                n_evals += 1
                if slack < min_slack:
                    min_slack = slack
                    min_index = i
                    min_t = t
    return (min_slack, min_index, min_t, evaluated, skipped, slack_sum, n_evals)
