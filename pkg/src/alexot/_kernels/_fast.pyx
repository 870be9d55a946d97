# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernel backend.

A mechanical C translation of ``alexot._kernels.pure`` (which in turn
delegates scalar geometry to ``alexot._geom``).  Keep the arithmetic in
lockstep with the pure module: the test suite cross-checks the two backends.
"""

from libc.math cimport M_PI, asinh, atan2, cos, fmod, hypot, sin, sinh, sqrt

import numpy as np

BACKEND_NAME = "fast"

DEF KIND_PLANE = 0
DEF KIND_SPHERE = 1
DEF KIND_CONE = 2

cdef double DEGENERATE_LEN = 1e-12
cdef double ANTIPODAL_GUARD = 1e-9


cdef inline double _wrap_signed(double delta, double period) nogil:
    cdef double d = fmod(delta, period)
    cdef double half = 0.5 * period
    if d > half:
        d -= period
    elif d <= -half:
        d += period
    return d


cdef inline double _plane_dist(double ax, double ay, double bx, double by) nogil:
    return hypot(bx - ax, by - ay)


cdef inline double _sphere_dist(double curvature,
                                double ax, double ay, double az,
                                double bx, double by, double bz) nogil:
    cdef double cx = ay * bz - az * by
    cdef double cy = az * bx - ax * bz
    cdef double cz = ax * by - ay * bx
    cdef double s = sqrt(cx * cx + cy * cy + cz * cz)
    cdef double c = ax * bx + ay * by + az * bz
    return atan2(s, c) / sqrt(curvature)


cdef inline double _cone_dist(double total_angle,
                              double r1, double p1,
                              double r2, double p2) nogil:
    cdef double g = _wrap_signed(p2 - p1, total_angle)
    if g < 0.0:
        g = -g
    cdef double s, val
    if g < M_PI:
        s = sin(0.5 * g)
        val = (r1 - r2) * (r1 - r2) + 4.0 * r1 * r2 * s * s
        return sqrt(val if val > 0.0 else 0.0)
    return r1 + r2


cdef inline double _dist(int kind, double param,
                         double ax, double ay, double az,
                         double bx, double by, double bz) nogil:
    if kind == KIND_PLANE:
        return _plane_dist(ax, ay, bx, by)
    if kind == KIND_SPHERE:
        return _sphere_dist(param, ax, ay, az, bx, by, bz)
    return _cone_dist(param, ax, ay, bx, by)


cdef inline void _geo_point(int kind, double param,
                            double ax, double ay, double az,
                            double bx, double by, double bz,
                            double s,
                            double* gx, double* gy, double* gz) nogil:
    cdef double length, u, px, py, pz, dot, ux, uy, uz, un, tau, ct, st, n
    cdef double d, g, r, ang
    if kind == KIND_PLANE:
        length = hypot(bx - ax, by - ay)
        gz[0] = 0.0
        if length == 0.0:
            gx[0] = ax; gy[0] = ay
            return
        u = s / length
        gx[0] = ax + u * (bx - ax)
        gy[0] = ay + u * (by - ay)
        return
    if kind == KIND_SPHERE:
        dot = ax * bx + ay * by + az * bz
        ux = bx - dot * ax
        uy = by - dot * ay
        uz = bz - dot * az
        un = sqrt(ux * ux + uy * uy + uz * uz)
        if un == 0.0:
            gx[0] = ax; gy[0] = ay; gz[0] = az
            return
        tau = s * sqrt(param)
        ct = cos(tau); st = sin(tau)
        px = ct * ax + st * ux / un
        py = ct * ay + st * uy / un
        pz = ct * az + st * uz / un
        n = sqrt(px * px + py * py + pz * pz)
        gx[0] = px / n; gy[0] = py / n; gz[0] = pz / n
        return
    # cone: (r, phi) in the first two slots
    gz[0] = 0.0
    if ax == 0.0:
        gx[0] = s
        gy[0] = fmod(by, param)
        if gy[0] < 0.0:
            gy[0] += param
        return
    if bx == 0.0:
        if s <= ax:
            gx[0] = ax - s; gy[0] = ay
        else:
            gx[0] = s - ax
            gy[0] = fmod(ay + M_PI, param)
            if gy[0] < 0.0:
                gy[0] += param
        return
    d = _wrap_signed(by - ay, param)
    g = d if d >= 0.0 else -d
    if g >= M_PI:
        if s <= ax:
            gx[0] = ax - s; gy[0] = ay
        else:
            gx[0] = s - ax
            gy[0] = fmod(by, param)
            if gy[0] < 0.0:
                gy[0] += param
        return
    px = bx * cos(d)
    py = bx * sin(d)
    length = hypot(px - ax, py)
    if length == 0.0:
        gx[0] = ax; gy[0] = ay
        return
    u = s / length
    px = ax + u * (px - ax)
    py = u * py
    r = hypot(px, py)
    if r == 0.0:
        gx[0] = 0.0; gy[0] = 0.0
        return
    ang = atan2(py, px)
    gx[0] = r
    gy[0] = fmod(ay + ang, param)
    if gy[0] < 0.0:
        gy[0] += param


cdef inline double _tri_angle(double k, double a, double b, double c) nogil:
    cdef double num, den, s, sc, sm, sp
    if a == 0.0 or b == 0.0:
        return 0.0
    if k == 0.0:
        num = c * c - (a - b) * (a - b)
        den = (a + b) * (a + b) - c * c
    elif k > 0.0:
        s = sqrt(k)
        sc = sin(0.5 * s * c)
        sm = sin(0.5 * s * (a - b))
        sp = sin(0.5 * s * (a + b))
        num = sc * sc - sm * sm
        den = sp * sp - sc * sc
    else:
        s = sqrt(-k)
        sc = sinh(0.5 * s * c)
        sm = sinh(0.5 * s * (a - b))
        sp = sinh(0.5 * s * (a + b))
        num = sc * sc - sm * sm
        den = sp * sp - sc * sc
    if num < 0.0:
        num = 0.0
    if den < 0.0:
        den = 0.0
    return 2.0 * atan2(sqrt(num), sqrt(den))


cdef inline double _model_dist(double k, double a, double b, double angle) nogil:
    cdef double h = sin(0.5 * angle)
    cdef double s, sm, q, val
    h = h * h
    if k == 0.0:
        val = (a - b) * (a - b) + 4.0 * a * b * h
        return sqrt(val if val > 0.0 else 0.0)
    if k > 0.0:
        s = sqrt(k)
        sm = sin(0.5 * s * (a - b))
        q = sm * sm + sin(s * a) * sin(s * b) * h
        if q < 0.0:
            q = 0.0
        elif q > 1.0:
            q = 1.0
        return 2.0 * atan2(sqrt(q), sqrt(1.0 - q)) / s
    s = sqrt(-k)
    sm = sinh(0.5 * s * (a - b))
    q = sm * sm + sinh(s * a) * sinh(s * b) * h
    if q < 0.0:
        q = 0.0
    return 2.0 * asinh(sqrt(q)) / s


def pairwise_distances(int kind, double param, a, b):
    """Distance matrix between two (n, 3) point arrays."""
    cdef double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = av.shape[0], m = bv.shape[0]
    out = np.empty((n, m), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(n):
            for j in range(m):
                ov[i, j] = _dist(kind, param,
                                 av[i, 0], av[i, 1], av[i, 2],
                                 bv[j, 0], bv[j, 1], bv[j, 2])
    return out


def comparison_scan(int kind, double param, double kcmp,
                    pts_p, pts_x, pts_y, t_fixed, t_rand):
    """Sampled curvature-comparison sweep; see the pure backend docstring."""
    cdef double[:, ::1] P = np.ascontiguousarray(pts_p, dtype=np.float64)
    cdef double[:, ::1] X = np.ascontiguousarray(pts_x, dtype=np.float64)
    cdef double[:, ::1] Y = np.ascontiguousarray(pts_y, dtype=np.float64)
    cdef double[::1] TF = np.ascontiguousarray(t_fixed, dtype=np.float64)
    cdef double[:, ::1] TR = np.ascontiguousarray(t_rand, dtype=np.float64)

    cdef Py_ssize_t n = P.shape[0]
    cdef Py_ssize_t nf = TF.shape[0]
    cdef Py_ssize_t nr = TR.shape[1]
    cdef double min_slack = np.inf
    cdef Py_ssize_t min_index = -1
    cdef double min_t = 0.0
    cdef long evaluated = 0, skipped = 0, n_evals = 0
    cdef double slack_sum = 0.0

    cdef double model_diam = np.inf
    if kcmp > 0.0:
        model_diam = M_PI / sqrt(kcmp)

    cdef Py_ssize_t i, q
    cdef double length, a, b, angle, t, measured, model, slack
    cdef double gx, gy, gz
    with nogil:
        for i in range(n):
            length = _dist(kind, param, X[i, 0], X[i, 1], X[i, 2],
                           Y[i, 0], Y[i, 1], Y[i, 2])
            if length < DEGENERATE_LEN:
                skipped += 1
                continue
            if kind == KIND_SPHERE:
                if M_PI - length * sqrt(param) < ANTIPODAL_GUARD:
                    skipped += 1
                    continue
            a = _dist(kind, param, P[i, 0], P[i, 1], P[i, 2],
                      X[i, 0], X[i, 1], X[i, 2])
            b = _dist(kind, param, P[i, 0], P[i, 1], P[i, 2],
                      Y[i, 0], Y[i, 1], Y[i, 2])
            if kcmp > 0.0:
                if a > model_diam or b > model_diam or length > model_diam:
                    skipped += 1
                    continue
                if a + b + length > 2.0 * model_diam:
                    skipped += 1
                    continue
            angle = _tri_angle(kcmp, a, length, b)
            evaluated += 1
            for q in range(nf + nr):
                t = TF[q] if q < nf else TR[i, q - nf]
                _geo_point(kind, param, X[i, 0], X[i, 1], X[i, 2],
                           Y[i, 0], Y[i, 1], Y[i, 2], t * length,
                           &gx, &gy, &gz)
                measured = _dist(kind, param, P[i, 0], P[i, 1], P[i, 2],
                                 gx, gy, gz)
                model = _model_dist(kcmp, a, t * length, angle)
                slack = measured - model
                slack_sum += slack
                n_evals += 1
                if slack < min_slack:
                    min_slack = slack
                    min_index = i
                    min_t = t
    return (min_slack, int(min_index), min_t, int(evaluated), int(skipped),
            slack_sum, int(n_evals))
