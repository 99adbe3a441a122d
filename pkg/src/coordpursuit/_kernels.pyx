# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled geometry and event kernels.

Same signatures and results as ``_kernels_py``; polygon data arrives as
``array.array('d')`` buffers.
"""

from libc.math cimport sqrt, hypot, fabs

ELLIPSE_MAXITER = 100
ELLIPSE_TOL = 1e-10


cpdef double poly_halfplane_max(double[::1] nx, double[::1] ny, double[::1] off,
                                double px, double py):
    cdef Py_ssize_t k, n = off.shape[0]
    cdef double h = nx[0] * px + ny[0] * py - off[0]
    cdef double v
    for k in range(1, n):
        v = nx[k] * px + ny[k] * py - off[k]
        if v > h:
            h = v
    return h


cdef inline void _seg_nearest(double ax, double ay, double bx, double by,
                              double px, double py, double* cx, double* cy):
    cdef double ex = bx - ax
    cdef double ey = by - ay
    cdef double ll = ex * ex + ey * ey
    cdef double s = ((px - ax) * ex + (py - ay) * ey) / ll
    if s < 0.0:
        s = 0.0
    elif s > 1.0:
        s = 1.0
    cx[0] = ax + s * ex
    cy[0] = ay + s * ey


cdef void _poly_nearest(double[::1] vx, double[::1] vy, double px, double py,
                        double* qx, double* qy):
    cdef Py_ssize_t k, k1, n = vx.shape[0]
    cdef double best = -1.0
    cdef double cx, cy, dd
    qx[0] = 0.0
    qy[0] = 0.0
    for k in range(n):
        k1 = k + 1 if k + 1 < n else 0
        _seg_nearest(vx[k], vy[k], vx[k1], vy[k1], px, py, &cx, &cy)
        dd = (cx - px) * (cx - px) + (cy - py) * (cy - py)
        if best < 0.0 or dd < best:
            best = dd
            qx[0] = cx
            qy[0] = cy


def poly_nearest(double[::1] vx, double[::1] vy, double px, double py):
    cdef double qx, qy
    _poly_nearest(vx, vy, px, py, &qx, &qy)
    return qx, qy


cpdef double poly_sdf(double[::1] vx, double[::1] vy, double[::1] nx,
                      double[::1] ny, double[::1] off, double px, double py):
    cdef double h = poly_halfplane_max(nx, ny, off, px, py)
    cdef double qx, qy
    if h <= 0.0:
        return h
    _poly_nearest(vx, vy, px, py, &qx, &qy)
    return hypot(qx - px, qy - py)


cpdef double poly_max_fraction(double[::1] nx, double[::1] ny, double[::1] off,
                               double px, double py, double ux, double uy, double tol=0.0):
    cdef Py_ssize_t k, n = off.shape[0]
    cdef double a = 1.0
    cdef double rate, slack, lim
    for k in range(n):
        rate = nx[k] * ux + ny[k] * uy
        if rate > 0.0:
            slack = off[k] + tol - (nx[k] * px + ny[k] * py)
            if slack <= 0.0:
                return 0.0
            lim = slack / rate
            if lim < a:
                a = lim
    return a


cpdef double ellipse_level(double a, double b, double x, double y):
    return (x / a) * (x / a) + (y / b) * (y / b)


cdef double _ellipse_root(double r0, double z0, double z1, double g,
                          int maxiter, int* iters):
    # see _kernels_py._ellipse_root; solves for w = s + 1
    cdef double n0 = r0 * z0
    cdef double q = r0 - 1.0
    cdef double lo = z1 if z1 > n0 - q else n0 - q
    cdef double hi = 1.0 if g < 0.0 else hypot(n0, z1)
    cdef double w = lo
    cdef double width_prev = hi - lo
    cdef double t0, t1, f, fp, cand, width
    cdef int it
    for it in range(1, maxiter + 1):
        t0 = n0 / (w + q)
        t1 = z1 / w
        f = t0 * t0 + t1 * t1 - 1.0
        if f > 0.0:
            lo = w
        elif f < 0.0:
            hi = w
        else:
            iters[0] = it
            return w
        width = hi - lo
        if width <= 4.4e-16 * hi:
            iters[0] = it
            return w
        fp = -2.0 * (t0 * t0 / (w + q) + t1 * t1 / w)
        if fp != 0.0:
            cand = w - f / fp
        else:
            cand = lo
        if not (lo < cand < hi) or (it % 2 == 0 and width > 0.5 * width_prev):
            if lo > 0.0 and hi > 4.0 * lo:
                cand = sqrt(lo) * sqrt(hi)
            else:
                cand = 0.5 * (lo + hi)
        if it % 2 == 0:
            width_prev = width
        if fabs(cand - w) <= 4.4e-16 * w:
            iters[0] = it
            return cand
        w = cand
    iters[0] = -1
    return w


def ellipse_nearest(double a, double b, double x, double y, int maxiter=ELLIPSE_MAXITER):
    cdef bint swap = a < b
    cdef double sx, sy, x0, y0, z0, z1, g, r0, s, qx, qy, numer, denom, xde, tmp
    cdef int it = 0
    if swap:
        tmp = a; a = b; b = tmp
        tmp = x; x = y; y = tmp
    sx = -1.0 if x < 0.0 else 1.0
    sy = -1.0 if y < 0.0 else 1.0
    x0 = fabs(x)
    y0 = fabs(y)
    if y0 / b > 0.0:
        if x0 > 0.0:
            z0 = x0 / a
            z1 = y0 / b
            g = z0 * z0 + z1 * z1 - 1.0
            if g == 0.0:
                qx = x0
                qy = y0
            else:
                r0 = (a / b) * (a / b)
                s = _ellipse_root(r0, z0, z1, g, maxiter, &it)
                qx = r0 * x0 / (s + (r0 - 1.0))
                qy = y0 / s
        else:
            qx = 0.0
            qy = b
    else:
        numer = a * x0
        denom = a * a - b * b
        if numer < denom:
            xde = numer / denom
            qx = a * xde
            tmp = 1.0 - xde * xde
            qy = b * sqrt(tmp if tmp > 0.0 else 0.0)
        else:
            qx = a
            qy = 0.0
    qx *= sx
    qy *= sy
    if swap:
        return qy, qx, it
    return qx, qy, it


cpdef double ellipse_max_fraction(double a, double b, double x, double y,
                                  double ux, double uy):
    cdef double pa = ux / a
    cdef double pb = uy / b
    cdef double qa = x / a
    cdef double qb = y / b
    cdef double A = pa * pa + pb * pb
    cdef double B, C, disc, r, q, t
    if A == 0.0:
        return 1.0
    B = 2.0 * (qa * pa + qb * pb)
    C = qa * qa + qb * qb - 1.0
    if A + B + C <= 0.0:
        return 1.0
    if C > 0.0:
        if C > 1e-12:
            return 0.0
        C = 0.0
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        disc = 0.0
    r = sqrt(disc)
    if B >= 0.0:
        q = -0.5 * (B + r)
        t = C / q if q != 0.0 else 0.0
    else:
        q = -0.5 * (B - r)
        t = q / A
    if t < 0.0:
        return 0.0
    return t if t < 1.0 else 1.0


cpdef double crossing_fraction(double g0, double g1):
    if g0 == 0.0:
        return 0.0
    if g1 == 0.0:
        return 1.0
    if (g0 > 0.0) != (g1 > 0.0):
        return g0 / (g0 - g1)
    return -1.0


cpdef double capture_fraction(double dx0, double dy0, double dx1, double dy1,
                              double tol):
    cdef double c = dx0 * dx0 + dy0 * dy0 - tol * tol
    cdef double wx, wy, A, B, disc, q, s
    if c <= 0.0:
        return 0.0
    wx = dx1 - dx0
    wy = dy1 - dy0
    A = wx * wx + wy * wy
    if A == 0.0:
        return -1.0
    B = 2.0 * (dx0 * wx + dy0 * wy)
    if B >= 0.0:
        return -1.0
    disc = B * B - 4.0 * A * c
    if disc < 0.0:
        return -1.0
    q = 0.5 * (-B + sqrt(disc))
    s = c / q
    return s if s <= 1.0 else -1.0
