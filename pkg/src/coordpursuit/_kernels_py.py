"""Pure-Python implementations of the geometry and event kernels.

Every function here has a twin with the same signature in ``_kernels.pyx``.
Polygon data is passed as ``array.array('d')`` so that both backends can read
it without conversion.
"""

from math import hypot, sqrt

ELLIPSE_MAXITER = 100
ELLIPSE_TOL = 1e-10


def poly_halfplane_max(nx, ny, off, px, py):
    """Largest signed halfplane excess ``max_e(n_e . p - off_e)``."""
    h = nx[0] * px + ny[0] * py - off[0]
    for k in range(1, len(off)):
        v = nx[k] * px + ny[k] * py - off[k]
        if v > h:
            h = v
    return h


def _seg_nearest(ax, ay, bx, by, px, py):
    ex = bx - ax
    ey = by - ay
    ll = ex * ex + ey * ey
    s = ((px - ax) * ex + (py - ay) * ey) / ll
    if s < 0.0:
        s = 0.0
    elif s > 1.0:
        s = 1.0
    return ax + s * ex, ay + s * ey


def poly_nearest(vx, vy, px, py):
    """Nearest point on the polygon boundary to ``(px, py)``."""
    n = len(vx)
    best = -1.0
    qx = qy = 0.0
    for k in range(n):
        k1 = k + 1 if k + 1 < n else 0
        cx, cy = _seg_nearest(vx[k], vy[k], vx[k1], vy[k1], px, py)
        dd = (cx - px) * (cx - px) + (cy - py) * (cy - py)
        if best < 0.0 or dd < best:
            best = dd
            qx = cx
            qy = cy
    return qx, qy


def poly_sdf(vx, vy, nx, ny, off, px, py):
    """Signed distance to the polygon boundary, negative inside."""
    h = poly_halfplane_max(nx, ny, off, px, py)
    if h <= 0.0:
        return h
    qx, qy = poly_nearest(vx, vy, px, py)
    return hypot(qx - px, qy - py)


def poly_max_fraction(nx, ny, off, px, py, ux, uy, tol=0.0):
    """Largest ``a`` in [0, 1] keeping ``p + a*u`` inside every halfplane pushed out by ``tol``."""
    a = 1.0
    for k in range(len(off)):
        rate = nx[k] * ux + ny[k] * uy
        if rate > 0.0:
            slack = off[k] + tol - (nx[k] * px + ny[k] * py)
            if slack <= 0.0:
                return 0.0
            lim = slack / rate
            if lim < a:
                a = lim
    return a


def ellipse_level(a, b, x, y):
    return (x / a) * (x / a) + (y / b) * (y / b)


def _ellipse_root(r0, z0, z1, g, maxiter):
    # Root w of F(w) = (r0 z0/(w + r0 - 1))^2 + (z1/w)^2 - 1 for w > 0 (r0 >= 1),
    # i.e. w = s + 1 in the Lagrange parameter. Solving for w directly keeps
    # tiny z1 representable. F is convex and decreasing; safeguarded Newton,
    # with geometric bisection while the bracket spans orders of magnitude.
    n0 = r0 * z0
    q = r0 - 1.0
    lo = max(z1, n0 - q)
    hi = 1.0 if g < 0.0 else hypot(n0, z1)
    w = lo
    width_prev = hi - lo
    for it in range(1, maxiter + 1):
        t0 = n0 / (w + q)
        t1 = z1 / w
        f = t0 * t0 + t1 * t1 - 1.0
        if f > 0.0:
            lo = w
        elif f < 0.0:
            hi = w
        else:
            return w, it
        width = hi - lo
        if width <= 4.4e-16 * hi:
            return w, it
        fp = -2.0 * (t0 * t0 / (w + q) + t1 * t1 / w)
        cand = w - f / fp if fp != 0.0 else lo
        if not (lo < cand < hi) or (it % 2 == 0 and width > 0.5 * width_prev):
            cand = sqrt(lo) * sqrt(hi) if lo > 0.0 and hi > 4.0 * lo else 0.5 * (lo + hi)
        if it % 2 == 0:
            width_prev = width
        if abs(cand - w) <= 4.4e-16 * w:
            return cand, it
        w = cand
    return w, -1


def ellipse_nearest(a, b, x, y, maxiter=ELLIPSE_MAXITER):
    """Nearest point on the ellipse curve ``(x/a)^2 + (y/b)^2 = 1``.

    Works in the ellipse's own axes. Returns ``(qx, qy, iterations)``;
    iterations is -1 when the root solve hit ``maxiter``.
    """
    swap = a < b
    if swap:
        a, b = b, a
        x, y = y, x
    sx = -1.0 if x < 0.0 else 1.0
    sy = -1.0 if y < 0.0 else 1.0
    x0 = abs(x)
    y0 = abs(y)
    it = 0
    if y0 / b > 0.0:
        if x0 > 0.0:
            z0 = x0 / a
            z1 = y0 / b
            g = z0 * z0 + z1 * z1 - 1.0
            if g == 0.0:
                qx, qy = x0, y0
            else:
                r0 = (a / b) * (a / b)
                w, it = _ellipse_root(r0, z0, z1, g, maxiter)
                qx = r0 * x0 / (w + (r0 - 1.0))
                qy = y0 / w
        else:
            qx, qy = 0.0, b
    else:
        numer = a * x0
        denom = a * a - b * b
        if numer < denom:
            xde = numer / denom
            qx = a * xde
            qy = b * sqrt(max(0.0, 1.0 - xde * xde))
        else:
            qx, qy = a, 0.0
    qx *= sx
    qy *= sy
    if swap:
        qx, qy = qy, qx
    return qx, qy, it


def ellipse_max_fraction(a, b, x, y, ux, uy):
    """Largest ``t`` in [0, 1] keeping ``(x, y) + t*(ux, uy)`` in the ellipse."""
    pa = ux / a
    pb = uy / b
    qa = x / a
    qb = y / b
    A = pa * pa + pb * pb
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


def crossing_fraction(g0, g1):
    """Fraction of a step at which a linearly moving gap reaches zero, or -1."""
    if g0 == 0.0:
        return 0.0
    if g1 == 0.0:
        return 1.0
    if (g0 > 0.0) != (g1 > 0.0):
        return g0 / (g0 - g1)
    return -1.0


def capture_fraction(dx0, dy0, dx1, dy1, tol):
    """First fraction of a step at which ``|d(s)| <= tol`` for linear ``d``, or -1."""
    c = dx0 * dx0 + dy0 * dy0 - tol * tol
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
