"""The playing set: convex polygons and ellipses in the plane.

Provides the quantities the pursuer construction needs (diameter and a
diametral pair, the frame that lays that pair on the x-axis, the largest
|ordinate| in that frame) plus containment, projection and boundary tests
used by the simulator.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass, field
from typing import Sequence

from . import kernels
from .errors import ConfigError, NumericError

Point = tuple[float, float]

DEFAULT_BOUNDARY_TOL = 1e-7
DUPLICATE_TOL = 1e-12
DIAMETER_TIE_RTOL = 1e-12


@dataclass(frozen=True)
class Frame:
    """Rigid frame: ``p_frame = R(rotation) @ (p_world - origin)``."""

    origin: Point = (0.0, 0.0)
    rotation: float = 0.0
    _cs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_cs", (math.cos(self.rotation), math.sin(self.rotation)))

    def to_frame(self, p: Sequence[float]) -> Point:
        c, s = self._cs
        dx = p[0] - self.origin[0]
        dy = p[1] - self.origin[1]
        return (c * dx - s * dy, s * dx + c * dy)

    def from_frame(self, q: Sequence[float]) -> Point:
        c, s = self._cs
        return (c * q[0] + s * q[1] + self.origin[0], -s * q[0] + c * q[1] + self.origin[1])

    def vector_to_frame(self, u: Sequence[float]) -> Point:
        c, s = self._cs
        return (c * u[0] - s * u[1], s * u[0] + c * u[1])


@dataclass(frozen=True)
class RegionMetrics:
    d: float
    diametral_pair: tuple[Point, Point]
    c: float
    frame: Frame


class ConvexRegion:
    """Closed bounded convex planar set.

    Subclasses implement ``signed_distance`` (negative inside), ``contains``,
    ``project``, ``max_fraction`` and the boundary helpers.
    """

    kind = "abstract"

    def on_boundary(self, p: Sequence[float], tol: float = DEFAULT_BOUNDARY_TOL) -> bool:
        return abs(self.signed_distance(p)) <= tol

    def distance(self, p: Sequence[float]) -> float:
        return max(0.0, self.signed_distance(p))

    def project(self, p: Sequence[float]) -> Point:
        if self.contains(p, 0.0):
            return (float(p[0]), float(p[1]))
        return self.nearest_boundary_point(p)


@dataclass(frozen=True)
class Polygon(ConvexRegion):
    """Strictly convex polygon with counterclockwise vertices."""

    vertices: tuple[Point, ...]
    kind = "polygon"
    _vx: array = field(init=False, repr=False, compare=False)
    _vy: array = field(init=False, repr=False, compare=False)
    _nx: array = field(init=False, repr=False, compare=False)
    _ny: array = field(init=False, repr=False, compare=False)
    _off: array = field(init=False, repr=False, compare=False)
    _cum: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        if n < 3:
            raise ConfigError(f"polygon needs at least 3 vertices, got {n}")
        for x, y in verts:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ConfigError("polygon vertex is not finite")
        for i in range(n):
            for j in range(i + 1, n):
                if math.hypot(verts[i][0] - verts[j][0], verts[i][1] - verts[j][1]) <= DUPLICATE_TOL:
                    raise ConfigError(f"polygon vertices {i} and {j} coincide")
        nx, ny, off, cum = [], [], [], [0.0]
        for i in range(n):
            a, b, c = verts[i - 1], verts[i], verts[(i + 1) % n]
            cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
            if not cross > 0.0:
                raise ConfigError(
                    f"polygon is not strictly convex counterclockwise at vertex {i} (cross={cross:.3g})"
                )
            ex, ey = c[0] - b[0], c[1] - b[1]
            length = math.hypot(ex, ey)
            ux, uy = ey / length, -ex / length
            nx.append(ux)
            ny.append(uy)
            off.append(ux * b[0] + uy * b[1])
            cum.append(cum[-1] + length)
        object.__setattr__(self, "_vx", array("d", [v[0] for v in verts]))
        object.__setattr__(self, "_vy", array("d", [v[1] for v in verts]))
        object.__setattr__(self, "_nx", array("d", nx))
        object.__setattr__(self, "_ny", array("d", ny))
        object.__setattr__(self, "_off", array("d", off))
        object.__setattr__(self, "_cum", tuple(cum))

    def signed_distance(self, p):
        return kernels.poly_sdf(self._vx, self._vy, self._nx, self._ny, self._off, p[0], p[1])

    def contains(self, p, tol=DEFAULT_BOUNDARY_TOL):
        h = kernels.poly_halfplane_max(self._nx, self._ny, self._off, p[0], p[1])
        if h <= 0.0:
            return True
        if h > tol:
            return False
        return self.signed_distance(p) <= tol

    def nearest_boundary_point(self, p):
        return kernels.poly_nearest(self._vx, self._vy, p[0], p[1])

    def max_fraction(self, p, u, tol=0.0):
        """Largest ``a`` in [0, 1] with ``p + a*u`` inside the region grown by ``tol``."""
        return kernels.poly_max_fraction(self._nx, self._ny, self._off, p[0], p[1], u[0], u[1], tol)

    @property
    def perimeter(self) -> float:
        return self._cum[-1]

    def boundary_point(self, s: float) -> Point:
        """Point at arclength ``s`` (mod perimeter) from vertex 0, counterclockwise."""
        s = s % self._cum[-1]
        n = len(self.vertices)
        for i in range(n):
            if s <= self._cum[i + 1] or i == n - 1:
                a, b = self.vertices[i], self.vertices[(i + 1) % n]
                seg = self._cum[i + 1] - self._cum[i]
                w = min(max((s - self._cum[i]) / seg, 0.0), 1.0)
                return (a[0] + w * (b[0] - a[0]), a[1] + w * (b[1] - a[1]))
        raise AssertionError("unreachable")

    def boundary_param(self, p) -> float:
        n = len(self.vertices)
        best, arg = math.inf, 0.0
        for i in range(n):
            a, b = self.vertices[i], self.vertices[(i + 1) % n]
            ex, ey = b[0] - a[0], b[1] - a[1]
            ll = ex * ex + ey * ey
            w = min(max(((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / ll, 0.0), 1.0)
            qx, qy = a[0] + w * ex, a[1] + w * ey
            dd = (qx - p[0]) ** 2 + (qy - p[1]) ** 2
            if dd < best:
                best, arg = dd, self._cum[i] + w * math.sqrt(ll)
        return arg

    def walk_boundary(self, p, arclen: float) -> Point:
        return self.boundary_point(self.boundary_param(p) + arclen)

    def boundary_points(self, n: int) -> list[Point]:
        per = self._cum[-1]
        return [self.boundary_point(per * k / n) for k in range(n)]

    def transformed(self, frame: Frame) -> "Polygon":
        return Polygon(tuple(frame.to_frame(v) for v in self.vertices))

    def to_dict(self) -> dict:
        return {"kind": "polygon", "vertices": [list(v) for v in self.vertices]}


@dataclass(frozen=True)
class Ellipse(ConvexRegion):
    """Filled ellipse; ``rotation`` is the angle of the first semi-axis."""

    center: Point = (0.0, 0.0)
    semi_axes: tuple[float, float] = (1.0, 1.0)
    rotation: float = 0.0
    kind = "ellipse"
    _cs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))
        a, b = float(self.semi_axes[0]), float(self.semi_axes[1])
        object.__setattr__(self, "semi_axes", (a, b))
        object.__setattr__(self, "rotation", float(self.rotation))
        if not (a > 0.0 and b > 0.0 and math.isfinite(a) and math.isfinite(b)):
            raise ConfigError(f"ellipse semi-axes must be positive and finite, got {(a, b)}")
        object.__setattr__(self, "_cs", (math.cos(self.rotation), math.sin(self.rotation)))

    def _local(self, p):
        c, s = self._cs
        dx = p[0] - self.center[0]
        dy = p[1] - self.center[1]
        return c * dx + s * dy, -s * dx + c * dy

    def _world(self, x, y):
        c, s = self._cs
        return (c * x - s * y + self.center[0], s * x + c * y + self.center[1])

    def _nearest_local(self, x, y):
        a, b = self.semi_axes
        qx, qy, it = kernels.ellipse_nearest(a, b, x, y)
        if it < 0:
            raise NumericError(
                "ellipse nearest-point solve did not converge",
                point=(x, y), semi_axes=(a, b), maxiter=kernels.ELLIPSE_MAXITER,
            )
        return qx, qy

    def signed_distance(self, p):
        a, b = self.semi_axes
        x, y = self._local(p)
        qx, qy = self._nearest_local(x, y)
        dist = math.hypot(x - qx, y - qy)
        return -dist if kernels.ellipse_level(a, b, x, y) <= 1.0 else dist

    def contains(self, p, tol=DEFAULT_BOUNDARY_TOL):
        a, b = self.semi_axes
        x, y = self._local(p)
        lev = kernels.ellipse_level(a, b, x, y)
        if lev <= 1.0:
            return True
        if tol <= 0.0:
            return False
        grow = 1.0 + tol / min(a, b)
        if lev > grow * grow:
            return False
        qx, qy = self._nearest_local(x, y)
        return math.hypot(x - qx, y - qy) <= tol

    def nearest_boundary_point(self, p):
        x, y = self._local(p)
        return self._world(*self._nearest_local(x, y))

    def max_fraction(self, p, u, tol=0.0):
        # the ellipse with both semi-axes grown by tol lies within distance tol of this one
        a, b = self.semi_axes
        a += tol
        b += tol
        c, s = self._cs
        x, y = self._local(p)
        return kernels.ellipse_max_fraction(a, b, x, y, c * u[0] + s * u[1], -s * u[0] + c * u[1])

    def boundary_point(self, phi: float) -> Point:
        a, b = self.semi_axes
        return self._world(a * math.cos(phi), b * math.sin(phi))

    def boundary_param(self, p) -> float:
        a, b = self.semi_axes
        x, y = self._local(p)
        return math.atan2(y / b, x / a)

    def walk_boundary(self, p, arclen: float) -> Point:
        a, b = self.semi_axes
        phi = self.boundary_param(p)
        speed = math.hypot(a * math.sin(phi), b * math.cos(phi))
        return self.boundary_point(phi + arclen / speed)

    def boundary_points(self, n: int) -> list[Point]:
        return [self.boundary_point(2.0 * math.pi * k / n) for k in range(n)]

    def transformed(self, frame: Frame) -> "Ellipse":
        return Ellipse(frame.to_frame(self.center), self.semi_axes, self.rotation + frame.rotation)

    def to_dict(self) -> dict:
        return {
            "kind": "ellipse",
            "center": list(self.center),
            "semi_axes": list(self.semi_axes),
            "rotation": self.rotation,
        }


def region_from_dict(spec: dict) -> ConvexRegion:
    kind = spec.get("kind")
    try:
        if kind == "polygon":
            return Polygon(tuple(tuple(v) for v in spec["vertices"]))
        if kind == "ellipse":
            return Ellipse(
                tuple(spec.get("center", (0.0, 0.0))),
                tuple(spec["semi_axes"]),
                float(spec.get("rotation", 0.0)),
            )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed {kind} region: {exc}") from exc
    raise ConfigError(f"unknown region kind {kind!r}")


def _lex_pair(p: Point, q: Point) -> tuple[Point, Point]:
    return (p, q) if p <= q else (q, p)


def _antipodal_pairs(verts: Sequence[Point]):
    """Antipodal vertex index pairs of a CCW convex polygon (rotating calipers)."""
    n = len(verts)

    def edge_turn(i, j):
        # > 0 while advancing j moves it away from edge i
        ax, ay = verts[(i + 1) % n][0] - verts[i][0], verts[(i + 1) % n][1] - verts[i][1]
        bx, by = verts[(j + 1) % n][0] - verts[j][0], verts[(j + 1) % n][1] - verts[j][1]
        return ax * by - ay * bx

    j = 1
    for i in range(n):
        i1 = (i + 1) % n
        if j == i:
            j = i1
        while edge_turn(i, j) > 0.0:
            j = (j + 1) % n
        yield i, j
        yield i1, j
        if edge_turn(i, j) == 0.0:
            yield i, (j + 1) % n
            yield i1, (j + 1) % n


def diameter(region: ConvexRegion) -> tuple[float, tuple[Point, Point]]:
    """Diameter of the region and a witnessing pair, lexicographically ordered.

    Among several diametral pairs the one whose first point is smallest by
    (x, y) is returned.
    """
    if isinstance(region, Ellipse):
        a, b = region.semi_axes
        c, s = region._cs
        if a >= b:
            ux, uy, r = c, s, a
        else:
            ux, uy, r = -s, c, b
        cx, cy = region.center
        pair = _lex_pair((cx - r * ux, cy - r * uy), (cx + r * ux, cy + r * uy))
        return 2.0 * r, pair
    if isinstance(region, Polygon):
        verts = region.vertices
        cands = []
        best = -1.0
        for i, j in _antipodal_pairs(verts):
            if i == j:
                continue
            dx = verts[j][0] - verts[i][0]
            dy = verts[j][1] - verts[i][1]
            dd = dx * dx + dy * dy
            cands.append((dd, i, j))
            if dd > best:
                best = dd
        ties = [_lex_pair(verts[i], verts[j]) for dd, i, j in cands if dd >= best * (1.0 - DIAMETER_TIE_RTOL)]
        return math.sqrt(best), min(ties)
    raise ConfigError(f"unsupported region {type(region).__name__}")


def diameter_bruteforce(region: Polygon) -> float:
    """O(n^2) vertex-pair maximum; the oracle for the calipers routine."""
    verts = region.vertices
    best = 0.0
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            dx = verts[j][0] - verts[i][0]
            dy = verts[j][1] - verts[i][1]
            best = max(best, dx * dx + dy * dy)
    return math.sqrt(best)


def diametral_frame(region: ConvexRegion) -> Frame:
    d, (p, q) = diameter(region)
    if not d > 0.0:
        raise ConfigError("region has zero diameter")
    origin = (0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]))
    return Frame(origin, -math.atan2(q[1] - p[1], q[0] - p[0]))


def max_ordinate(region: ConvexRegion, frame: Frame) -> float:
    """Largest |eta| over the region expressed in ``frame``."""
    if isinstance(region, Polygon):
        return max(abs(frame.to_frame(v)[1]) for v in region.vertices)
    if isinstance(region, Ellipse):
        a, b = region.semi_axes
        phi = region.rotation + frame.rotation
        cy = frame.to_frame(region.center)[1]
        return abs(cy) + math.hypot(a * math.sin(phi), b * math.cos(phi))
    raise ConfigError(f"unsupported region {type(region).__name__}")


def region_metrics(region: ConvexRegion) -> RegionMetrics:
    d, pair = diameter(region)
    frame = diametral_frame(region)
    return RegionMetrics(d, pair, max_ordinate(region, frame), frame)


def contains(region: ConvexRegion, p: Sequence[float], tol: float = DEFAULT_BOUNDARY_TOL) -> bool:
    return region.contains(p, tol)


def project(region: ConvexRegion, p: Sequence[float]) -> Point:
    return region.project(p)


def on_boundary(region: ConvexRegion, p: Sequence[float], tol: float = DEFAULT_BOUNDARY_TOL) -> bool:
    return region.on_boundary(p, tol)
