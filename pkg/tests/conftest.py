import math
import random

import pytest

from coordpursuit import _kernels_py, kernels
from coordpursuit.geometry import Polygon

KERNEL_NAMES = [n for n in kernels.__all__ if n not in ("BACKEND", "ELLIPSE_MAXITER")]

try:
    from coordpursuit import _kernels as _compiled
except ImportError:  # pragma: no cover - depends on the build
    _compiled = None


@pytest.fixture(params=["compiled", "python"])
def backend(request, monkeypatch):
    """Run a test once per kernel backend."""
    if request.param == "compiled":
        if _compiled is None:
            pytest.skip("compiled kernels not built")
        impl = _compiled
    else:
        impl = _kernels_py
    for name in KERNEL_NAMES:
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    return request.param


def convex_hull(points):
    pts = sorted(set(points))
    if len(pts) < 3:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def random_polygon(rng: random.Random, n_points: int = 12) -> Polygon:
    """Convex hull of uniform points; retried until it is a valid polygon."""
    while True:
        pts = [(rng.uniform(-3, 3), rng.uniform(-2, 2)) for _ in range(n_points)]
        hull = convex_hull(pts)
        if len(hull) < 3:
            continue
        try:
            return Polygon(tuple(hull))
        except ValueError:
            continue


def regular_polygon(n: int, r: float = 1.0, phase: float = 0.0) -> Polygon:
    return Polygon(tuple((r * math.cos(phase + 2 * math.pi * k / n), r * math.sin(phase + 2 * math.pi * k / n))
                         for k in range(n)))
