import math
import random

import pytest

from coordpursuit.errors import ConfigError, NumericError
from coordpursuit.geometry import (
    Ellipse,
    Frame,
    Polygon,
    contains,
    diameter,
    diameter_bruteforce,
    diametral_frame,
    max_ordinate,
    on_boundary,
    project,
    region_from_dict,
    region_metrics,
)

from conftest import random_polygon, regular_polygon

SQUARE = Polygon(((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)))
ELLIPSE = Ellipse((0.0, 0.0), (3.0, 2.0), 0.0)


def test_ellipse_diameter_and_ordinate(backend):
    d, pair = diameter(ELLIPSE)
    assert d == 6.0
    assert pair == ((-3.0, 0.0), (3.0, 0.0))
    frame = diametral_frame(ELLIPSE)
    assert frame.rotation == 0.0
    assert frame.origin == (0.0, 0.0)
    assert max_ordinate(ELLIPSE, frame) == 2.0


def test_square_diagonal(backend):
    d, pair = diameter(SQUARE)
    assert d == pytest.approx(math.sqrt(2.0), abs=1e-15)
    assert pair == ((0.0, 0.0), (1.0, 1.0))
    assert max_ordinate(SQUARE, diametral_frame(SQUARE)) == pytest.approx(math.sqrt(2.0) / 2.0, abs=1e-15)


def test_rotated_ellipse_frame(backend):
    e = Ellipse((1.0, -2.0), (3.0, 2.0), math.radians(30.0))
    frame = diametral_frame(e)
    assert frame.rotation == pytest.approx(-math.radians(30.0), abs=1e-15)
    _, (p, q) = diameter(e)
    pf, qf = frame.to_frame(p), frame.to_frame(q)
    assert pf == pytest.approx((-3.0, 0.0), abs=1e-12)
    assert qf == pytest.approx((3.0, 0.0), abs=1e-12)


def test_tall_ellipse_uses_second_axis():
    e = Ellipse((0.0, 0.0), (1.0, 4.0), 0.0)
    d, pair = diameter(e)
    assert d == 8.0
    assert pair == ((0.0, -4.0), (0.0, 4.0))
    assert max_ordinate(e, diametral_frame(e)) == pytest.approx(1.0)


def test_calipers_match_bruteforce():
    rng = random.Random(7)
    for _ in range(300):
        poly = random_polygon(rng, rng.randint(3, 30))
        d, (p, q) = diameter(poly)
        assert d == diameter_bruteforce(poly)
        assert math.sqrt((q[0] - p[0]) ** 2 + (q[1] - p[1]) ** 2) == d


def test_regular_polygons_have_tied_pairs():
    # every long diagonal of a regular hexagon is diametral; the lexicographic pair wins
    hexagon = regular_polygon(6)
    d, pair = diameter(hexagon)
    assert d == pytest.approx(2.0)
    assert pair[0] == min(hexagon.vertices)


def test_random_polygon_frame_puts_pair_on_axis(backend):
    rng = random.Random(11)
    for _ in range(100):
        poly = random_polygon(rng)
        _, (p, q) = diameter(poly)
        frame = diametral_frame(poly)
        assert abs(frame.to_frame(p)[1]) <= 1e-10
        assert abs(frame.to_frame(q)[1]) <= 1e-10


def test_frame_round_trip_and_isometry():
    rng = random.Random(3)
    for _ in range(200):
        f = Frame((rng.uniform(-5, 5), rng.uniform(-5, 5)), rng.uniform(-math.pi, math.pi))
        a = (rng.uniform(-10, 10), rng.uniform(-10, 10))
        b = (rng.uniform(-10, 10), rng.uniform(-10, 10))
        back = f.from_frame(f.to_frame(a))
        assert abs(back[0] - a[0]) <= 1e-12 and abs(back[1] - a[1]) <= 1e-12
        assert abs(math.dist(f.to_frame(a), f.to_frame(b)) - math.dist(a, b)) <= 1e-12


def test_max_ordinate_bounds_boundary_samples(backend):
    rng = random.Random(5)
    regions = [random_polygon(rng) for _ in range(10)]
    regions += [Ellipse((rng.uniform(-1, 1), rng.uniform(-1, 1)), (rng.uniform(0.5, 3), rng.uniform(0.5, 3)),
                        rng.uniform(0, math.pi)) for _ in range(10)]
    for region in regions:
        m = region_metrics(region)
        samples = [abs(m.frame.to_frame(p)[1]) for p in region.boundary_points(2000)]
        assert max(samples) <= m.c + 1e-6
        # and the bound is attained up to sampling resolution
        assert max(samples) >= m.c - 1e-2 * m.d
        assert 0.0 <= m.c <= m.d


def test_diametral_points_on_boundary(backend):
    rng = random.Random(2)
    for region in [ELLIPSE, SQUARE, *[random_polygon(rng) for _ in range(20)]]:
        _, (p, q) = diameter(region)
        assert on_boundary(region, p, 1e-9)
        assert on_boundary(region, q, 1e-9)


def test_contains_and_boundary_basics(backend):
    assert contains(ELLIPSE, (0.0, 0.0), 1e-7)
    assert not on_boundary(ELLIPSE, (0.0, 0.0), 1e-7)
    assert on_boundary(ELLIPSE, (3.0, 0.0), 1e-7)
    assert not contains(ELLIPSE, (3.1, 0.0), 1e-7)
    assert contains(ELLIPSE, (3.0 + 5e-8, 0.0), 1e-7)
    assert not contains(ELLIPSE, (3.0 + 5e-8, 0.0), 0.0)
    assert contains(SQUARE, (0.5, 0.5), 0.0)
    assert on_boundary(SQUARE, (1.0, 0.3), 1e-9)
    assert not contains(SQUARE, (1.0 + 1e-6, 0.3), 1e-7)


def test_project_examples(backend):
    assert project(ELLIPSE, (10.0, 0.0)) == pytest.approx((3.0, 0.0))
    assert project(SQUARE, (2.0, 0.5)) == pytest.approx((1.0, 0.5))
    assert project(SQUARE, (2.0, 2.0)) == pytest.approx((1.0, 1.0))
    for p in [(0.1, 0.2), (-1.0, 1.5), (2.9, 0.0)]:
        assert project(ELLIPSE, p) == p


def _probe_optimal(region, p, q, n=1000):
    """No boundary point near q along the boundary is closer to p."""
    r = math.dist(p, q)
    for k in range(n):
        phi = 2.0 * math.pi * k / n
        cand = (q[0] + 1e-3 * math.cos(phi), q[1] + 1e-3 * math.sin(phi))
        if region.contains(cand, 0.0) and math.dist(p, cand) < r - 1e-9:
            return False
    return True


def test_project_exterior_points_are_optimal(backend):
    rng = random.Random(13)
    regions = [ELLIPSE, Ellipse((1.0, 1.0), (0.5, 2.5), 1.1), SQUARE, random_polygon(rng)]
    for region in regions:
        for _ in range(10):
            ang = rng.uniform(0, 2 * math.pi)
            p = (8 * math.cos(ang), 8 * math.sin(ang))
            q = project(region, p)
            assert region.contains(q, 1e-9)
            assert _probe_optimal(region, p, q)


def test_project_matches_dense_sampling(backend):
    e = Ellipse((0.5, -0.5), (2.0, 0.7), 0.4)
    pts = e.boundary_points(200000)
    rng = random.Random(17)
    for _ in range(20):
        p = (rng.uniform(-5, 5), rng.uniform(-5, 5))
        if e.contains(p, 0.0):
            continue
        q = project(e, p)
        best = min(math.dist(p, s) for s in pts)
        assert math.dist(p, q) <= best + 1e-9


def test_invalid_polygons():
    with pytest.raises(ConfigError):
        Polygon(((0, 0), (1, 0)))
    with pytest.raises(ConfigError):
        Polygon(((0, 0), (0, 1), (1, 0)))  # clockwise
    with pytest.raises(ConfigError):
        Polygon(((0, 0), (1, 0), (2, 0), (1, 1)))  # collinear triple
    with pytest.raises(ConfigError):
        Polygon(((0, 0), (1, 0), (1, 1), (1, 1 + 1e-13), (0, 1)))
    with pytest.raises(ConfigError):
        Ellipse((0, 0), (0.0, 1.0))
    with pytest.raises(ConfigError):
        region_from_dict({"kind": "circle"})


def test_zero_diameter_rejected(monkeypatch):
    import coordpursuit.geometry as g

    monkeypatch.setattr(g, "diameter", lambda region: (0.0, ((0.0, 0.0), (0.0, 0.0))))
    with pytest.raises(ConfigError):
        g.diametral_frame(SQUARE)


def test_projection_nonconvergence_reports(monkeypatch):
    from coordpursuit import kernels

    monkeypatch.setattr(kernels, "ellipse_nearest", lambda a, b, x, y: (0.0, 0.0, -1))
    with pytest.raises(NumericError) as info:
        ELLIPSE.project((10.0, 1.0))
    assert "maxiter" in info.value.diagnostics


def test_region_dict_round_trip():
    for region in [ELLIPSE, SQUARE, Ellipse((1, 2), (3, 1), 0.5)]:
        assert region_from_dict(region.to_dict()) == region


def test_walk_boundary_stays_on_boundary(backend):
    for region in [ELLIPSE, regular_polygon(7, 2.0)]:
        p = region.nearest_boundary_point((10.0, 0.3))
        for _ in range(50):
            p = region.walk_boundary(p, 0.37)
            assert region.on_boundary(p, 1e-7)
