import math
from array import array

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coordpursuit import _kernels_py as py
from coordpursuit import kernels

compiled = pytest.importorskip("coordpursuit._kernels")

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
tiny_or_finite = finite | st.floats(1e-300, 1e-10) | st.floats(-1e-10, -1e-300)
positive = st.floats(0.05, 20, allow_nan=False)


def square_arrays():
    # unit square, outward normals and offsets
    nx = array("d", [0.0, 1.0, 0.0, -1.0])
    ny = array("d", [-1.0, 0.0, 1.0, 0.0])
    off = array("d", [0.0, 1.0, 1.0, 0.0])
    vx = array("d", [0.0, 1.0, 1.0, 0.0])
    vy = array("d", [0.0, 0.0, 1.0, 1.0])
    return vx, vy, nx, ny, off


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")


@settings(max_examples=300, deadline=None)
@given(finite, finite, finite, finite)
def test_polygon_kernels_agree(px, py_, ux, uy):
    vx, vy, nx, ny, off = square_arrays()
    # the backends may differ in the last bit (C sqrt versus math.hypot)
    close = dict(rel=1e-13, abs=1e-13)
    assert compiled.poly_halfplane_max(nx, ny, off, px, py_) == pytest.approx(py.poly_halfplane_max(nx, ny, off, px, py_), **close)
    assert compiled.poly_nearest(vx, vy, px, py_) == pytest.approx(py.poly_nearest(vx, vy, px, py_), **close)
    assert compiled.poly_sdf(vx, vy, nx, ny, off, px, py_) == pytest.approx(py.poly_sdf(vx, vy, nx, ny, off, px, py_), **close)
    assert compiled.poly_max_fraction(nx, ny, off, px, py_, ux, uy) == pytest.approx(
        py.poly_max_fraction(nx, ny, off, px, py_, ux, uy), **close
    )


@settings(max_examples=300, deadline=None)
@given(positive, positive, tiny_or_finite, tiny_or_finite, finite, finite)
def test_ellipse_kernels_agree(a, b, x, y, ux, uy):
    assert compiled.ellipse_level(a, b, x, y) == py.ellipse_level(a, b, x, y)
    c = compiled.ellipse_nearest(a, b, x, y)
    p = py.ellipse_nearest(a, b, x, y)
    assert c[2] == p[2]
    assert c[0] == pytest.approx(p[0], abs=1e-12, rel=1e-12)
    assert c[1] == pytest.approx(p[1], abs=1e-12, rel=1e-12)
    assert compiled.ellipse_max_fraction(a, b, x, y, ux, uy) == pytest.approx(
        py.ellipse_max_fraction(a, b, x, y, ux, uy), abs=1e-12
    )


@settings(max_examples=300, deadline=None)
@given(finite, finite, finite, finite, finite, finite)
def test_event_kernels_agree(g0, g1, dx0, dy0, dx1, dy1):
    assert compiled.crossing_fraction(g0, g1) == py.crossing_fraction(g0, g1)
    assert compiled.capture_fraction(dx0, dy0, dx1, dy1, 0.5) == pytest.approx(
        py.capture_fraction(dx0, dy0, dx1, dy1, 0.5), rel=1e-12, abs=1e-12
    )


@pytest.mark.parametrize("impl", [py, compiled], ids=["python", "compiled"])
def test_crossing_fraction_examples(impl):
    assert impl.crossing_fraction(0.3, -0.1) == pytest.approx(0.75)
    assert impl.crossing_fraction(0.0, 1.0) == 0.0
    assert impl.crossing_fraction(0.2, 0.1) < 0.0


@pytest.mark.parametrize("impl", [py, compiled], ids=["python", "compiled"])
def test_capture_fraction_examples(impl):
    assert impl.capture_fraction(0.0, 0.0, 1.0, 1.0, 1e-6) == 0.0
    # relative position moves from (2, 0) to (-2, 0): within 0.5 at s = 1.5/4
    assert impl.capture_fraction(2.0, 0.0, -2.0, 0.0, 0.5) == pytest.approx(0.375)
    # passes at distance 1 from the origin
    assert impl.capture_fraction(-1.0, 1.0, 1.0, 1.0, 0.5) < 0.0


@pytest.mark.parametrize("impl", [py, compiled], ids=["python", "compiled"])
def test_ellipse_nearest_hits_curve(impl):
    for x, y in [(10.0, 0.0), (0.0, 5.0), (1.0, 1.0), (-4.0, 3.0), (0.0, 0.0), (2.9, 0.0)]:
        qx, qy, it = impl.ellipse_nearest(3.0, 2.0, x, y)
        assert it >= 0
        assert (qx / 3.0) ** 2 + (qy / 2.0) ** 2 == pytest.approx(1.0, abs=1e-10)
    qx, qy, _ = impl.ellipse_nearest(3.0, 2.0, 10.0, 0.0)
    assert (qx, qy) == pytest.approx((3.0, 0.0))


@pytest.mark.parametrize("impl", [py, compiled], ids=["python", "compiled"])
@pytest.mark.parametrize("y", [1e-300, 1e-200, 1e-129, 1e-20, 1e-9])
@pytest.mark.parametrize("x", [0.2, 1.0, 1.4999, 1.5, 1.9, 5.0])
def test_ellipse_nearest_near_major_axis(impl, x, y):
    # a=2, b=1: the evolute cusp sits at x = (a^2 - b^2)/a = 1.5
    qx, qy, it = impl.ellipse_nearest(2.0, 1.0, x, y)
    assert 0 <= it <= kernels.ELLIPSE_MAXITER
    assert (qx / 2.0) ** 2 + qy**2 == pytest.approx(1.0, abs=1e-10)
    ref = py.ellipse_nearest(2.0, 1.0, x, 0.0)
    # continuous in y away from the cusp
    if abs(x - 1.5) > 1e-3:
        assert qx == pytest.approx(ref[0], abs=1e-6)
        assert abs(qy) == pytest.approx(abs(ref[1]), abs=1e-6)


def test_polygon_max_fraction_tolerance_band():
    _, _, nx, ny, off = square_arrays()
    # a hair above the top edge, drifting outward very slowly: stuck without a band, free with one
    assert py.poly_max_fraction(nx, ny, off, 0.5, 1.0 + 1e-15, 0.1, 1e-12) == 0.0
    assert py.poly_max_fraction(nx, ny, off, 0.5, 1.0 + 1e-15, 0.1, 1e-12, 1e-9) == 1.0
    assert compiled.poly_max_fraction(nx, ny, off, 0.5, 1.0 + 1e-15, 0.1, 1e-12, 1e-9) == 1.0
    assert math.isclose(py.poly_max_fraction(nx, ny, off, 0.5, 0.5, 1.0, 0.0), 0.5)


def test_env_var_forces_fallback_with_same_golden_result():
    import json
    import os
    import subprocess
    import sys

    snippet = (
        "import json; from coordpursuit import kernels, scenario; from coordpursuit.engine import run; "
        "r = run(scenario.builtin('golden').config, 'idle')[1]; "
        "print(json.dumps([kernels.BACKEND, r.capturing_pursuer, r.capture_time]))"
    )
    out = {}
    for flag in ("0", "1"):
        env = dict(os.environ, COORDPURSUIT_PURE=flag)
        res = subprocess.run([sys.executable, "-c", snippet], env=env, capture_output=True, text=True, check=True)
        out[flag] = json.loads(res.stdout)
    assert out["1"][0] == "python"
    assert out["0"][1] == out["1"][1]
    assert out["0"][2] == pytest.approx(out["1"][2], rel=1e-12)
