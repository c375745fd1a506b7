import math

import numpy as np

from zermelo.geometry import polyline_self_intersections, refine_curve_intersection


def _figure_eight(u):
    # lissajous with exactly one transversal self-crossing at the origin
    return (math.sin(2.0 * u), math.sin(u))


def test_simple_crossing_detected():
    pts = np.array([[0.0, 0.0], [2.0, 2.0], [2.0, 0.0], [0.0, 2.0]])
    par = np.array([0.0, 1.0, 2.0, 3.0])
    hits = polyline_self_intersections(pts, par, min_param_gap=0.0)
    assert len(hits) == 1
    u1, u2, (x, y) = hits[0]
    assert 0.0 < u1 < 1.0 < 2.0 < u2 < 3.0
    assert math.isclose(x, 1.0) and math.isclose(y, 1.0)


def test_monotone_polyline_has_no_crossings():
    t = np.linspace(0.0, 3.0, 50)
    pts = np.column_stack((t, np.sin(t)))
    assert polyline_self_intersections(pts, t) == []


def test_adjacent_touch_is_not_a_crossing():
    # sharp corner: consecutive segments share a vertex but do not cross
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.1], [0.0, 0.2]])
    par = np.arange(4.0)
    assert polyline_self_intersections(pts, par) == []


def test_figure_eight_crossing_and_refinement():
    # origin passages at u = pi and u = 2*pi are both interior to this window
    u = np.linspace(0.5 * math.pi, 2.5 * math.pi, 400)
    pts = np.array([_figure_eight(v) for v in u])
    hits = polyline_self_intersections(pts, u)
    assert len(hits) == 1
    u1, u2, _ = hits[0]
    refined = refine_curve_intersection(
        _figure_eight, u1, u2, (float(u[0]), float(u[-1]))
    )
    assert refined is not None
    r1, r2, (x, y) = refined
    assert math.hypot(x, y) < 1e-9
    assert math.isclose(r1, math.pi, abs_tol=1e-7)
    assert math.isclose(r2, 2.0 * math.pi, abs_tol=1e-7)


def test_param_gap_filter():
    u = np.linspace(0.5 * math.pi, 2.5 * math.pi, 400)
    pts = np.array([_figure_eight(v) for v in u])
    assert polyline_self_intersections(pts, u, min_param_gap=10.0) == []
