import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thickknot import (BadParameter, DegenerateEdge, SelfIntersecting, TooFewVertices,
                       arc_distance, build_knot, make_circle, make_torus_knot, mirror,
                       perturb, point_at, scale_knot)
from thickknot.geometry import locate, min_nonadjacent_distance, segment_closest_points


def test_square_tables(square):
    assert square.n == 4
    assert square.total_length == 4.0
    np.testing.assert_array_equal(square.arc_prefix, [0, 1, 2, 3, 4])
    np.testing.assert_array_equal(square.edge_lengths, 1.0)


def test_knot_is_immutable(square):
    with pytest.raises(ValueError):
        square.vertices[0, 0] = 5.0
    with pytest.raises(AttributeError):
        square.name = "other"


@pytest.mark.parametrize("verts,exc", [
    ([[0, 0, 0], [1, 0, 0]], TooFewVertices),
    ([[0, 0, 0], [1, 0, 0], [1, 0, 0]], DegenerateEdge),
    ([[0, 0, 0], [1, 0, 0], [2, 0, 0]], SelfIntersecting),
    ([[0, 0, 0], [1, 0, 0], [np.nan, 1, 0]], BadParameter),
    ([[0, 0], [1, 0], [1, 1]], BadParameter),
])
def test_build_knot_rejects(verts, exc):
    with pytest.raises(exc):
        build_knot(verts)


def test_figure_eight_polygon_is_not_simple():
    # bow-tie: edges 0 and 2 cross at the origin
    with pytest.raises(SelfIntersecting):
        build_knot([[-1, -1, 0], [1, 1, 0], [1, -1, 0], [-1, 1, 0]])


def test_point_at_square(square):
    p = point_at(square, 0.5)
    np.testing.assert_allclose(p.position, [0.5, 0, 0])
    assert p.edge_index == 0
    np.testing.assert_array_equal(point_at(square, 4.0).position, point_at(square, 0.0).position)
    np.testing.assert_allclose(point_at(square, -0.5).position, point_at(square, 3.5).position)


def test_point_at_vertices_exact(trefoil):
    for i in (0, 1, 100, 511):
        np.testing.assert_array_equal(point_at(trefoil, trefoil.arc_prefix[i]).position,
                                      trefoil.vertices[i])


def test_arc_distance_examples():
    L = 2 * math.pi
    assert arc_distance(L, 0, math.pi) == pytest.approx(math.pi)
    assert arc_distance(L, 0, 1.5 * math.pi) == pytest.approx(math.pi / 2)
    assert arc_distance(L, 1.3, 1.3) == 0.0


@settings(max_examples=200, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50), st.floats(-50, 50), st.floats(0.5, 20))
def test_arc_distance_is_a_metric(s, t, u, L):
    d = lambda a, b: arc_distance(L, a, b)
    assert 0 <= d(s, t) <= L / 2 + 1e-12
    assert d(s, t) == pytest.approx(d(t, s), abs=1e-12)
    assert d(s, u) <= d(s, t) + d(t, u) + 1e-9


def test_make_circle_examples():
    sq = make_circle(1.0, 4)
    assert sq.total_length == pytest.approx(4 * math.sqrt(2), rel=1e-15)
    assert make_circle(1.0, 4096).total_length == pytest.approx(2 * math.pi, rel=1e-6)
    with pytest.raises(BadParameter):
        make_circle(1.0, 2)
    with pytest.raises(BadParameter):
        make_circle(0.0, 8)


@pytest.mark.parametrize("n", [3, 7, 64, 512, 1000])
def test_circle_vertices_on_circle(n):
    c = make_circle(2.5, n)
    np.testing.assert_allclose(np.linalg.norm(c.vertices, axis=1), 2.5, rtol=0, atol=1e-12)
    np.testing.assert_allclose(c.edge_lengths, 5 * math.sin(math.pi / n), rtol=1e-12)


def test_torus_knot_examples():
    k = make_torus_knot(2, 3, 2, 1, 512)
    assert k.n == 512
    assert min_nonadjacent_distance(k.vertices)[0] > 1e-9 * k.diameter
    with pytest.raises(BadParameter):
        make_torus_knot(2, 4)
    with pytest.raises(BadParameter):
        make_torus_knot(2, 3, major=1, minor=1)


def test_coarse_torus_knot_outcomes():
    # frozen from the simplicity check: n=8 is simple, n=6 puts two edges on the axis
    k = make_torus_knot(2, 3, 2, 1, 8)
    assert min_nonadjacent_distance(k.vertices)[0] / k.diameter == pytest.approx(0.0736, abs=1e-3)
    with pytest.raises(SelfIntersecting):
        make_torus_knot(2, 3, 2, 1, 6)


def test_generators_deterministic():
    a = make_torus_knot(2, 5, n=256).vertices
    b = make_torus_knot(2, 5, n=256).vertices
    assert a.tobytes() == b.tobytes()


def test_perturb():
    c = make_circle(1.0, 256)
    assert perturb(c, 0.0, 3).vertices.tobytes() == c.vertices.tobytes()
    a, b = perturb(c, 0.05, 7), perturb(c, 0.05, 7)
    assert a.vertices.tobytes() == b.vertices.tobytes()
    disp = np.linalg.norm(a.vertices - c.vertices, axis=1)
    assert disp.max() == pytest.approx(0.05, rel=1e-12)
    assert abs(a.total_length / (2 * math.pi) - 1) < 0.05
    assert perturb(c, 0.05, 8).vertices.tobytes() != a.vertices.tobytes()


def test_perturb_rejects_negative_amplitude():
    with pytest.raises(BadParameter):
        perturb(make_circle(1.0, 64), -1.0, 0)


def test_scale_and_mirror(trefoil):
    s = scale_knot(trefoil, 3.0)
    assert s.total_length == pytest.approx(3 * trefoil.total_length, rel=1e-14)
    m = mirror(trefoil)
    np.testing.assert_array_equal(m.vertices[:, 2], -trefoil.vertices[:, 2])


def test_segment_closest_points_against_brute_force():
    rng = np.random.default_rng(1)
    t = np.linspace(0, 1, 401)
    for _ in range(20):
        p0, p1, q0, q1 = rng.normal(size=(4, 3))
        u, v, d = segment_closest_points(p0, p1, q0, q1)
        P = p0 + t[:, None] * (p1 - p0)
        Q = q0 + t[:, None] * (q1 - q0)
        brute = np.linalg.norm(P[:, None] - Q[None], axis=2).min()
        assert d <= brute + 1e-12
        assert d >= brute - 1e-2
        assert np.linalg.norm(p0 + u * (p1 - p0) - q0 - v * (q1 - q0)) == pytest.approx(d)


def test_locate_vectorised(square):
    s, pos, edge = locate(square, np.array([0.25, 1.5, 3.75, 4.25]))
    np.testing.assert_allclose(s, [0.25, 1.5, 3.75, 0.25])
    np.testing.assert_array_equal(edge, [0, 1, 3, 0])
    np.testing.assert_allclose(pos[1], [1, 0.5, 0])
