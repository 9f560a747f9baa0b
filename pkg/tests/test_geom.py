import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpump.geom import (LinearMotion, Polygon, Workspace, argmin_linear_motions, disc_free,
                        dist_point_segment, dist_segment_segment, min_dist_linear_motions,
                        point_in_polygon, segments_intersect, sweep_free)

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
point = st.tuples(coord, coord)

SQUARE = Polygon(((0, 0), (4, 0), (4, 4), (0, 4)))
HOLE = Polygon(((1.5, 1.5), (2.5, 1.5), (2.5, 2.5), (1.5, 2.5)))
W = Workspace(SQUARE, (HOLE,))


def test_polygon_orientation_normalized():
    cw = Polygon(((0, 0), (0, 1), (1, 1), (1, 0)))
    assert cw.area == pytest.approx(1.0)


@pytest.mark.parametrize("verts", [((0, 0), (1, 1)), ((0, 0), (0, 0), (1, 1)),
                                   ((0, 0), (1, 0), (float("nan"), 1))])
def test_polygon_rejects_degenerate(verts):
    with pytest.raises(ValueError):
        Polygon(verts)


def test_bowtie_not_simple():
    assert not Polygon(((0, 0), (2, 2), (2, 0), (0, 2))).is_simple()
    assert SQUARE.is_simple()


def test_point_segment_distance():
    assert dist_point_segment((0, 1), (-1, 0), (1, 0)) == 1.0
    assert dist_point_segment((3, 4), (0, 0), (0, 0)) == 5.0
    assert dist_point_segment((2, 0), (-1, 0), (1, 0)) == 1.0


def test_segment_intersection_cases():
    assert segments_intersect((0, 0), (2, 2), (0, 2), (2, 0))
    assert segments_intersect((0, 0), (2, 0), (1, 0), (3, 0))  # collinear overlap
    assert segments_intersect((0, 0), (1, 0), (1, 0), (1, 1))  # shared endpoint
    assert not segments_intersect((0, 0), (1, 0), (2, 0), (3, 0))
    assert dist_segment_segment((0, 0), (1, 0), (0, 1), (1, 1)) == 1.0


def test_point_in_polygon_with_hole():
    assert point_in_polygon((1, 1), SQUARE)
    assert not point_in_polygon((5, 1), SQUARE)
    assert point_in_polygon((2, 2), HOLE)


def test_disc_free_contact_is_collision():
    assert disc_free((1, 1), 0.4, W)
    assert not disc_free((2, 2), 0.1, W)          # inside the obstacle
    assert not disc_free((0.5, 1), 0.5, W)        # touches the boundary
    assert disc_free((0.5, 1), 0.5 - 1e-9, W)
    assert not disc_free((-1, 1), 0.1, W)


def test_sweep_free_detects_pass_through_obstacle():
    assert sweep_free(LinearMotion((0.5, 0.5), (3.5, 0.5)), 0.3, W)
    assert not sweep_free(LinearMotion((0.5, 2), (3.5, 2)), 0.3, W)
    # grazing the hole corner at exactly the radius is contact
    assert not sweep_free(LinearMotion((1.0, 1.0), (3.0, 1.0)), 0.5, W)
    assert sweep_free(LinearMotion((1.0, 1.0), (3.0, 1.0)), 0.5 - 1e-9, W)


def test_linear_motion_helpers():
    m = LinearMotion((0, 0), (2, 0))
    assert m.at(0.5) == (1.0, 0.0)
    assert m.reversed() == LinearMotion((2, 0), (0, 0))
    assert m.length == 2.0


def test_head_on_motions_meet():
    a = LinearMotion((0, 0), (2, 0))
    b = LinearMotion((2, 0), (0, 0))
    assert min_dist_linear_motions(a, b) == 0.0
    assert argmin_linear_motions(a, b) == 0.5


def test_parallel_motions_keep_distance():
    a = LinearMotion((0, 0), (2, 0))
    b = LinearMotion((0, 1), (2, 1))
    assert min_dist_linear_motions(a, b) == 1.0


def test_crossing_paths_at_different_times_do_not_meet():
    # both paths pass through the origin but half a unit apart in time
    a = LinearMotion((-1, 0), (1, 0))
    b = LinearMotion((0, -2), (0, 0))
    d = min_dist_linear_motions(a, b)
    expected = min(math.hypot(-1 + 2 * t, -2 + 2 * t) for t in [i / 10000 for i in range(10001)])
    assert d == pytest.approx(expected, abs=1e-6)
    assert d > 0.5


@settings(max_examples=300, deadline=None)
@given(point, point, point, point)
def test_min_dist_matches_sampling(a0, a1, b0, b1):
    a, b = LinearMotion(a0, a1), LinearMotion(b0, b1)
    d = min_dist_linear_motions(a, b)
    sampled = min(math.dist(a.at(i / 2000), b.at(i / 2000)) for i in range(2001))
    assert d <= sampled + 1e-9
    t = argmin_linear_motions(a, b)
    assert math.dist(a.at(t), b.at(t)) == pytest.approx(d, abs=1e-7)


@settings(max_examples=300, deadline=None)
@given(point, point, point)
def test_point_segment_distance_is_minimum(p, a, b):
    d = dist_point_segment(p, a, b)
    sampled = min(math.dist(p, (a[0] + t / 500 * (b[0] - a[0]), a[1] + t / 500 * (b[1] - a[1])))
                  for t in range(501))
    assert d <= sampled + 1e-9
    assert d >= sampled - 0.05 * math.dist(a, b) - 1e-9


@settings(max_examples=200, deadline=None)
@given(point, point, point, point)
def test_segment_distance_symmetric(a1, b1, a2, b2):
    d1 = dist_segment_segment(a1, b1, a2, b2)
    d2 = dist_segment_segment(a2, b2, a1, b1)
    assert d1 == pytest.approx(d2, abs=1e-12)
    if segments_intersect(a1, b1, a2, b2):
        assert d1 == 0.0
