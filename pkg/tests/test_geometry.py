from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tir import geometry as geo

SQUARE = ((0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0))
BOWTIE = ((0.0, 0.0), (2.0, 2.0), (2.0, 0.0), (0.0, 2.0))


def test_signed_area_orientation():
    assert geo.signed_area(SQUARE) == pytest.approx(4.0)
    assert geo.signed_area(SQUARE[::-1]) == pytest.approx(-4.0)
    assert geo.is_ccw(SQUARE)
    assert not geo.is_ccw(SQUARE[::-1])


def test_polygon_area_triangle():
    tri = ((0.0, 0.0), (3.0, 0.0), (0.0, 4.0))
    assert geo.polygon_area(tri) == pytest.approx(6.0)
    assert geo.perimeter(tri) == pytest.approx(12.0)


def test_edge_vectors_and_lengths_close_the_loop():
    vecs = geo.edge_vectors(SQUARE)
    assert vecs.shape == (4, 2)
    assert np.allclose(vecs.sum(axis=0), 0.0)
    assert np.allclose(geo.edge_lengths(SQUARE), 2.0)


def test_point_on_edge_midpoint_and_wraparound():
    assert geo.point_on_edge(SQUARE, 0, 0.5) == pytest.approx((1.0, 0.0))
    assert geo.point_on_edge(SQUARE, 3, 1.0) == pytest.approx((0.0, 0.0))
    assert geo.point_on_edge(SQUARE, 4, 0.25) == pytest.approx((0.5, 0.0))


def test_simple_polygon_detects_self_intersection():
    assert geo.is_simple_polygon(SQUARE)
    assert not geo.is_simple_polygon(BOWTIE)
    assert not geo.is_simple_polygon(((0.0, 0.0), (1.0, 0.0)))
    repeated = ((0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 1.0))
    assert not geo.is_simple_polygon(repeated)


def test_rotate_about_point():
    out = geo.rotate([(2.0, 1.0)], 90.0, about=(1.0, 1.0))
    assert out[0] == pytest.approx((1.0, 2.0))


def test_translate_and_bounding_box():
    moved = geo.translate(SQUARE, 3.0, -1.0)
    assert geo.bounding_box(moved) == pytest.approx((3.0, -1.0, 5.0, 1.0))


def test_resample_segment_endpoints_and_spacing():
    pts = geo.resample_segment((0.0, 0.0), (1.0, 2.0), 5)
    assert pts.shape == (5, 2)
    assert pts[0] == pytest.approx((0.0, 0.0))
    assert pts[-1] == pytest.approx((1.0, 2.0))
    steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    assert np.allclose(steps, steps[0])
    with pytest.raises(ValueError):
        geo.resample_segment((0.0, 0.0), (1.0, 0.0), 1)


def test_angle_difference_is_bidirectional():
    assert geo.angle_difference_deg(0.0, 179.0) == pytest.approx(1.0)
    assert geo.angle_difference_deg(90.0, 270.0) == pytest.approx(0.0)
    assert geo.angle_difference_deg(10.0, 350.0, period=360.0) == pytest.approx(20.0)


def test_as_array_rejects_bad_shapes():
    with pytest.raises(ValueError):
        geo.as_array([1.0, 2.0, 3.0])


@given(
    st.floats(-50.0, 50.0),
    st.floats(-50.0, 50.0),
    st.floats(0.0, 360.0),
)
def test_area_invariant_under_rigid_motion(dx, dy, deg):
    moved = geo.translate(geo.rotate(SQUARE, deg), dx, dy)
    assert geo.polygon_area(moved) == pytest.approx(4.0, rel=1e-9)


@given(st.floats(0.0, 359.99), st.floats(0.0, 359.99))
def test_angle_difference_symmetric_and_bounded(a, b):
    d = geo.angle_difference_deg(a, b)
    assert 0.0 <= d <= 90.0 + 1e-9
    assert d == pytest.approx(geo.angle_difference_deg(b, a), abs=1e-9)
