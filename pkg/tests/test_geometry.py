import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from lanekit.geometry import (
    circumradius,
    dedupe_consecutive,
    length,
    offset_frames,
    offset_with_frames,
    project_to_polyline,
    resample_fractions,
    slice_by_station,
    stations,
    wrap_deg,
)


def test_stations_cumulative():
    assert stations([[0, 0], [3, 4], [3, 14]]).tolist() == [0.0, 5.0, 15.0]


def test_dedupe_keeps_first():
    pts = dedupe_consecutive([[0, 0], [0, 0], [1, 0], [1, 0], [2, 0]])
    assert pts == [[0, 0], [1, 0], [2, 0]]


def test_slice_inserts_cut_points():
    pts = slice_by_station([[0, 0], [10, 0]], 2.5, 7.5)
    assert pts == [[2.5, 0.0], [7.5, 0.0]]
    pts = slice_by_station([[0, 0], [5, 0], [10, 0]], 2.5, 7.5)
    assert pts == [[2.5, 0.0], [5.0, 0.0], [7.5, 0.0]]


def test_project_restricted_to_band():
    line = [[0.0, 0.0], [10.0, 0.0]]
    full = project_to_polyline([2.0, 1.0], line)
    assert full[0] == pytest.approx(1.0)
    assert full[1] == pytest.approx(2.0)
    banded = project_to_polyline([2.0, 1.0], line, s_min=4.0, s_max=8.0)
    assert banded[1] == pytest.approx(4.0)  # clamped to the band edge
    assert banded[0] == pytest.approx(math.hypot(4.0 - 2.0, 1.0))
    assert project_to_polyline([2.0, 1.0], line, s_min=8.0, s_max=4.0) is None


def test_project_agrees_with_sweep_oracle():
    line = [[0.0, 0.0], [30.0, 5.0], [55.0, -10.0], [80.0, 0.0]]
    for point in ([12.0, 9.0], [40.0, -20.0], [70.0, 4.0]):
        dist, station, _ = project_to_polyline(point, line)
        o_dist, o_station, _ = oracles.sweep_closest_point(point, line,
                                                           steps_per_segment=50000)
        assert dist == pytest.approx(o_dist, abs=1e-6)
        assert station == pytest.approx(o_station, abs=1e-2)


@given(st.floats(-720, 720))
def test_wrap_range(angle):
    w = wrap_deg(angle)
    assert -180.0 < w <= 180.0
    assert math.isclose(math.cos(math.radians(w)), math.cos(math.radians(angle)), abs_tol=1e-9)
    assert math.isclose(math.sin(math.radians(w)), math.sin(math.radians(angle)), abs_tol=1e-9)


class TestCircumradius:
    def test_exact_circle_points(self):
        pts = [(10 * math.cos(t), 10 * math.sin(t)) for t in (0.0, 0.1, 0.2)]
        assert circumradius(*pts) == pytest.approx(10.0, rel=1e-9)

    def test_collinear_is_infinite(self):
        assert circumradius((0, 0), (1, 0), (2, 0)) == math.inf

    @given(st.floats(1.0, 500.0), st.floats(0.01, 1.0), st.floats(0, 6.0))
    def test_matches_circumcenter_oracle(self, radius, step, phase):
        pts = [(radius * math.cos(phase + k * step), radius * math.sin(phase + k * step))
               for k in range(3)]
        mine = circumradius(*pts)
        theirs = oracles.circumradius_by_center(*pts)
        if math.isinf(mine) or math.isinf(theirs):
            assert mine == theirs
        else:
            assert mine == pytest.approx(theirs, rel=1e-6)


class TestOffsetFrames:
    def test_straight_offsets_left(self):
        pts = [[0.0, 0.0], [10.0, 0.0]]
        dirs, scales = offset_frames(pts)
        moved = offset_with_frames(pts, dirs, scales, 2.0)
        assert moved.tolist() == [[0.0, 2.0], [10.0, 2.0]]

    def test_zero_length_piece_raises(self):
        with pytest.raises(ValueError):
            offset_frames([[0, 0], [0, 0], [1, 0]])

    def test_shared_frame_keeps_midpoints_exact(self):
        pts = [[0.0, 0.0], [10.0, 0.0], [15.0, 8.0], [15.0, 20.0]]
        dirs, scales = offset_frames(pts)
        center = offset_with_frames(pts, dirs, scales, 1.0)
        left = offset_with_frames(pts, dirs, scales, 2.5)
        right = offset_with_frames(pts, dirs, scales, -0.5)
        assert np.allclose((left + right) / 2, center, atol=1e-12)


class TestResample:
    def test_endpoints_exact(self):
        pts = [[0.0, 0.0, 1.0], [3.0, 4.0, 2.0], [6.0, 8.0, 3.0]]
        out = resample_fractions(pts, [0.0, 0.5, 1.0])
        assert out[0].tolist() == [0.0, 0.0, 1.0]
        assert out[-1].tolist() == [6.0, 8.0, 3.0]
        assert out[1].tolist() == [3.0, 4.0, 2.0]

    def test_z_interpolates(self):
        pts = [[0.0, 0.0, 0.0], [10.0, 0.0, 4.0]]
        out = resample_fractions(pts, [0.25])
        assert out[0].tolist() == [2.5, 0.0, 1.0]

    @given(st.integers(1, 19))
    def test_total_length_preserved(self, n):
        pts = [[float(i), math.sin(i * 0.5), 0.0] for i in range(8)]
        fractions = [k / n for k in range(n + 1)]
        out = resample_fractions(pts, fractions)
        assert length(out) <= length(pts) + 1e-9
