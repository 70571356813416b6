import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lanekit.errors import AscParseError, MosaicAlignmentError
from lanekit.terrain import DemGrid, fill_missing, load_asc, mosaic, sample, write_asc


def grid(origin_x=0.0, origin_y=0.0, cell=1.0, values=None, nodata=-9999.0):
    arr = np.asarray(values, dtype=float)
    return DemGrid(origin_x, origin_y, cell, arr.shape[1], arr.shape[0], nodata, arr)


class TestLoadAsc:
    def test_row_order_flipped(self, tmp_path):
        path = tmp_path / "g.asc"
        path.write_text(
            "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n"
            "nodata_value -9999\n"
            "1 2\n3 4\n")
        g = load_asc(path)
        # file rows are north-first; internal row 0 is the southern row
        assert g.values[0].tolist() == [3.0, 4.0]
        assert g.values[1].tolist() == [1.0, 2.0]

    def test_default_nodata(self, tmp_path):
        path = tmp_path / "g.asc"
        path.write_text("ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n5\n")
        assert load_asc(path).nodata == -9999.0

    def test_value_count_mismatch(self, tmp_path):
        path = tmp_path / "g.asc"
        path.write_text("ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2 3\n")
        with pytest.raises(AscParseError):
            load_asc(path)

    def test_non_numeric_token_names_line(self, tmp_path):
        path = tmp_path / "g.asc"
        path.write_text("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 oops\n")
        with pytest.raises(AscParseError) as err:
            load_asc(path)
        assert err.value.line == 6

    def test_missing_header_key(self, tmp_path):
        path = tmp_path / "g.asc"
        path.write_text("ncols 1\nnrows 1\nxllcorner 0\ncellsize 1\n5\n")
        with pytest.raises(AscParseError) as err:
            load_asc(path)
        assert "yllcorner" in str(err.value)

    def test_write_read_round_trip(self, tmp_path):
        g = grid(values=[[1.5, 2.25], [3.0, -9999.0]], origin_x=10.0, origin_y=20.0)
        path = tmp_path / "g.asc"
        write_asc(g, path)
        back = load_asc(path)
        assert back.origin_x == 10.0 and back.origin_y == 20.0
        assert np.array_equal(back.values, g.values)


class TestMosaic:
    def test_two_adjacent_tiles(self):
        west = grid(values=[[1, 2], [3, 4]])
        east = grid(origin_x=2.0, values=[[5, 6], [7, 8]])
        m = mosaic([west, east])
        assert (m.n_cols, m.n_rows) == (4, 2)
        # oracle: place each tile by direct index arithmetic
        expected = np.full((2, 4), -9999.0)
        expected[0:2, 0:2] = [[1, 2], [3, 4]]
        expected[0:2, 2:4] = [[5, 6], [7, 8]]
        assert np.array_equal(m.values, expected)

    def test_single_grid_identity(self):
        g = grid(values=[[1, 2], [3, 4]])
        m = mosaic([g])
        assert np.array_equal(m.values, g.values)
        assert (m.origin_x, m.origin_y, m.cell_size) == (0.0, 0.0, 1.0)

    def test_cell_size_mismatch(self):
        a = grid(values=[[1]])
        b = DemGrid(0, 0, 0.5, 1, 1, -9999.0, [[1.0]])
        with pytest.raises(MosaicAlignmentError) as err:
            mosaic([a, b])
        assert "tile 1" in str(err.value)

    def test_misaligned_origin(self):
        a = grid(values=[[1]])
        b = grid(origin_x=0.4, values=[[2]])
        with pytest.raises(MosaicAlignmentError):
            mosaic([a, b])

    def test_later_tile_wins_overlap(self):
        a = grid(values=[[1, 1], [1, 1]])
        b = grid(origin_x=1.0, values=[[9, 9], [9, 9]])
        m = mosaic([a, b])
        assert m.values[0].tolist() == [1, 9, 9]
        assert mosaic([b, a]).values[0].tolist() == [1, 1, 9]

    def test_gap_cells_are_nodata(self):
        a = grid(values=[[1]])
        b = grid(origin_x=2.0, values=[[2]])
        m = mosaic([a, b])
        assert m.values[0].tolist() == [1.0, -9999.0, 2.0]

    def test_associative_over_disjoint_tiles(self):
        a = grid(values=[[1, 1], [1, 1]])
        b = grid(origin_x=2.0, values=[[2, 2], [2, 2]])
        c = grid(origin_x=4.0, values=[[3, 3], [3, 3]])
        left = mosaic([mosaic([a, b]), c])
        right = mosaic([a, mosaic([b, c])])
        assert np.array_equal(left.values, right.values)
        assert (left.origin_x, left.origin_y) == (right.origin_x, right.origin_y)


class TestSample:
    def test_cell_center_exact(self):
        g = grid(values=[[12.5, 1.0], [2.0, 3.0]])
        assert sample(g, 0.5, 0.5) == 12.5

    def test_midpoint_bilinear(self):
        # south row 0,0 / north row 10,10; midpoint of the four centers
        g = grid(values=[[0.0, 0.0], [10.0, 10.0]])
        assert sample(g, 1.0, 1.0) == 5.0

    def test_outside_grid_missing(self):
        g = grid(values=[[1.0, 1.0], [1.0, 1.0]])
        assert sample(g, 100.0, 0.5) is None
        assert sample(g, 0.25, 0.5) is None  # inside cell, outside center hull

    def test_nodata_neighbor_missing(self):
        g = grid(values=[[1.0, -9999.0], [1.0, 1.0]])
        assert sample(g, 1.0, 1.0) is None

    @given(st.integers(0, 3), st.integers(0, 3))
    def test_reproduces_all_centers(self, i, j):
        values = np.arange(16.0).reshape(4, 4)
        g = grid(values=values)
        assert sample(g, i + 0.5, j + 0.5) == values[j, i]

    @given(
        values=st.lists(st.floats(-1000, 1000), min_size=4, max_size=4),
        x=st.floats(0.5, 1.5),
        y=st.floats(0.5, 1.5),
    )
    def test_within_corner_bounds(self, values, x, y):
        g = grid(values=np.asarray(values).reshape(2, 2))
        v = sample(g, x, y)
        assert v is not None
        assert min(values) <= v <= max(values)


class TestFillMissing:
    def test_tie_prefers_earlier_station(self):
        filled, warn = fill_missing([(0, 5.0), (1, None), (2, 7.0)])
        assert filled == [(0, 5.0), (1, 5.0), (2, 7.0)]
        assert warn is False

    def test_nearest_valid(self):
        filled, _ = fill_missing([(0, None), (1, None), (2, 9.0)])
        assert filled == [(0, 9.0), (1, 9.0), (2, 9.0)]

    def test_all_missing_zeros_with_warning(self):
        filled, warn = fill_missing([(0, None), (1, None)])
        assert filled == [(0, 0.0), (1, 0.0)]
        assert warn is True

    @given(st.lists(st.one_of(st.none(), st.floats(-100, 100)), min_size=1, max_size=20))
    def test_never_missing_and_valid_unchanged(self, values):
        samples = [(float(i), v) for i, v in enumerate(values)]
        filled, _ = fill_missing(samples)
        assert len(filled) == len(samples)
        for (s0, v0), (s1, v1) in zip(samples, filled):
            assert s1 == s0
            assert v1 is not None and not math.isnan(v1)
            if v0 is not None:
                assert v1 == v0
