"""Raster elevation grids: ESRI ASCII ingest, tile mosaicking, bilinear
sampling, and 1D missing-value filling along a station axis.

A cell value represents the elevation at the cell CENTER, i.e. at
(origin + (i + 0.5) * cell_size). Row 0 of the internal array is the
southernmost row; the .asc file stores the northernmost row first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AscParseError, MosaicAlignmentError

DEFAULT_NODATA = -9999.0

_HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize")


@dataclass
class DemGrid:
    origin_x: float  # lower-left corner of the lower-left cell
    origin_y: float
    cell_size: float
    n_cols: int
    n_rows: int
    nodata: float
    values: np.ndarray  # shape (n_rows, n_cols), row 0 = southernmost

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.n_rows, self.n_cols):
            raise ValueError(
                f"values shape {self.values.shape} != ({self.n_rows}, {self.n_cols})"
            )
        if self.cell_size <= 0:
            raise ValueError("cell_size must be > 0")


def load_asc(path) -> DemGrid:
    """Parse an ESRI ASCII grid file.

    Header keys ncols/nrows/xllcorner/yllcorner/cellsize are required,
    nodata_value is optional (default -9999). Errors name the 1-based
    line number.
    """
    header: dict[str, float] = {}
    data: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    in_data = False
    for lineno, line in enumerate(lines, start=1):
        tokens = line.split()
        if not tokens:
            continue
        if not in_data and not _is_number(tokens[0]):
            key = tokens[0].lower()
            if len(tokens) != 2 or not _is_number(tokens[1]):
                raise AscParseError(f"{path}:{lineno}: bad header line {line.strip()!r}",
                                    line=lineno)
            header[key] = float(tokens[1])
            continue
        in_data = True
        for tok in tokens:
            if not _is_number(tok):
                raise AscParseError(f"{path}:{lineno}: non-numeric token {tok!r}",
                                    line=lineno)
            data.append(float(tok))
    for key in _HEADER_KEYS:
        if key not in header:
            raise AscParseError(f"{path}: missing header key {key!r}")
    n_cols = int(header["ncols"])
    n_rows = int(header["nrows"])
    nodata = header.get("nodata_value", DEFAULT_NODATA)
    if len(data) != n_cols * n_rows:
        raise AscParseError(
            f"{path}: expected {n_cols * n_rows} values, got {len(data)}"
        )
    north_first = np.asarray(data, dtype=float).reshape(n_rows, n_cols)
    return DemGrid(
        origin_x=header["xllcorner"],
        origin_y=header["yllcorner"],
        cell_size=header["cellsize"],
        n_cols=n_cols,
        n_rows=n_rows,
        nodata=nodata,
        values=north_first[::-1].copy(),
    )


def write_asc(grid: DemGrid, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"ncols {grid.n_cols}\n")
        fh.write(f"nrows {grid.n_rows}\n")
        fh.write(f"xllcorner {grid.origin_x!r}\n")
        fh.write(f"yllcorner {grid.origin_y!r}\n")
        fh.write(f"cellsize {grid.cell_size!r}\n")
        fh.write(f"nodata_value {grid.nodata!r}\n")
        for row in grid.values[::-1]:
            fh.write(" ".join(repr(float(v)) for v in row))
            fh.write("\n")


def _is_number(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


def mosaic(grids: list[DemGrid]) -> DemGrid:
    """Assemble aligned tiles into one bounding grid; later tiles win overlaps.

    All tiles must share cell_size and sit on a common lattice (origins an
    integer number of cells apart). Uncovered cells hold the nodata value
    of the first tile.
    """
    if not grids:
        raise MosaicAlignmentError("mosaic of zero tiles")
    base = grids[0]
    cs = base.cell_size
    for k, g in enumerate(grids[1:], start=1):
        if g.cell_size != cs:
            raise MosaicAlignmentError(
                f"tile {k}: cell_size {g.cell_size} != {cs}"
            )
        for axis, off, base_off in (("x", g.origin_x, base.origin_x),
                                    ("y", g.origin_y, base.origin_y)):
            steps = (off - base_off) / cs
            if abs(steps - round(steps)) > 1e-6:
                raise MosaicAlignmentError(
                    f"tile {k}: origin_{axis} {off} misaligned with lattice of tile 0"
                )
    min_x = min(g.origin_x for g in grids)
    min_y = min(g.origin_y for g in grids)
    max_x = max(g.origin_x + g.n_cols * cs for g in grids)
    max_y = max(g.origin_y + g.n_rows * cs for g in grids)
    n_cols = int(round((max_x - min_x) / cs))
    n_rows = int(round((max_y - min_y) / cs))
    nodata = base.nodata
    values = np.full((n_rows, n_cols), nodata, dtype=float)
    for g in grids:
        col0 = int(round((g.origin_x - min_x) / cs))
        row0 = int(round((g.origin_y - min_y) / cs))
        tile = g.values
        if g.nodata != nodata:
            tile = np.where(tile == g.nodata, nodata, tile)
        values[row0:row0 + g.n_rows, col0:col0 + g.n_cols] = tile
    return DemGrid(min_x, min_y, cs, n_cols, n_rows, nodata, values)


def sample(grid: DemGrid, x: float, y: float) -> float | None:
    """Bilinear elevation at (x, y); None when outside the cell-center hull
    or when any of the four surrounding cells is nodata."""
    v = sample_many(grid, np.array([x]), np.array([y]))[0]
    return None if math.isnan(v) else float(v)


def sample_many(grid: DemGrid, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Vectorized bilinear sampling; missing values come back as NaN."""
    fx = (np.asarray(xs, dtype=float) - grid.origin_x) / grid.cell_size - 0.5
    fy = (np.asarray(ys, dtype=float) - grid.origin_y) / grid.cell_size - 0.5
    out = np.full(fx.shape, np.nan)
    ok = (fx >= 0) & (fx <= grid.n_cols - 1) & (fy >= 0) & (fy <= grid.n_rows - 1)
    if not ok.any():
        return out
    i0 = np.clip(np.floor(fx[ok]).astype(int), 0, grid.n_cols - 2)
    j0 = np.clip(np.floor(fy[ok]).astype(int), 0, grid.n_rows - 2)
    tx = fx[ok] - i0
    ty = fy[ok] - j0
    v00 = grid.values[j0, i0]
    v10 = grid.values[j0, i0 + 1]
    v01 = grid.values[j0 + 1, i0]
    v11 = grid.values[j0 + 1, i0 + 1]
    valid = (v00 != grid.nodata) & (v10 != grid.nodata) & (v01 != grid.nodata) & (v11 != grid.nodata)
    # lerp form keeps cell centers exact; t == 1 handled explicitly so the
    # far corner is reproduced bit-exactly too
    south = np.where(tx == 1.0, v10, v00 + (v10 - v00) * tx)
    north = np.where(tx == 1.0, v11, v01 + (v11 - v01) * tx)
    val = np.where(ty == 1.0, north, south + (north - south) * ty)
    lo = np.minimum(np.minimum(v00, v10), np.minimum(v01, v11))
    hi = np.maximum(np.maximum(v00, v10), np.maximum(v01, v11))
    val = np.clip(val, lo, hi)
    res = np.where(valid, val, np.nan)
    out[ok] = res
    return out


def fill_missing(samples: list[tuple[float, float | None]]):
    """Replace Missing entries by the nearest valid neighbor along stations.

    Ties pick the earlier station. Returns (filled list, all_missing flag);
    an all-Missing input yields zeros with the flag set.
    """
    n = len(samples)
    valid_idx = [i for i, (_, v) in enumerate(samples) if v is not None]
    if not valid_idx:
        return [(s, 0.0) for s, _ in samples], True
    out: list[tuple[float, float]] = []
    prev_valid: list[int | None] = [None] * n
    next_valid: list[int | None] = [None] * n
    last = None
    for i in range(n):
        if samples[i][1] is not None:
            last = i
        prev_valid[i] = last
    last = None
    for i in range(n - 1, -1, -1):
        if samples[i][1] is not None:
            last = i
        next_valid[i] = last
    for i, (station, value) in enumerate(samples):
        if value is not None:
            out.append((station, value))
            continue
        p, q = prev_valid[i], next_valid[i]
        if p is None:
            pick = q
        elif q is None:
            pick = p
        else:
            dp = station - samples[p][0]
            dq = samples[q][0] - station
            pick = p if dp <= dq else q  # tie -> earlier station
        out.append((station, samples[pick][1]))
    return out, False
