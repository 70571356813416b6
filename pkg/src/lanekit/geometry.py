"""Planar polyline helpers used by the map builder and the converter.

All distances are meters in a projected (planar) frame. Points are
sequences of 2 or 3 floats; only x/y take part in arclength, offsets,
and projections, z is carried through untouched where present.
"""

from __future__ import annotations

import math

import numpy as np

COINCIDENT_TOL = 1e-6  # consecutive vertices closer than this count as one


def as_array(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] not in (2, 3):
        raise ValueError(f"expected (n,2) or (n,3) point array, got shape {arr.shape}")
    return arr


def dedupe_consecutive(points, tol: float = COINCIDENT_TOL) -> list:
    """Drop consecutive points closer than tol in 2D, keeping the first."""
    out = []
    for p in points:
        if out and math.hypot(p[0] - out[-1][0], p[1] - out[-1][1]) <= tol:
            continue
        out.append(list(p))
    return out


def stations(points) -> np.ndarray:
    """Cumulative 2D arclength per vertex; stations[0] == 0."""
    arr = as_array(points)
    d = np.hypot(np.diff(arr[:, 0]), np.diff(arr[:, 1]))
    return np.concatenate([[0.0], np.cumsum(d)])


def length(points) -> float:
    return float(stations(points)[-1])


def point_at_station(points, s: float):
    """Interpolated 2D point at arclength s (clamped to [0, length])."""
    arr = as_array(points)
    st = stations(arr)
    s = min(max(s, 0.0), float(st[-1]))
    j = int(np.searchsorted(st, s, side="right")) - 1
    j = min(max(j, 0), len(arr) - 2)
    seg = st[j + 1] - st[j]
    t = 0.0 if seg <= 0 else (s - st[j]) / seg
    return [
        float(arr[j, 0] + t * (arr[j + 1, 0] - arr[j, 0])),
        float(arr[j, 1] + t * (arr[j + 1, 1] - arr[j, 1])),
    ]


def slice_by_station(points, s0: float, s1: float) -> list:
    """Sub-polyline between arclengths s0 < s1, cut points interpolated in."""
    arr = as_array(points)
    st = stations(arr)
    out = [point_at_station(arr, s0)]
    for j in range(len(arr)):
        if s0 < st[j] < s1:
            out.append([float(arr[j, 0]), float(arr[j, 1])])
    out.append(point_at_station(arr, s1))
    return dedupe_consecutive(out, tol=1e-9)


def project_to_polyline(point, polyline, s_min: float = 0.0, s_max: float | None = None):
    """Closest point on a polyline restricted to the station band [s_min, s_max].

    Returns (distance, station, foot_xy) or None when the band is empty.
    Distance along a straight segment is convex in the parameter, so
    clamping the per-segment argmin into the allowed band is exact.
    """
    arr = as_array(polyline)
    st = stations(arr)
    total = float(st[-1])
    if s_max is None:
        s_max = total
    if s_min > s_max:
        return None
    px, py = float(point[0]), float(point[1])
    best = None
    for j in range(len(arr) - 1):
        seg_len = st[j + 1] - st[j]
        if seg_len <= 0:
            continue
        lo = max(s_min, st[j])
        hi = min(s_max, st[j + 1])
        if lo > hi:
            continue
        ax, ay = arr[j, 0], arr[j, 1]
        bx, by = arr[j + 1, 0], arr[j + 1, 1]
        t = ((px - ax) * (bx - ax) + (py - ay) * (by - ay)) / (seg_len * seg_len)
        t_lo = (lo - st[j]) / seg_len
        t_hi = (hi - st[j]) / seg_len
        t = min(max(t, t_lo), t_hi)
        fx = ax + t * (bx - ax)
        fy = ay + t * (by - ay)
        dist = math.hypot(px - fx, py - fy)
        if best is None or dist < best[0]:
            best = (dist, float(st[j] + t * seg_len), [float(fx), float(fy)])
    return best


def offset_frames(points, miter_limit: float = 3.0):
    """Per-vertex left-normal miter directions and capped scale factors.

    The same frame offsets a centerline and both of its boundaries, which
    keeps boundary midpoints exactly on the offset centerline. Raises
    ValueError on a zero-length piece.
    """
    arr = as_array(points)[:, :2]
    n = len(arr)
    if n < 2:
        raise ValueError("polyline needs at least 2 points")
    seg_normals = np.zeros((n - 1, 2))
    for j in range(n - 1):
        dx = arr[j + 1, 0] - arr[j, 0]
        dy = arr[j + 1, 1] - arr[j, 1]
        ln = math.hypot(dx, dy)
        if ln <= COINCIDENT_TOL:
            raise ValueError(f"zero-length piece at vertex {j}")
        seg_normals[j] = (-dy / ln, dx / ln)
    dirs = np.zeros((n, 2))
    scales = np.ones(n)
    dirs[0] = seg_normals[0]
    dirs[-1] = seg_normals[-1]
    for j in range(1, n - 1):
        mx = seg_normals[j - 1, 0] + seg_normals[j, 0]
        my = seg_normals[j - 1, 1] + seg_normals[j, 1]
        ln = math.hypot(mx, my)
        if ln <= 1e-12:
            # 180-degree reversal; fall back to the incoming normal
            dirs[j] = seg_normals[j - 1]
            scales[j] = miter_limit
            continue
        dirs[j] = (mx / ln, my / ln)
        scales[j] = min(2.0 / ln, miter_limit)
    return dirs, scales


def offset_with_frames(points, dirs, scales, distance: float) -> np.ndarray:
    arr = as_array(points)[:, :2]
    return arr + dirs * (scales * distance)[:, None]


def resample_fractions(points, fractions) -> np.ndarray:
    """Sample a 3D polyline at the given fractions of its own 2D arclength.

    Fraction 0 and 1 return the exact end vertices; z interpolates linearly
    with the 2D parameter.
    """
    arr = as_array(points)
    if arr.shape[1] == 2:
        arr = np.hstack([arr, np.zeros((len(arr), 1))])
    st = stations(arr)
    total = float(st[-1])
    out = np.empty((len(fractions), 3))
    for k, f in enumerate(fractions):
        if f <= 0.0:
            out[k] = arr[0]
            continue
        if f >= 1.0:
            out[k] = arr[-1]
            continue
        s = f * total
        j = int(np.searchsorted(st, s, side="right")) - 1
        j = min(max(j, 0), len(arr) - 2)
        seg = st[j + 1] - st[j]
        t = 0.0 if seg <= 0 else (s - st[j]) / seg
        out[k] = arr[j] + t * (arr[j + 1] - arr[j])
    return out


def heading_deg(p, q) -> float:
    return math.degrees(math.atan2(q[1] - p[1], q[0] - p[0]))


def wrap_deg(angle: float) -> float:
    """Wrap to (-180, 180]."""
    a = math.fmod(angle, 360.0)
    if a <= -180.0:
        a += 360.0
    elif a > 180.0:
        a -= 360.0
    return a


def circumradius(p, q, r, guard: float = 1e-9) -> float:
    """Circumradius of three 2D points; +inf when nearly collinear.

    Collinearity is judged relative to the side-length product so the
    guard is scale free.
    """
    ax, ay = q[0] - p[0], q[1] - p[1]
    bx, by = r[0] - p[0], r[1] - p[1]
    a = math.hypot(r[0] - q[0], r[1] - q[1])
    b = math.hypot(bx, by)
    c = math.hypot(ax, ay)
    cross = ax * by - ay * bx
    area = 0.5 * abs(cross)
    abc = a * b * c
    if area < guard * abc or area == 0.0:
        return math.inf
    return abc / (4.0 * area)
