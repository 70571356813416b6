"""Independent reference implementations used to cross-check the library.

Everything here deliberately avoids the production code paths: clipping is
checked against shapely, projections against a dense parameter sweep,
circumradii against a circumcenter solve, and matchings against exhaustive
enumeration.
"""

import itertools
import math

import numpy as np
from shapely.geometry import LineString, box


def polyline_intersects_rect(points, min_x, min_y, max_x, max_y) -> bool:
    return LineString([(p[0], p[1]) for p in points]).intersects(
        box(min_x, min_y, max_x, max_y))


def sweep_closest_point(point, polyline, steps_per_segment=20000):
    """Brute-force closest point on a polyline by dense parameter sweep.

    Returns (distance, station, (x, y)).
    """
    px, py = point[0], point[1]
    best = (math.inf, 0.0, (0.0, 0.0))
    station0 = 0.0
    for a, b in zip(polyline, polyline[1:]):
        seg = math.hypot(b[0] - a[0], b[1] - a[1])
        for k in range(steps_per_segment + 1):
            t = k / steps_per_segment
            x = a[0] + t * (b[0] - a[0])
            y = a[1] + t * (b[1] - a[1])
            d = math.hypot(px - x, py - y)
            if d < best[0]:
                best = (d, station0 + t * seg, (x, y))
        station0 += seg
    return best


def circumradius_by_center(p, q, r) -> float:
    """Circumradius via the circumcenter linear system; inf when singular."""
    ax, ay = p[0], p[1]
    bx, by = q[0], q[1]
    cx, cy = r[0], r[1]
    m = np.array([[bx - ax, by - ay], [cx - ax, cy - ay]], dtype=float)
    rhs = 0.5 * np.array([bx * bx - ax * ax + by * by - ay * ay,
                          cx * cx - ax * ax + cy * cy - ay * ay], dtype=float)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    scale = max(abs(m).max(), 1e-30)
    if abs(det) < 1e-9 * scale * scale:
        return math.inf
    center = np.linalg.solve(m, rhs)
    return float(math.hypot(center[0] - ax, center[1] - ay))


def min_radius_oracle(centerline) -> float:
    best = math.inf
    for i in range(len(centerline) - 2):
        best = min(best, circumradius_by_center(
            centerline[i], centerline[i + 1], centerline[i + 2]))
    return best


def min_width_oracle(left, right) -> float:
    la = np.asarray(left, dtype=float)
    ra = np.asarray(right, dtype=float)
    return float(np.hypot(la[:, 0] - ra[:, 0], la[:, 1] - ra[:, 1]).min())


def has_distinct_pair_oracle(points, tol=1e-6) -> bool:
    arr = np.asarray(points, dtype=float)[:, :2]
    for i, j in itertools.combinations(range(len(arr)), 2):
        if math.hypot(arr[i, 0] - arr[j, 0], arr[i, 1] - arr[j, 1]) > tol:
            return True
    return False


def hardcoded_rule_ids(net) -> dict[str, set[int]]:
    """Violating lanelet ids per shipped rule, computed without the DSL."""
    out = {
        "elevation_complete": set(),
        "no_self_loop": set(),
        "polyline_valid": set(),
        "min_turn_radius": set(),
        "min_lane_width": set(),
    }
    for lid, ll in net.lanelets.items():
        arrays = [np.asarray(ll.left_bound), np.asarray(ll.right_bound),
                  np.asarray(ll.centerline)]
        if not all(np.isfinite(a[:, 2]).all() for a in arrays):
            out["elevation_complete"].add(lid)
        if lid in ll.successors:
            out["no_self_loop"].add(lid)
        if any(len(b) < 2 or not has_distinct_pair_oracle(b)
               for b in (ll.left_bound, ll.right_bound)):
            out["polyline_valid"].add(lid)
        radius = min_radius_oracle(ll.centerline)
        if not radius >= 10.0:
            out["min_turn_radius"].add(lid)
        if not min_width_oracle(ll.left_bound, ll.right_bound) >= 2.0:
            out["min_lane_width"].add(lid)
    return out


def best_matchings(cands):
    """Exhaustive search over one-to-one matchings of candidate pairs.

    cands: list of (gap, exit_id, entry_id). Returns (max_cardinality,
    min_cost among maximum matchings, set of frozenset matchings achieving
    both).
    """
    best_card = 0
    best_cost = math.inf
    best_sets: set[frozenset] = {frozenset()}

    def recurse(idx, used_exit, used_entry, chosen, cost):
        nonlocal best_card, best_cost, best_sets
        if idx == len(cands):
            card = len(chosen)
            if card > best_card or (card == best_card and cost < best_cost - 1e-12):
                best_card, best_cost = card, cost
                best_sets = {frozenset(chosen)}
            elif card == best_card and abs(cost - best_cost) <= 1e-12:
                best_sets.add(frozenset(chosen))
            return
        gap, ex, en = cands[idx]
        if ex not in used_exit and en not in used_entry:
            recurse(idx + 1, used_exit | {ex}, used_entry | {en},
                    chosen + [(ex, en)], cost + gap)
        recurse(idx + 1, used_exit, used_entry, chosen, cost)

    recurse(0, set(), set(), [], 0.0)
    return best_card, best_cost, best_sets
