"""Lane-level map construction from locally-referenced road centerlines.

Staged build: endpoint clustering -> interior splitting -> lane/boundary
synthesis -> greedy endpoint matching -> intersection turn labeling ->
elevation transfer -> global-frame restoration. The document stays in the
local frame until restore_global.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry
from .errors import ElevationError, GenerationError
from .geodata import Direction, OriginOffset, ResolvedSemantics, RoadFeature
from .terrain import DemGrid, fill_missing, sample_many

ALONG = "along_segment"
AGAINST = "against_segment"

TURN_NONE = "none"
TURN_STRAIGHT = "straight"
TURN_LEFT = "left"
TURN_RIGHT = "right"

SCHEMA_VERSION = 1


@dataclass
class NetworkNode:
    id: int
    position: list[float]
    members: list[tuple[str, str]]  # (feature id, "start" | "end" | "interior")


@dataclass
class RoadSegment:
    id: int
    source_feature_id: str
    centerline: list[list[float]]  # 2D
    start_node_id: int
    end_node_id: int
    semantics: ResolvedSemantics


@dataclass
class Lane:
    id: int
    group_id: int
    centerline: list[list[float]]  # 3D, ordered along travel direction
    left_boundary_id: int
    right_boundary_id: int
    travel_direction: str
    width_m: float
    predecessors: list[int] = field(default_factory=list)
    successors: list[int] = field(default_factory=list)
    turns: dict[int, str] = field(default_factory=dict)  # successor -> label

    @property
    def turn_type(self) -> str:
        labels = set(self.turns.values())
        return labels.pop() if len(labels) == 1 else TURN_NONE


@dataclass
class LaneBoundary:
    id: int
    points: list[list[float]]  # 3D


@dataclass
class LaneGroup:
    id: int
    segment_id: int
    lane_ids: list[int]  # ordered left -> right facing along the segment


@dataclass
class HdMapDocument:
    origin_offset: OriginOffset
    nodes: list[NetworkNode] = field(default_factory=list)
    segments: list[RoadSegment] = field(default_factory=list)
    lanes: list[Lane] = field(default_factory=list)
    boundaries: list[LaneBoundary] = field(default_factory=list)
    groups: list[LaneGroup] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def lane_by_id(self, lane_id: int) -> Lane:
        return self._lane_index()[lane_id]

    def boundary_by_id(self, boundary_id: int) -> LaneBoundary:
        return {b.id: b for b in self.boundaries}[boundary_id]

    def _lane_index(self) -> dict[int, Lane]:
        return {ln.id: ln for ln in self.lanes}


_END_RANK = {"start": 0, "end": 1}


def cluster_endpoints(features: list[RoadFeature], tol: float = 1.0) -> list[NetworkNode]:
    """Single-linkage clustering of all feature endpoints with link distance tol.

    Node ids are assigned by ascending (smallest member feature id, end
    indicator), and positions are member centroids summed in that canonical
    order, so the result is independent of input feature order.
    """
    points = []  # (fid, marker, x, y)
    for f in features:
        points.append((f.id, "start", f.geometry[0][0], f.geometry[0][1]))
        points.append((f.id, "end", f.geometry[-1][0], f.geometry[-1][1]))
    n = len(points)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if math.hypot(points[i][2] - points[j][2], points[i][3] - points[j][3]) <= tol:
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[rb] = ra

    clusters: dict[int, list[int]] = {}
    for i in range(n):
        clusters.setdefault(find(i), []).append(i)

    keyed = []
    for idxs in clusters.values():
        members = sorted(
            ((points[i][0], points[i][1]) for i in idxs),
            key=lambda m: (m[0], _END_RANK[m[1]]),
        )
        by_member = {(points[i][0], points[i][1]): i for i in idxs}
        sx = sy = 0.0
        for m in members:
            i = by_member[m]
            sx += points[i][2]
            sy += points[i][3]
        pos = [sx / len(members), sy / len(members)]
        keyed.append(((members[0][0], _END_RANK[members[0][1]]), pos, members))
    keyed.sort(key=lambda item: item[0])
    return [NetworkNode(idx, pos, members) for idx, (_, pos, members) in enumerate(keyed)]


def endpoint_node_map(nodes: list[NetworkNode]) -> dict[tuple[str, str], int]:
    out = {}
    for node in nodes:
        for fid, marker in node.members:
            if marker in _END_RANK:
                out[(fid, marker)] = node.id
    return out


def split_at_interior_nodes(
    features: list[RoadFeature],
    nodes: list[NetworkNode],
    semantics: dict[str, ResolvedSemantics],
    proj_tol: float = 1.0,
    min_segment_length: float = 1.0,
) -> list[RoadSegment]:
    """Split features where a node projects onto their interior.

    A node splits a feature when its perpendicular foot lies within
    proj_tol of the node, restricted to the station band that excludes
    2*proj_tol around the feature's own ends. The foot point becomes a
    vertex; pieces shorter than min_segment_length merge into the
    following piece (into the preceding one at the tail).
    """
    ends = endpoint_node_map(nodes)
    segments: list[RoadSegment] = []
    next_id = 0
    for f in features:
        pts = f.geometry
        total = geometry.length(pts)
        if total <= min_segment_length:
            continue  # degenerate stub, below the segment-length contract
        cuts: list[tuple[float, int]] = []
        band_lo, band_hi = 2 * proj_tol, total - 2 * proj_tol
        if band_lo < band_hi:
            for node in nodes:
                proj = geometry.project_to_polyline(node.position, pts, band_lo, band_hi)
                if proj is not None and proj[0] <= proj_tol:
                    cuts.append((proj[1], node.id))
                    node.members.append((f.id, "interior"))
        cuts.sort()
        bounds: list[tuple[float, int]] = [(0.0, ends[(f.id, "start")])]
        bounds.extend(cuts)
        bounds.append((total, ends[(f.id, "end")]))

        i = 0
        while i < len(bounds) - 1:
            if bounds[i + 1][0] - bounds[i][0] >= min_segment_length:
                i += 1
            elif i + 1 < len(bounds) - 1:
                del bounds[i + 1]
            elif i > 0:
                del bounds[i]
                i -= 1
            else:
                break

        for (s_a, node_a), (s_b, node_b) in zip(bounds, bounds[1:]):
            piece = geometry.slice_by_station(pts, s_a, s_b)
            segments.append(RoadSegment(
                id=next_id,
                source_feature_id=f.id,
                centerline=piece,
                start_node_id=node_a,
                end_node_id=node_b,
                semantics=semantics[f.id],
            ))
            next_id += 1
    return segments


def _with_z(points2d: np.ndarray, z: float = 0.0) -> list[list[float]]:
    return [[float(x), float(y), z] for x, y in points2d]


def build_lanes(
    segment: RoadSegment,
    group_id: int,
    lane_id_start: int,
    boundary_id_start: int,
    both_ways_left_against: bool = True,
    miter_limit: float = 3.0,
):
    """Synthesize lanes, boundaries, and the lane group for one segment.

    Lane i (0-based, left to right facing along the segment) is offset by
    ((n-1)/2 - i) * lane_width along the left normal, so the leftmost lane
    carries the largest positive offset. Centerline and both boundaries
    share the per-vertex miter frame, which makes each centerline point the
    exact midpoint of its boundary pair. Lanes that travel against the
    segment are stored reversed with left/right boundaries swapped, so
    point order and boundary sides always follow travel direction.
    """
    sem = segment.semantics
    n = sem.lane_count
    w = sem.width_m / n
    try:
        dirs, scales = geometry.offset_frames(segment.centerline, miter_limit)
    except ValueError as exc:
        raise GenerationError(f"segment {segment.id} ({segment.source_feature_id}): {exc}") from exc

    if sem.direction == Direction.FORWARD_ONLY:
        against = [False] * n
    elif sem.direction == Direction.BACKWARD_ONLY:
        against = [True] * n
    else:
        head = math.ceil(n / 2)
        against = [both_ways_left_against] * head + [not both_ways_left_against] * (n - head)

    lanes: list[Lane] = []
    bounds: list[LaneBoundary] = []
    for i in range(n):
        d_center = ((n - 1) / 2 - i) * w
        center = geometry.offset_with_frames(segment.centerline, dirs, scales, d_center)
        left = geometry.offset_with_frames(segment.centerline, dirs, scales, d_center + w / 2)
        right = geometry.offset_with_frames(segment.centerline, dirs, scales, d_center - w / 2)
        if against[i]:
            center = center[::-1]
            left, right = right[::-1], left[::-1]
        left_b = LaneBoundary(boundary_id_start + 2 * i, _with_z(left))
        right_b = LaneBoundary(boundary_id_start + 2 * i + 1, _with_z(right))
        bounds.extend([left_b, right_b])
        lanes.append(Lane(
            id=lane_id_start + i,
            group_id=group_id,
            centerline=_with_z(center),
            left_boundary_id=left_b.id,
            right_boundary_id=right_b.id,
            travel_direction=AGAINST if against[i] else ALONG,
            width_m=w,
        ))
    group = LaneGroup(group_id, segment.id, [ln.id for ln in lanes])
    return group, lanes, bounds


def _lane_ends(doc: HdMapDocument):
    """(entries, exits): lane first/last points with start/end tangent headings."""
    entries, exits = [], []
    for lane in doc.lanes:
        c = lane.centerline
        entries.append((lane.id, c[0], geometry.heading_deg(c[0], c[1])))
        exits.append((lane.id, c[-1], geometry.heading_deg(c[-2], c[-1])))
    return entries, exits


def connection_candidates(
    doc: HdMapDocument,
    node: NetworkNode,
    match_radius: float = 5.0,
    heading_tol_deg: float = 30.0,
) -> list[tuple[float, int, int]]:
    """Filtered (gap, exit lane id, entry lane id) candidates at one node,
    sorted by ascending gap with (exit id, entry id) tie-break."""
    entries, exits = _lane_ends(doc)
    nx, ny = node.position
    near_exits = [e for e in exits if math.hypot(e[1][0] - nx, e[1][1] - ny) <= match_radius]
    near_entries = [e for e in entries if math.hypot(e[1][0] - nx, e[1][1] - ny) <= match_radius]
    cands = []
    for ex_id, ex_pt, ex_h in near_exits:
        for en_id, en_pt, en_h in near_entries:
            if ex_id == en_id:
                continue
            gap = math.hypot(ex_pt[0] - en_pt[0], ex_pt[1] - en_pt[1])
            if gap > match_radius:
                continue
            if abs(geometry.wrap_deg(en_h - ex_h)) > heading_tol_deg:
                continue
            cands.append((gap, ex_id, en_id))
    cands.sort(key=lambda c: (c[0], c[1], c[2]))
    return cands


def greedy_match(cands: list[tuple[float, int, int]]) -> list[tuple[int, int]]:
    """One-to-one greedy acceptance over distance-sorted candidates."""
    used_exit, used_entry = set(), set()
    accepted = []
    for _, ex_id, en_id in cands:
        if ex_id in used_exit or en_id in used_entry:
            continue
        used_exit.add(ex_id)
        used_entry.add(en_id)
        accepted.append((ex_id, en_id))
    return accepted


def connect_lanes(
    doc: HdMapDocument,
    nodes: list[NetworkNode],
    match_radius: float = 5.0,
    heading_tol_deg: float = 30.0,
) -> HdMapDocument:
    """Link lane exits to entries per node via greedy one-to-one matching.

    An exit or entry is consumed by at most one link created here; nodes
    are processed in ascending id order with a global consumed set.
    """
    lane_index = doc._lane_index()
    used_exit, used_entry = set(), set()
    for node in sorted(nodes, key=lambda nd: nd.id):
        for _, ex_id, en_id in connection_candidates(doc, node, match_radius, heading_tol_deg):
            if ex_id in used_exit or en_id in used_entry:
                continue
            used_exit.add(ex_id)
            used_entry.add(en_id)
            lane_index[ex_id].successors.append(en_id)
            lane_index[en_id].predecessors.append(ex_id)
    return doc


def intersection_node_ids(doc: HdMapDocument) -> set[int]:
    """Nodes where at least 3 distinct segments meet."""
    count: dict[int, set[int]] = {}
    for seg in doc.segments:
        count.setdefault(seg.start_node_id, set()).add(seg.id)
        count.setdefault(seg.end_node_id, set()).add(seg.id)
    return {nid for nid, segs in count.items() if len(segs) >= 3}


def classify_turns(
    doc: HdMapDocument,
    nodes: list[NetworkNode],
    match_radius: float = 5.0,
    straight_max_deg: float = 30.0,
    turn_max_deg: float = 150.0,
) -> HdMapDocument:
    """Label and complete movements through intersection nodes.

    Signed heading change from exit end-tangent to entry start-tangent,
    counterclockwise positive: straight within +-straight_max, left/right
    up to +-turn_max, beyond that (U-turns) no connection. Labeled pairs
    not already linked become successor links; labels are stored per
    successor on the exit lane. Successor/predecessor lists are sorted
    ascending afterwards as the canonical document order.
    """
    lane_index = doc._lane_index()
    entries, exits = _lane_ends(doc)
    crossing_ids = intersection_node_ids(doc)
    for node in sorted(nodes, key=lambda nd: nd.id):
        if node.id not in crossing_ids:
            continue
        nx, ny = node.position
        near_exits = [e for e in exits if math.hypot(e[1][0] - nx, e[1][1] - ny) <= match_radius]
        near_entries = [e for e in entries if math.hypot(e[1][0] - nx, e[1][1] - ny) <= match_radius]
        for ex_id, ex_pt, ex_h in sorted(near_exits, key=lambda e: e[0]):
            for en_id, en_pt, en_h in sorted(near_entries, key=lambda e: e[0]):
                if ex_id == en_id:
                    continue
                if math.hypot(ex_pt[0] - en_pt[0], ex_pt[1] - en_pt[1]) > match_radius:
                    continue
                delta = geometry.wrap_deg(en_h - ex_h)
                if abs(delta) <= straight_max_deg:
                    label = TURN_STRAIGHT
                elif straight_max_deg < delta <= turn_max_deg:
                    label = TURN_LEFT
                elif -turn_max_deg <= delta < -straight_max_deg:
                    label = TURN_RIGHT
                else:
                    continue
                exit_lane = lane_index[ex_id]
                if en_id not in exit_lane.successors:
                    exit_lane.successors.append(en_id)
                    lane_index[en_id].predecessors.append(ex_id)
                exit_lane.turns[en_id] = label
    for lane in doc.lanes:
        lane.successors.sort()
        lane.predecessors.sort()
    return doc


def smooth_profile(z: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average with window truncation at the ends."""
    if window <= 1:
        return z.copy()
    if window % 2 == 0:
        raise ValueError("smooth window must be odd")
    half = window // 2
    n = len(z)
    csum = np.concatenate([[0.0], np.cumsum(z)])
    out = np.empty(n)
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        out[i] = (csum[hi] - csum[lo]) / (hi - lo)
    return out


def clamp_grade(z: np.ndarray, st: np.ndarray, max_grade: float) -> np.ndarray:
    """Forward then backward pass pulling the violating endpoint toward its
    neighbor until |dz| <= max_grade * ds for every consecutive pair."""
    z = z.copy()
    n = len(z)
    for i in range(n - 1):
        lim = max_grade * (st[i + 1] - st[i])
        if z[i + 1] > z[i] + lim:
            z[i + 1] = z[i] + lim
        elif z[i + 1] < z[i] - lim:
            z[i + 1] = z[i] - lim
    for i in range(n - 2, -1, -1):
        lim = max_grade * (st[i + 1] - st[i])
        if z[i] > z[i + 1] + lim:
            z[i] = z[i + 1] + lim
        elif z[i] < z[i + 1] - lim:
            z[i] = z[i + 1] - lim
    return z


def _elevate_polyline(points, dem: DemGrid, origin: OriginOffset,
                      smooth_window: int, max_grade: float):
    arr = np.asarray(points, dtype=float)
    raw = sample_many(dem, arr[:, 0] + origin.x, arr[:, 1] + origin.y)
    any_valid = bool(np.isfinite(raw).any())
    st = geometry.stations(arr)
    pairs = [(float(st[i]), None if math.isnan(raw[i]) else float(raw[i]))
             for i in range(len(arr))]
    filled, _ = fill_missing(pairs)
    z = np.array([v for _, v in filled])
    z = smooth_profile(z, smooth_window)
    z = clamp_grade(z, st, max_grade)
    for i, p in enumerate(points):
        p[2] = float(z[i])
    return any_valid


def apply_elevation(
    doc: HdMapDocument,
    dem: DemGrid,
    smooth_window: int = 5,
    max_grade: float = 0.12,
) -> HdMapDocument:
    """Transfer DEM elevations onto every lane centerline and boundary.

    Vertices are sampled at their global position, Missing values filled
    along arclength, profiles smoothed, and grades clamped. Boundaries get
    their own sampled profiles rather than copies of the centerline's.
    Raises ElevationError when the DEM covers no vertex of the map at all.
    """
    origin = doc.origin_offset
    any_valid = False
    for lane in doc.lanes:
        any_valid |= _elevate_polyline(lane.centerline, dem, origin, smooth_window, max_grade)
    for bound in doc.boundaries:
        any_valid |= _elevate_polyline(bound.points, dem, origin, smooth_window, max_grade)
    if doc.lanes and not any_valid:
        raise ElevationError("DEM does not cover any vertex of the map")
    return doc


def _translate(doc: HdMapDocument, dx: float, dy: float):
    for node in doc.nodes:
        node.position[0] += dx
        node.position[1] += dy
    for seg in doc.segments:
        for p in seg.centerline:
            p[0] += dx
            p[1] += dy
    for lane in doc.lanes:
        for p in lane.centerline:
            p[0] += dx
            p[1] += dy
    for bound in doc.boundaries:
        for p in bound.points:
            p[0] += dx
            p[1] += dy


def restore_global(doc: HdMapDocument) -> HdMapDocument:
    """Translate the document into the global frame by the stored origin.

    Pure: returns a new document. Applying it to an already-global document
    is a flagged no-op (metadata key restore_reapplied).
    """
    out = copy.deepcopy(doc)
    if out.metadata.get("frame") == "global":
        out.metadata["restore_reapplied"] = True
        return out
    _translate(out, doc.origin_offset.x, doc.origin_offset.y)
    out.metadata["frame"] = "global"
    return out


def to_local_frame(doc: HdMapDocument) -> HdMapDocument:
    """Inverse of restore_global; no-op on a document already local."""
    out = copy.deepcopy(doc)
    if out.metadata.get("frame") != "global":
        return out
    _translate(out, -doc.origin_offset.x, -doc.origin_offset.y)
    out.metadata["frame"] = "local"
    out.metadata.pop("restore_reapplied", None)
    return out


def build_document(
    features: list[RoadFeature],
    origin: OriginOffset,
    dem: DemGrid,
    *,
    defaults=None,
    cluster_tol: float = 1.0,
    proj_tol: float = 1.0,
    min_segment_length: float = 1.0,
    match_radius: float = 5.0,
    heading_tol_deg: float = 30.0,
    straight_max_deg: float = 30.0,
    turn_max_deg: float = 150.0,
    smooth_window: int = 5,
    max_grade: float = 0.12,
    both_ways_left_against: bool = True,
    miter_limit: float = 3.0,
    metadata: dict | None = None,
) -> HdMapDocument:
    """Run the full staged build over local-frame features; returns a
    local-frame document."""
    from .geodata import resolve_semantics

    semantics = {f.id: resolve_semantics(f, defaults) for f in features}
    nodes = cluster_endpoints(features, cluster_tol)
    segments = split_at_interior_nodes(features, nodes, semantics,
                                       proj_tol, min_segment_length)
    doc = HdMapDocument(origin_offset=origin, nodes=nodes, segments=segments)
    doc.metadata = {"tool": "lanekit", "schema": SCHEMA_VERSION, "frame": "local"}
    if metadata:
        doc.metadata.update(metadata)
    lane_id = 0
    boundary_id = 0
    for group_id, seg in enumerate(segments):
        group, lanes, bounds = build_lanes(
            seg, group_id, lane_id, boundary_id,
            both_ways_left_against=both_ways_left_against,
            miter_limit=miter_limit,
        )
        doc.groups.append(group)
        doc.lanes.extend(lanes)
        doc.boundaries.extend(bounds)
        lane_id += len(lanes)
        boundary_id += len(bounds)
    connect_lanes(doc, nodes, match_radius, heading_tol_deg)
    classify_turns(doc, nodes, match_radius, straight_max_deg, turn_max_deg)
    apply_elevation(doc, dem, smooth_window, max_grade)
    return doc


def document_to_dict(doc: HdMapDocument) -> dict:
    return {
        "origin_offset": {"x": doc.origin_offset.x, "y": doc.origin_offset.y},
        "nodes": [
            {"id": nd.id, "position": list(nd.position),
             "members": [[fid, marker] for fid, marker in nd.members]}
            for nd in doc.nodes
        ],
        "segments": [
            {
                "id": seg.id,
                "source_feature_id": seg.source_feature_id,
                "start_node_id": seg.start_node_id,
                "end_node_id": seg.end_node_id,
                "lane_count": seg.semantics.lane_count,
                "width_m": seg.semantics.width_m,
                "direction": seg.semantics.direction.value,
                "provenance": dict(seg.semantics.provenance),
                "centerline": [list(p) for p in seg.centerline],
            }
            for seg in doc.segments
        ],
        "lanes": [
            {
                "id": ln.id,
                "group_id": ln.group_id,
                "left_boundary_id": ln.left_boundary_id,
                "right_boundary_id": ln.right_boundary_id,
                "travel_direction": ln.travel_direction,
                "width_m": ln.width_m,
                "predecessors": list(ln.predecessors),
                "successors": list(ln.successors),
                "turn_type": ln.turn_type,
                "turns": {str(k): v for k, v in sorted(ln.turns.items())},
                "centerline": [list(p) for p in ln.centerline],
            }
            for ln in doc.lanes
        ],
        "boundaries": [
            {"id": b.id, "points": [list(p) for p in b.points]}
            for b in doc.boundaries
        ],
        "groups": [
            {"id": g.id, "segment_id": g.segment_id, "lane_ids": list(g.lane_ids)}
            for g in doc.groups
        ],
        "metadata": dict(doc.metadata),
    }


def document_from_dict(data: dict) -> HdMapDocument:
    origin = OriginOffset(data["origin_offset"]["x"], data["origin_offset"]["y"])
    doc = HdMapDocument(origin_offset=origin, metadata=dict(data.get("metadata", {})))
    for nd in data.get("nodes", []):
        doc.nodes.append(NetworkNode(nd["id"], list(nd["position"]),
                                     [(m[0], m[1]) for m in nd["members"]]))
    for sg in data.get("segments", []):
        sem = ResolvedSemantics(
            lane_count=sg["lane_count"],
            width_m=sg["width_m"],
            direction=Direction(sg["direction"]),
            provenance=dict(sg.get("provenance", {})),
        )
        doc.segments.append(RoadSegment(sg["id"], sg["source_feature_id"],
                                        [list(p) for p in sg["centerline"]],
                                        sg["start_node_id"], sg["end_node_id"], sem))
    for ln in data.get("lanes", []):
        doc.lanes.append(Lane(
            id=ln["id"], group_id=ln["group_id"],
            centerline=[list(p) for p in ln["centerline"]],
            left_boundary_id=ln["left_boundary_id"],
            right_boundary_id=ln["right_boundary_id"],
            travel_direction=ln["travel_direction"],
            width_m=ln["width_m"],
            predecessors=list(ln["predecessors"]),
            successors=list(ln["successors"]),
            turns={int(k): v for k, v in ln.get("turns", {}).items()},
        ))
    for b in data.get("boundaries", []):
        doc.boundaries.append(LaneBoundary(b["id"], [list(p) for p in b["points"]]))
    for g in data.get("groups", []):
        doc.groups.append(LaneGroup(g["id"], g["segment_id"], list(g["lane_ids"])))
    return doc


def document_bytes(doc: HdMapDocument) -> bytes:
    return (json.dumps(document_to_dict(doc), indent=2) + "\n").encode("utf-8")


def document_hash(doc: HdMapDocument) -> str:
    return hashlib.sha256(document_bytes(doc)).hexdigest()


def save_document(doc: HdMapDocument, path):
    with open(path, "wb") as fh:
        fh.write(document_bytes(doc))


def load_document(path) -> HdMapDocument:
    with open(path, "r", encoding="utf-8") as fh:
        return document_from_dict(json.load(fh))


def validate_document(doc: HdMapDocument) -> list[str]:
    """Cross-reference check; returns a list of problems (empty when clean)."""
    problems = []
    node_ids = {nd.id for nd in doc.nodes}
    lane_ids = {ln.id for ln in doc.lanes}
    boundary_ids = {b.id for b in doc.boundaries}
    group_ids = {g.id for g in doc.groups}
    seg_ids = {s.id for s in doc.segments}
    for seg in doc.segments:
        for nid in (seg.start_node_id, seg.end_node_id):
            if nid not in node_ids:
                problems.append(f"segment {seg.id}: missing node {nid}")
    for lane in doc.lanes:
        if lane.group_id not in group_ids:
            problems.append(f"lane {lane.id}: missing group {lane.group_id}")
        for bid in (lane.left_boundary_id, lane.right_boundary_id):
            if bid not in boundary_ids:
                problems.append(f"lane {lane.id}: missing boundary {bid}")
        for other in list(lane.predecessors) + list(lane.successors):
            if other not in lane_ids:
                problems.append(f"lane {lane.id}: missing neighbor lane {other}")
        if lane.id in lane.successors or lane.id in lane.predecessors:
            problems.append(f"lane {lane.id}: self reference")
    for group in doc.groups:
        if group.segment_id not in seg_ids:
            problems.append(f"group {group.id}: missing segment {group.segment_id}")
        for lid in group.lane_ids:
            if lid not in lane_ids:
                problems.append(f"group {group.id}: missing lane {lid}")
    return problems
