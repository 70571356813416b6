"""Road-network vector ingest: GeoJSON loading, ROI clipping, attribute
semantics, and the local-frame coordinate transform.

Input is a GeoJSON FeatureCollection of LineString road centerlines whose
properties follow the Basis-DLM attribute names (OBJID, FSZ, BRF, FAR,
FKT, WDM, ZUS, NAM, BEZ), matched case-insensitively. Everything else in
the properties map is ignored.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import ConfigError, GeoJsonParseError
from .geometry import dedupe_consecutive

KNOWN_KEYS = {"objid", "fsz", "brf", "far", "fkt", "wdm", "zus", "nam", "bez"}


class Direction(str, Enum):
    BOTH_WAYS = "both_ways"
    FORWARD_ONLY = "forward_only"
    BACKWARD_ONLY = "backward_only"


# Raw FAR code -> direction. The identity entries make the clip cache
# re-loadable with the default table.
DEFAULT_FAR_CODES: dict[str, str] = {
    "both": Direction.BOTH_WAYS.value,
    "in_direction": Direction.FORWARD_ONLY.value,
    "against_direction": Direction.BACKWARD_ONLY.value,
    "both_ways": Direction.BOTH_WAYS.value,
    "forward_only": Direction.FORWARD_ONLY.value,
    "backward_only": Direction.BACKWARD_ONLY.value,
}

FROM_ATTRIBUTE = "from_attribute"
DEFAULTED = "defaulted"


@dataclass(frozen=True)
class RegionOfInterest:
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    def __post_init__(self):
        if not (self.min_x < self.max_x and self.min_y < self.max_y):
            raise ConfigError(
                f"ROI must have min < max on both axes, got "
                f"({self.min_x}, {self.min_y}, {self.max_x}, {self.max_y})"
            )

    def contains(self, x: float, y: float) -> bool:
        return self.min_x <= x <= self.max_x and self.min_y <= y <= self.max_y


@dataclass
class RoadFeature:
    id: str
    geometry: list[list[float]]
    lane_count: int | None = None
    width_m: float | None = None
    direction: Direction | None = None
    road_class: dict[str, str] = field(default_factory=dict)
    name: str | None = None


@dataclass(frozen=True)
class ResolvedSemantics:
    lane_count: int
    width_m: float
    direction: Direction
    provenance: dict[str, str] = field(default_factory=dict)

    @property
    def lane_width_m(self) -> float:
        return self.width_m / self.lane_count


@dataclass(frozen=True)
class OriginOffset:
    x: float
    y: float


@dataclass
class LoadReport:
    entries: list[dict] = field(default_factory=list)

    def add(self, event: str, index: int | None = None, detail: str = ""):
        entry = {"event": event, "detail": detail}
        if index is not None:
            entry["index"] = index
        self.entries.append(entry)


@dataclass(frozen=True)
class SemanticDefaults:
    """Fallbacks applied when FSZ/BRF/FAR are missing."""

    lane_width_m: float = 3.25
    lane_count_max: int = 8
    fsz_is_total: bool = True  # FSZ counts lanes over both directions


def _as_positive_int(raw) -> int | None:
    try:
        v = int(float(raw))
    except (TypeError, ValueError):
        return None
    return v if v >= 1 else None


def _as_positive_float(raw) -> float | None:
    try:
        v = float(raw)
    except (TypeError, ValueError):
        return None
    return v if v > 0 and math.isfinite(v) else None


def load_road_features(path, far_codes: dict[str, str] | None = None):
    """Parse a GeoJSON FeatureCollection into RoadFeatures.

    Returns (features, report). Non-LineString features are skipped with a
    report entry; a missing OBJID synthesizes the id "feat-<index>". Input
    feature order is preserved.
    """
    codes = DEFAULT_FAR_CODES if far_codes is None else far_codes
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GeoJsonParseError(
            f"{path}: malformed GeoJSON at byte offset {exc.pos}: {exc.msg}",
            offset=exc.pos,
        ) from exc
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise GeoJsonParseError(f"{path}: not a GeoJSON FeatureCollection")

    report = LoadReport()
    features: list[RoadFeature] = []
    for index, feat in enumerate(doc.get("features", [])):
        geom = feat.get("geometry") or {}
        if geom.get("type") != "LineString":
            report.add("skipped_geometry", index, f"type={geom.get('type')}")
            continue
        coords = geom.get("coordinates") or []
        points = [[float(c[0]), float(c[1])] for c in coords]
        deduped = dedupe_consecutive(points)
        if len(deduped) < len(points):
            report.add("dropped_duplicate_vertices", index,
                       f"{len(points) - len(deduped)} removed")
        if len(deduped) < 2:
            report.add("skipped_geometry", index, "fewer than 2 distinct points")
            continue

        props = {str(k).lower(): v for k, v in (feat.get("properties") or {}).items()
                 if str(k).lower() in KNOWN_KEYS}

        objid = props.get("objid")
        if objid is None or str(objid) == "":
            objid = f"feat-{index}"
            report.add("synthesized_id", index, objid)

        lane_count = None
        if "fsz" in props:
            lane_count = _as_positive_int(props["fsz"])
            if lane_count is None:
                report.add("invalid_attribute", index, f"FSZ={props['fsz']!r}")
        width_m = None
        if "brf" in props:
            width_m = _as_positive_float(props["brf"])
            if width_m is None:
                report.add("invalid_attribute", index, f"BRF={props['brf']!r}")
        direction = None
        if "far" in props:
            raw = str(props["far"])
            mapped = codes.get(raw)
            if mapped is None:
                direction = Direction.BOTH_WAYS
                report.add("unknown_far_code", index, raw)
            else:
                direction = Direction(mapped)

        road_class = {k.upper(): str(props[k]) for k in ("fkt", "wdm", "zus") if k in props}
        name = props.get("nam") or props.get("bez")

        features.append(RoadFeature(
            id=str(objid),
            geometry=deduped,
            lane_count=lane_count,
            width_m=width_m,
            direction=direction,
            road_class=road_class,
            name=str(name) if name is not None else None,
        ))
    return features, report


def _orient(ax, ay, bx, by, cx, cy) -> float:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _on_segment(ax, ay, bx, by, px, py) -> bool:
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


def _segments_intersect(p1, p2, q1, q2) -> bool:
    d1 = _orient(q1[0], q1[1], q2[0], q2[1], p1[0], p1[1])
    d2 = _orient(q1[0], q1[1], q2[0], q2[1], p2[0], p2[1])
    d3 = _orient(p1[0], p1[1], p2[0], p2[1], q1[0], q1[1])
    d4 = _orient(p1[0], p1[1], p2[0], p2[1], q2[0], q2[1])
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True
    if d1 == 0 and _on_segment(q1[0], q1[1], q2[0], q2[1], p1[0], p1[1]):
        return True
    if d2 == 0 and _on_segment(q1[0], q1[1], q2[0], q2[1], p2[0], p2[1]):
        return True
    if d3 == 0 and _on_segment(p1[0], p1[1], p2[0], p2[1], q1[0], q1[1]):
        return True
    if d4 == 0 and _on_segment(p1[0], p1[1], p2[0], p2[1], q2[0], q2[1]):
        return True
    return False


def _polyline_hits_roi(points, roi: RegionOfInterest) -> bool:
    for p in points:
        if roi.contains(p[0], p[1]):
            return True
    corners = [
        (roi.min_x, roi.min_y), (roi.max_x, roi.min_y),
        (roi.max_x, roi.max_y), (roi.min_x, roi.max_y),
    ]
    edges = [(corners[k], corners[(k + 1) % 4]) for k in range(4)]
    for j in range(len(points) - 1):
        for a, b in edges:
            if _segments_intersect(points[j], points[j + 1], a, b):
                return True
    return False


def clip_to_roi(features: list[RoadFeature], roi: RegionOfInterest) -> list[RoadFeature]:
    """Keep exactly the features whose geometry intersects the ROI rectangle.

    Geometries are kept whole rather than cut at the boundary so endpoint
    topology survives clipping. An empty result is a valid empty network.
    """
    return [f for f in features if _polyline_hits_roi(f.geometry, roi)]


def resolve_semantics(feature: RoadFeature, defaults: SemanticDefaults | None = None) -> ResolvedSemantics:
    """Fill missing lane count, width, and direction with documented defaults.

    Total function: lane count falls back to round(width / default lane
    width) clamped to [1, max]; width falls back to count * default width;
    direction falls back to both-ways.
    """
    cfg = defaults or SemanticDefaults()
    prov = {}

    if feature.direction is not None:
        direction = feature.direction
        prov["direction"] = FROM_ATTRIBUTE
    else:
        direction = Direction.BOTH_WAYS
        prov["direction"] = DEFAULTED

    if feature.lane_count is not None:
        lane_count = feature.lane_count
        if not cfg.fsz_is_total and direction == Direction.BOTH_WAYS:
            lane_count *= 2
        prov["lane_count"] = FROM_ATTRIBUTE
    elif feature.width_m is not None:
        lane_count = int(math.floor(feature.width_m / cfg.lane_width_m + 0.5))
        lane_count = min(max(lane_count, 1), cfg.lane_count_max)
        prov["lane_count"] = DEFAULTED
    else:
        lane_count = 1
        prov["lane_count"] = DEFAULTED

    if feature.width_m is not None:
        width_m = feature.width_m
        prov["width_m"] = FROM_ATTRIBUTE
    else:
        width_m = lane_count * cfg.lane_width_m
        prov["width_m"] = DEFAULTED

    return ResolvedSemantics(lane_count=lane_count, width_m=width_m,
                             direction=direction, provenance=prov)


def to_local(features: list[RoadFeature], roi: RegionOfInterest):
    """Translate all geometry by -(roi.min_x, roi.min_y); pure translation.

    Returns (translated features, OriginOffset holding the global origin).
    """
    ox, oy = roi.min_x, roi.min_y
    moved = []
    for f in features:
        moved.append(RoadFeature(
            id=f.id,
            geometry=[[p[0] - ox, p[1] - oy] for p in f.geometry],
            lane_count=f.lane_count,
            width_m=f.width_m,
            direction=f.direction,
            road_class=dict(f.road_class),
            name=f.name,
        ))
    return moved, OriginOffset(ox, oy)


def feature_properties(f: RoadFeature) -> dict:
    """Properties map for re-serializing a feature (cache file schema)."""
    props: dict = {"OBJID": f.id}
    if f.lane_count is not None:
        props["FSZ"] = f.lane_count
    if f.width_m is not None:
        props["BRF"] = f.width_m
    if f.direction is not None:
        props["FAR"] = f.direction.value
    for k, v in f.road_class.items():
        props[k] = v
    if f.name is not None:
        props["NAM"] = f.name
    return props


def write_clip_cache(path, features: list[RoadFeature], origin: OriginOffset, report: LoadReport):
    """Write clipped features (local frame) as GeoJSON plus origin and report."""
    doc = {
        "type": "FeatureCollection",
        "origin_offset": {"x": origin.x, "y": origin.y},
        "load_report": report.entries,
        "features": [
            {
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": f.geometry},
                "properties": feature_properties(f),
            }
            for f in features
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
