"""Synthetic scenario fixtures, controlled defect injection, and detection
scoring (precision / true-positive rate / false positives).

Fixtures are deterministic desk-scale road networks in a synthetic UTM-like
frame, paired with a gentle analytic elevation surface so grade clamping
stays inactive on honest inputs. Injection mutates a verified-clean lanelet
network and records ground truth; scoring matches reported violations
against that ground truth by (category, element id).
"""

from __future__ import annotations

import copy
import json
import math
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, InjectionError, ScoringError
from .geodata import RegionOfInterest
from .laneletize import LaneletNetwork
from .rules import ViolationReport, evaluate, parse_rules, default_rules_text
from .terrain import DemGrid, write_asc

ELEVATION_NON_FINITE = "elevation_non_finite"
LANE_WIDTH_NARROW = "lane_width_narrow"
SELF_LOOP_SUCCESSOR = "self_loop_successor"

CATEGORIES = (ELEVATION_NON_FINITE, LANE_WIDTH_NARROW, SELF_LOOP_SUCCESSOR)

SCENARIOS = ("straight", "curve", "t_junction", "crossing", "merge")

# Which shipped rule detects which injected defect category; rules without
# a category take no part in scoring but must still be listed.
DEFAULT_RULE_CATEGORIES: dict[str, str | None] = {
    "elevation_complete": ELEVATION_NON_FINITE,
    "min_lane_width": LANE_WIDTH_NARROW,
    "no_self_loop": SELF_LOOP_SUCCESSOR,
    "polyline_valid": None,
    "min_turn_radius": None,
}

NARROW_WIDTH_M = 0.8
NARROW_RUN = 3  # consecutive indices pinched per width defect
ELEVATION_POINTS = 3  # interior left-bound vertices corrupted per defect

GLOBAL_X0 = 604000.0
GLOBAL_Y0 = 5792000.0

FIXTURE_LANE_WIDTH_M = 3.5
STRAIGHT_VERTEX_SPACING = 5.0
ARC_VERTEX_SPACING = 0.05  # fine so offset boundaries track the arc closely
MERGE_ANGLE_DEG = 20.0
ROI_MARGIN = 20.0
DEM_MARGIN = 10.0


@dataclass(frozen=True)
class FixtureParams:
    length_m: float = 100.0
    radius_m: float = 25.0
    lanes_per_direction: int = 1
    surface_base: float = 100.0
    surface_slope_x: float = 0.01
    surface_wave: float = 1.0  # amplitude of sin(y / 50); slope <= wave / 50

    def validate(self):
        if not 50.0 <= self.length_m <= 500.0:
            raise ConfigError(f"length_m {self.length_m} outside [50, 500]")
        if self.radius_m < 15.0:
            raise ConfigError(f"radius_m {self.radius_m} below 15")
        if not 1 <= self.lanes_per_direction <= 3:
            raise ConfigError(f"lanes_per_direction {self.lanes_per_direction} outside [1, 3]")
        if max(abs(self.surface_slope_x), abs(self.surface_wave) / 50.0) > 0.05:
            raise ConfigError("fixture surface slope exceeds 0.05")


# The three parameter sets used by the clean-map sweep.
PARAM_SETS = (
    FixtureParams(length_m=60.0, radius_m=15.0, lanes_per_direction=1),
    FixtureParams(length_m=100.0, radius_m=25.0, lanes_per_direction=2),
    FixtureParams(length_m=200.0, radius_m=40.0, lanes_per_direction=3),
)


@dataclass
class FixtureBundle:
    scenario: str
    params: FixtureParams
    roads: dict  # GeoJSON FeatureCollection
    dem: DemGrid
    roi: RegionOfInterest


@dataclass
class DefectEntry:
    category: str
    target_lanelet_id: int
    parameters: dict = field(default_factory=dict)


@dataclass
class DefectManifest:
    seed: int
    entries: list[DefectEntry] = field(default_factory=list)

    def targets(self, category: str) -> set[int]:
        return {e.target_lanelet_id for e in self.entries if e.category == category}


@dataclass
class DetectionMetrics:
    n_injected: int
    n_reported: int
    n_true_positive: int
    n_false_positive: int
    precision: float | None  # None when nothing was reported
    tpr: float


# --- fixture generation --------------------------------------------------

def _densify(points: list[list[float]], spacing: float) -> list[list[float]]:
    out = [list(points[0])]
    for a, b in zip(points, points[1:]):
        seg = math.hypot(b[0] - a[0], b[1] - a[1])
        n = max(1, math.ceil(seg / spacing))
        for k in range(1, n + 1):
            t = k / n
            out.append([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])])
    return out


def _arc(radius: float, sweep_rad: float, spacing: float) -> list[list[float]]:
    """Left-turning arc from (0,0) heading +x, center at (0, radius)."""
    n = max(2, math.ceil(sweep_rad * radius / spacing))
    pts = []
    for k in range(n + 1):
        t = sweep_rad * k / n
        pts.append([radius * math.sin(t), radius * (1.0 - math.cos(t))])
    return pts


def _feature(objid: str, coords, lanes_total: int, far: str) -> dict:
    return {
        "type": "Feature",
        "geometry": {"type": "LineString", "coordinates": [list(p) for p in coords]},
        "properties": {
            "OBJID": objid,
            "FSZ": lanes_total,
            "BRF": round(lanes_total * FIXTURE_LANE_WIDTH_M, 6),
            "FAR": far,
        },
    }


def _scenario_features(scenario: str, p: FixtureParams) -> list[dict]:
    L = p.length_m
    n_both = 2 * p.lanes_per_direction
    n_one = p.lanes_per_direction
    if scenario == "straight":
        pts = _densify([[0.0, 0.0], [L, 0.0]], STRAIGHT_VERTEX_SPACING)
        return [_feature("straight-1", pts, n_both, "both")]
    if scenario == "curve":
        sweep = min(L / p.radius_m, 2.0 * math.pi / 3.0)
        pts = _arc(p.radius_m, sweep, ARC_VERTEX_SPACING)
        return [_feature("curve-1", pts, n_both, "both")]
    if scenario == "t_junction":
        bar = _densify([[-L, 0.0], [L, 0.0]], STRAIGHT_VERTEX_SPACING)
        stem = _densify([[0.0, -L], [0.0, 0.0]], STRAIGHT_VERTEX_SPACING)
        return [_feature("tj-bar", bar, n_both, "both"),
                _feature("tj-stem", stem, n_both, "both")]
    if scenario == "crossing":
        arms = {
            "crossing-e": [[0.0, 0.0], [L, 0.0]],
            "crossing-n": [[0.0, 0.0], [0.0, L]],
            "crossing-w": [[0.0, 0.0], [-L, 0.0]],
            "crossing-s": [[0.0, 0.0], [0.0, -L]],
        }
        return [_feature(name, _densify(pts, STRAIGHT_VERTEX_SPACING), n_both, "both")
                for name, pts in arms.items()]
    if scenario == "merge":
        ang = math.radians(MERGE_ANGLE_DEG)
        a = _densify([[-L * math.cos(ang), L * math.sin(ang)], [0.0, 0.0]],
                     STRAIGHT_VERTEX_SPACING)
        b = _densify([[-L * math.cos(ang), -L * math.sin(ang)], [0.0, 0.0]],
                     STRAIGHT_VERTEX_SPACING)
        out = _densify([[0.0, 0.0], [L, 0.0]], STRAIGHT_VERTEX_SPACING)
        return [_feature("merge-in-a", a, n_one, "in_direction"),
                _feature("merge-in-b", b, n_one, "in_direction"),
                _feature("merge-out", out, n_one, "in_direction")]
    raise ConfigError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")


def _surface_dem(roi: RegionOfInterest, p: FixtureParams) -> DemGrid:
    ox = math.floor(roi.min_x) - DEM_MARGIN
    oy = math.floor(roi.min_y) - DEM_MARGIN
    n_cols = int(math.ceil(roi.max_x + DEM_MARGIN - ox))
    n_rows = int(math.ceil(roi.max_y + DEM_MARGIN - oy))
    xc = ox + (np.arange(n_cols) + 0.5)
    yc = oy + (np.arange(n_rows) + 0.5)
    xx, yy = np.meshgrid(xc, yc)
    values = (p.surface_base
              + p.surface_slope_x * (xx - roi.min_x)
              + p.surface_wave * np.sin((yy - roi.min_y) / 50.0))
    return DemGrid(float(ox), float(oy), 1.0, n_cols, n_rows, -9999.0, values)


def make_fixture(scenario: str, params: FixtureParams | None = None) -> FixtureBundle:
    """Deterministic synthetic inputs (roads + DEM + ROI) for the pipeline."""
    p = params or FixtureParams()
    p.validate()
    features = _scenario_features(scenario, p)
    for feat in features:
        for c in feat["geometry"]["coordinates"]:
            c[0] += GLOBAL_X0
            c[1] += GLOBAL_Y0
    xs = [c[0] for f in features for c in f["geometry"]["coordinates"]]
    ys = [c[1] for f in features for c in f["geometry"]["coordinates"]]
    roi = RegionOfInterest(
        math.floor(min(xs) - ROI_MARGIN), math.floor(min(ys) - ROI_MARGIN),
        math.ceil(max(xs) + ROI_MARGIN), math.ceil(max(ys) + ROI_MARGIN),
    )
    roads = {"type": "FeatureCollection", "features": features}
    return FixtureBundle(scenario, p, roads, _surface_dem(roi, p), roi)


def materialize_fixture(bundle: FixtureBundle, out_dir) -> dict:
    """Write roads.geojson and dem.asc under out_dir; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    roads_path = out / "roads.geojson"
    with open(roads_path, "w", encoding="utf-8") as fh:
        json.dump(bundle.roads, fh, indent=2)
        fh.write("\n")
    dem_path = out / "dem.asc"
    write_asc(bundle.dem, dem_path)
    return {
        "roads": str(roads_path),
        "dem": str(dem_path),
        "roi": [bundle.roi.min_x, bundle.roi.min_y, bundle.roi.max_x, bundle.roi.max_y],
    }


# --- defect injection ----------------------------------------------------

def _eligible(lanelet, category: str) -> bool:
    if category == SELF_LOOP_SUCCESSOR:
        return True
    interior = len(lanelet.left_bound) - 2
    if category == ELEVATION_NON_FINITE:
        return interior >= ELEVATION_POINTS
    if category == LANE_WIDTH_NARROW:
        return (len(lanelet.left_bound) == len(lanelet.right_bound)
                and interior >= NARROW_RUN)
    raise InjectionError(f"unknown defect category {category!r}")


def _inject_elevation(lanelet, rng: random.Random) -> dict:
    interior = range(1, len(lanelet.left_bound) - 1)
    indices = sorted(rng.sample(list(interior), ELEVATION_POINTS))
    for i in indices:
        lanelet.left_bound[i][2] = math.nan
    return {"indices": indices}


def _inject_narrow(lanelet, rng: random.Random) -> dict:
    n = len(lanelet.left_bound)
    start = rng.randrange(1, n - NARROW_RUN)
    for i in range(start, start + NARROW_RUN):
        c = lanelet.centerline[i]
        l = lanelet.left_bound[i]
        r = lanelet.right_bound[i]
        d2 = math.hypot(l[0] - r[0], l[1] - r[1])
        s = NARROW_WIDTH_M / d2
        for ax in range(3):
            l[ax] = c[ax] + (l[ax] - c[ax]) * s
            r[ax] = c[ax] + (r[ax] - c[ax]) * s
        # keep the midpoint invariant intact: only the width rule may fire
        for ax in range(3):
            c[ax] = (l[ax] + r[ax]) / 2.0
    return {"start_index": start, "width_m": NARROW_WIDTH_M, "points": NARROW_RUN}


def _inject_self_loop(lanelet, rng: random.Random) -> dict:
    lanelet.successors.append(lanelet.id)
    return {}


_INJECTORS = {
    ELEVATION_NON_FINITE: _inject_elevation,
    LANE_WIDTH_NARROW: _inject_narrow,
    SELF_LOOP_SUCCESSOR: _inject_self_loop,
}


def inject(net: LaneletNetwork, spec: dict[str, int], seed: int,
           rules=None) -> tuple[LaneletNetwork, DefectManifest]:
    """Inject spec[category] defects per category into a clean network.

    The baseline must verify clean against the shipped rules (or the given
    ones); targets are drawn without replacement per category, categories
    processed in canonical order, so the result is a pure function of
    (net, spec, seed). Lanelets outside the manifest are untouched.
    """
    for category in spec:
        if category not in CATEGORIES:
            raise InjectionError(f"unknown defect category {category!r}")
    if rules is None:
        rules = parse_rules(default_rules_text())
    baseline = evaluate(rules, net)
    if baseline.total_violations:
        raise InjectionError(
            f"baseline network is not clean: {baseline.total_violations} violation(s)")

    out = copy.deepcopy(net)
    out.defect_artifact = True
    rng = random.Random(seed)
    entries: list[DefectEntry] = []
    for category in CATEGORIES:
        count = spec.get(category, 0)
        if count <= 0:
            continue
        eligible = [lid for lid in sorted(out.lanelets)
                    if _eligible(out.lanelets[lid], category)]
        if count > len(eligible):
            raise InjectionError(
                f"{category}: requested {count} defects, only {len(eligible)} eligible lanelets")
        targets = sorted(rng.sample(eligible, count))
        for lid in targets:
            params = _INJECTORS[category](out.lanelets[lid], rng)
            entries.append(DefectEntry(category, lid, params))
    return out, DefectManifest(seed=seed, entries=entries)


# --- scoring -------------------------------------------------------------

def score(report: ViolationReport, manifest: DefectManifest,
          rule_map: dict[str, str | None] | None = None) -> dict[str, DetectionMetrics]:
    """Score a verification report against injected ground truth.

    A violation is a true positive iff (its rule's category, element id)
    appears in the manifest; precision is undefined (None) for categories
    with zero reported violations, TPR is 1.0 when nothing was injected.
    """
    mapping = DEFAULT_RULE_CATEGORIES if rule_map is None else rule_map
    for result in report.rules:
        if result.rule_id not in mapping:
            raise ScoringError(f"rule {result.rule_id!r} missing from the rule-category map")
    categories = [c for c in CATEGORIES
                  if c in set(mapping.values()) or manifest.targets(c)]
    metrics: dict[str, DetectionMetrics] = {}
    for category in categories:
        reported = [v for result in report.rules if mapping[result.rule_id] == category
                    for v in result.violations]
        injected = manifest.targets(category)
        tp = len({v.element_id for v in reported} & injected)
        n_rep = len(reported)
        metrics[category] = DetectionMetrics(
            n_injected=len(injected),
            n_reported=n_rep,
            n_true_positive=tp,
            n_false_positive=n_rep - tp,
            precision=(tp / n_rep) if n_rep > 0 else None,
            tpr=(tp / len(injected)) if injected else 1.0,
        )
    return metrics


# --- serialization -------------------------------------------------------

def manifest_to_dict(manifest: DefectManifest) -> dict:
    return {
        "seed": manifest.seed,
        "entries": [
            {"category": e.category, "target_lanelet_id": e.target_lanelet_id,
             "parameters": dict(e.parameters)}
            for e in manifest.entries
        ],
    }


def manifest_from_dict(data: dict) -> DefectManifest:
    entries = []
    for e in data["entries"]:
        if e["category"] not in CATEGORIES:
            raise InjectionError(f"unknown defect category {e['category']!r} in manifest")
        entries.append(DefectEntry(e["category"], e["target_lanelet_id"],
                                   dict(e.get("parameters", {}))))
    return DefectManifest(seed=data["seed"], entries=entries)


def manifest_bytes(manifest: DefectManifest) -> bytes:
    return (json.dumps(manifest_to_dict(manifest), indent=2) + "\n").encode("utf-8")


def metrics_to_dict(metrics: dict[str, DetectionMetrics]) -> dict:
    return {
        category: {
            "n_injected": m.n_injected,
            "n_reported": m.n_reported,
            "n_true_positive": m.n_true_positive,
            "n_false_positive": m.n_false_positive,
            "precision": m.precision,
            "tpr": m.tpr,
        }
        for category, m in metrics.items()
    }


def metrics_bytes(metrics: dict[str, DetectionMetrics]) -> bytes:
    return (json.dumps(metrics_to_dict(metrics), indent=2) + "\n").encode("utf-8")
