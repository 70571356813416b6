"""Run configuration: every pipeline tunable in one dataclass, loadable
from JSON, hashable for artifact metadata."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

from .errors import ConfigError
from .geodata import DEFAULT_FAR_CODES, SemanticDefaults


@dataclass
class RunConfig:
    roads: str | None = None
    roi: tuple[float, float, float, float] | None = None
    dem: list[str] = field(default_factory=list)
    rules: str | None = None  # None -> packaged default rule file
    out: str = "out"
    seed: int = 0

    cluster_tol: float = 1.0
    proj_tol: float = 1.0
    min_segment_length: float = 1.0
    match_radius: float = 5.0
    heading_tol_deg: float = 30.0
    straight_max_deg: float = 30.0
    turn_max_deg: float = 150.0
    smooth_window: int = 5
    max_grade: float = 0.12
    sampling_step: float = 1.0
    default_lane_width: float = 3.25
    lane_count_max: int = 8
    fsz_is_total: bool = True
    both_ways_left_against: bool = True
    miter_limit: float = 3.0
    far_codes: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_FAR_CODES))

    cache: bool = False
    fail_on_violation: bool = True
    partitions: int = 1

    def validate(self):
        checks = [
            (self.cluster_tol > 0, "cluster_tol must be > 0"),
            (self.proj_tol > 0, "proj_tol must be > 0"),
            (self.min_segment_length > 0, "min_segment_length must be > 0"),
            (self.match_radius > 0, "match_radius must be > 0"),
            (0 < self.heading_tol_deg <= 90, "heading_tol_deg must be in (0, 90]"),
            (0 < self.straight_max_deg < self.turn_max_deg <= 180,
             "need 0 < straight_max_deg < turn_max_deg <= 180"),
            (self.smooth_window >= 1 and self.smooth_window % 2 == 1,
             "smooth_window must be an odd integer >= 1"),
            (0 < self.max_grade <= 1, "max_grade must be in (0, 1]"),
            (self.sampling_step > 0, "sampling_step must be > 0"),
            (self.default_lane_width > 0, "default_lane_width must be > 0"),
            (self.lane_count_max >= 1, "lane_count_max must be >= 1"),
            (self.miter_limit >= 1, "miter_limit must be >= 1"),
            (self.partitions >= 1, "partitions must be >= 1"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)

    def semantic_defaults(self) -> SemanticDefaults:
        return SemanticDefaults(lane_width_m=self.default_lane_width,
                                lane_count_max=self.lane_count_max,
                                fsz_is_total=self.fsz_is_total)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["roi"] = list(self.roi) if self.roi is not None else None
        return d

    def config_hash(self) -> str:
        # the output directory does not influence artifact content
        d = self.to_dict()
        d.pop("out", None)
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def load_config(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return config_from_dict(data)


def config_from_dict(data: dict) -> RunConfig:
    cfg = RunConfig()
    known = set(cfg.__dataclass_fields__)
    for key, value in data.items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        if key == "roi" and value is not None:
            value = tuple(float(v) for v in value)
        setattr(cfg, key, value)
    cfg.validate()
    return cfg


def save_config(cfg: RunConfig, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cfg.to_dict(), fh, indent=2)
        fh.write("\n")
