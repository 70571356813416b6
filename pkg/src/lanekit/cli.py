"""Command-line pipeline orchestrator.

Subcommands run one stage each; `pipeline` chains clip -> generate ->
convert -> verify. Exit status: 0 success, 1 violations found (verify
only, controllable via --no-fail-on-violation), 2 on errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, defectlab, geodata, laneletize, mapgen, rules, terrain
from .config import RunConfig, load_config
from .errors import ConfigError, LanekitError
from .geodata import RegionOfInterest


def _parse_roi(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise ConfigError(f"--roi expects x0,y0,x1,y1, got {text!r}")
    return tuple(float(p) for p in parts)  # type: ignore[return-value]


def _parse_spec(text: str) -> dict[str, int]:
    spec = {}
    for item in text.split(","):
        if not item:
            continue
        if "=" not in item:
            raise ConfigError(f"--spec entries must be category=count, got {item!r}")
        key, _, val = item.partition("=")
        spec[key.strip()] = int(val)
    return spec


_OVERRIDE_FIELDS = (
    "roads", "rules", "out", "seed", "cluster_tol", "proj_tol",
    "min_segment_length", "match_radius", "heading_tol_deg", "smooth_window",
    "max_grade", "sampling_step", "default_lane_width", "partitions",
)


def _effective_config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    for name in _OVERRIDE_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            setattr(cfg, name, value)
    if getattr(args, "roi", None) is not None:
        cfg.roi = _parse_roi(args.roi)
    if getattr(args, "dem", None):
        cfg.dem = list(args.dem)
    if getattr(args, "step", None) is not None:
        cfg.sampling_step = args.step
    if getattr(args, "cache", False):
        cfg.cache = True
    if getattr(args, "fail_on_violation", None) is not None:
        cfg.fail_on_violation = args.fail_on_violation
    cfg.validate()
    return cfg


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    echo = cfg.to_dict()
    echo.pop("out", None)  # keep artifacts byte-identical across out dirs
    echo_path = out / "config.echo.json"
    echo_path.write_text(json.dumps(
        {"config_hash": cfg.config_hash(), "config": echo}, indent=2) + "\n")
    return out


def _load_clipped_local(cfg: RunConfig):
    if cfg.roads is None or cfg.roi is None:
        raise ConfigError("this stage needs --roads and --roi (or a config providing them)")
    roi = RegionOfInterest(*cfg.roi)
    features, report = geodata.load_road_features(cfg.roads, cfg.far_codes)
    clipped = geodata.clip_to_roi(features, roi)
    local, origin = geodata.to_local(clipped, roi)
    return local, origin, report, roi


def _load_rules(cfg: RunConfig):
    if cfg.rules is None:
        return rules.parse_rules(rules.default_rules_text())
    return rules.load_rules(cfg.rules)


def stage_clip(cfg: RunConfig) -> dict:
    local, origin, report, _ = _load_clipped_local(cfg)
    artifacts = {"kept": len(local), "report_entries": len(report.entries)}
    if cfg.cache:
        path = _out_dir(cfg) / "roads.clipped.geojson"
        geodata.write_clip_cache(path, local, origin, report)
        artifacts["cache"] = str(path)
    return artifacts


def stage_generate(cfg: RunConfig) -> dict:
    local, origin, _, _ = _load_clipped_local(cfg)
    if not cfg.dem:
        raise ConfigError("generate needs at least one --dem tile")
    dem = terrain.mosaic([terrain.load_asc(p) for p in cfg.dem])
    doc = mapgen.build_document(
        local, origin, dem,
        defaults=cfg.semantic_defaults(),
        cluster_tol=cfg.cluster_tol,
        proj_tol=cfg.proj_tol,
        min_segment_length=cfg.min_segment_length,
        match_radius=cfg.match_radius,
        heading_tol_deg=cfg.heading_tol_deg,
        straight_max_deg=cfg.straight_max_deg,
        turn_max_deg=cfg.turn_max_deg,
        smooth_window=cfg.smooth_window,
        max_grade=cfg.max_grade,
        both_ways_left_against=cfg.both_ways_left_against,
        miter_limit=cfg.miter_limit,
        metadata={"version": __version__, "config_hash": cfg.config_hash()},
    )
    out = _out_dir(cfg)
    local_path = out / "map.local.hdmap.json"
    global_path = out / "map.hdmap.json"
    mapgen.save_document(doc, local_path)
    mapgen.save_document(mapgen.restore_global(doc), global_path)
    return {"map_local": str(local_path), "map_global": str(global_path)}


def stage_convert(cfg: RunConfig, map_path) -> dict:
    doc = mapgen.load_document(map_path)
    # geometry is converted in the local frame so coordinate magnitudes
    # stay well inside the XML print precision
    doc = mapgen.to_local_frame(doc)
    net = laneletize.convert(doc, cfg.sampling_step)
    path = _out_dir(cfg) / "network.xml"
    laneletize.write_network(net, path)
    return {"network": str(path)}


def stage_verify(cfg: RunConfig, net_path) -> tuple[rules.ViolationReport, dict]:
    ruleset = _load_rules(cfg)
    net = laneletize.read_network(net_path)
    report = rules.evaluate_partitioned(ruleset, net, cfg.partitions)
    out = _out_dir(cfg)
    report_path = out / "report.json"
    with open(report_path, "wb") as fh:
        fh.write(rules.report_bytes(report))
    text_path = out / "report.txt"
    with open(text_path, "w", encoding="utf-8") as fh:
        fh.write(rules.render_text(report))
    return report, {"report": str(report_path), "report_text": str(text_path)}


def stage_inject(cfg: RunConfig, net_path, spec: dict[str, int]) -> dict:
    net = laneletize.read_network(net_path)
    injected, manifest = defectlab.inject(net, spec, cfg.seed, rules=_load_rules(cfg))
    out = _out_dir(cfg)
    net_out = out / "network.injected.xml"
    laneletize.write_network(injected, net_out)
    manifest_path = out / "manifest.json"
    with open(manifest_path, "wb") as fh:
        fh.write(defectlab.manifest_bytes(manifest))
    return {"network": str(net_out), "manifest": str(manifest_path)}


def stage_evaluate(cfg: RunConfig, report_path, manifest_path,
                   rule_map_path=None) -> dict:
    with open(report_path, "r", encoding="utf-8") as fh:
        report = rules.report_from_dict(json.load(fh))
    with open(manifest_path, "r", encoding="utf-8") as fh:
        manifest = defectlab.manifest_from_dict(json.load(fh))
    rule_map = None
    if rule_map_path is not None:
        with open(rule_map_path, "r", encoding="utf-8") as fh:
            rule_map = json.load(fh)
    metrics = defectlab.score(report, manifest, rule_map)
    out = _out_dir(cfg) / "metrics.json"
    with open(out, "wb") as fh:
        fh.write(defectlab.metrics_bytes(metrics))
    return {"metrics": str(out)}


def cmd_clip(args) -> int:
    cfg = _effective_config(args)
    artifacts = stage_clip(cfg)
    print(f"clip: kept {artifacts['kept']} feature(s)")
    if "cache" in artifacts:
        print(f"clip: wrote {artifacts['cache']}")
    return 0


def cmd_generate(args) -> int:
    cfg = _effective_config(args)
    artifacts = stage_generate(cfg)
    print(f"generate: wrote {artifacts['map_global']}")
    return 0


def cmd_convert(args) -> int:
    cfg = _effective_config(args)
    artifacts = stage_convert(cfg, args.map)
    print(f"convert: wrote {artifacts['network']}")
    return 0


def cmd_verify(args) -> int:
    cfg = _effective_config(args)
    report, artifacts = stage_verify(cfg, args.net)
    print(rules.render_text(report), end="")
    print(f"verify: wrote {artifacts['report']}")
    if report.total_violations and cfg.fail_on_violation:
        return 1
    return 0


def cmd_inject(args) -> int:
    cfg = _effective_config(args)
    artifacts = stage_inject(cfg, args.net, _parse_spec(args.spec))
    print(f"inject: wrote {artifacts['network']} and {artifacts['manifest']}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = _effective_config(args)
    artifacts = stage_evaluate(cfg, args.report, args.manifest, args.rule_map)
    print(f"evaluate: wrote {artifacts['metrics']}")
    return 0


def cmd_pipeline(args) -> int:
    cfg = _effective_config(args)
    stage_clip(cfg)
    generated = stage_generate(cfg)
    converted = stage_convert(cfg, generated["map_local"])
    report, artifacts = stage_verify(cfg, converted["network"])
    print(rules.render_text(report), end="")
    print(f"pipeline: artifacts under {cfg.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lanekit",
                                     description="HD map generation and verification pipeline")
    parser.add_argument("--version", action="version", version=f"lanekit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON run config; flags override its fields")
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("clip", help="clip road features to the ROI")
    common(p)
    p.add_argument("--roads", help="road GeoJSON file")
    p.add_argument("--roi", help="x0,y0,x1,y1 in projected meters")
    p.add_argument("--cache", action="store_true", help="write the clipped-feature cache file")
    p.set_defaults(func=cmd_clip)

    p = sub.add_parser("generate", help="build the lane-level map document")
    common(p)
    p.add_argument("--roads")
    p.add_argument("--roi")
    p.add_argument("--dem", action="append", help="DEM tile (.asc), repeatable; mosaicked in order")
    p.add_argument("--cluster-tol", dest="cluster_tol", type=float)
    p.add_argument("--proj-tol", dest="proj_tol", type=float)
    p.add_argument("--match-radius", dest="match_radius", type=float)
    p.add_argument("--heading-tol", dest="heading_tol_deg", type=float)
    p.add_argument("--smooth-window", dest="smooth_window", type=int)
    p.add_argument("--max-grade", dest="max_grade", type=float)
    p.add_argument("--default-lane-width", dest="default_lane_width", type=float)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("convert", help="convert a map document into a lanelet network")
    common(p)
    p.add_argument("--map", required=True, help=".hdmap.json document")
    p.add_argument("--step", type=float, help="boundary sampling step in meters")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("verify", help="evaluate constraint rules over a network")
    common(p)
    p.add_argument("--net", required=True, help="lanelet network XML")
    p.add_argument("--rules", help="rule file (defaults to the shipped rules)")
    p.add_argument("--partitions", type=int)
    p.add_argument("--fail-on-violation", action=argparse.BooleanOptionalAction,
                   default=None, help="exit 1 when violations are found (default on)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("inject", help="inject defects into a clean network")
    common(p)
    p.add_argument("--net", required=True)
    p.add_argument("--spec", required=True,
                   help="category=count,... with categories "
                        "elevation_non_finite, lane_width_narrow, self_loop_successor")
    p.add_argument("--seed", type=int)
    p.add_argument("--rules", help="rule file for the baseline cleanliness check")
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("evaluate", help="score a report against a defect manifest")
    common(p)
    p.add_argument("--report", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--rule-map", dest="rule_map", help="JSON rule-id -> category map")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pipeline", help="run clip, generate, convert, verify in order")
    common(p)
    p.add_argument("--roads")
    p.add_argument("--roi")
    p.add_argument("--dem", action="append")
    p.add_argument("--rules")
    p.set_defaults(func=cmd_pipeline)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (LanekitError, OSError, json.JSONDecodeError) as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
