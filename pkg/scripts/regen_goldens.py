#!/usr/bin/env python3
"""Regenerate the golden artifacts under testdata/.

The goldens pin the on-disk schemas (map document JSON, lanelet XML,
report/manifest/metrics JSON) and the end-to-end determinism of the
pipeline. Rerun this script only when an intentional schema change makes
the committed files stale.
"""

import argparse
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from lanekit import defectlab, laneletize, mapgen, rules, geodata, terrain  # noqa: E402

SEED = 7
SPEC = {category: 2 for category in defectlab.CATEGORIES}


def build_goldens(out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    bundle = defectlab.make_fixture("t_junction", defectlab.PARAM_SETS[0])
    with tempfile.TemporaryDirectory() as tmp:
        paths = defectlab.materialize_fixture(bundle, tmp)
        features, _ = geodata.load_road_features(paths["roads"])
        roi = geodata.RegionOfInterest(*paths["roi"])
        local, origin = geodata.to_local(geodata.clip_to_roi(features, roi), roi)
        dem = terrain.load_asc(paths["dem"])
    doc = mapgen.build_document(local, origin, dem,
                                metadata={"config_hash": "golden"})
    mapgen.save_document(mapgen.restore_global(doc), out_dir / "tj_small.hdmap.json")

    net = laneletize.convert(doc, 1.0)
    laneletize.write_network(net, out_dir / "tj_small.network.xml")

    shipped = rules.parse_rules(rules.default_rules_text())
    injected, manifest = defectlab.inject(net, SPEC, seed=SEED)
    laneletize.write_network(injected, out_dir / "tj_small.injected.network.xml")
    (out_dir / "tj_small.manifest.json").write_bytes(defectlab.manifest_bytes(manifest))

    report = rules.evaluate(shipped, injected)
    (out_dir / "tj_small.report.json").write_bytes(rules.report_bytes(report))

    metrics = defectlab.score(report, manifest)
    (out_dir / "tj_small.metrics.json").write_bytes(defectlab.metrics_bytes(metrics))
    return out_dir


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "testdata"))
    args = parser.parse_args()
    out = build_goldens(Path(args.out))
    for p in sorted(out.iterdir()):
        print(f"wrote {p}")


if __name__ == "__main__":
    main()
