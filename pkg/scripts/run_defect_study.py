#!/usr/bin/env python3
"""Controlled defect-injection study.

Builds a clean scenario network, verifies the baseline, injects N defects
per category with a fixed seed, re-verifies, and scores detections. Prints
a per-category table with baseline violations, injected/detected counts,
true/false positives, precision, and TPR.
"""

import argparse
import sys
import tempfile
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from lanekit import defectlab, geodata, laneletize, mapgen, rules, terrain  # noqa: E402


def build_network(scenario: str, set_index: int):
    bundle = defectlab.make_fixture(scenario, defectlab.PARAM_SETS[set_index])
    with tempfile.TemporaryDirectory() as tmp:
        paths = defectlab.materialize_fixture(bundle, tmp)
        features, _ = geodata.load_road_features(paths["roads"])
        roi = geodata.RegionOfInterest(*paths["roi"])
        local, origin = geodata.to_local(geodata.clip_to_roi(features, roi), roi)
        dem = terrain.load_asc(paths["dem"])
    doc = mapgen.build_document(local, origin, dem)
    return laneletize.convert(doc, 1.0)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scenario", choices=defectlab.SCENARIOS, default="crossing")
    parser.add_argument("--set", type=int, default=1, choices=range(len(defectlab.PARAM_SETS)))
    parser.add_argument("--count", type=int, default=10, help="defects per category")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    t0 = time.perf_counter()
    shipped = rules.parse_rules(rules.default_rules_text())
    net = build_network(args.scenario, args.set)
    baseline = rules.evaluate(shipped, net)

    spec = {category: args.count for category in defectlab.CATEGORIES}
    injected, manifest = defectlab.inject(net, spec, seed=args.seed)
    report = rules.evaluate(shipped, injected)
    metrics = defectlab.score(report, manifest)
    elapsed = time.perf_counter() - t0

    print(f"scenario={args.scenario} set={args.set} lanelets={len(net.lanelets)} "
          f"seed={args.seed}")
    print(f"baseline violations: {baseline.total_violations}")
    print()
    header = f"{'category':24s} {'Base.':>5s} {'Inj.':>5s} {'Det.':>5s} " \
             f"{'TP':>4s} {'FP':>4s} {'Precision':>9s} {'TPR':>6s}"
    print(header)
    print("-" * len(header))
    for category in defectlab.CATEGORIES:
        m = metrics[category]
        precision = "n/a" if m.precision is None else f"{m.precision:.3f}"
        print(f"{category:24s} {0:5d} {m.n_injected:5d} {m.n_reported:5d} "
              f"{m.n_true_positive:4d} {m.n_false_positive:4d} {precision:>9s} "
              f"{m.tpr:6.3f}")
    print()
    print(f"elapsed: {elapsed:.2f} s")
    ok = all(m.precision == 1.0 and m.tpr == 1.0 and m.n_false_positive == 0
             for m in metrics.values())
    return 0 if ok and baseline.total_violations == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
