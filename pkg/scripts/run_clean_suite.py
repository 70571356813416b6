#!/usr/bin/env python3
"""Clean-map verification sweep.

Generates every scenario at every parameter set, runs the shipped rules
over each converted network, and prints a per-map and per-rule violation
table. A consistent build reports zero everywhere.
"""

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from lanekit import defectlab, rules  # noqa: E402
from run_defect_study import build_network  # noqa: E402


def main():
    shipped = rules.parse_rules(rules.default_rules_text())
    rule_ids = [r.rule_id for r in shipped]
    t0 = time.perf_counter()
    rows = []
    for scenario in defectlab.SCENARIOS:
        for set_index in range(len(defectlab.PARAM_SETS)):
            net = build_network(scenario, set_index)
            report = rules.evaluate(shipped, net)
            counts = {r.rule_id: r.count for r in report.rules}
            rows.append((scenario, set_index, len(net.lanelets), counts))
    elapsed = time.perf_counter() - t0

    header = f"{'scenario':12s} {'set':>3s} {'lanelets':>8s} " + \
        " ".join(f"{rid:>18s}" for rid in rule_ids)
    print(header)
    print("-" * len(header))
    total = 0
    for scenario, set_index, n, counts in rows:
        total += sum(counts.values())
        print(f"{scenario:12s} {set_index:3d} {n:8d} " +
              " ".join(f"{counts[rid]:18d}" for rid in rule_ids))
    print("-" * len(header))
    print(f"{len(rows)} maps, {total} total violations, {elapsed:.2f} s")
    return 0 if total == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
