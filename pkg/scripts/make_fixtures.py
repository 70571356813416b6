#!/usr/bin/env python3
"""Materialize a synthetic scenario fixture (roads.geojson, dem.asc, and a
ready-to-run pipeline config.json) into a directory.

Example:
    python scripts/make_fixtures.py --scenario crossing --set 1 --out fixtures/crossing
    lanekit pipeline --config fixtures/crossing/config.json --out out/crossing
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from lanekit import defectlab  # noqa: E402


def main():
    parser = argparse.ArgumentParser(description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--scenario", choices=defectlab.SCENARIOS, required=True)
    parser.add_argument("--set", type=int, default=0, choices=range(len(defectlab.PARAM_SETS)),
                        help="parameter set index (size/lane sweep)")
    parser.add_argument("--out", required=True)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    bundle = defectlab.make_fixture(args.scenario, defectlab.PARAM_SETS[args.set])
    out = Path(args.out)
    paths = defectlab.materialize_fixture(bundle, out)
    config = {
        "roads": paths["roads"],
        "roi": paths["roi"],
        "dem": [paths["dem"]],
        "seed": args.seed,
        "cache": True,
    }
    cfg_path = out / "config.json"
    cfg_path.write_text(json.dumps(config, indent=2) + "\n")
    print(f"wrote {paths['roads']}")
    print(f"wrote {paths['dem']}")
    print(f"wrote {cfg_path}")


if __name__ == "__main__":
    main()
