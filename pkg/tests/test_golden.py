"""Golden-file pinning: the on-disk schemas and byte-level determinism of
every artifact format, checked against committed references."""

import json
import sys
from pathlib import Path
from xml.etree import ElementTree as ET

import pytest

REPO = Path(__file__).resolve().parents[1]
GOLDEN = REPO / "testdata"

sys.path.insert(0, str(REPO / "scripts"))
from regen_goldens import build_goldens  # noqa: E402

GOLDEN_NAMES = [
    "tj_small.hdmap.json",
    "tj_small.network.xml",
    "tj_small.injected.network.xml",
    "tj_small.manifest.json",
    "tj_small.report.json",
    "tj_small.metrics.json",
]


@pytest.fixture(scope="module")
def regenerated(tmp_path_factory):
    return build_goldens(tmp_path_factory.mktemp("golden"))


@pytest.mark.parametrize("name", GOLDEN_NAMES)
def test_regeneration_matches_committed_golden(regenerated, name):
    assert (regenerated / name).read_bytes() == (GOLDEN / name).read_bytes()


def test_map_document_schema():
    doc = json.loads((GOLDEN / "tj_small.hdmap.json").read_text())
    assert list(doc) == ["origin_offset", "nodes", "segments", "lanes",
                         "boundaries", "groups", "metadata"]
    assert set(doc["origin_offset"]) == {"x", "y"}
    node = doc["nodes"][0]
    assert set(node) == {"id", "position", "members"}
    seg = doc["segments"][0]
    assert {"id", "source_feature_id", "start_node_id", "end_node_id",
            "lane_count", "width_m", "direction", "centerline"} <= set(seg)
    lane = doc["lanes"][0]
    assert {"id", "group_id", "left_boundary_id", "right_boundary_id",
            "travel_direction", "predecessors", "successors", "turn_type",
            "turns", "centerline"} <= set(lane)
    assert all(len(p) == 3 for p in lane["centerline"])
    assert all(len(p) == 2 for p in seg["centerline"])
    assert doc["metadata"]["frame"] == "global"
    assert doc["metadata"]["config_hash"] == "golden"


def test_network_xml_schema():
    root = ET.parse(GOLDEN / "tj_small.network.xml").getroot()
    assert root.tag == "laneletNetwork"
    assert "meta_source" in root.attrib and "sampling_step" in root.attrib
    lanelet = root.find("lanelet")
    for tag in ("leftBound", "rightBound", "centerline"):
        el = lanelet.find(tag)
        assert el is not None
        pt = el.find("point")
        assert set(pt.attrib) == {"x", "y", "z"}


def test_injected_network_marks_defect_artifact():
    root = ET.parse(GOLDEN / "tj_small.injected.network.xml").getroot()
    assert root.get("defect_artifact") == "true"
    text = (GOLDEN / "tj_small.injected.network.xml").read_text()
    assert 'z="nan"' in text


def test_report_schema():
    report = json.loads((GOLDEN / "tj_small.report.json").read_text())
    assert list(report) == ["network_hash", "rules", "total_violations"]
    rule = report["rules"][0]
    assert list(rule) == ["rule_id", "violations", "count"]
    violation = next(v for r in report["rules"] for v in r["violations"])
    assert list(violation) == ["element_id", "measured", "message"]
    assert report["total_violations"] == 6


def test_manifest_and_metrics_schema():
    manifest = json.loads((GOLDEN / "tj_small.manifest.json").read_text())
    assert list(manifest) == ["seed", "entries"]
    assert all(list(e) == ["category", "target_lanelet_id", "parameters"]
               for e in manifest["entries"])
    metrics = json.loads((GOLDEN / "tj_small.metrics.json").read_text())
    for category, m in metrics.items():
        assert list(m) == ["n_injected", "n_reported", "n_true_positive",
                           "n_false_positive", "precision", "tpr"]
