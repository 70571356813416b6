import json
import math

import numpy as np
import pytest

from lanekit import defectlab
from lanekit.defectlab import (
    CATEGORIES,
    DefectEntry,
    DefectManifest,
    FixtureParams,
    inject,
    make_fixture,
    manifest_bytes,
    manifest_from_dict,
    manifest_to_dict,
    metrics_bytes,
    score,
)
from lanekit.errors import ConfigError, InjectionError, ScoringError
from lanekit.laneletize import network_bytes
from lanekit.rules import RuleResult, Violation, ViolationReport, evaluate, parse_rules, default_rules_text

from test_rules import net_of, straight_lanelet


class TestFixtures:
    def test_param_ranges_enforced(self):
        with pytest.raises(ConfigError):
            FixtureParams(length_m=30.0).validate()
        with pytest.raises(ConfigError):
            FixtureParams(length_m=600.0).validate()
        with pytest.raises(ConfigError):
            FixtureParams(radius_m=10.0).validate()
        with pytest.raises(ConfigError):
            FixtureParams(lanes_per_direction=4).validate()

    def test_unknown_scenario(self):
        with pytest.raises(ConfigError):
            make_fixture("roundabout")

    def test_straight_feature_attributes(self):
        bundle = make_fixture("straight", FixtureParams(length_m=100.0,
                                                        lanes_per_direction=1))
        assert len(bundle.roads["features"]) == 1
        props = bundle.roads["features"][0]["properties"]
        assert props["FSZ"] == 2
        assert props["BRF"] == 7.0
        assert props["FAR"] == "both"

    def test_deterministic(self):
        a = make_fixture("crossing", defectlab.PARAM_SETS[1])
        b = make_fixture("crossing", defectlab.PARAM_SETS[1])
        assert a.roads == b.roads
        assert np.array_equal(a.dem.values, b.dem.values)
        assert a.roi == b.roi

    def test_surface_slope_bounded(self):
        bundle = make_fixture("straight", defectlab.PARAM_SETS[0])
        v = bundle.dem.values
        assert np.abs(np.diff(v, axis=0)).max() <= 0.05 + 1e-9
        assert np.abs(np.diff(v, axis=1)).max() <= 0.05 + 1e-9

    def test_t_junction_produces_intersection(self, built):
        _, doc, _ = built("t_junction", 0)
        from lanekit.mapgen import intersection_node_ids
        assert len(doc.segments) >= 3
        assert intersection_node_ids(doc)

    def test_dem_covers_roi(self):
        bundle = make_fixture("merge", defectlab.PARAM_SETS[2])
        dem = bundle.dem
        assert dem.origin_x <= bundle.roi.min_x
        assert dem.origin_y <= bundle.roi.min_y
        assert dem.origin_x + dem.n_cols * dem.cell_size >= bundle.roi.max_x
        assert dem.origin_y + dem.n_rows * dem.cell_size >= bundle.roi.max_y


@pytest.fixture(scope="module")
def crossing_net(built):
    return built("crossing", 1)[2]


class TestInject:
    def test_self_loops_injected(self, crossing_net):
        injected, manifest = inject(crossing_net, {"self_loop_successor": 10}, seed=7)
        targets = manifest.targets("self_loop_successor")
        assert len(targets) == 10
        for lid in targets:
            assert lid in injected.lanelets[lid].successors
        assert injected.defect_artifact is True

    def test_elevation_defects_fail_exactly_targets(self, crossing_net):
        injected, manifest = inject(crossing_net, {"elevation_non_finite": 10}, seed=7)
        from lanekit.rules import finite_elevation
        failing = {lid for lid, ll in injected.lanelets.items() if not finite_elevation(ll)}
        assert failing == manifest.targets("elevation_non_finite")
        assert len(failing) == 10
        for entry in manifest.entries:
            assert len(entry.parameters["indices"]) == 3

    def test_narrow_width_preserves_midpoints(self, crossing_net):
        injected, manifest = inject(crossing_net, {"lane_width_narrow": 10}, seed=3)
        for lid in manifest.targets("lane_width_narrow"):
            ll = injected.lanelets[lid]
            widths = [math.hypot(l[0] - r[0], l[1] - r[1])
                      for l, r in zip(ll.left_bound, ll.right_bound)]
            assert min(widths) == pytest.approx(0.8)
            for c, l, r in zip(ll.centerline, ll.left_bound, ll.right_bound):
                assert math.hypot(c[0] - (l[0] + r[0]) / 2,
                                  c[1] - (l[1] + r[1]) / 2) < 1e-6

    def test_same_seed_same_outcome(self, crossing_net):
        spec = {c: 5 for c in CATEGORIES}
        a_net, a_man = inject(crossing_net, spec, seed=42)
        b_net, b_man = inject(crossing_net, spec, seed=42)
        assert manifest_to_dict(a_man) == manifest_to_dict(b_man)
        assert network_bytes(a_net) == network_bytes(b_net)

    def test_different_seed_differs(self, crossing_net):
        spec = {c: 5 for c in CATEGORIES}
        _, a_man = inject(crossing_net, spec, seed=1)
        _, b_man = inject(crossing_net, spec, seed=2)
        assert manifest_to_dict(a_man) != manifest_to_dict(b_man)

    def test_untouched_lanelets_identical(self, crossing_net):
        injected, manifest = inject(crossing_net, {c: 3 for c in CATEGORIES}, seed=11)
        touched = {e.target_lanelet_id for e in manifest.entries}
        for lid, original in crossing_net.lanelets.items():
            if lid in touched:
                continue
            mutated = injected.lanelets[lid]
            assert network_bytes(net_of(original)) == network_bytes(net_of(mutated))

    def test_too_many_defects_rejected(self, crossing_net):
        with pytest.raises(InjectionError) as err:
            inject(crossing_net, {"self_loop_successor": 1000}, seed=1)
        assert "eligible" in str(err.value)

    def test_dirty_baseline_rejected(self):
        net = net_of(straight_lanelet(lid=1, successors=[1]),
                     straight_lanelet(lid=2))
        with pytest.raises(InjectionError) as err:
            inject(net, {"self_loop_successor": 1}, seed=0)
        assert "not clean" in str(err.value)

    def test_unknown_category_rejected(self, crossing_net):
        with pytest.raises(InjectionError):
            inject(crossing_net, {"bitrot": 1}, seed=0)


def fake_report(rule_id, element_ids):
    result = RuleResult(rule_id, [Violation(rule_id, eid, None, "violated")
                                  for eid in element_ids])
    return ViolationReport(network_hash="x", rules=[result])


def fake_manifest(category, targets, seed=0):
    return DefectManifest(seed=seed, entries=[DefectEntry(category, t) for t in targets])


class TestScore:
    def test_extra_reports_lower_precision(self):
        report = fake_report("elevation_complete", list(range(1, 13)))
        manifest = fake_manifest("elevation_non_finite", range(1, 11))
        m = score(report, manifest)["elevation_non_finite"]
        assert m.n_injected == 10
        assert m.n_reported == 12
        assert m.n_true_positive == 10
        assert m.n_false_positive == 2
        assert m.precision == pytest.approx(10 / 12)
        assert m.tpr == 1.0

    def test_nothing_reported_means_undefined_precision(self):
        report = fake_report("elevation_complete", [])
        manifest = fake_manifest("elevation_non_finite", range(1, 11))
        m = score(report, manifest)["elevation_non_finite"]
        assert m.precision is None
        assert m.tpr == 0.0

    def test_nothing_injected_means_full_tpr(self):
        report = fake_report("elevation_complete", [])
        m = score(report, DefectManifest(seed=0))["elevation_non_finite"]
        assert m.tpr == 1.0
        assert m.precision is None

    def test_unmapped_rule_rejected(self):
        report = fake_report("my_custom_rule", [1])
        with pytest.raises(ScoringError):
            score(report, DefectManifest(seed=0))

    def test_uncategorized_rules_ignored(self):
        report = ViolationReport(network_hash="x", rules=[
            fake_report("elevation_complete", [1]).rules[0],
            fake_report("min_turn_radius", [2, 3]).rules[0],
        ])
        manifest = fake_manifest("elevation_non_finite", [1])
        metrics = score(report, manifest)
        assert metrics["elevation_non_finite"].n_reported == 1
        assert metrics["elevation_non_finite"].precision == 1.0

    def test_round_trip_on_real_network(self, crossing_net):
        spec = {c: 10 for c in CATEGORIES}
        injected, manifest = inject(crossing_net, spec, seed=7)
        report = evaluate(parse_rules(default_rules_text()), injected)
        metrics = score(report, manifest)
        for category in CATEGORIES:
            m = metrics[category]
            assert (m.precision, m.tpr, m.n_false_positive) == (1.0, 1.0, 0)


class TestSerialization:
    def test_manifest_round_trip(self, crossing_net):
        _, manifest = inject(crossing_net, {c: 4 for c in CATEGORIES}, seed=5)
        data = json.loads(manifest_bytes(manifest).decode())
        assert manifest_to_dict(manifest_from_dict(data)) == manifest_to_dict(manifest)

    def test_manifest_unknown_category_rejected(self):
        with pytest.raises(InjectionError):
            manifest_from_dict({"seed": 0, "entries": [
                {"category": "nope", "target_lanelet_id": 1, "parameters": {}}]})

    def test_metrics_encode_undefined_precision_as_null(self):
        report = fake_report("elevation_complete", [])
        manifest = fake_manifest("elevation_non_finite", range(3))
        blob = json.loads(metrics_bytes(score(report, manifest)).decode())
        assert blob["elevation_non_finite"]["precision"] is None
