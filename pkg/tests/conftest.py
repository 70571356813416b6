import pytest

from lanekit import defectlab, geodata, laneletize, mapgen, terrain

PARAM_SETS = defectlab.PARAM_SETS
SCENARIOS = defectlab.SCENARIOS


def build_doc_from_bundle(bundle, tmpdir, **overrides):
    """Run the geodata + mapgen stages over a materialized fixture."""
    paths = defectlab.materialize_fixture(bundle, tmpdir)
    features, _ = geodata.load_road_features(paths["roads"])
    roi = geodata.RegionOfInterest(*paths["roi"])
    clipped = geodata.clip_to_roi(features, roi)
    local, origin = geodata.to_local(clipped, roi)
    dem = terrain.load_asc(paths["dem"])
    return mapgen.build_document(local, origin, dem, **overrides)


@pytest.fixture(scope="session")
def built(tmp_path_factory):
    """Cached (bundle, doc, net) per (scenario, param set, sampling step)."""
    cache = {}

    def _get(scenario, set_index=0, step=1.0):
        key = (scenario, set_index, step)
        if key not in cache:
            bundle = defectlab.make_fixture(scenario, PARAM_SETS[set_index])
            tmpdir = tmp_path_factory.mktemp(f"{scenario}-{set_index}")
            doc = build_doc_from_bundle(bundle, tmpdir)
            net = laneletize.convert(doc, step)
            cache[key] = (bundle, doc, net)
        return cache[key]

    return _get


@pytest.fixture(scope="session")
def all_nets(built):
    """The 15 clean fixture networks of the scenario x parameter-set sweep."""
    return {
        (scenario, k): built(scenario, k)[2]
        for scenario in SCENARIOS
        for k in range(len(PARAM_SETS))
    }
