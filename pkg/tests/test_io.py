import json

import pytest

from qgpon.io import ConfigError, canonical_json, digest, scenario_from_dict, scenario_to_dict
from qgpon.keyrate import secure_key_rate
from qgpon.scenarios import preset
from qgpon.topology import NetworkScenario


@pytest.mark.parametrize("name", ["fig2a", "fig2b", "fig3b_128", "fig5"])
def test_round_trip(name):
    s = preset(name)
    doc = json.loads(json.dumps(scenario_to_dict(s)))
    back = scenario_from_dict(doc)
    assert back == s
    assert digest(back) == digest(s)


def test_partial_document_overlays_defaults():
    s = scenario_from_dict({"feeder_km": 3, "splitter": {"ratio_n": 32}})
    assert s.feeder_km == 3.0 and isinstance(s.feeder_km, float)
    assert s.splitter.ratio_n == 32 and s.drop_km == NetworkScenario().drop_km


def test_errors_report_every_path():
    with pytest.raises(ConfigError) as err:
        scenario_from_dict({"feeder": 1, "splitter": {"ratio_n": 8.5, "dual_feeder": 1}, "quantum": 3})
    probs = err.value.problems
    assert "feeder: unknown field" in probs
    assert "splitter.ratio_n: expected an integer" in probs
    assert "splitter.dual_feeder: expected true/false" in probs
    assert "quantum: expected an object" in probs


def test_null_allowed_only_for_optional():
    assert scenario_from_dict({"signal_plan": {"ds_target_rx_dbm": None}}).signal_plan.ds_target_rx_dbm is None
    with pytest.raises(ConfigError):
        scenario_from_dict({"feeder_km": None})


def test_digest_is_stable_and_sensitive():
    a = preset("fig3a")
    assert digest(a) == digest(preset("fig3a"))
    assert len(digest(a)) == 16
    assert digest(a) != digest(a.evolve(feeder_km=10.5))
    assert canonical_json(a) == canonical_json(scenario_from_dict(json.loads(canonical_json(a))))


def test_shipped_config_matches_preset():
    from pathlib import Path

    doc = json.loads((Path(__file__).parents[1] / "configs" / "fig3b_128.json").read_text())
    s = scenario_from_dict(doc)
    assert s == preset("fig3b_128")
    assert secure_key_rate(s).rate_bps > 0
