import pytest
from hypothesis import given, strategies as st

from qgpon.gpon import (
    downstream_received_power,
    effective_ds_launch_dbm,
    gpon_operational,
    min_downstream_launch,
)
from qgpon.scenarios import preset, set_path
from qgpon.topology import NetworkScenario, Splitter


def _launch(s, dbm):
    return set_path(s, "signal_plan.ds_launch_dbm", dbm)


def test_received_power_examples(single_feeder):
    assert downstream_received_power(single_feeder) == pytest.approx(-9.61, abs=0.01)
    lossless = NetworkScenario(feeder_km=0, drop_km=0, splitter=Splitter(insertion_loss_db=0.0))
    assert downstream_received_power(lossless) == lossless.signal_plan.ds_launch_dbm
    s = _launch(preset("fig2a"), -11.0)
    assert downstream_received_power(s) == pytest.approx(-24.63, abs=0.01)
    assert gpon_operational(s).operational


def test_min_launch_examples():
    ideal = preset("fig2a").evolve(splitter=Splitter(ratio_n=8, loss_model="ideal"), feeder_km=20.0, drop_km=0.0)
    assert min_downstream_launch(ideal, -30) == pytest.approx(-16.54, abs=0.01)
    assert min_downstream_launch(ideal.evolve(splitter=Splitter(ratio_n=128, loss_model="ideal")), -30) == pytest.approx(-4.50, abs=0.01)
    s = preset("fig3a")
    assert min_downstream_launch(s, downstream_received_power(s)) == pytest.approx(s.signal_plan.ds_launch_dbm, abs=1e-12)


def test_target_rule_drives_launch():
    s = preset("fig2b")
    assert downstream_received_power(s) == pytest.approx(-30.0, abs=1e-9)
    assert effective_ds_launch_dbm(s) == pytest.approx(min_downstream_launch(s, -30.0), abs=1e-12)


def test_operational_examples(single_feeder):
    report = gpon_operational(single_feeder)
    assert report.operational and report.margin_db == pytest.approx(20.4, abs=0.05)
    edge = _launch(NetworkScenario(feeder_km=0, drop_km=0, splitter=Splitter(insertion_loss_db=0.0)), -30.0)
    report = gpon_operational(edge)
    assert report.operational and report.margin_db == pytest.approx(0.0, abs=1e-12)
    s = _launch(preset("fig2a"), -11.0).evolve(splitter=Splitter(ratio_n=32))
    report = gpon_operational(s)
    assert report.margin_db == pytest.approx(-11 - 16.3 - 20 * 0.221490 + 30, abs=1e-3)
    assert report.operational == (report.margin_db >= 0)
    assert report.margin_to_class_a_db == pytest.approx(report.margin_db - 5, abs=1e-12)


@given(st.floats(-40, 10), st.floats(0, 25), st.sampled_from([8, 16, 32, 64, 128]))
def test_inverse_and_affine_margin(launch, feeder, n):
    s = _launch(preset("fig2a"), launch).evolve(feeder_km=feeder, drop_km=1.0, splitter=Splitter(ratio_n=n))
    rx = downstream_received_power(s)
    assert min_downstream_launch(s, rx) == pytest.approx(launch, abs=1e-9)
    shifted = gpon_operational(_launch(s, launch + 1.5)).margin_db
    assert shifted - gpon_operational(s).margin_db == pytest.approx(1.5, abs=1e-9)
