"""Classical GPON downstream power budget."""
from __future__ import annotations

from dataclasses import dataclass

from .model import alpha_natural_to_db_per_km

OPERATIONAL_FLOOR_DBM = -30.0
CLASS_A_SENSITIVITY_DBM = -25.0


@dataclass(frozen=True)
class GponLinkReport:
    received_ds_dbm_per_onu: float
    operational: bool
    margin_db: float
    margin_to_class_a_db: float


def downstream_path_loss_db(s) -> float:
    fibre = alpha_natural_to_db_per_km(s.coefficients.alpha_ds_per_km) * (s.feeder_km + s.drop_km)
    return s.splitter.loss_db + fibre + s.excess_loss_db


def effective_ds_launch_dbm(s) -> float:
    """Launch power actually used: fixed, or re-derived from a receive-power target."""
    target = s.signal_plan.ds_target_rx_dbm
    if target is None:
        return s.signal_plan.ds_launch_dbm
    return min_downstream_launch(s, target)


def downstream_received_power(s) -> float:
    return effective_ds_launch_dbm(s) - downstream_path_loss_db(s)


def min_downstream_launch(s, target_rx_dbm: float) -> float:
    return target_rx_dbm + downstream_path_loss_db(s)


def gpon_operational(s, floor_dbm: float = OPERATIONAL_FLOOR_DBM) -> GponLinkReport:
    rx = downstream_received_power(s)
    return GponLinkReport(
        received_ds_dbm_per_onu=rx,
        operational=rx >= floor_dbm,
        margin_db=rx - floor_dbm,
        margin_to_class_a_db=rx - CLASS_A_SENSITIVITY_DBM,
    )
