"""Named presets and the grid sweep engine."""
from __future__ import annotations

import dataclasses
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

from .keyrate import secure_key_rate
from .model import SPEED_OF_LIGHT, ChannelCoefficients
from .topology import (
    SESSION_S,
    DetectorConfig,
    NetworkScenario,
    ProtocolConfig,
    QuantumTxConfig,
    SignalPlan,
    Splitter,
    clock_power_for_capacity,
)

GPON_RX_FLOOR_DBM = -30.0
# Fourier-limited time-bandwidth product of the idealised contour
TIME_BANDWIDTH = 0.44

RESULT_COLUMNS = (
    "qber", "rate_bps", "key_length_bits", "y1_lower", "e1_upper", "noise_total_w", "loss_total_db",
)


def fourier_limited_dt(d: DetectorConfig, center_nm: float = 1550.0) -> float:
    """Gate coefficient of a transform-limited pulse matched to the filter bandwidth."""
    dnu_hz = SPEED_OF_LIGHT * d.filter_dlambda_nm * 1e-9 / (center_nm * 1e-9) ** 2
    return TIME_BANDWIDTH / dnu_hz * d.gate_rate_hz


def session_for_capacity(n: int, scaling: str = "fixed_load") -> float:
    if scaling == "full_network":
        # constant pulses per user at 1 GHz / N
        return SESSION_S[8] * n / 8
    return SESSION_S[n]


def with_capacity(s: NetworkScenario, n: int) -> NetworkScenario:
    """Re-dimension a scenario for an N-way splitter, following its capacity rule."""
    splitter = replace(s.splitter, ratio_n=n, insertion_loss_db=None)
    plan = s.signal_plan
    if plan.clock_power_w > 0:
        plan = replace(plan, clock_power_w=clock_power_for_capacity(n).watts)
    quantum = s.quantum
    changes = {}
    if s.capacity_scaling in ("per_user_rate", "full_network"):
        quantum = replace(quantum, tx_rate_hz=s.detector.gate_rate_hz / n, n_quantum_users=n,
                          interleave_gate_separation=1)
    if s.capacity_scaling == "full_network":
        # TDM keeps the aggregate upstream power fixed as ONUs are added
        aggregate_dbm = plan.us_avg_per_onu_dbm + 10 * math.log10(max(plan.active_gpon_onus, 1))
        plan = replace(plan, active_gpon_onus=n, us_avg_per_onu_dbm=aggregate_dbm - 10 * math.log10(n))
        total_drop = s.drop_km * s.quantum_drops
        changes.update(n_quantum_drops=n, drop_km=total_drop / n)
    protocol = replace(s.protocol, session_s=session_for_capacity(n, s.capacity_scaling))
    return replace(s, splitter=splitter, signal_plan=plan, quantum=quantum, protocol=protocol, **changes)


def _base(n: int, dual: bool, feeder_km: float, drop_km: float) -> NetworkScenario:
    s = NetworkScenario(
        splitter=Splitter(ratio_n=8, dual_feeder=dual),
        feeder_km=feeder_km,
        drop_km=drop_km,
        signal_plan=SignalPlan(),
        quantum=QuantumTxConfig(),
        detector=DetectorConfig(),
        protocol=ProtocolConfig(session_s=SESSION_S[8]),
        coefficients=ChannelCoefficients(),
    )
    return with_capacity(s, n) if n != 8 else s


def fig2a() -> NetworkScenario:
    return _base(8, dual=False, feeder_km=10.0, drop_km=10.0)


def fig2b() -> NetworkScenario:
    s = _base(8, dual=False, feeder_km=10.0, drop_km=10.0)
    det = replace(s.detector, dark_prob_per_gate=0.0, afterpulse_prob=0.0, dead_time_s=0.0)
    det = replace(det, filter_dt=fourier_limited_dt(det))
    return replace(
        s,
        splitter=replace(s.splitter, loss_model="ideal"),
        signal_plan=replace(s.signal_plan, ds_target_rx_dbm=GPON_RX_FLOOR_DBM, clock_power_w=0.0),
        quantum=replace(s.quantum, mu=0.5),
        detector=det,
        protocol=replace(s.protocol, e_opt=0.0),
        coefficients=replace(s.coefficients, beta_ds_per_nm=7.1e-9),
        noise_sources=("downstream",),
        feeder_only_noise=True,
    )


def fig3a() -> NetworkScenario:
    return _base(8, dual=True, feeder_km=10.0, drop_km=10.0)


def fig3b(n: int) -> NetworkScenario:
    return _base(n, dual=True, feeder_km=0.0, drop_km=20.0)


def fig4(n: int = 16) -> NetworkScenario:
    # same fibre plant as the capacity measurement: two 20 km quantum drops
    s = replace(fig3b(8), capacity_scaling="per_user_rate", n_quantum_drops=2)
    return with_capacity(s, n)


def fig5(n: int = 16, total_drop_km: float | None = None) -> NetworkScenario:
    s = replace(fig3b(8), capacity_scaling="full_network", drop_km=10.0, n_quantum_drops=2)
    s = with_capacity(s, n)
    total = 10.0 * n if total_drop_km is None else total_drop_km
    return replace(s, drop_km=total / n)


@dataclass(frozen=True)
class Preset:
    name: str
    build: object
    citation: str
    keep_total_km: float | None = None


PRESETS = {
    p.name: p
    for p in [
        Preset("fig2a", fig2a, "rate vs feeder length: 8-user single feeder, F + D = 20 km, downstream launch is a free axis", 20.0),
        Preset("fig2b", fig2b, "QBER contour over F and N: idealised, feeder-only downstream Raman, -30 dBm receive", 20.0),
        Preset("fig3a", fig3a, "rate vs feeder length: 8-user dual feeder, F + D = 20 km, full-power GPON", 20.0),
        *[
            Preset(f"fig3b_{n}", (lambda n=n: fig3b(n)), f"capacity point: 2x{n} dual feeder, F = 0, D = 20 km", 20.0)
            for n in (8, 16, 32, 64, 128)
        ],
        Preset("fig4", fig4, "rate vs capacity: N quantum users at 1 GHz / N, F = 0, D = 20 km", 20.0),
        Preset("fig5", fig5, "reach: full quantum + full GPON network, F = 0, total drop is a free axis"),
    ]
}


class UnknownPreset(KeyError):
    def __str__(self):
        return f"unknown preset {self.args[0]!r}; valid presets: {', '.join(PRESETS)}"


def preset(name: str) -> NetworkScenario:
    try:
        return PRESETS[name].build()
    except KeyError:
        raise UnknownPreset(name) from None


# --- parameter assignment -------------------------------------------------

ALIASES = ("N", "F", "D", "total_drop_km")


def _coerce(current, value):
    if isinstance(value, str):
        if isinstance(current, bool):
            if value.lower() in ("1", "true", "yes"):
                return True
            if value.lower() in ("0", "false", "no"):
                return False
            raise ValueError(f"not a boolean: {value!r}")
        if isinstance(current, int):
            return int(value)
        if isinstance(current, float) or current is None:
            return float(value)
        return value
    if isinstance(current, int) and not isinstance(current, bool) and float(value).is_integer():
        return int(value)
    return value


def set_path(obj, path: str, value):
    """Return a copy of a (nested) dataclass with the dotted ``path`` replaced."""
    head, _, rest = path.partition(".")
    names = {f.name for f in dataclasses.fields(obj)}
    if head not in names:
        raise KeyError(f"{path}: unknown field {head!r} of {type(obj).__name__}")
    current = getattr(obj, head)
    if rest:
        if not dataclasses.is_dataclass(current):
            raise KeyError(f"{path}: {head!r} has no sub-fields")
        return replace(obj, **{head: set_path(current, rest, value)})
    return replace(obj, **{head: _coerce(current, value)})


def assign(s: NetworkScenario, name: str, value, keep_total_km: float | None = None) -> NetworkScenario:
    """Apply one axis/override value. ``N``, ``F``, ``D`` and ``total_drop_km``
    are shorthands; anything else is a dotted scenario field path."""
    if name == "N":
        return with_capacity(s, int(value))
    if name == "F":
        f = float(value)
        if keep_total_km is not None:
            if f > keep_total_km + 1e-12:
                raise ValueError(f"F={f:g} km exceeds the fixed total F + D = {keep_total_km:g} km")
            return replace(s, feeder_km=f, drop_km=max(0.0, keep_total_km - f))
        return replace(s, feeder_km=f)
    if name == "D":
        return replace(s, drop_km=float(value))
    if name == "total_drop_km":
        return replace(s, drop_km=float(value) / max(s.quantum_drops, 1))
    return set_path(s, name, value)


def apply_all(s: NetworkScenario, items, keep_total_km=None) -> NetworkScenario:
    # capacity first: it re-derives several fields the other assignments refine
    ordered = sorted(items, key=lambda kv: kv[0] != "N")
    for name, value in ordered:
        s = assign(s, name, value, keep_total_km)
    return s


# --- sweeps ---------------------------------------------------------------

@dataclass
class SweepGrid:
    axes: tuple  # ((name, values), ...)
    records: list  # dicts: axis values, result columns, status

    def column(self, name: str) -> list:
        return [r[name] for r in self.records]

    @property
    def header(self) -> tuple:
        return tuple(name for name, _ in self.axes) + RESULT_COLUMNS + ("status",)


def _evaluate_point(args):
    base, items, keep_total_km = args
    row = {name: value for name, value in items}
    try:
        s = apply_all(base, items, keep_total_km)
        res = secure_key_rate(s)
    except (ValueError, KeyError) as exc:
        row.update({c: None for c in RESULT_COLUMNS})
        row["status"] = f"rejected: {exc}".replace("\n", " ")
        return row
    row.update(
        qber=res.qber_z,
        rate_bps=res.rate_bps,
        key_length_bits=res.key_length_bits,
        y1_lower=res.y1_lower,
        e1_upper=res.e1_upper,
        noise_total_w=res.diagnostics["noise_total_w"],
        loss_total_db=res.diagnostics["loss_total_db"],
        status="ok",
    )
    return row


def evaluate_grid(base: NetworkScenario, axes, keep_total_km: float | None = None, jobs: int = 1) -> SweepGrid:
    """Evaluate every point of the row-major product of ``axes``.

    Records come back in declared axis order whether or not a worker pool is used.
    """
    axes = tuple((name, tuple(values)) for name, values in axes)
    names = [name for name, _ in axes]
    if len(set(names)) != len(names):
        raise ValueError(f"conflicting axis names: {names}")
    if not axes:
        raise ValueError("at least one axis is required")
    points = [
        (base, tuple(zip(names, combo)), keep_total_km)
        for combo in itertools.product(*(values for _, values in axes))
    ]
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_evaluate_point, points, chunksize=max(1, len(points) // (4 * jobs))))
    else:
        records = [_evaluate_point(p) for p in points]
    return SweepGrid(axes, records)


def sweep_feeder(base: NetworkScenario, f_values, keep_total_km: float, jobs: int = 1) -> SweepGrid:
    return evaluate_grid(base, [("F", f_values)], keep_total_km, jobs)


def sweep_capacity(base: NetworkScenario, n_values, jobs: int = 1) -> SweepGrid:
    return evaluate_grid(base, [("N", n_values)], None, jobs)


def full_network(s: NetworkScenario) -> NetworkScenario:
    """Every splitter port carries a quantum transmitter at 1 GHz / N and a GPON ONU."""
    if s.capacity_scaling == "full_network" and s.quantum_drops == s.splitter.ratio_n:
        return s
    return with_capacity(replace(s, capacity_scaling="full_network"), s.splitter.ratio_n)


def sweep_drop_total(base: NetworkScenario, totals, jobs: int = 1) -> SweepGrid:
    base = replace(full_network(base), feeder_km=0.0)
    return evaluate_grid(base, [("total_drop_km", totals)], None, jobs)


def qber_contour(base: NetworkScenario, f_values, n_values, keep_total_km: float = 20.0, jobs: int = 1) -> SweepGrid:
    return evaluate_grid(base, [("F", f_values), ("N", n_values)], keep_total_km, jobs)
