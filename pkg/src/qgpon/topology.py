"""Declarative description of a combined quantum + GPON access network.

A scenario is a star PON: one feeder (or two, for the dual-feeder layout),
a 1xN / 2xN power splitter and drop fibres to the ONUs. The quantum
transmitters sit in ONUs and share one receiver at the OLT.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .model import ChannelCoefficients, DomainError, OpticalPower

SUPPORTED_RATIOS = (8, 16, 32, 64, 128)

SPLITTER_LOSS_DB = {8: 9.2, 16: 12.7, 32: 16.3, 64: 19.6, 128: 22.8}

# key session length per splitter ratio, seconds
SESSION_S = {8: 1200.0, 16: 1800.0, 32: 3600.0, 64: 7200.0, 128: 14400.0}

BASE_CLOCK_POWER_W = 75e-6

NOISE_SOURCES = ("downstream", "upstream", "clock")
CAPACITY_SCALINGS = ("fixed_load", "per_user_rate", "full_network")


class ScenarioError(ValueError):
    """A scenario failed validation; ``violations`` lists every problem."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid scenario:\n  " + "\n  ".join(self.violations))


def ideal_splitter_loss_db(n: int) -> float:
    return 10.0 * math.log10(n)


@dataclass(frozen=True)
class Splitter:
    ratio_n: int = 8
    dual_feeder: bool = False
    # "table" uses the measured loss table, "ideal" uses 10 log10(N)
    loss_model: str = "table"
    # explicit override, takes precedence over loss_model
    insertion_loss_db: float | None = None

    @property
    def loss_db(self) -> float:
        if self.insertion_loss_db is not None:
            return self.insertion_loss_db
        if self.loss_model == "ideal":
            return ideal_splitter_loss_db(self.ratio_n)
        return SPLITTER_LOSS_DB[self.ratio_n]


@dataclass(frozen=True)
class FiberSpan:
    length_km: float
    role: str  # feeder_gpon | feeder_quantum | drop

    def __post_init__(self):
        if not self.length_km >= 0:
            raise DomainError(f"fibre length must be >= 0 km, got {self.length_km}")


@dataclass(frozen=True)
class SignalPlan:
    ds_launch_dbm: float = 4.0
    # when set, the downstream launch is re-derived to hit this ONU receive power
    ds_target_rx_dbm: float | None = None
    us_avg_per_onu_dbm: float = -8.0
    clock_power_w: float = BASE_CLOCK_POWER_W
    active_gpon_onus: int = 8


@dataclass(frozen=True)
class QuantumTxConfig:
    tx_rate_hz: float = 125e6
    n_quantum_users: int = 2
    mu: float = 0.49
    nu: float = 0.03
    w: float = 0.0005
    p_mu: float = 0.857
    p_nu: float = 0.095
    p_w: float = 0.048
    p_z: float = 15 / 16
    interleave_gate_separation: int = 4

    @property
    def intensities(self):
        return {"mu": self.mu, "nu": self.nu, "w": self.w}

    @property
    def probabilities(self):
        return {"mu": self.p_mu, "nu": self.p_nu, "w": self.p_w}


@dataclass(frozen=True)
class DetectorConfig:
    efficiency: float = 0.26
    dark_prob_per_gate: float = 2e-6
    n_detectors: int = 2
    afterpulse_prob: float = 0.02
    dead_time_s: float = 300e-9
    gate_rate_hz: float = 1e9
    filter_dlambda_nm: float = 0.14
    filter_dt: float = 0.127
    receiver_insertion_loss_db: float = 5.5
    # narrow FBG share of the receiver loss, used only for the alternative loss report
    narrow_filter_loss_db: float = 2.5


@dataclass(frozen=True)
class ProtocolConfig:
    epsilon_total: float = 1e-10
    f_ec: float = 1.1
    e_opt: float = 0.008
    session_s: float = 1200.0
    qber_abort_threshold: float = 0.11
    include_vacuum_term: bool = True


@dataclass(frozen=True)
class NetworkScenario:
    """One network instance.

    ``drop_km`` is the drop length of ONUs hosting a quantum transmitter
    (``n_quantum_drops`` of them, default one per quantum user); any other
    active GPON ONU hangs on a drop of ``gpon_drop_km``.
    """

    splitter: Splitter = field(default_factory=Splitter)
    feeder_km: float = 10.0
    drop_km: float = 10.0
    n_quantum_drops: int | None = None
    gpon_drop_km: float = 0.0
    signal_plan: SignalPlan = field(default_factory=SignalPlan)
    quantum: QuantumTxConfig = field(default_factory=QuantumTxConfig)
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    protocol: ProtocolConfig = field(default_factory=ProtocolConfig)
    coefficients: ChannelCoefficients = field(default_factory=ChannelCoefficients)
    upstream_in_quantum_feeder: bool = False
    feeder_only_noise: bool = False
    noise_sources: tuple = NOISE_SOURCES
    excess_loss_db: float = 0.0
    capacity_scaling: str = "fixed_load"

    @property
    def quantum_drops(self) -> int:
        if self.n_quantum_drops is None:
            return self.quantum.n_quantum_users
        return self.n_quantum_drops

    def drops(self):
        """Connected drop fibres as ``(length_km, hosts_gpon_onu)`` pairs.

        Quantum ONUs come first and are also GPON ONUs as long as active
        GPON ONUs remain; leftover GPON ONUs follow on ``gpon_drop_km``.
        """
        active = self.signal_plan.active_gpon_onus
        nq = self.quantum_drops
        out = [(self.drop_km, i < active) for i in range(nq)]
        out += [(self.gpon_drop_km, True)] * max(0, active - nq)
        return out

    def spans(self):
        if self.splitter.dual_feeder:
            spans = [FiberSpan(self.feeder_km, "feeder_gpon"), FiberSpan(self.feeder_km, "feeder_quantum")]
        else:
            spans = [FiberSpan(self.feeder_km, "feeder_gpon")]
        return spans + [FiberSpan(length, "drop") for length, _ in self.drops()]

    def evolve(self, **changes) -> "NetworkScenario":
        return replace(self, **changes)


def clock_power_for_capacity(n: int) -> OpticalPower:
    """Clock launch power that offsets the extra splitter loss over the 8-way baseline."""
    if n not in SPLITTER_LOSS_DB:
        raise DomainError(f"unsupported splitter ratio {n}; expected one of {SUPPORTED_RATIOS}")
    extra_db = SPLITTER_LOSS_DB[n] - SPLITTER_LOSS_DB[8]
    return OpticalPower(BASE_CLOCK_POWER_W * 10.0 ** (extra_db / 10.0))


def _finite_nonneg(value) -> bool:
    try:
        return math.isfinite(value) and value >= 0
    except TypeError:
        return False


def validate(s: NetworkScenario) -> list[str]:
    """Return every violated invariant as ``"path: message"``; empty means valid."""
    v = []
    try:
        _check(s, v)
    except Exception as exc:  # validation must never throw
        v.append(f"<scenario>: could not be inspected ({exc!r})")
    return v


def _check(s: NetworkScenario, v: list[str]) -> None:
    sp = s.splitter
    if sp.ratio_n not in SUPPORTED_RATIOS:
        v.append(f"splitter.ratio_n: {sp.ratio_n} not in {SUPPORTED_RATIOS}")
    else:
        if sp.loss_model not in ("table", "ideal"):
            v.append(f"splitter.loss_model: unknown model {sp.loss_model!r}")
        elif sp.loss_db < ideal_splitter_loss_db(sp.ratio_n) - 0.5:
            v.append(
                f"splitter.insertion_loss_db: {sp.loss_db} dB is below the physical floor "
                f"{ideal_splitter_loss_db(sp.ratio_n):.2f} dB - 0.5 dB"
            )

    for name in ("feeder_km", "drop_km", "gpon_drop_km", "excess_loss_db"):
        if not _finite_nonneg(getattr(s, name)):
            v.append(f"{name}: must be finite and >= 0, got {getattr(s, name)}")
    if s.n_quantum_drops is not None and s.n_quantum_drops < 0:
        v.append(f"n_quantum_drops: must be >= 0, got {s.n_quantum_drops}")
    if len(s.spans()) - len(s.drops()) != (2 if sp.dual_feeder else 1):
        v.append("splitter.dual_feeder: feeder count does not match topology")

    plan = s.signal_plan
    for name in ("ds_launch_dbm", "us_avg_per_onu_dbm"):
        if not math.isfinite(getattr(plan, name)):
            v.append(f"signal_plan.{name}: must be finite")
    if plan.ds_target_rx_dbm is not None and not math.isfinite(plan.ds_target_rx_dbm):
        v.append("signal_plan.ds_target_rx_dbm: must be finite")
    if not _finite_nonneg(plan.clock_power_w):
        v.append(f"signal_plan.clock_power_w: must be >= 0, got {plan.clock_power_w}")
    if plan.active_gpon_onus < 0:
        v.append(f"signal_plan.active_gpon_onus: must be >= 0, got {plan.active_gpon_onus}")
    elif plan.active_gpon_onus > sp.ratio_n:
        v.append(f"signal_plan.active_gpon_onus: {plan.active_gpon_onus} exceeds splitter ratio {sp.ratio_n}")

    q = s.quantum
    total = q.p_mu + q.p_nu + q.p_w
    if abs(total - 1.0) > 1e-9:
        v.append(f"quantum.p_mu+p_nu+p_w: probabilities sum to {total:.12g}, expected 1")
    if not (q.mu > q.nu > q.w >= 0 and q.mu > q.nu + q.w):
        v.append(f"quantum.mu/nu/w: need mu > nu + w and nu > w >= 0, got {q.mu}, {q.nu}, {q.w}")
    for name in ("p_mu", "p_nu", "p_w"):
        if not 0 <= getattr(q, name) <= 1:
            v.append(f"quantum.{name}: must lie in [0, 1]")
    if not 0 < q.p_z < 1:
        v.append(f"quantum.p_z: must lie in (0, 1), got {q.p_z}")
    if q.n_quantum_users < 1:
        v.append(f"quantum.n_quantum_users: must be >= 1, got {q.n_quantum_users}")
    elif q.n_quantum_users > sp.ratio_n:
        v.append(f"quantum.n_quantum_users: {q.n_quantum_users} exceeds splitter ratio {sp.ratio_n}")
    if not q.tx_rate_hz > 0:
        v.append(f"quantum.tx_rate_hz: must be > 0, got {q.tx_rate_hz}")
    elif q.n_quantum_users >= 1:
        limit = s.detector.gate_rate_hz / q.n_quantum_users
        if q.tx_rate_hz > limit * (1 + 1e-12):
            v.append(
                f"quantum.tx_rate_hz: {q.tx_rate_hz:g} Hz exceeds gate_rate/n_quantum_users = {limit:g} Hz"
            )
        elif q.tx_rate_hz * q.n_quantum_users * q.interleave_gate_separation > s.detector.gate_rate_hz * (1 + 1e-12):
            v.append(
                f"quantum.interleave_gate_separation: {q.interleave_gate_separation} gates between "
                f"{q.n_quantum_users} transmitters at {q.tx_rate_hz:g} Hz does not fit the gate rate"
            )
    if q.interleave_gate_separation < 1:
        v.append("quantum.interleave_gate_separation: must be >= 1")

    d = s.detector
    if not 0 < d.efficiency <= 1:
        v.append(f"detector.efficiency: must lie in (0, 1], got {d.efficiency}")
    for name in ("dark_prob_per_gate", "afterpulse_prob", "dead_time_s", "receiver_insertion_loss_db"):
        if not _finite_nonneg(getattr(d, name)):
            v.append(f"detector.{name}: must be finite and >= 0")
    if d.n_detectors < 1:
        v.append("detector.n_detectors: must be >= 1")
    if not d.gate_rate_hz > 0:
        v.append("detector.gate_rate_hz: must be > 0")
    if not d.filter_dlambda_nm > 0:
        v.append("detector.filter_dlambda_nm: must be > 0")
    if not 0 < d.filter_dt <= 1:
        v.append(f"detector.filter_dt: must lie in (0, 1], got {d.filter_dt}")

    p = s.protocol
    if not 0 < p.epsilon_total < 1:
        v.append(f"protocol.epsilon_total: must lie in (0, 1), got {p.epsilon_total}")
    if not p.f_ec >= 1:
        v.append(f"protocol.f_ec: must be >= 1, got {p.f_ec}")
    if not p.session_s > 0:
        v.append(f"protocol.session_s: must be > 0, got {p.session_s}")
    if not 0 <= p.e_opt <= 0.5:
        v.append(f"protocol.e_opt: must lie in [0, 0.5], got {p.e_opt}")

    for name, value in vars(s.coefficients).items():
        if not (math.isfinite(value) and value > 0):
            v.append(f"coefficients.{name}: must be > 0, got {value}")

    unknown = set(s.noise_sources) - set(NOISE_SOURCES)
    if unknown:
        v.append(f"noise_sources: unknown sources {sorted(unknown)}")
    if s.capacity_scaling not in CAPACITY_SCALINGS:
        v.append(f"capacity_scaling: {s.capacity_scaling!r} not in {CAPACITY_SCALINGS}")


def require_valid(s: NetworkScenario) -> None:
    violations = validate(s)
    if violations:
        raise ScenarioError(violations)
