"""Decoy-state BB84 with biased basis choice: gains, decoy bounds and finite-size key length.

Three intensities (signal ``mu``, decoy ``nu``, weak vacuum ``w``). Only
signal pulses sent and measured in the majority Z basis feed the key; the
phase error is bounded from decoy statistics with a sampling correction
for the X-basis single-photon pool.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .detector import channel_transmittance, loss_breakdown_db, operating_point
from .gpon import effective_ds_launch_dbm
from .model import DomainError, binary_entropy
from .raman import noise_budget
from .topology import NetworkScenario, ProtocolConfig, QuantumTxConfig, require_valid

__all__ = [
    "DecoyBounds",
    "IntensityStats",
    "KeyRateResult",
    "ProtocolConfig",
    "ProtocolStats",
    "decoy_bounds",
    "finite_size_key_length",
    "gains_and_errors",
    "hoeffding_deviations",
    "secure_key_rate",
]

INTENSITIES = ("mu", "nu", "w")
E0 = 0.5  # error rate of background clicks


@dataclass(frozen=True)
class IntensityStats:
    intensity: float
    n_sent: float
    q: float
    e: float
    n_sifted_z: float


@dataclass(frozen=True)
class ProtocolStats:
    mu: IntensityStats
    nu: IntensityStats
    w: IntensityStats
    p_z: float

    def __getitem__(self, name: str) -> IntensityStats:
        return getattr(self, name)


@dataclass(frozen=True)
class DecoyBounds:
    y0_lower: float
    y1_lower: float
    e1_upper: float

    def __iter__(self):
        # unpacks as (y0_lower, y1_lower, e1_upper)
        return iter((self.y0_lower, self.y1_lower, self.e1_upper))


@dataclass(frozen=True)
class KeyRateResult:
    y0_lower: float
    y1_lower: float
    e1_upper: float
    e_phase_upper: float
    qber_z: float
    key_length_bits: int
    rate_bps: float
    session_s: float
    diagnostics: dict = field(default_factory=dict, compare=False)


def gains_and_errors(eta_total: float, y_bg: float, e_opt: float, tx: QuantumTxConfig, T: float) -> ProtocolStats:
    per = {}
    for name in INTENSITIES:
        k = tx.intensities[name]
        signal = -math.expm1(-k * eta_total)
        q = 1.0 - (1.0 - y_bg) * (1.0 - signal)
        num = E0 * y_bg + e_opt * signal
        e = num / q if q > 0 else 0.5
        n_sent = tx.tx_rate_hz * T * tx.probabilities[name]
        per[name] = IntensityStats(k, n_sent, q, min(e, 0.5), n_sent * q * tx.p_z**2)
    return ProtocolStats(p_z=tx.p_z, **per)


def hoeffding_deviations(stats: ProtocolStats, eps: float) -> dict:
    """Additive deviations on the per-pulse gains (and the decoy error gain).

    The count deviation is ``sqrt(n_detected * ln(1/eps) / 2)``, expressed
    per pulse sent, so every term shrinks as ``1/sqrt(T)``.
    """
    ln = math.log(1.0 / eps)
    dev = {}
    for name in INTENSITIES:
        st = stats[name]
        dev[f"q_{name}"] = math.sqrt(st.q * ln / (2.0 * st.n_sent)) if st.n_sent > 0 else math.inf
    nu = stats.nu
    dev["eq_nu"] = math.sqrt(nu.e * nu.q * ln / (2.0 * nu.n_sent)) if nu.n_sent > 0 else math.inf
    return dev


def decoy_bounds(stats: ProtocolStats, tx: QuantumTxConfig, deviations: dict | None = None) -> DecoyBounds:
    """Vacuum + weak decoy bounds on the vacuum yield, single-photon yield and error.

    Gains are pushed by ``deviations`` in whichever direction loosens each bound.
    """
    mu, nu, w = tx.mu, tx.nu, tx.w
    if not (mu > nu > w >= 0 and mu > nu + w):
        raise DomainError(f"decoy bounds need mu > nu + w and nu > w >= 0, got {mu}, {nu}, {w}")
    dev = deviations or {}
    d = {key: dev.get(key, 0.0) for key in ("q_mu", "q_nu", "q_w", "eq_nu")}

    q_mu_hi = min(1.0, stats.mu.q + d["q_mu"])
    q_nu_lo = max(0.0, stats.nu.q - d["q_nu"])
    q_nu_hi = min(1.0, stats.nu.q + d["q_nu"])
    q_w_lo = max(0.0, stats.w.q - d["q_w"])
    q_w_hi = min(1.0, stats.w.q + d["q_w"])
    eq_nu_hi = stats.nu.e * stats.nu.q + d["eq_nu"]

    y0_lower = max(0.0, (nu * q_w_lo * math.exp(w) - w * q_nu_hi * math.exp(nu)) / (nu - w))
    # three-intensity form; equals the vacuum + weak decoy bound when w = 0
    y1_lower = max(
        0.0,
        mu / (mu * (nu - w) - (nu**2 - w**2)) * (
            q_nu_lo * math.exp(nu)
            - q_w_hi * math.exp(w)
            - (nu**2 - w**2) / mu**2 * (q_mu_hi * math.exp(mu) - y0_lower)
        ),
    )
    if y1_lower > 0:
        e1_upper = min(0.5, max(0.0, (eq_nu_hi * math.exp(nu) - E0 * y0_lower) / (nu * y1_lower)))
    else:
        e1_upper = 0.5
    return DecoyBounds(y0_lower, y1_lower, e1_upper)


def finite_size_key_length(stats: ProtocolStats, bounds: DecoyBounds, cfg: ProtocolConfig,
                           tx: QuantumTxConfig) -> KeyRateResult:
    eps_sec = eps_cor = eps_pe = cfg.epsilon_total / 3.0
    mu = tx.mu
    sig = stats.mu
    n_z_mu = sig.n_sifted_z
    p_single = mu * math.exp(-mu)

    n_z1 = sig.n_sent * tx.p_z**2 * p_single * bounds.y1_lower
    n_z0 = sig.n_sent * tx.p_z**2 * math.exp(-mu) * bounds.y0_lower if cfg.include_vacuum_term else 0.0
    n_x1 = sig.n_sent * (1.0 - tx.p_z) ** 2 * p_single * bounds.y1_lower
    if n_x1 > 0:
        e_phase = min(0.5, bounds.e1_upper + math.sqrt(math.log(1.0 / eps_pe) / (2.0 * n_x1)))
    else:
        e_phase = 0.5

    qber = sig.e
    overhead = (
        6.0 * math.log2(1.0 / eps_pe)
        + math.log2(2.0 / eps_cor)
        + 2.0 * math.log2(1.0 / (2.0 * eps_sec))
    )
    leak = cfg.f_ec * n_z_mu * binary_entropy(qber)
    raw = n_z0 + n_z1 * (1.0 - binary_entropy(e_phase)) - leak - overhead
    if qber >= cfg.qber_abort_threshold or not raw > 0:
        bits = 0
    else:
        bits = int(math.floor(raw))

    return KeyRateResult(
        y0_lower=bounds.y0_lower,
        y1_lower=bounds.y1_lower,
        e1_upper=bounds.e1_upper,
        e_phase_upper=e_phase,
        qber_z=qber,
        key_length_bits=bits,
        rate_bps=bits / cfg.session_s,
        session_s=cfg.session_s,
        diagnostics={
            "n_z_mu": n_z_mu,
            "n_z1_lower": n_z1,
            "n_z0_lower": n_z0,
            "n_x1_lower": n_x1,
            "leak_ec_bits": leak,
            "raw_key_length": raw,
        },
    )


def secure_key_rate(s: NetworkScenario) -> KeyRateResult:
    """Per-user secure key rate for a scenario, with the full noise and loss breakdown."""
    require_valid(s)
    cfg = s.protocol
    tx = s.quantum
    budget = noise_budget(s)
    op = operating_point(s, budget)
    stats = gains_and_errors(op.eta, op.y_bg, cfg.e_opt, tx, cfg.session_s)
    deviations = hoeffding_deviations(stats, cfg.epsilon_total / 3.0)
    bounds = decoy_bounds(stats, tx, deviations)
    result = finite_size_key_length(stats, bounds, cfg, tx)

    losses = loss_breakdown_db(s)
    diag = result.diagnostics
    diag.update({f"noise_{k}_w": v for k, v in sorted(budget.as_dict().items())})
    diag.update({f"loss_{k}": v for k, v in losses.items()})
    diag.update({
        "noise_total_w": budget.total_power_w,
        "loss_total_db": losses["total_db"],
        "channel_transmittance": channel_transmittance(s),
        "eta_total": op.eta,
        "y_bg": op.y_bg,
        "y_dark": op.dark,
        "y_raman": op.raman,
        "y_afterpulse": op.afterpulse,
        "dead_time_factor": op.dead_time,
        "count_rate_hz": op.count_rate_hz,
        "fixed_point_iterations": op.iterations,
        "ds_launch_dbm": effective_ds_launch_dbm(s),
        **{f"q_{k}": stats[k].q for k in INTENSITIES},
        **{f"e_{k}": stats[k].e for k in INTENSITIES},
        **{f"dev_{k}": v for k, v in deviations.items()},
    })
    return result
