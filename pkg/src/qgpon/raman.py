"""Spontaneous Raman noise from the classical GPON channels into the quantum band."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .gpon import effective_ds_launch_dbm
from .model import DEFAULT_PLAN, DomainError, OpticalPower, WavelengthChannel, dbm_to_watts, transmittance
from .topology import NetworkScenario, require_valid

# below this |alpha_sig - alpha_q| the forward formula switches to its analytic limit
DEGENERATE_ALPHA = 1e-9


def _watts(p) -> float:
    return p.watts if isinstance(p, OpticalPower) else float(p)


def _check_span(alpha_sig, alpha_q, l):
    if l < 0:
        raise DomainError(f"fibre length must be >= 0 km, got {l}")
    if not (alpha_sig > 0 and alpha_q > 0):
        raise DomainError("attenuation coefficients must be > 0")


def forward_raman_power(p_launch, beta, d_lambda, d_t, alpha_sig, alpha_q, l) -> OpticalPower:
    """Co-propagating Raman power reaching the far end of an ``l`` km span.

    The scattering is generated along the span by a signal launched with
    ``p_launch`` and decays at ``alpha_sig``; the scattered light then decays
    at ``alpha_q`` over the rest of the span.
    """
    _check_span(alpha_sig, alpha_q, l)
    scale = _watts(p_launch) * beta * d_lambda * d_t
    diff = alpha_sig - alpha_q
    if abs(diff) < DEGENERATE_ALPHA:
        a = 0.5 * (alpha_sig + alpha_q)
        return OpticalPower(scale * l * math.exp(-a * l))
    # -expm1 keeps precision for short spans
    shape = math.exp(-alpha_q * l) * -math.expm1(-diff * l) / diff
    return OpticalPower(max(0.0, scale * shape))


def backward_raman_power(p_launch, beta, d_lambda, d_t, alpha_sig, alpha_q, l) -> OpticalPower:
    """Counter-propagating Raman power returning to the launch end of an ``l`` km span."""
    _check_span(alpha_sig, alpha_q, l)
    a = alpha_sig + alpha_q
    return OpticalPower(_watts(p_launch) * beta * d_lambda * d_t * -math.expm1(-a * l) / a)


@dataclass(frozen=True)
class NoiseContribution:
    source: WavelengthChannel
    mechanism: str  # forward | backward
    span_role: str  # feeder_gpon | feeder_quantum | drop
    power_at_receiver_w: float

    @property
    def key(self) -> str:
        return f"{self.source.label}_{self.mechanism}_{self.span_role}"


@dataclass(frozen=True)
class NoiseBudget:
    contributions: tuple
    total_power_w: float

    def share(self, source: str, span_role: str | None = None) -> float:
        """Fraction of the total carried by ``source`` (optionally in one span role)."""
        if self.total_power_w == 0:
            return 0.0
        part = sum(
            c.power_at_receiver_w
            for c in self.contributions
            if c.source.label == source and (span_role is None or c.span_role == span_role)
        )
        return part / self.total_power_w

    def as_dict(self) -> dict:
        return {c.key: c.power_at_receiver_w for c in self.contributions}


def noise_budget(s: NetworkScenario) -> NoiseBudget:
    """Raman noise power at the quantum receiver input, split by source and span.

    Each term is attenuated along its path back to the OLT: through the
    splitter for drop-fibre terms and through the (quantum) feeder.
    """
    require_valid(s)
    co = s.coefficients
    det = s.detector
    dl, dt = det.filter_dlambda_nm, det.filter_dt
    aq = co.alpha_q_per_km
    t_split = transmittance(s.splitter.loss_db)
    feeder = s.feeder_km
    feeder_back = math.exp(-aq * feeder)
    enabled = set(s.noise_sources)

    launch = {
        "downstream": dbm_to_watts(effective_ds_launch_dbm(s)).watts if "downstream" in enabled else 0.0,
        "clock": s.signal_plan.clock_power_w if "clock" in enabled else 0.0,
    }
    p_us_onu = dbm_to_watts(s.signal_plan.us_avg_per_onu_dbm).watts if "upstream" in enabled else 0.0

    terms: dict[tuple, float] = {}

    def add(label, mechanism, role, watts):
        key = (label, mechanism, role)
        terms[key] = terms.get(key, 0.0) + watts

    drops = Counter(s.drops())

    # drop fibres: everything couples back through the splitter and the quantum feeder
    if not s.feeder_only_noise:
        for (length, hosts_gpon), count in sorted(drops.items()):
            if length == 0:
                continue
            for label in ("downstream", "clock"):
                into_drop = launch[label] * math.exp(-co.alpha(label) * feeder) * t_split
                p = backward_raman_power(into_drop, co.beta(label), dl, dt, co.alpha(label), aq, length).watts
                add(label, "backward", "drop", count * p * t_split * feeder_back)
            if hosts_gpon:
                p = forward_raman_power(p_us_onu, co.beta_us_per_nm, dl, dt, co.alpha_us_per_km, aq, length).watts
                add("upstream", "forward", "drop", count * p * t_split * feeder_back)

    # feeder fibre terms
    us_aggregate = sum(
        count * p_us_onu * math.exp(-co.alpha_us_per_km * length) * t_split
        for (length, hosts_gpon), count in drops.items()
        if hosts_gpon
    )
    if not s.splitter.dual_feeder:
        for label in ("downstream", "clock"):
            p = backward_raman_power(launch[label], co.beta(label), dl, dt, co.alpha(label), aq, feeder).watts
            add(label, "backward", "feeder_gpon", p)
        p = forward_raman_power(us_aggregate, co.beta_us_per_nm, dl, dt, co.alpha_us_per_km, aq, feeder).watts
        add("upstream", "forward", "feeder_gpon", p)
    elif s.upstream_in_quantum_feeder:
        p = forward_raman_power(us_aggregate, co.beta_us_per_nm, dl, dt, co.alpha_us_per_km, aq, feeder).watts
        add("upstream", "forward", "feeder_quantum", p)

    contributions = tuple(
        NoiseContribution(DEFAULT_PLAN[label], mech, role, watts)
        for (label, mech, role), watts in terms.items()
    )
    return NoiseBudget(contributions, math.fsum(c.power_at_receiver_w for c in contributions))
