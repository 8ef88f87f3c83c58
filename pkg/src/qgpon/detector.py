"""Gated InGaAs detector: losses, noise photons and background clicks per gate."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import OpticalPower, QUANTUM, photon_energy, transmittance
from .topology import DetectorConfig, NetworkScenario

__all__ = [
    "DetectorConfig",
    "OperatingPoint",
    "background_probability",
    "channel_transmittance",
    "click_probability",
    "dead_time_factor",
    "loss_breakdown_db",
    "noise_probability_per_gate",
    "operating_point",
]

FIXED_POINT_RTOL = 1e-10
FIXED_POINT_MAX_ITER = 100


def loss_breakdown_db(s: NetworkScenario) -> dict:
    """Quantum-channel loss by element. Detector efficiency is not included."""
    fibre = 10.0 * s.coefficients.alpha_q_per_km * (s.feeder_km + s.drop_km) / math.log(10.0)
    out = {
        "fibre_db": fibre,
        "splitter_db": s.splitter.loss_db,
        "receiver_db": s.detector.receiver_insertion_loss_db,
    }
    out["total_db"] = out["fibre_db"] + out["splitter_db"] + out["receiver_db"]
    # same path counting only the narrow filter at the receiver
    out["total_narrow_filter_db"] = fibre + s.splitter.loss_db + s.detector.narrow_filter_loss_db
    return out


def channel_transmittance(s: NetworkScenario) -> float:
    fibre = math.exp(-s.coefficients.alpha_q_per_km * (s.feeder_km + s.drop_km))
    return fibre * transmittance(s.splitter.loss_db) * transmittance(s.detector.receiver_insertion_loss_db)


def noise_probability_per_gate(p_noise, d: DetectorConfig) -> float:
    """Detected noise photons per gate for a noise power at the detector."""
    watts = p_noise.watts if isinstance(p_noise, OpticalPower) else float(p_noise)
    return watts / photon_energy(QUANTUM.center_nm) * d.efficiency / d.gate_rate_hz


def background_probability(s: NetworkScenario, budget, total_count_rate_hz: float) -> float:
    """Per-gate click probability without a signal photon: dark + Raman + afterpulse.

    The Raman budget is referenced to the receiver input, so it crosses the
    receiver filters before it reaches the detectors.
    """
    d = s.detector
    raman_w = budget.total_power_w * transmittance(d.receiver_insertion_loss_db)
    return (
        d.n_detectors * d.dark_prob_per_gate
        + noise_probability_per_gate(raman_w, d)
        + d.afterpulse_prob * total_count_rate_hz / d.gate_rate_hz
    )


def click_probability(mu: float, eta_total: float, y_bg: float) -> float:
    return -math.expm1(-mu * eta_total) * (1.0 - y_bg) + y_bg


def dead_time_factor(count_rate_per_detector_hz: float, d: DetectorConfig) -> float:
    return 1.0 / (1.0 + count_rate_per_detector_hz * d.dead_time_s)


@dataclass(frozen=True)
class OperatingPoint:
    eta: float  # end-to-end detection efficiency after dead time
    y_bg: float  # background clicks per gate after dead time
    dark: float
    raman: float
    afterpulse: float
    dead_time: float
    count_rate_hz: float
    iterations: int


def operating_point(s: NetworkScenario, budget) -> OperatingPoint:
    """Self-consistent detector load for all quantum users sharing the receiver.

    Afterpulsing raises the background, which raises the count rate, which
    raises afterpulsing; dead time throttles everything. Iterate from a
    clean detector until the count rate settles.
    """
    d = s.detector
    tx = s.quantum
    eta0 = channel_transmittance(s) * d.efficiency
    base = background_probability(s, budget, 0.0)
    dark = d.n_detectors * d.dark_prob_per_gate
    signal_pulses = [(tx.tx_rate_hz * tx.n_quantum_users * p, k) for k, p in
                     ((tx.mu, tx.p_mu), (tx.nu, tx.p_nu), (tx.w, tx.p_w))]

    rate = 0.0
    for it in range(1, FIXED_POINT_MAX_ITER + 1):
        factor = dead_time_factor(rate / d.n_detectors, d)
        y_bg = factor * background_probability(s, budget, rate)
        eta = factor * eta0
        new_rate = d.gate_rate_hz * y_bg + sum(
            n * (click_probability(k, eta, y_bg) - y_bg) for n, k in signal_pulses
        )
        done = abs(new_rate - rate) <= FIXED_POINT_RTOL * max(abs(new_rate), 1e-300)
        rate = new_rate
        if done:
            break
    else:
        raise RuntimeError(f"detector fixed point did not converge in {FIXED_POINT_MAX_ITER} iterations")

    factor = dead_time_factor(rate / d.n_detectors, d)
    afterpulse = d.afterpulse_prob * rate / d.gate_rate_hz
    return OperatingPoint(
        eta=factor * eta0,
        y_bg=factor * (base + afterpulse),
        dark=dark,
        raman=base - dark,
        afterpulse=afterpulse,
        dead_time=factor,
        count_rate_hz=rate,
        iterations=it,
    )
