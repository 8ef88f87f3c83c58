"""Units, wavelength plan and elementary math shared by the simulator.

Powers are carried in watts internally; dBm only shows up at configuration
and reporting boundaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

PLANCK = 6.62607015e-34  # J s
SPEED_OF_LIGHT = 2.99792458e8  # m / s

# clamp window for binary_entropy inputs
_ENTROPY_EPS = 1e-15


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


@dataclass(frozen=True)
class OpticalPower:
    watts: float

    def __post_init__(self):
        if not self.watts >= 0:
            raise DomainError(f"optical power must be >= 0 W, got {self.watts}")

    @property
    def dbm(self) -> float:
        return watts_to_dbm(self)


@dataclass(frozen=True)
class WavelengthChannel:
    label: str
    center_nm: float


QUANTUM = WavelengthChannel("quantum", 1550.0)
UPSTREAM = WavelengthChannel("upstream", 1310.0)
DOWNSTREAM = WavelengthChannel("downstream", 1490.0)
CLOCK = WavelengthChannel("clock", 1610.0)

DEFAULT_PLAN = {c.label: c for c in (QUANTUM, UPSTREAM, DOWNSTREAM, CLOCK)}


@dataclass(frozen=True)
class ChannelCoefficients:
    """Fibre attenuation (natural units, 1/km) and Raman coefficients (1/nm/km)
    for scattering from each classical channel into the quantum band."""

    alpha_q_per_km: float = 0.046
    alpha_us_per_km: float = 0.076
    alpha_ds_per_km: float = 0.051
    alpha_clk_per_km: float = 0.051
    beta_us_per_nm: float = 8e-10
    beta_ds_per_nm: float = 6.8e-9
    beta_clk_per_nm: float = 2.4e-9

    def alpha(self, label: str) -> float:
        return {
            "quantum": self.alpha_q_per_km,
            "upstream": self.alpha_us_per_km,
            "downstream": self.alpha_ds_per_km,
            "clock": self.alpha_clk_per_km,
        }[label]

    def beta(self, label: str) -> float:
        return {
            "upstream": self.beta_us_per_nm,
            "downstream": self.beta_ds_per_nm,
            "clock": self.beta_clk_per_nm,
        }[label]


def dbm_to_watts(p: float) -> OpticalPower:
    if not math.isfinite(p):
        raise DomainError(f"dBm value must be finite, got {p}")
    return OpticalPower(1e-3 * 10.0 ** (p / 10.0))


def watts_to_dbm(p: OpticalPower | float) -> float:
    w = p.watts if isinstance(p, OpticalPower) else float(p)
    if not w > 0:
        raise DomainError(f"cannot express {w} W in dBm")
    return 10.0 * math.log10(w / 1e-3)


def transmittance(loss_db: float) -> float:
    """Linear power transmittance of a ``loss_db`` attenuation."""
    if loss_db < 0:
        raise DomainError(f"loss must be >= 0 dB, got {loss_db}")
    return 10.0 ** (-loss_db / 10.0)


def alpha_natural_to_db_per_km(a: float) -> float:
    return 10.0 * a / math.log(10.0)


def photon_energy(lambda_nm: float) -> float:
    if not lambda_nm > 0:
        raise DomainError(f"wavelength must be > 0 nm, got {lambda_nm}")
    return PLANCK * SPEED_OF_LIGHT / (lambda_nm * 1e-9)


def binary_entropy(x: float) -> float:
    """Shannon entropy of a biased coin, in bits.

    Inputs within 1e-15 of the interval ends are clamped, so tiny round-off
    from upstream arithmetic does not raise.
    """
    if -_ENTROPY_EPS <= x <= _ENTROPY_EPS or 1 - _ENTROPY_EPS <= x <= 1 + _ENTROPY_EPS:
        return 0.0
    if not 0.0 < x < 1.0:
        raise DomainError(f"binary entropy needs 0 <= x <= 1, got {x}")
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)
