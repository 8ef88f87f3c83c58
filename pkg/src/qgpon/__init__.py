"""Quantum key distribution over GPON access networks: Raman noise, detector
load and finite-size decoy-state BB84 key rates."""

__version__ = "0.1.0"

from .keyrate import KeyRateResult, secure_key_rate
from .raman import NoiseBudget, noise_budget
from .scenarios import PRESETS, preset
from .topology import NetworkScenario, ScenarioError, validate

__all__ = [
    "KeyRateResult",
    "NetworkScenario",
    "NoiseBudget",
    "PRESETS",
    "ScenarioError",
    "noise_budget",
    "preset",
    "secure_key_rate",
    "validate",
]
