"""Channel and secret-key-rate models for QKD links from a high-altitude
platform to a drone, relayed by an optical reconfigurable intelligent
surface (ORIS) on a building."""

from __future__ import annotations

from .beam import PhaseProfile, TxBeam
from .config import ScenarioConfig, parse_config
from .gml import PE_PRESETS, HoverStats, average_gml, conditional_gml, deterministic_gml
from .scenario import LinkState, Scenario
from .skr import ChannelBudget, plob_average_exact, plob_average_gl, plob_pointwise

__all__ = [
    "PE_PRESETS",
    "ChannelBudget",
    "HoverStats",
    "LinkState",
    "PhaseProfile",
    "Scenario",
    "ScenarioConfig",
    "TxBeam",
    "average_gml",
    "conditional_gml",
    "deterministic_gml",
    "parse_config",
    "plob_average_exact",
    "plob_average_gl",
    "plob_pointwise",
]

__version__ = "0.1.0"
