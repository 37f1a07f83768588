"""Outage-capacity and symbol-error analysis of an underlay cognitive
two-way amplify-and-forward relay network over independent non-identical
Nakagami-m fading, with closed forms, quadrature oracles and a seeded
Monte Carlo engine."""

from .model import (
    FadingLink,
    ModulationSpec,
    NetworkScenario,
    PowerProfile,
    Scenario,
    mpsk_constants,
    primary_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "FadingLink",
    "ModulationSpec",
    "NetworkScenario",
    "PowerProfile",
    "Scenario",
    "mpsk_constants",
    "primary_threshold",
    "__version__",
]
