"""Data model: fading links, power profiles, network scenarios, modulation.

All powers are normalized transmit SNRs (transmit power over N0, with
N0 = 1 throughout); link gains are the dimensionless mean of |h|^2.
Everything is immutable after construction and validated on the way in.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = [
    "FadingLink",
    "PowerProfile",
    "Scenario",
    "NetworkScenario",
    "ModulationSpec",
    "primary_threshold",
    "mpsk_constants",
    "db_to_linear",
    "linear_to_db",
]


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class FadingLink:
    """One Nakagami-m link: integer severity m and mean power gain of |h|^2."""

    m: int
    mean_gain: float

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise ValueError(f"fading severity m must be an integer >= 1, got {self.m!r}")
        if not (self.mean_gain > 0.0):
            raise ValueError(f"mean_gain must be positive, got {self.mean_gain}")

    @property
    def rate(self) -> float:
        """Rate parameter m/mean_gain of the Gamma-distributed |h|^2."""
        return self.m / self.mean_gain


@dataclass(frozen=True)
class PowerProfile:
    """Normalized transmit SNRs for primary transmitter, secondary sources
    (shared, gamma_bar_S1 = gamma_bar_S2) and relay, plus the hard caps the
    power solver may not exceed."""

    gamma_bar_p: float
    gamma_bar_s: float
    gamma_bar_r: float
    max_gamma_bar_s: float
    max_gamma_bar_r: float

    def __post_init__(self):
        for name in ("gamma_bar_p", "gamma_bar_s", "gamma_bar_r",
                     "max_gamma_bar_s", "max_gamma_bar_r"):
            if not (getattr(self, name) > 0.0):
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.gamma_bar_s > self.max_gamma_bar_s * (1.0 + 1e-12):
            raise ValueError("gamma_bar_s exceeds its cap")
        if self.gamma_bar_r > self.max_gamma_bar_r * (1.0 + 1e-12):
            raise ValueError("gamma_bar_r exceeds its cap")


class Scenario(enum.Enum):
    A = "a"  # single relay, sources see primary interference
    B = "b"  # K relays with best-relay selection, sources noise-limited


@dataclass(frozen=True)
class NetworkScenario:
    """Full topology: primary links, per-relay secondary links, direct
    interference links, primary rate and secondary SINR threshold.

    Per-relay link tuples must have length K.  Scenario A requires K = 1
    and the direct interference links pt_s1 / pt_s2; Scenario B ignores
    them (source nodes are noise-limited) and they may be omitted.
    """

    scenario: Scenario
    K: int
    pt_px: FadingLink                      # primary transmitter -> primary receiver
    s1_px: FadingLink                      # source 1 -> primary receiver
    s2_px: FadingLink                      # source 2 -> primary receiver
    relay_px: tuple[FadingLink, ...]       # relay k -> primary receiver
    pt_relay: tuple[FadingLink, ...]       # primary transmitter -> relay k
    s1_relay: tuple[FadingLink, ...]       # source 1 <-> relay k
    s2_relay: tuple[FadingLink, ...]       # source 2 <-> relay k
    pt_s1: FadingLink | None               # primary transmitter -> source 1
    pt_s2: FadingLink | None               # primary transmitter -> source 2
    primary_rate: float                    # bits/s/Hz
    secondary_threshold: float             # linear SINR

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"relay count K must be >= 1, got {self.K}")
        if self.scenario is Scenario.A and self.K != 1:
            raise ValueError("scenario A has a single relay (K = 1)")
        if self.scenario is Scenario.A and (self.pt_s1 is None or self.pt_s2 is None):
            raise ValueError("scenario A requires the PT-S1 and PT-S2 interference links")
        for name in ("relay_px", "pt_relay", "s1_relay", "s2_relay"):
            links = getattr(self, name)
            if len(links) != self.K:
                raise ValueError(f"{name} must list one link per relay (K={self.K}), got {len(links)}")
        if not (self.primary_rate > 0.0):
            raise ValueError(f"primary_rate must be positive, got {self.primary_rate}")
        if not (self.secondary_threshold > 0.0):
            raise ValueError(f"secondary_threshold must be positive, got {self.secondary_threshold}")


def primary_threshold(scenario: NetworkScenario) -> float:
    """SINR threshold 2^R - 1 matching the primary target rate."""
    return 2.0 ** scenario.primary_rate - 1.0


@dataclass(frozen=True)
class ModulationSpec:
    """MPSK constellation with its conditional-SEP constants (a, b)."""

    M: int
    a: float
    b: float

    def __post_init__(self):
        if self.M < 2 or self.M & (self.M - 1):
            raise ValueError(f"M must be a power of two >= 2, got {self.M}")
        if not (self.a > 0.0 and self.b > 0.0):
            raise ValueError("SEP constants a, b must be positive")


def mpsk_constants(M: int) -> ModulationSpec:
    """Standard MPSK approximation constants: a = 1 for BPSK else 2,
    b = sin^2(pi/M)."""
    if M < 2 or M & (M - 1):
        raise ValueError(f"unsupported constellation size {M}")
    a = 1.0 if M == 2 else 2.0
    b = math.sin(math.pi / M) ** 2
    return ModulationSpec(M=M, a=a, b=b)
