"""Conversion of received power and antenna temperature to per-slot photon means."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .constants import BOLTZMANN, PLANCK

__all__ = [
    "LinkBudget",
    "SlotStatistics",
    "dbm_to_watts",
    "watts_to_dbm",
    "slot_statistics",
]


def dbm_to_watts(power_dbm):
    """Convert decibel-milliwatts to watts. Works elementwise on arrays."""
    return 10.0 ** ((power_dbm - 30.0) / 10.0)


def watts_to_dbm(power_w):
    return 10.0 * math.log10(power_w) + 30.0


@dataclass(frozen=True)
class LinkBudget:
    """Physical description of one operating point of the link.

    Parameters
    ----------
    power_dbm : float
        Received signal power before detector capture, in dBm.
    carrier_freq : float
        Carrier frequency in Hz.
    slot_duration : float
        OOK symbol slot length in seconds.
    antenna_temp : float
        Antenna noise temperature in kelvin.
    capture_prob : float
        Probability that the detector captures an incident photon.
    """

    power_dbm: float
    carrier_freq: float
    slot_duration: float
    antenna_temp: float
    capture_prob: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.power_dbm):
            raise ValueError(f"power_dbm must be finite, got {self.power_dbm}")
        if not self.carrier_freq > 0:
            raise ValueError(f"carrier_freq must be > 0, got {self.carrier_freq}")
        if not self.slot_duration > 0:
            raise ValueError(f"slot_duration must be > 0, got {self.slot_duration}")
        if not self.antenna_temp >= 0:
            raise ValueError(f"antenna_temp must be >= 0, got {self.antenna_temp}")
        if not 0.0 <= self.capture_prob <= 1.0:
            raise ValueError(f"capture_prob must lie in [0, 1], got {self.capture_prob}")


@dataclass(frozen=True)
class SlotStatistics:
    """Per-slot Poisson means seen at the detector input.

    ``lambda_sig`` and ``lambda_bg`` are photon means per slot before capture;
    ``capture_prob`` thins both streams independently.
    """

    lambda_sig: float
    lambda_bg: float
    capture_prob: float = 1.0

    def __post_init__(self):
        if not self.lambda_sig >= 0:
            raise ValueError(f"lambda_sig must be >= 0, got {self.lambda_sig}")
        if not self.lambda_bg >= 0:
            raise ValueError(f"lambda_bg must be >= 0, got {self.lambda_bg}")
        if not 0.0 <= self.capture_prob <= 1.0:
            raise ValueError(f"capture_prob must lie in [0, 1], got {self.capture_prob}")

    @property
    def mean_on(self) -> float:
        """Detected-count mean for symbol one."""
        return self.capture_prob * (self.lambda_sig + self.lambda_bg)

    @property
    def mean_off(self) -> float:
        """Detected-count mean for symbol zero."""
        return self.capture_prob * self.lambda_bg


def slot_statistics(budget: LinkBudget) -> SlotStatistics:
    """Photon means per slot for a link budget.

    The signal mean is received energy per slot over the photon energy. The
    background mean is one thermal mode per slot, ``k_B T_A / (h nu)``, with no
    bandwidth factor.
    """
    photon_energy = PLANCK * budget.carrier_freq
    lambda_sig = dbm_to_watts(budget.power_dbm) * budget.slot_duration / photon_energy
    lambda_bg = BOLTZMANN * budget.antenna_temp / photon_energy
    return SlotStatistics(lambda_sig, lambda_bg, budget.capture_prob)
