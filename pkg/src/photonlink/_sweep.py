"""Shared pieces for power sweeps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SweepError(RuntimeError):
    """A single sweep point failed; ``index`` is its position in the sweep."""

    def __init__(self, index: int, power_dbm: float, cause: Exception):
        self.index = index
        self.power_dbm = power_dbm
        self.cause = cause
        super().__init__(f"sweep point {index} (power_dbm={power_dbm:g}): {cause}")


@dataclass(frozen=True)
class RatePoint:
    power_dbm: float
    rate_bits: float
    prior_one: float
    threshold: int | None = None


def crossing_power(powers, rates, level=0.95):
    """First power at which ``rates`` reaches ``level``, linearly interpolated.

    Returns ``nan`` if the curve never reaches ``level`` and the first power if
    it starts above it.
    """
    powers = np.asarray(powers, dtype=float)
    rates = np.asarray(rates, dtype=float)
    above = np.nonzero(rates >= level)[0]
    if above.size == 0:
        return float("nan")
    i = above[0]
    if i == 0:
        return float(powers[0])
    p0, p1, r0, r1 = powers[i - 1], powers[i], rates[i - 1], rates[i]
    return float(p0 + (level - r0) * (p1 - p0) / (r1 - r0))
