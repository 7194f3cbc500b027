"""Dual-path (HBT) receiver channel.

Each slot yields three independent Poisson event counts for the two-branch
outcomes ``00``, ``01`` and ``10``. Under symbol one the mean of outcome ``i``
is ``Pc_i lambda_sig + Pt_i lambda_bg``; under symbol zero it is
``Pt_i lambda_bg``. Mutual information is summed over a truncated count box
in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy import stats as _st

from ._optimize import golden_max
from ._parallel import ordered_map
from ._sweep import RatePoint, SweepError
from .poisson_channel import _mi_from_log_pmfs
from .radiometry import SlotStatistics, slot_statistics

__all__ = [
    "DEFAULT_COHERENT_PROBS",
    "DEFAULT_THERMAL_PROBS",
    "CountTriple",
    "HbtChannelParams",
    "TruncationError",
    "conditional_pmf",
    "hbt_mutual_information",
    "mutual_information_from_means",
    "optimal_prior",
    "optimal_prior_from_means",
    "map_error_probability",
    "hbt_rate_curve",
]

# outcome order throughout: (00, 01, 10)
DEFAULT_COHERENT_PROBS = (0.25, 0.25, 0.25)
DEFAULT_THERMAL_PROBS = (0.36, 0.07, 0.07)

TRUNCATION_TOL = 1e-8


class TruncationError(RuntimeError):
    """Widening the summation box moved the result by more than the tolerance."""


class CountTriple(NamedTuple):
    n00: int
    n01: int
    n10: int


@dataclass(frozen=True)
class HbtChannelParams:
    """Outcome probabilities for coherent and thermal photons plus slot means.

    ``symmetric=True`` asserts ``P01 == P10`` for both triples and is checked.
    """

    coherent_probs: tuple = DEFAULT_COHERENT_PROBS
    thermal_probs: tuple = DEFAULT_THERMAL_PROBS
    stats: SlotStatistics = SlotStatistics(0.0, 0.0)
    symmetric: bool = False

    def __post_init__(self):
        for name in ("coherent_probs", "thermal_probs"):
            probs = tuple(float(x) for x in getattr(self, name))
            if len(probs) != 3:
                raise ValueError(f"{name} must have three entries (00, 01, 10)")
            if any(not 0.0 <= x <= 1.0 for x in probs):
                raise ValueError(f"{name} entries must lie in [0, 1], got {probs}")
            if sum(probs) > 1.0 + 1e-12:
                raise ValueError(f"{name} must sum to <= 1, got {sum(probs)}")
            if self.symmetric and probs[1] != probs[2]:
                raise ValueError(f"{name}: symmetric channel requires P01 == P10")
            object.__setattr__(self, name, probs)

    @property
    def means_zero(self) -> np.ndarray:
        return np.asarray(self.thermal_probs) * self.stats.lambda_bg

    @property
    def means_one(self) -> np.ndarray:
        return np.asarray(self.coherent_probs) * self.stats.lambda_sig + self.means_zero

    def with_stats(self, stats: SlotStatistics) -> "HbtChannelParams":
        return replace(self, stats=stats)


def conditional_pmf(counts, symbol: int, params: HbtChannelParams):
    """P(N00, N01, N10 = counts | symbol): product of three Poisson pmfs."""
    if symbol not in (0, 1):
        raise ValueError(f"symbol must be 0 or 1, got {symbol}")
    means = params.means_one if symbol == 1 else params.means_zero
    k = np.asarray(counts)
    return np.prod(_st.poisson.pmf(k, means), axis=-1)


def _axis_range(m0: float, m1: float, extra_sd: float):
    lo_m, hi_m = min(m0, m1), max(m0, m1)
    lo = max(0, int(math.floor(lo_m - (10.0 + extra_sd) * math.sqrt(lo_m) - 20.0)))
    hi = int(math.ceil(hi_m + (10.0 + extra_sd) * math.sqrt(hi_m) + 20.0))
    return np.arange(lo, hi + 1)


def _reduced_axes(means_zero, means_one):
    """Merge outcome axes without changing the mutual information.

    Axes whose mean is the same under both symbols carry no information and
    are dropped. Axes whose (zero, one) means are identical are summed into
    one Poisson axis, since their log-likelihood ratio depends only on the
    total. Both steps are exact.
    """
    groups: dict[tuple[float, float], int] = {}
    for m0, m1 in zip(means_zero, means_one):
        if m0 == m1:
            continue
        groups[(m0, m1)] = groups.get((m0, m1), 0) + 1
    return [(m0 * n, m1 * n) for (m0, m1), n in groups.items()]


def _grid_log_pmfs(axes, extra_sd: float = 0.0):
    """Flattened per-cell ``(log P0, log P1)`` over the truncated box.

    The joint log-pmfs factor into per-axis terms and are assembled by
    broadcasting.
    """
    log0 = np.zeros(1)
    log1 = np.zeros(1)
    for m0, m1 in axes:
        k = _axis_range(m0, m1, extra_sd)
        l0 = _st.poisson.logpmf(k, m0)
        l1 = _st.poisson.logpmf(k, m1)
        log0 = (log0[:, None] + l0[None, :]).ravel()
        log1 = (log1[:, None] + l1[None, :]).ravel()
    return log0, log1


def mutual_information_from_means(means_zero, means_one, prior_one, audit: bool = True,
                                  reduce: bool = True):
    """I(X; N00, N01, N10) in bits for arbitrary per-outcome Poisson means.

    ``reduce=False`` forces summation over the full three-dimensional box (slow
    at large means; intended as a cross-check). With ``audit`` the box is
    widened by five standard deviations per edge and a change above 1e-8 bits
    raises :class:`TruncationError`.
    """
    means_zero = [float(x) for x in means_zero]
    means_one = [float(x) for x in means_one]
    axes = _reduced_axes(means_zero, means_one) if reduce else list(zip(means_zero, means_one))
    if not axes:
        zero = np.zeros(np.shape(prior_one))
        return zero if zero.ndim else 0.0
    mi = _mi_from_log_pmfs(*_grid_log_pmfs(axes), prior_one)
    if audit:
        wide = _mi_from_log_pmfs(*_grid_log_pmfs(axes, extra_sd=5.0), prior_one)
        if np.max(np.abs(np.asarray(wide) - np.asarray(mi))) > TRUNCATION_TOL:
            raise TruncationError(
                f"truncation audit failed: MI moved by {np.max(np.abs(wide - mi)):.3g} bits"
            )
    return mi


def hbt_mutual_information(params: HbtChannelParams, prior_one, audit: bool = True):
    """Mutual information (bits) of the HBT channel for a given on-symbol prior."""
    return mutual_information_from_means(params.means_zero, params.means_one, prior_one, audit)


def optimal_prior_from_means(means_zero, means_one, tol: float = 1e-10):
    """``(prior_star, rate_bits)``; golden section is valid as the MI is concave."""
    axes = _reduced_axes(means_zero, means_one)
    if not axes:
        return 0.5, 0.0
    log0, log1 = _grid_log_pmfs(axes)
    prior, rate = golden_max(lambda g: _mi_from_log_pmfs(log0, log1, g), 0.0, 1.0, tol)
    # audit once, at the optimum
    mutual_information_from_means(means_zero, means_one, prior, audit=True)
    return prior, rate


def optimal_prior(params: HbtChannelParams, tol: float = 1e-10):
    """Maximize :func:`hbt_mutual_information` over the prior.

    Returns ``(prior_star, rate_bits)``. With no usable signal the rate is 0
    and the prior is reported as 0.5.
    """
    return optimal_prior_from_means(params.means_zero, params.means_one, tol)


def map_error_probability(params: HbtChannelParams, prior_one: float) -> float:
    """Exact symbol error rate of the MAP detector (ties decide zero)."""
    axes = _reduced_axes(params.means_zero, params.means_one)
    if not axes:
        return min(prior_one, 1.0 - prior_one)
    log0, log1 = _grid_log_pmfs(axes)
    with np.errstate(divide="ignore"):
        s1 = math.log(prior_one) + log1 if prior_one > 0 else np.full_like(log1, -np.inf)
        s0 = math.log1p(-prior_one) + log0 if prior_one < 1 else np.full_like(log0, -np.inf)
    decide_one = s1 > s0
    return float(np.sum(np.where(decide_one, np.exp(s0), np.exp(s1))))


def hbt_rate_curve(budget_sweep, params_template: HbtChannelParams | None = None,
                   workers: int | None = None) -> list[RatePoint]:
    """Optimal-prior HBT rate at every link budget of a sweep.

    ``params_template`` supplies the outcome probabilities (defaults to the
    measured triples ``(0.25, 0.25, 0.25)`` and ``(0.36, 0.07, 0.07)``); its
    slot statistics are replaced per point. Capture probability is not
    applied, the outcome probabilities already include detection.
    """
    template = params_template or HbtChannelParams()
    budgets = list(budget_sweep)
    if not budgets:
        raise ValueError("budget_sweep must be nonempty")

    def run(item):
        i, b = item
        try:
            params = template.with_stats(slot_statistics(b))
            prior, rate = optimal_prior(params)
            return RatePoint(b.power_dbm, float(rate), float(prior), None)
        except Exception as exc:
            raise SweepError(i, b.power_dbm, exc) from exc

    return ordered_map(run, enumerate(budgets), workers)
