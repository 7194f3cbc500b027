"""Thinned-Poisson on-off keying channel.

Counts detected in one slot are Poisson with mean ``p (lambda_sig + lambda_bg)``
for symbol one and ``p lambda_bg`` for symbol zero, ``p`` being the capture
probability. The module gives the hard-decision (threshold) binary asymmetric
channel and the soft-decision mutual information, each optimized over the
on-symbol prior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _st
from scipy.special import xlogy

from ._optimize import golden_max
from ._parallel import ordered_map
from ._sweep import RatePoint, SweepError
from .radiometry import LinkBudget, SlotStatistics, slot_statistics

__all__ = [
    "BinaryChannel",
    "HardDecisionConfig",
    "HardDecisionResult",
    "OutputOptimum",
    "binary_entropy",
    "symbol_pmf",
    "count_support",
    "crossover_probs",
    "bac_mutual_information",
    "maximize_bac_prior",
    "optimal_output_prob",
    "soft_mutual_information",
    "optimize_soft_decision",
    "optimize_hard_decision",
    "rate_curve",
]

LOG2 = math.log(2.0)


@dataclass(frozen=True)
class BinaryChannel:
    """Hard-decision channel: ``p1 = P(Y=1|X=1)``, ``p2 = P(Y=0|X=0)``."""

    p1: float
    p2: float

    def __post_init__(self):
        for name in ("p1", "p2"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")

    @property
    def degenerate(self) -> bool:
        # output independent of input
        return abs(self.p1 + self.p2 - 1.0) < 1e-15


@dataclass(frozen=True)
class HardDecisionConfig:
    threshold: int
    prior_one: float

    def __post_init__(self):
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")
        if not 0.0 <= self.prior_one <= 1.0:
            raise ValueError("prior_one must lie in [0, 1]")


@dataclass(frozen=True)
class HardDecisionResult:
    threshold: int
    prior_one: float
    rate_bits: float


@dataclass(frozen=True)
class OutputOptimum:
    """Closed-form optimal output law of a binary asymmetric channel.

    ``prior_star``/``rate_bits`` come from the closed form; ``prior_search`` and
    ``rate_search`` from direct golden-section maximization. ``discrepancy`` is
    set when the closed form falls short of the search by more than 1e-6 bits.
    For a degenerate channel the priors are ``nan`` and both rates are 0.
    """

    p_y_star: float
    prior_star: float
    rate_bits: float
    prior_search: float
    rate_search: float
    discrepancy: bool


def binary_entropy(x):
    """Binary entropy in bits, with ``0 log 0 = 0``."""
    x = np.asarray(x, dtype=float)
    h = -(xlogy(x, x) + xlogy(1.0 - x, 1.0 - x)) / LOG2
    return h if h.ndim else float(h)


def _symbol_mean(symbol: int, stats: SlotStatistics) -> float:
    if symbol not in (0, 1):
        raise ValueError(f"symbol must be 0 or 1, got {symbol}")
    return stats.mean_on if symbol == 1 else stats.mean_off


def symbol_pmf(count, symbol: int, stats: SlotStatistics):
    """P(detected count | symbol) after capture thinning."""
    return _st.poisson.pmf(count, _symbol_mean(symbol, stats))


def count_support(mean: float, extra_sd: float = 0.0) -> int:
    """Upper count cutoff ``mean + 10 sqrt(mean) + 20`` (plus ``extra_sd`` sd)."""
    return int(math.ceil(mean + (10.0 + extra_sd) * math.sqrt(mean) + 20.0))


def crossover_probs(stats: SlotStatistics, threshold) -> BinaryChannel:
    """Crossover pair for the rule "decide one iff count >= threshold".

    ``threshold`` may be an array, in which case arrays ``(p1, p2)`` are
    returned instead of a :class:`BinaryChannel`.
    """
    m = np.asarray(threshold)
    if np.any(m < 0):
        raise ValueError("threshold must be >= 0")
    # regularized incomplete gamma via scipy: P(N >= M) = sf(M - 1)
    p1 = _st.poisson.sf(m - 1, stats.mean_on)
    p2 = _st.poisson.cdf(m - 1, stats.mean_off)
    if m.ndim == 0:
        return BinaryChannel(float(p1), float(p2))
    return p1, p2


def bac_mutual_information(ch_or_p1, prior_one, p2=None):
    """I(X;Y) in bits of the binary asymmetric channel.

    Call as ``bac_mutual_information(channel, prior)`` or, vectorized, as
    ``bac_mutual_information(p1_array, prior_array, p2_array)``.
    """
    if p2 is None:
        p1, p2 = ch_or_p1.p1, ch_or_p1.p2
    else:
        p1 = ch_or_p1
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    g = np.asarray(prior_one, dtype=float)
    p_y = g * p1 + (1.0 - g) * (1.0 - p2)
    mi = binary_entropy(p_y) - g * binary_entropy(p1) - (1.0 - g) * binary_entropy(p2)
    mi = np.maximum(mi, 0.0)
    return mi if mi.ndim else float(mi)


def maximize_bac_prior(ch: BinaryChannel, tol: float = 1e-10):
    """Golden-section maximization of the channel MI over the prior (concave)."""
    return golden_max(lambda g: bac_mutual_information(ch.p1, g, ch.p2), 0.0, 1.0, tol)


def optimal_output_prob(ch: BinaryChannel) -> OutputOptimum:
    """Capacity-achieving output probability P(Y=1) and the prior implied by it.

    The closed form is always checked against a direct maximization; the
    comparison is reported, never silently resolved.
    """
    prior_search, rate_search = maximize_bac_prior(ch)
    if ch.degenerate:
        return OutputOptimum(math.nan, math.nan, 0.0, math.nan, 0.0, False)
    slope = ch.p1 + ch.p2 - 1.0
    expo = (binary_entropy(ch.p1) - binary_entropy(ch.p2)) / slope
    p_y_star = 1.0 / (1.0 + 2.0**expo)
    prior_star = (p_y_star - (1.0 - ch.p2)) / slope
    prior_star = min(1.0, max(0.0, prior_star))
    rate = bac_mutual_information(ch, prior_star)
    return OutputOptimum(
        p_y_star=p_y_star,
        prior_star=prior_star,
        rate_bits=rate,
        prior_search=prior_search,
        rate_search=rate_search,
        discrepancy=rate < rate_search - 1e-6,
    )


def _soft_log_pmfs(stats: SlotStatistics, extra_sd: float = 0.0):
    k_max = count_support(max(stats.mean_on, stats.mean_off), extra_sd)
    k = np.arange(k_max + 1)
    return _st.poisson.logpmf(k, stats.mean_off), _st.poisson.logpmf(k, stats.mean_on)


def _mi_from_log_pmfs(log_p0, log_p1, prior_one):
    """I(X;Y) in bits from per-outcome log-likelihoods; vectorized over prior."""
    g = np.asarray(prior_one, dtype=float)[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        log_mix = np.logaddexp(np.log(g) + log_p1, np.log1p(-g) + log_p0)
        t1 = np.where(log_p1 > -np.inf, np.exp(log_p1) * (log_p1 - log_mix), 0.0)
        t0 = np.where(log_p0 > -np.inf, np.exp(log_p0) * (log_p0 - log_mix), 0.0)
        # endpoints: the zero-weight symbol contributes nothing
        t1 = np.where(g > 0, t1, 0.0)
        t0 = np.where(g < 1, t0, 0.0)
    mi = (g[..., 0] * t1.sum(axis=-1) + (1.0 - g[..., 0]) * t0.sum(axis=-1)) / LOG2
    mi = np.maximum(mi, 0.0)
    return mi if mi.ndim else float(mi)


def soft_mutual_information(stats: SlotStatistics, prior_one, extra_sd: float = 0.0):
    """I(X;N) in bits, N the detected count without any hard decision.

    The count sum is truncated at ``mean + 10 sqrt(mean) + 20`` of the larger
    mean; ``extra_sd`` widens it for truncation audits.
    """
    log_p0, log_p1 = _soft_log_pmfs(stats, extra_sd)
    return _mi_from_log_pmfs(log_p0, log_p1, prior_one)


def optimize_soft_decision(stats: SlotStatistics, tol: float = 1e-10):
    """``(prior_star, rate_bits)`` maximizing the soft-decision MI."""
    if stats.mean_on == stats.mean_off:
        return 0.5, 0.0
    log_p0, log_p1 = _soft_log_pmfs(stats)
    return golden_max(lambda g: _mi_from_log_pmfs(log_p0, log_p1, g), 0.0, 1.0, tol)


def optimize_hard_decision(stats: SlotStatistics, tol: float = 1e-10) -> HardDecisionResult:
    """Best threshold and prior for the hard-decision channel.

    Every threshold in ``0..K_max`` is tried; for each the concave MI is
    maximized over the prior by golden section (all thresholds in lockstep).
    Ties go to the smaller threshold.
    """
    if stats.mean_on == stats.mean_off:
        return HardDecisionResult(0, 0.5, 0.0)
    k_max = count_support(stats.mean_on)
    thresholds = np.arange(k_max + 1)
    p1, p2 = crossover_probs(stats, thresholds)
    priors, rates = golden_max(
        lambda g: bac_mutual_information(p1, g, p2),
        np.zeros(thresholds.size),
        np.ones(thresholds.size),
        tol,
    )
    best = int(np.argmax(rates))
    return HardDecisionResult(int(thresholds[best]), float(priors[best]), float(rates[best]))


def _rate_point(budget: LinkBudget, mode: str) -> RatePoint:
    stats = slot_statistics(budget)
    if mode == "hard":
        res = optimize_hard_decision(stats)
        return RatePoint(budget.power_dbm, res.rate_bits, res.prior_one, res.threshold)
    prior, rate = optimize_soft_decision(stats)
    return RatePoint(budget.power_dbm, float(rate), float(prior), None)


def rate_curve(budget_sweep, mode: str = "hard", workers: int | None = None) -> list[RatePoint]:
    """Achievable rate at each link budget of a sweep.

    ``mode`` is ``"hard"`` (optimized threshold and prior) or ``"soft"``
    (optimized prior, no hard decision). Points are evaluated independently and
    returned in input order. A failure is re-raised as :class:`SweepError`
    carrying the point index.
    """
    if mode not in ("hard", "soft"):
        raise ValueError(f"mode must be 'hard' or 'soft', got {mode!r}")
    budgets = list(budget_sweep)
    if not budgets:
        raise ValueError("budget_sweep must be nonempty")

    def run(item):
        i, b = item
        try:
            return _rate_point(b, mode)
        except Exception as exc:
            raise SweepError(i, b.power_dbm, exc) from exc

    return ordered_map(run, enumerate(budgets), workers)
