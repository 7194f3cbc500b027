"""Monte Carlo link simulation used to validate the analytic channel results.

Symbols are processed in fixed-size blocks. Block ``b`` draws from a Philox
counter-based generator keyed by ``(seed, b)``, so the outcome depends only on
the seed and never on how blocks are spread over workers. Poisson draws use
numpy's exact samplers (no normal approximation).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _st
from scipy.special import xlogy

from ._parallel import ordered_map
from .hbt_channel import HbtChannelParams, map_error_probability
from .poisson_channel import count_support, crossover_probs
from .radiometry import SlotStatistics

__all__ = [
    "SimConfig",
    "SimReport",
    "block_rng",
    "sample_counts",
    "detect",
    "analytic_error_rate",
    "run_simulation",
]

BLOCK_SIZE = 4096


@dataclass(frozen=True)
class SimConfig:
    """One simulation run.

    ``detector`` is ``"threshold"`` (decide one iff the count, or the total
    count for the HBT channel, is at least ``threshold``) or ``"map"``.
    """

    stats: SlotStatistics
    channel_kind: str = "poisson"
    hbt_params: HbtChannelParams | None = None
    prior_one: float = 0.5
    n_symbols: int = 100_000
    seed: int = 0
    detector: str = "map"
    threshold: int = 0
    block_size: int = BLOCK_SIZE

    def __post_init__(self):
        if self.channel_kind not in ("poisson", "hbt"):
            raise ValueError(f"channel_kind must be 'poisson' or 'hbt', got {self.channel_kind!r}")
        if self.detector not in ("threshold", "map"):
            raise ValueError(f"detector must be 'threshold' or 'map', got {self.detector!r}")
        if self.n_symbols < 1:
            raise ValueError("n_symbols must be >= 1")
        if not 0.0 <= self.prior_one <= 1.0:
            raise ValueError("prior_one must lie in [0, 1]")
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        if self.channel_kind == "hbt":
            params = self.hbt_params or HbtChannelParams()
            object.__setattr__(self, "hbt_params", params.with_stats(self.stats))

    def means(self, symbol: int):
        """Per-observation Poisson mean(s) after capture for ``symbol``."""
        if self.channel_kind == "hbt":
            return self.hbt_params.means_one if symbol else self.hbt_params.means_zero
        return self.stats.mean_on if symbol else self.stats.mean_off


@dataclass
class SimReport:
    n_symbols: int
    n_errors: int
    empirical_error_rate: float
    error_ci: tuple
    analytic_error_rate: float
    empirical_mi_estimate: float
    joint_counts: np.ndarray
    counts_histogram: dict = field(default_factory=dict)

    @property
    def error_sigma(self) -> float:
        """Binomial standard deviation of the error rate under the analytic value."""
        p = self.analytic_error_rate
        return math.sqrt(p * (1.0 - p) / self.n_symbols)

    def same_as(self, other: "SimReport") -> bool:
        return (
            self.n_errors == other.n_errors
            and self.empirical_mi_estimate == other.empirical_mi_estimate
            and np.array_equal(self.joint_counts, other.joint_counts)
            and self.counts_histogram == other.counts_histogram
        )


def block_rng(seed: int, block: int) -> np.random.Generator:
    """Counter-based stream for one block of symbols."""
    return np.random.Generator(np.random.Philox(key=(block << 64) | seed))


def sample_counts(symbol, config: SimConfig, rng: np.random.Generator, size=None,
                  method: str = "direct"):
    """Detected counts for ``symbol`` (a bit or an array of bits).

    ``method="direct"`` draws Poisson(p * mean); ``method="thinning"`` draws
    Poisson(mean) and keeps each photon with probability p. For the HBT
    channel three independent counts (00, 01, 10) are drawn per symbol, with
    the outcome probabilities already folded into the means.
    """
    sym = np.asarray(symbol)
    if size is not None:
        sym = np.broadcast_to(sym, size)
    if config.channel_kind == "hbt":
        means = np.where(sym[..., None] == 1, config.means(1), config.means(0))
        return rng.poisson(means)
    if method == "direct":
        means = np.where(sym == 1, config.means(1), config.means(0))
        return rng.poisson(means)
    if method == "thinning":
        s = config.stats
        raw = np.where(sym == 1, s.lambda_sig + s.lambda_bg, s.lambda_bg)
        return rng.binomial(rng.poisson(raw), s.capture_prob)
    raise ValueError(f"unknown sampling method {method!r}")


def _log_likelihoods(obs, config: SimConfig):
    obs = np.asarray(obs)
    if config.channel_kind == "hbt":
        l0 = _st.poisson.logpmf(obs, config.means(0)).sum(axis=-1)
        l1 = _st.poisson.logpmf(obs, config.means(1)).sum(axis=-1)
        return l0, l1
    return _st.poisson.logpmf(obs, config.means(0)), _st.poisson.logpmf(obs, config.means(1))


def detect(observation, config: SimConfig):
    """Decide the transmitted bit from an observation; ties decide zero."""
    obs = np.asarray(observation)
    if config.detector == "threshold":
        total = obs.sum(axis=-1) if config.channel_kind == "hbt" else obs
        out = (total >= config.threshold).astype(np.int8)
    else:
        l0, l1 = _log_likelihoods(obs, config)
        g = config.prior_one
        with np.errstate(divide="ignore"):
            s1 = np.log(g) + l1
            s0 = np.log1p(-g) + l0
        out = (s1 > s0).astype(np.int8)
    return out if out.ndim else int(out)


def _total_stats(config: SimConfig) -> SlotStatistics:
    """Slot statistics of the total HBT count (sum of three Poissons)."""
    m0 = float(np.sum(config.means(0)))
    m1 = float(np.sum(config.means(1)))
    return SlotStatistics(m1 - m0, m0, 1.0)


def analytic_error_rate(config: SimConfig) -> float:
    g = config.prior_one
    if config.detector == "threshold":
        stats = _total_stats(config) if config.channel_kind == "hbt" else config.stats
        ch = crossover_probs(stats, config.threshold)
        return g * (1.0 - ch.p1) + (1.0 - g) * (1.0 - ch.p2)
    if config.channel_kind == "hbt":
        return map_error_probability(config.hbt_params, g)
    s = config.stats
    k = np.arange(count_support(max(s.mean_on, s.mean_off)) + 1)
    decide_one = detect(k, config).astype(bool)
    p0 = _st.poisson.pmf(k, s.mean_off)
    p1 = _st.poisson.pmf(k, s.mean_on)
    return float(np.sum(np.where(decide_one, (1.0 - g) * p0, g * p1)))


def _run_block(config: SimConfig, block: int):
    start = block * config.block_size
    n = min(config.block_size, config.n_symbols - start)
    rng = block_rng(config.seed, block)
    x = (rng.random(n) < config.prior_one).astype(np.int8)
    obs = sample_counts(x, config, rng)
    y = detect(obs, config)
    joint = np.zeros((2, 2), dtype=np.int64)
    np.add.at(joint, (x, y), 1)
    key = obs.sum(axis=-1) if config.channel_kind == "hbt" else obs
    hist: dict[int, list[int]] = {}
    for sym in (0, 1):
        vals, cnt = np.unique(key[x == sym], return_counts=True)
        for v, c in zip(vals.tolist(), cnt.tolist()):
            hist.setdefault(v, [0, 0])[sym] += c
    return joint, hist


def _plug_in_mi(joint: np.ndarray) -> float:
    p = joint / joint.sum()
    px = p.sum(axis=1, keepdims=True)
    py = p.sum(axis=0, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0, xlogy(p, p) - xlogy(p, px * py), 0.0)
    return max(0.0, float(terms.sum() / math.log(2.0)))


def run_simulation(config: SimConfig, workers: int | None = None) -> SimReport:
    """Simulate ``n_symbols`` channel uses and compare with the analytic error rate.

    ``empirical_mi_estimate`` is the plug-in mutual information of the
    (sent bit, decided bit) histogram. ``counts_histogram`` maps each observed
    count (total count for the HBT channel) to ``[n_sent_zero, n_sent_one]``.
    """
    n_blocks = -(-config.n_symbols // config.block_size)
    results = ordered_map(lambda b: _run_block(config, b), range(n_blocks), workers)
    joint = np.zeros((2, 2), dtype=np.int64)
    hist: dict[int, list[int]] = {}
    for j, h in results:
        joint += j
        for v, c in h.items():
            acc = hist.setdefault(v, [0, 0])
            acc[0] += c[0]
            acc[1] += c[1]
    n_err = int(joint[0, 1] + joint[1, 0])
    ci = _st.binomtest(n_err, config.n_symbols).proportion_ci(0.95, method="wilson")
    return SimReport(
        n_symbols=config.n_symbols,
        n_errors=n_err,
        empirical_error_rate=n_err / config.n_symbols,
        error_ci=(float(ci.low), float(ci.high)),
        analytic_error_rate=analytic_error_rate(config),
        empirical_mi_estimate=_plug_in_mi(joint),
        joint_counts=joint,
        counts_histogram=dict(sorted(hist.items())),
    )
