"""Finite Poisson mixtures for doubly stochastic (turbulent) reception, fit by EM."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

__all__ = ["PoissonMixture", "EMResult", "mixture_pmf", "log_likelihood", "em_fit"]

MEAN_FLOOR = 1e-9


@dataclass(frozen=True)
class PoissonMixture:
    weights: tuple
    means: tuple

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        m = tuple(float(x) for x in self.means)
        if len(w) == 0 or len(w) != len(m):
            raise ValueError("weights and means must be nonempty and of equal length")
        if any(x < 0 for x in w) or abs(sum(w) - 1.0) > 1e-12:
            raise ValueError(f"weights must be nonnegative and sum to 1, got {w}")
        if any(not x >= 0 for x in m):
            raise ValueError(f"means must be >= 0, got {m}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", m)

    @property
    def k(self) -> int:
        return len(self.weights)

    def sorted(self) -> "PoissonMixture":
        """Same model with components ordered by mean."""
        order = np.argsort(self.means, kind="stable")
        return PoissonMixture(tuple(self.weights[i] for i in order), tuple(self.means[i] for i in order))


def _component_log_pmf(counts, means):
    n = np.asarray(counts, dtype=float)[:, None]
    lam = np.asarray(means, dtype=float)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = n * np.log(lam) - lam - gammaln(n + 1.0)
    # mean-zero component: all mass at zero
    return np.where(lam == 0, np.where(n == 0, 0.0, -np.inf), out)


def mixture_pmf(count, model: PoissonMixture):
    """``sum_k p_k e^{-lambda_k} lambda_k^n / n!``; vectorized over ``count``."""
    c = np.atleast_1d(np.asarray(count))
    with np.errstate(divide="ignore"):
        logw = np.log(np.asarray(model.weights))
    p = np.exp(logsumexp(_component_log_pmf(c, model.means) + logw, axis=1))
    return p if np.ndim(count) else float(p[0])


def log_likelihood(samples, model: PoissonMixture) -> float:
    values, mult = np.unique(np.asarray(samples), return_counts=True)
    with np.errstate(divide="ignore"):
        logw = np.log(np.asarray(model.weights))
    return float(np.dot(mult, logsumexp(_component_log_pmf(values, model.means) + logw, axis=1)))


@dataclass
class EMResult:
    mixture: PoissonMixture
    log_likelihoods: list = field(default_factory=list)
    n_iter: int = 0
    converged: bool = False
    degenerate: bool = False


def _auto_init(samples: np.ndarray, k: int) -> PoissonMixture:
    means = np.quantile(samples, (np.arange(k) + 0.5) / k)
    return PoissonMixture((1.0 / k,) * k, tuple(np.maximum(means, MEAN_FLOOR)))


def em_fit(samples, k: int, init: PoissonMixture | str | None = "auto", max_iter: int = 1000,
           tol: float = 1e-8) -> EMResult:
    """Maximum-likelihood Poisson mixture by expectation-maximization.

    Iterates until the relative log-likelihood change falls below ``tol`` or
    ``max_iter`` is hit. The log-likelihood must not decrease between
    iterations (beyond rounding); a decrease raises ``RuntimeError``. Asking for
    more components than distinct sample values emits a warning and flags the
    result as degenerate.
    """
    x = np.asarray(samples)
    if x.size == 0:
        raise ValueError("samples must be nonempty")
    if k < 1:
        raise ValueError("k must be >= 1")
    if np.any(x < 0) or np.any(x != np.round(x)):
        raise ValueError("samples must be nonnegative integer counts")
    values, mult = np.unique(x.astype(np.int64), return_counts=True)
    degenerate = k > values.size
    if degenerate:
        warnings.warn(f"k={k} exceeds the {values.size} distinct sample values; fit is degenerate",
                      RuntimeWarning, stacklevel=2)

    model = _auto_init(x, k) if init in (None, "auto") else init
    if model.k != k:
        raise ValueError(f"init has {model.k} components, expected {k}")
    w = np.asarray(model.weights, dtype=float)
    lam = np.maximum(np.asarray(model.means, dtype=float), MEAN_FLOOR)
    n_total = mult.sum()
    vals = values.astype(float)

    def loglik(w, lam):
        with np.errstate(divide="ignore"):
            joint = _component_log_pmf(vals, lam) + np.log(w)
        norm = logsumexp(joint, axis=1)
        return joint, norm, float(np.dot(mult, norm))

    joint, norm, ll = loglik(w, lam)
    history = [ll]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        resp = np.exp(joint - norm[:, None]) * mult[:, None]
        nk = resp.sum(axis=0)
        w = nk / n_total
        lam = np.where(nk > 0, (resp * vals[:, None]).sum(axis=0) / np.where(nk > 0, nk, 1.0), lam)
        lam = np.maximum(lam, MEAN_FLOOR)
        joint, norm, ll_new = loglik(w, lam)
        if ll_new - ll < -1e-10 * max(1.0, abs(ll)):
            raise RuntimeError(f"EM log-likelihood decreased at iteration {it}: {ll} -> {ll_new}")
        history.append(ll_new)
        done = abs(ll_new - ll) <= tol * max(1.0, abs(ll))
        ll = ll_new
        if done:
            converged = True
            break

    w = w / w.sum()
    mixture = PoissonMixture(tuple(w), tuple(lam))
    return EMResult(mixture, history, it, converged, degenerate)
