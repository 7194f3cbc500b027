import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sst

from photonlink.mixture import PoissonMixture, em_fit, log_likelihood, mixture_pmf


def test_single_component_is_poisson():
    k = np.arange(30)
    assert np.allclose(mixture_pmf(k, PoissonMixture([1.0], [3.7])), sst.poisson.pmf(k, 3.7), rtol=1e-13)


def test_hand_value_at_zero():
    m = PoissonMixture([0.5, 0.5], [0.0, 2.0])
    assert mixture_pmf(0, m) == pytest.approx(0.5 + 0.5 * math.exp(-2), abs=1e-15)
    assert mixture_pmf(0, m) == pytest.approx(0.567668, abs=1e-6)
    assert mixture_pmf(3, m) == pytest.approx(0.5 * sst.poisson.pmf(3, 2.0), rel=1e-13)


def test_pmf_normalized():
    m = PoissonMixture([0.2, 0.3, 0.5], [0.5, 8.0, 40.0])
    k_max = math.ceil(40 + 10 * math.sqrt(40) + 20)
    assert mixture_pmf(np.arange(k_max + 1), m).sum() == pytest.approx(1.0, abs=1e-9)


@settings(max_examples=50)
@given(st.floats(0.05, 0.95), st.floats(0, 30), st.floats(0, 30), st.floats(0.05, 0.95))
def test_duplicated_components_merge(w, lam, other, split):
    merged = PoissonMixture([w, 1 - w], [lam, other])
    dup = PoissonMixture([w * split, w * (1 - split), 1 - w], [lam, lam, other])
    k = np.arange(60)
    assert np.allclose(mixture_pmf(k, dup), mixture_pmf(k, merged), rtol=1e-12, atol=1e-300)


def test_model_validation():
    with pytest.raises(ValueError):
        PoissonMixture([0.5, 0.6], [1, 2])
    with pytest.raises(ValueError):
        PoissonMixture([1.0], [-1.0])
    with pytest.raises(ValueError):
        PoissonMixture([], [])
    with pytest.raises(ValueError):
        PoissonMixture([0.5, 0.5], [1.0])


def test_sorted_relabels():
    m = PoissonMixture([0.7, 0.3], [5.0, 1.0]).sorted()
    assert m.means == (1.0, 5.0) and m.weights == (0.3, 0.7)


def test_log_likelihood_matches_direct_sum():
    m = PoissonMixture([0.3, 0.7], [1.0, 6.0])
    x = np.array([0, 1, 1, 4, 9, 6])
    direct = sum(math.log(0.3 * sst.poisson.pmf(v, 1.0) + 0.7 * sst.poisson.pmf(v, 6.0)) for v in x)
    assert log_likelihood(x, m) == pytest.approx(direct, rel=1e-13)


def test_k1_mean_is_sample_mean():
    x = np.random.default_rng(0).poisson(4.2, 5000)
    res = em_fit(x, 1)
    assert res.mixture.means[0] == pytest.approx(x.mean(), abs=1e-12)
    assert res.mixture.weights == (1.0,)


def test_recovers_two_components():
    rng = np.random.default_rng(1)
    n = 100_000
    z = rng.random(n) < 0.4
    x = np.where(z, rng.poisson(2.0, n), rng.poisson(10.0, n))
    res = em_fit(x, 2)
    m = res.mixture.sorted()
    assert m.means[0] == pytest.approx(2.0, rel=0.05)
    assert m.means[1] == pytest.approx(10.0, rel=0.05)
    assert m.weights[0] == pytest.approx(0.4, abs=0.05)
    assert res.converged
    assert np.all(np.diff(res.log_likelihoods) >= -1e-10 * np.abs(res.log_likelihoods[1:]))


def test_constant_samples_single_effective_component():
    x = np.full(500, 7)
    res = em_fit(x, 1)
    assert res.mixture.means[0] == pytest.approx(7.0, abs=1e-12)
    with pytest.warns(RuntimeWarning, match="degenerate"):
        res2 = em_fit(x, 3)
    assert res2.degenerate
    # every component with weight sits at c
    m = res2.mixture
    assert all(abs(mu - 7.0) < 1e-6 for w, mu in zip(m.weights, m.means) if w > 1e-6)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(0, 40), min_size=5, max_size=200), st.integers(1, 4))
def test_log_likelihood_monotone(samples, k):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = em_fit(samples, k, max_iter=200)
    ll = np.array(res.log_likelihoods)
    assert np.all(np.diff(ll) >= -1e-10 * np.maximum(1.0, np.abs(ll[1:])))
    assert res.log_likelihoods[-1] == pytest.approx(log_likelihood(samples, res.mixture), rel=1e-9, abs=1e-9)


def test_user_init_and_errors():
    x = np.array([0, 1, 2, 8, 9, 10])
    res = em_fit(x, 2, init=PoissonMixture([0.5, 0.5], [1.0, 9.0]))
    assert res.mixture.sorted().means[0] < 2 < res.mixture.sorted().means[1]
    with pytest.raises(ValueError):
        em_fit(x, 3, init=PoissonMixture([0.5, 0.5], [1.0, 9.0]))
    with pytest.raises(ValueError):
        em_fit([], 1)
    with pytest.raises(ValueError):
        em_fit(x, 0)
    with pytest.raises(ValueError):
        em_fit([1.5, 2], 1)


def test_max_iter_stops():
    x = np.random.default_rng(2).poisson(5, 1000)
    res = em_fit(x, 3, max_iter=2, tol=0.0)
    assert res.n_iter == 2 and not res.converged
