import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sst

from photonlink.reconstruction import (
    DualPathConfig,
    MomentTable,
    TruncationError,
    central_moments,
    cross_moments_from_samples,
    dual_path_outputs,
    dual_path_recover,
    dual_path_recover_with_errors,
    forward_moment_expansion,
    invert_moments,
    single_path_samples,
    wigner_from_moments,
)


def _discrete_table(values, probs, order):
    """Exact mixed moments of a finitely supported complex variable."""
    x = np.asarray(values, dtype=complex)
    p = np.asarray(probs, dtype=float)
    v = np.zeros((order + 1, order + 1), dtype=complex)
    for n in range(order + 1):
        for m in range(order + 1 - n):
            v[n, m] = np.sum(p * np.conj(x) ** n * x**m)
    return MomentTable(v, order)


def _random_discrete(rng, size=4, scale=1.0):
    x = scale * (rng.normal(size=size) + 1j * rng.normal(size=size))
    p = rng.random(size)
    return x, p / p.sum()


# ---- MomentTable ----------------------------------------------------------


def test_table_validation():
    with pytest.raises(ValueError):
        MomentTable(np.zeros((3, 3)), 2)
    with pytest.raises(ValueError):
        MomentTable(np.eye(2), 2)
    with pytest.raises(ValueError):
        MomentTable.from_dict({(0, 0): 1.0, (1, 0): 0.0}, 1)
    with pytest.raises(KeyError):
        MomentTable.vacuum(2)[2, 1]


def test_table_constructors_hermitian():
    for t in (MomentTable.vacuum(4), MomentTable.coherent(0.3 - 0.2j, 4), MomentTable.circular_gaussian(1.5, 4)):
        assert t.hermitian_error() < 1e-12
        assert t[0, 0] == 1
    assert MomentTable.circular_gaussian(2.0, 4)[2, 2] == 8.0
    t = MomentTable.coherent(0.5, 3)
    assert MomentTable.from_dict(t.as_dict(), 3).values.tolist() == t.values.tolist()


def test_from_samples_matches_exact_table():
    rng = np.random.default_rng(0)
    x, p = _random_discrete(rng)
    samples = rng.choice(x, size=400_000, p=p)
    est = MomentTable.from_samples(samples, 3)
    exact = _discrete_table(x, p, 3)
    assert np.max(np.abs(est.values - exact.values)) < 0.1 * np.max(np.abs(exact.values))


def test_circular_gaussian_table_matches_sampling():
    rng = np.random.default_rng(1)
    z = math.sqrt(0.5) * (rng.normal(size=400_000) + 1j * rng.normal(size=400_000))
    est = MomentTable.from_samples(z, 4)
    assert np.allclose(est.values, MomentTable.circular_gaussian(1.0, 4).values, atol=0.05)


# ---- single path ----------------------------------------------------------


def test_forward_vacuum_signal_scales_noise():
    noise = MomentTable.circular_gaussian(1.3, 5)
    out = forward_moment_expansion(MomentTable.vacuum(5), noise, 3.0)
    n = np.arange(6)
    assert np.allclose(out.values, noise.values * 3.0 ** ((n[:, None] + n[None, :]) / 2), atol=1e-14)


def test_forward_noiseless_unit_gain_identity():
    sig = MomentTable.coherent(0.4 + 0.1j, 5)
    assert np.allclose(forward_moment_expansion(sig, MomentTable.vacuum(5), 1.0).values, sig.values)


def test_forward_hand_value():
    out = forward_moment_expansion(MomentTable.coherent(0.5, 4), MomentTable.circular_gaussian(1.0, 4), 4.0)
    assert out[1, 1] == pytest.approx(5.0, abs=1e-12)


def test_forward_matches_exact_enumeration():
    rng = np.random.default_rng(2)
    a, pa = _random_discrete(rng)
    e, pe = _random_discrete(rng, scale=0.7)
    g = 2.5
    pairs_x = single_path_samples(a[:, None], e[None, :], g).ravel()
    pairs_p = (pa[:, None] * pe[None, :]).ravel()
    exact = _discrete_table(pairs_x, pairs_p, 5)
    got = forward_moment_expansion(_discrete_table(a, pa, 5), _discrete_table(e, pe, 5), g)
    assert np.allclose(got.values, exact.values, rtol=1e-12, atol=1e-12)


def test_invert_vacuum_measurement_gives_vacuum():
    cal = forward_moment_expansion(MomentTable.vacuum(6), MomentTable.circular_gaussian(0.8, 6), 2.0)
    rec = invert_moments(cal, cal, 2.0)
    assert np.allclose(rec.values, MomentTable.vacuum(6).values, atol=1e-12)


def test_invert_unit_gain_no_noise():
    sig = _discrete_table(*_random_discrete(np.random.default_rng(3)), 4)
    rec = invert_moments(sig, MomentTable.vacuum(4), 1.0)
    assert np.allclose(rec.values, sig.values, atol=1e-14)


def test_round_trip_random_tables():
    rng = np.random.default_rng(4)
    worst = 0.0
    for trial in range(100):
        order = int(rng.integers(1, 7))
        sig = _discrete_table(*_random_discrete(rng, scale=0.6), order)
        noise = _discrete_table(*_random_discrete(rng, scale=0.6), order)
        g = float(rng.uniform(0.5, 4))
        measured = forward_moment_expansion(sig, noise, g)
        cal = forward_moment_expansion(MomentTable.vacuum(order), noise, g)
        rec = invert_moments(measured, cal, g)
        worst = max(worst, float(np.max(np.abs(rec.values - sig.values))))
        assert rec.hermitian_error() < 1e-9
    assert worst <= 1e-10


def test_invert_errors():
    t = MomentTable.vacuum(3)
    with pytest.raises(ValueError):
        invert_moments(t, t, 0.0)
    with pytest.raises(ValueError):
        invert_moments(t, MomentTable.vacuum(4), 1.0)
    with pytest.raises(ValueError):
        forward_moment_expansion(t, MomentTable.vacuum(4), 1.0)


# ---- Wigner ---------------------------------------------------------------


def _disk_points(radius, n):
    x = np.linspace(-radius, radius, n)
    pts = (x[:, None] + 1j * x[None, :]).ravel()
    return pts[np.abs(pts) <= radius]


def test_wigner_vacuum_origin():
    assert wigner_from_moments(MomentTable.vacuum(8), [0j])[0] == pytest.approx(2 / math.pi, abs=1e-2)


def test_wigner_vacuum_gaussian():
    pts = _disk_points(1.5, 31)
    w = wigner_from_moments(MomentTable.vacuum(8), pts)
    assert np.max(np.abs(w - 2 / math.pi * np.exp(-2 * np.abs(pts) ** 2))) <= 1e-2


def test_wigner_coherent_displaced_gaussian():
    pts = _disk_points(1.5, 31)
    w = wigner_from_moments(MomentTable.coherent(0.5, 10), pts)
    assert np.max(np.abs(w - 2 / math.pi * np.exp(-2 * np.abs(pts - 0.5) ** 2))) <= 1e-2


@pytest.mark.parametrize("table", [MomentTable.vacuum(8), MomentTable.coherent(0.5, 10)])
def test_wigner_normalization(table):
    h = 0.1
    x = np.arange(-4, 4 + h / 2, h)
    pts = (x[:, None] + 1j * x[None, :]).ravel()
    pts = pts[np.abs(pts) <= 4]
    w = wigner_from_moments(table, pts, check_truncation=False)
    assert w.sum() * h * h == pytest.approx(1.0, abs=2e-2)


def test_wigner_truncation_check_fires():
    with pytest.raises(TruncationError):
        wigner_from_moments(MomentTable.coherent(1.5, 8), [0j, 1.5])


def test_wigner_preconditions():
    with pytest.raises(ValueError):
        wigner_from_moments(MomentTable.vacuum(6), [0j])
    with pytest.raises(ValueError):
        wigner_from_moments(MomentTable.vacuum(8), [0j], n_nodes=64)
    bad = MomentTable.vacuum(8)
    bad.values[1, 0] = 0.3j  # breaks Hermitian symmetry
    with pytest.raises(ValueError):
        wigner_from_moments(bad, [0.2 + 0.1j], check_truncation=False)


# ---- dual path ------------------------------------------------------------


def _exact_cross_moments(dists, gain, order):
    """<C1^l C2^m> by enumerating every joint outcome of (S, V, chi1, chi2)."""
    out = {}
    combos = list(itertools.product(*[list(zip(*d)) for d in dists]))
    for l in range(order + 1):
        for m in range(order + 1 - l):
            acc = 0.0
            for (s, ps), (v, pv), (x1, p1), (x2, p2) in combos:
                c1, c2 = dual_path_outputs(s, v, x1, x2, gain)
                acc += ps * pv * p1 * p2 * float(c1) ** l * float(c2) ** m
            out[(l, m)] = acc
    return out


def _raw(values, probs, order):
    return np.array([sum(p * x**n for x, p in zip(values, probs)) for n in range(order + 1)])


def test_dual_path_exact_with_analytic_cross_moments():
    order = 5
    sig = ([-0.5, 0.3, 1.2], [0.2, 0.5, 0.3])
    ref = ([-1.5, 1.5], [0.5, 0.5])
    chi1 = ([-1.0, 2.0], [2 / 3, 1 / 3])
    chi2 = ([-0.6, 0.0, 1.2], [0.5, 0.25, 0.25])
    gain = 1.7
    cross = _exact_cross_moments([sig, ref, chi1, chi2], gain, order + 1)
    cfg = DualPathConfig(gain, tuple(_raw(*ref, order)), order)
    res = dual_path_recover(cross, cfg)
    assert np.max(np.abs(res.signal_moments - _raw(*sig, order))) <= 1e-12
    assert np.max(np.abs(res.noise1_moments[2:] - _raw(*chi1, order)[2:])) <= 1e-12
    assert np.max(np.abs(res.noise2_moments[2:] - _raw(*chi2, order)[2:])) <= 1e-12


def test_dual_path_deterministic_passthrough():
    s = 0.7
    cross = {(l, m): s**l * (-s) ** m for l in range(6) for m in range(6 - l)}
    cfg = DualPathConfig(1.0, (1.0, 0.0, 0.0, 0.0, 0.0, 0.0), 5)
    res = dual_path_recover(cross, cfg)
    assert np.allclose(res.signal_moments, s ** np.arange(6), rtol=0, atol=1e-14)


def test_dual_path_gaussian_monte_carlo_small():
    rng = np.random.default_rng(6)
    n = 200_000
    c1, c2 = dual_path_outputs(
        rng.normal(1.0, 0.5, n), rng.normal(0.0, 2.0, n), rng.normal(0, 1, n), rng.normal(0, 1, n), 2.0
    )
    ref = tuple(sst.norm(0, 2).moment(j) for j in range(5))
    res = dual_path_recover_with_errors(c1, c2, DualPathConfig(2.0, ref, 4))
    truth = np.array([sst.norm(1, 0.5).moment(j) for j in range(5)])
    z = (res.signal_moments[1:] - truth[1:]) / res.signal_stderr[1:]
    assert np.all(np.abs(z) < 4)
    assert abs(res.noise1_moments[2] - 1) < 4 * res.noise1_stderr[2]


def test_dual_path_errors():
    with pytest.raises(ValueError):
        DualPathConfig(0.0, (1, 0, 1), 2)
    with pytest.raises(ValueError):
        DualPathConfig(1.0, (1, 0.1, 1), 2)
    with pytest.raises(ValueError):
        DualPathConfig(1.0, (0.5, 0, 1), 2)
    with pytest.raises(ValueError):
        DualPathConfig(1.0, (1, 0), 2)
    with pytest.raises(ValueError, match="missing"):
        dual_path_recover({(0, 0): 1.0}, DualPathConfig(1.0, (1, 0, 1), 2))


def test_cross_moments_from_samples():
    cm = cross_moments_from_samples([1.0, 2.0], [3.0, -1.0], 2)
    assert cm[(0, 0)] == 1.0
    assert cm[(1, 1)] == pytest.approx((3.0 - 2.0) / 2)
    assert cm[(0, 2)] == pytest.approx(5.0)


# ---- central moments ------------------------------------------------------


def test_central_moments_gaussian():
    raw = [sst.norm(1, 0.5).moment(j) for j in range(5)]
    assert np.allclose(central_moments(raw), [1, 0, 0.25, 0, 0.1875], atol=1e-12)


def test_central_moments_deterministic():
    s = 2.3
    c = central_moments(s ** np.arange(6))
    assert np.allclose(c[1:], 0, atol=1e-10)
    assert c[0] == 1


@given(
    st.lists(st.floats(-3, 3), min_size=2, max_size=6),
    st.floats(-2, 2),
)
def test_central_moments_translation_invariant(values, shift):
    x = np.array(values)
    raw = [np.mean(x**n) for n in range(5)]
    shifted = [np.mean((x + shift) ** n) for n in range(5)]
    a, b = central_moments(raw), central_moments(shifted)
    assert abs(a[1]) < 1e-12
    assert np.allclose(a, b, atol=1e-10 * max(1.0, np.max(np.abs(shifted))))
