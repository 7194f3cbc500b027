"""Moment-based reconstruction of a signal seen through noisy amplification.

Two schemes are covered.

Single path: the measured variable is ``S = sqrt(G) (a + e)`` where ``e`` is
the amplifier noise term (``e = h^dagger`` in operator language). Mixed
moments ``<(S*)^n S^m>`` expand binomially into signal and noise moments; the
noise moments come from a vacuum calibration run, after which the signal
moments are recovered order by order. A Wigner function can be synthesized
from the recovered moments.

Dual path: ``C1 = G (S + V + chi1)`` and ``C2 = G (-S + V + chi2)`` with a known
reference ``V`` of vanishing odd moments and zero-mean noises. The raw moments
of ``S``, ``chi1`` and ``chi2`` are recovered recursively from the joint
moments ``<C1^l C2^m>``.

All variables are treated as commuting random variables, so every identity
here can be checked by sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb, factorial

import numpy as np

__all__ = [
    "MomentTable",
    "DualPathConfig",
    "DualPathResult",
    "TruncationError",
    "forward_moment_expansion",
    "invert_moments",
    "single_path_samples",
    "wigner_from_moments",
    "dual_path_outputs",
    "cross_moments_from_samples",
    "dual_path_recover",
    "dual_path_recover_with_errors",
    "central_moments",
]

MIN_WIGNER_ORDER = 8


class TruncationError(RuntimeError):
    pass


@dataclass
class MomentTable:
    """Mixed moments ``<(x*)^n x^m>`` for ``n + m <= max_order``.

    ``values[n, m]`` holds the moment; cells with ``n + m > max_order`` are
    unused and kept at zero.
    """

    values: np.ndarray
    max_order: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        k = self.max_order
        if self.values.shape != (k + 1, k + 1):
            raise ValueError(f"values must have shape {(k + 1, k + 1)}, got {self.values.shape}")
        if abs(self.values[0, 0] - 1.0) > 1e-9:
            raise ValueError("entry (0, 0) must be 1")

    def __getitem__(self, nm):
        n, m = nm
        if n < 0 or m < 0 or n + m > self.max_order:
            raise KeyError(f"moment {nm} outside order {self.max_order}")
        return self.values[n, m]

    @staticmethod
    def _empty(order):
        v = np.zeros((order + 1, order + 1), dtype=complex)
        v[0, 0] = 1.0
        return v

    @classmethod
    def from_dict(cls, entries: dict, max_order: int) -> "MomentTable":
        v = cls._empty(max_order)
        for n in range(max_order + 1):
            for m in range(max_order + 1 - n):
                if (n, m) not in entries:
                    raise ValueError(f"incomplete table: missing entry {(n, m)}")
                v[n, m] = entries[(n, m)]
        return cls(v, max_order)

    def as_dict(self) -> dict:
        k = self.max_order
        return {(n, m): complex(self.values[n, m]) for n in range(k + 1) for m in range(k + 1 - n)}

    @classmethod
    def vacuum(cls, order: int) -> "MomentTable":
        return cls(cls._empty(order), order)

    @classmethod
    def coherent(cls, amplitude: complex, order: int) -> "MomentTable":
        """Moments of a deterministic amplitude: ``conj(b)^n b^m``."""
        b = complex(amplitude)
        v = cls._empty(order)
        for n in range(order + 1):
            for m in range(order + 1 - n):
                v[n, m] = b.conjugate() ** n * b**m
        return cls(v, order)

    @classmethod
    def circular_gaussian(cls, variance: float, order: int) -> "MomentTable":
        """Circular complex Gaussian with ``<|x|^2> = variance``: ``delta_nm n! var^n``."""
        v = cls._empty(order)
        for n in range(order // 2 + 1):
            v[n, n] = factorial(n) * variance**n
        return cls(v, order)

    @classmethod
    def from_samples(cls, x, order: int) -> "MomentTable":
        x = np.asarray(x, dtype=complex)
        v = cls._empty(order)
        xc = np.conj(x)
        left = np.ones_like(x)
        for n in range(order + 1):
            right = left.copy()
            for m in range(order + 1 - n):
                if n or m:
                    v[n, m] = right.mean()
                right = right * x
            left = left * xc
        return cls(v, order)

    def truncated(self, order: int) -> "MomentTable":
        if order > self.max_order:
            raise ValueError("cannot extend a table")
        v = self.values[: order + 1, : order + 1].copy()
        for n in range(order + 1):
            v[n, order + 1 - n:] = 0.0
        return MomentTable(v, order)

    def hermitian_error(self) -> float:
        return float(np.max(np.abs(self.values - self.values.T.conj())))


def _scale(order: int, gain: float):
    n = np.arange(order + 1)
    return gain ** ((n[:, None] + n[None, :]) / 2.0)


def _check_same_order(a: MomentTable, b: MomentTable):
    if a.max_order != b.max_order:
        raise ValueError(f"inconsistent max_order: {a.max_order} vs {b.max_order}")


def forward_moment_expansion(signal: MomentTable, noise: MomentTable, gain: float) -> MomentTable:
    """Moments of ``S = sqrt(G) (a + e)`` for independent ``a`` and ``e``.

    ``noise`` holds ``<(e*)^p e^q>``, i.e. ``<h^p (h*)^q>`` for ``e = h*``.
    """
    _check_same_order(signal, noise)
    k = signal.max_order
    out = np.zeros_like(signal.values)
    a, e = signal.values, noise.values
    for n in range(k + 1):
        for m in range(k + 1 - n):
            acc = 0j
            for i in range(n + 1):
                for j in range(m + 1):
                    acc += comb(n, i) * comb(m, j) * a[i, j] * e[n - i, m - j]
            out[n, m] = acc
    return MomentTable(out * _scale(k, gain), k)


def invert_moments(measured: MomentTable, vacuum_calibration: MomentTable, gain: float) -> MomentTable:
    """Recover signal moments from measured and vacuum-calibration tables.

    The vacuum run gives the noise moments directly (scaled by ``G^{(n+m)/2}``).
    Signal moments are then solved in increasing total order ``n + m``: in the
    expansion of entry ``(n, m)`` the unknown ``(n, m)`` signal moment carries a
    unit noise factor and every other term is already known.
    """
    if not gain > 0:
        raise ValueError(f"gain must be > 0, got {gain}")
    _check_same_order(measured, vacuum_calibration)
    k = measured.max_order
    scale = _scale(k, gain)
    noise = vacuum_calibration.values / scale
    target = measured.values / scale
    a = np.zeros_like(target)
    a[0, 0] = 1.0
    for total in range(1, k + 1):
        for n in range(total + 1):
            m = total - n
            acc = target[n, m]
            for i in range(n + 1):
                for j in range(m + 1):
                    if i == n and j == m:
                        continue
                    acc -= comb(n, i) * comb(m, j) * a[i, j] * noise[n - i, m - j]
            a[n, m] = acc
    return MomentTable(a, k)


def single_path_samples(signal, noise, gain: float):
    """Measured samples ``sqrt(G) (a + e)`` for paired signal/noise samples."""
    return math.sqrt(gain) * (np.asarray(signal, dtype=complex) + np.asarray(noise, dtype=complex))


def _normal_char(moments: MomentTable, lam: np.ndarray) -> np.ndarray:
    """Normally ordered characteristic function sum_{n,m} c_nm lam^n (-lam*)^m / n! m!."""
    k = moments.max_order
    out = np.zeros_like(lam)
    lam_pow = [np.ones_like(lam)]
    neg_conj_pow = [np.ones_like(lam)]
    for _ in range(k):
        lam_pow.append(lam_pow[-1] * lam)
        neg_conj_pow.append(neg_conj_pow[-1] * (-np.conj(lam)))
    for n in range(k + 1):
        for m in range(k + 1 - n):
            c = moments.values[n, m]
            if c != 0:
                out += c * lam_pow[n] * neg_conj_pow[m] / (factorial(n) * factorial(m))
    return out


def _wigner_raw(moments: MomentTable, alpha: np.ndarray, radius: float, n_nodes: int, chunk: int = 512):
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    x = x * radius
    w = w * radius
    lam = (x[:, None] + 1j * x[None, :]).ravel()
    weights = np.outer(w, w).ravel() * np.exp(-0.5 * np.abs(lam) ** 2) * _normal_char(moments, lam)
    flat = alpha.ravel()
    out = np.empty(flat.shape, dtype=complex)
    for s in range(0, flat.size, chunk):
        a = flat[s:s + chunk]
        # exp(alpha lam* - alpha* lam) = exp(2i Im(alpha lam*))
        phase = np.exp(2j * np.imag(a[None, :] * np.conj(lam)[:, None]))
        out[s:s + chunk] = weights @ phase
    return (out / math.pi**2).reshape(alpha.shape)


def wigner_from_moments(moments: MomentTable, points, radius: float = 6.0, n_nodes: int = 128,
                        check_truncation: bool = True):
    """Wigner function at the complex phase-space ``points``.

    The characteristic-function integral is done with a tensor Gauss-Legendre
    rule on ``[-radius, radius]^2``. The result must be real to 1e-6. With
    ``check_truncation`` the value is recomputed from the table cut two orders
    lower and a change above 1e-3 anywhere raises :class:`TruncationError`.
    """
    if moments.max_order < MIN_WIGNER_ORDER:
        raise ValueError(f"need moments to order >= {MIN_WIGNER_ORDER}, got {moments.max_order}")
    if n_nodes < 120:
        raise ValueError("use at least 120 nodes per axis")
    alpha = np.asarray(points, dtype=complex)
    w = _wigner_raw(moments, alpha, radius, n_nodes)
    resid = float(np.max(np.abs(w.imag))) if w.size else 0.0
    if resid > 1e-6:
        raise ValueError(f"Wigner function has imaginary residue {resid:.3g}; table not Hermitian?")
    if check_truncation:
        lower = _wigner_raw(moments.truncated(moments.max_order - 2), alpha, radius, n_nodes)
        change = float(np.max(np.abs(lower.real - w.real))) if w.size else 0.0
        if change > 1e-3:
            raise TruncationError(f"moment truncation changes W by {change:.3g}")
    return w.real


@dataclass(frozen=True)
class DualPathConfig:
    """Gain, reference moments ``<V^j>`` (j = 0..) and recovery order."""

    gain: float
    reference_moments: tuple
    max_order: int

    def __post_init__(self):
        ref = tuple(float(v) for v in self.reference_moments)
        object.__setattr__(self, "reference_moments", ref)
        if not self.gain > 0:
            raise ValueError(f"gain must be > 0, got {self.gain}")
        if len(ref) < self.max_order + 1:
            raise ValueError(f"need reference moments up to order {self.max_order}")
        if abs(ref[0] - 1.0) > 1e-12:
            raise ValueError("<V^0> must be 1")
        if any(ref[j] != 0.0 for j in range(1, len(ref), 2)):
            raise ValueError("odd reference moments must vanish")


@dataclass(frozen=True)
class DualPathResult:
    signal_moments: np.ndarray
    noise1_moments: np.ndarray
    noise2_moments: np.ndarray
    signal_stderr: np.ndarray | None = None
    noise1_stderr: np.ndarray | None = None
    noise2_stderr: np.ndarray | None = None


def dual_path_outputs(signal, reference, noise1, noise2, gain: float):
    """``(C1, C2)`` for sampled ``S``, ``V``, ``chi1``, ``chi2``."""
    s, v = np.asarray(signal, float), np.asarray(reference, float)
    return gain * (s + v + np.asarray(noise1, float)), gain * (-s + v + np.asarray(noise2, float))


def cross_moments_from_samples(c1, c2, order: int) -> dict:
    """Sample estimates of ``<C1^l C2^m>`` for ``l + m <= order``."""
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    out = {}
    p1 = np.ones_like(c1)
    for l in range(order + 1):
        p2 = p1.copy()
        for m in range(order + 1 - l):
            out[(l, m)] = float(p2.mean())
            p2 = p2 * c2
        p1 = p1 * c1
    return out


def _trinomials(k: int):
    for a in range(k + 1):
        for b in range(k + 1 - a):
            c = k - a - b
            yield a, b, c, factorial(k) // (factorial(a) * factorial(b) * factorial(c))


def dual_path_recover(cross_moments: dict, config: DualPathConfig) -> DualPathResult:
    """Recover raw moments of the signal and both noises up to ``max_order``.

    At order ``n`` the signal moment comes from ``<C1^{n-1} C2>``, whose
    trinomial expansion contains ``-<S^n>`` as its only order-``n`` unknown.
    ``<chi1^n>`` and ``<chi2^n>`` follow from ``<C1^n>`` and ``<C2^n>``. Noise
    means are taken as zero.
    """
    k = config.max_order
    g = config.gain
    v = config.reference_moments

    def cm(l, m):
        try:
            return cross_moments[(l, m)] / g ** (l + m)
        except KeyError:
            raise ValueError(f"missing cross-moment <C1^{l} C2^{m}>") from None

    s = [1.0] + [0.0] * k
    x1 = [1.0] + [0.0] * k
    x2 = [1.0] + [0.0] * k
    for n in range(1, k + 1):
        # E[(S+V+chi1)^(n-1) (-S + V + chi2)], chi2 mean zero
        rest = 0.0
        for a, b, c, w in _trinomials(n - 1):
            term = s[a] * v[b + 1] * x1[c]
            if (a, b, c) != (n - 1, 0, 0):
                term -= s[a + 1] * v[b] * x1[c]
            rest += w * term
        s[n] = rest - cm(n - 1, 1)
        if n == 1:
            continue
        r1 = r2 = 0.0
        for a, b, c, w in _trinomials(n):
            if c == n:
                continue
            r1 += w * s[a] * v[b] * x1[c]
            r2 += w * (-1) ** a * s[a] * v[b] * x2[c]
        x1[n] = cm(n, 0) - r1
        x2[n] = cm(0, n) - r2
    return DualPathResult(np.array(s), np.array(x1), np.array(x2))


def dual_path_recover_with_errors(c1, c2, config: DualPathConfig, n_batches: int = 100) -> DualPathResult:
    """Recovery from samples with batch-means standard errors.

    The estimate uses all samples; its standard error is the spread of the
    per-batch recoveries divided by ``sqrt(n_batches)``.
    """
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    k = config.max_order
    full = dual_path_recover(cross_moments_from_samples(c1, c2, k), config)
    batches = [
        dual_path_recover(cross_moments_from_samples(b1, b2, k), config)
        for b1, b2 in zip(np.array_split(c1, n_batches), np.array_split(c2, n_batches))
    ]

    def se(attr):
        arr = np.array([getattr(b, attr) for b in batches])
        return arr.std(axis=0, ddof=1) / math.sqrt(n_batches)

    return DualPathResult(
        full.signal_moments, full.noise1_moments, full.noise2_moments,
        se("signal_moments"), se("noise1_moments"), se("noise2_moments"),
    )


def central_moments(raw):
    """Central moments from raw moments ``raw[0..n]`` (``raw[0] = 1``)."""
    raw = np.asarray(raw, dtype=float)
    mu = raw[1] if raw.size > 1 else 0.0
    out = np.empty_like(raw)
    for n in range(raw.size):
        out[n] = sum(comb(n, k) * (-1) ** (n - k) * raw[k] * mu ** (n - k) for k in range(n + 1))
    return out
