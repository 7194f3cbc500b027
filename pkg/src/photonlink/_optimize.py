"""Golden-section maximization used for concave objectives on an interval."""

from __future__ import annotations

import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_max(f, lo=0.0, hi=1.0, tol=1e-10):
    """Maximize a unimodal ``f`` on ``[lo, hi]``.

    ``f`` may be vectorized: if it maps an array of abscissae to an array of
    values, ``lo``/``hi`` can be arrays and all problems are solved in
    lockstep. Returns ``(x_best, f_best)``; the endpoints are compared against
    the interior estimate so optima sitting on the boundary are found exactly.
    """
    a = np.asarray(lo, dtype=float).copy()
    b = np.asarray(hi, dtype=float).copy()
    width = float(np.max(b - a)) if a.size else 0.0
    n_iter = 0 if width <= tol else int(math.ceil(math.log(tol / width) / math.log(INV_PHI)))

    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc = np.asarray(f(c), dtype=float)
    fd = np.asarray(f(d), dtype=float)
    for _ in range(n_iter):
        left = fc >= fd  # maximum lies in [a, d]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        c_new = b - INV_PHI * (b - a)
        d_new = a + INV_PHI * (b - a)
        # one fresh evaluation per problem; reuse the surviving interior point
        probe = np.where(left, c_new, d_new)
        fp = np.asarray(f(probe), dtype=float)
        c_next = np.where(left, c_new, d)
        fc_next = np.where(left, fp, fd)
        d = np.where(left, c, d_new)
        fd = np.where(left, fc, fp)
        c, fc = c_next, fc_next

    x = 0.5 * (a + b)
    fx = np.asarray(f(x), dtype=float)
    lo_arr = np.broadcast_to(np.asarray(lo, dtype=float), x.shape)
    hi_arr = np.broadcast_to(np.asarray(hi, dtype=float), x.shape)
    f_lo = np.asarray(f(lo_arr), dtype=float)
    f_hi = np.asarray(f(hi_arr), dtype=float)
    x = np.where(f_lo > fx, lo_arr, x)
    fx = np.maximum(fx, f_lo)
    x = np.where(f_hi > fx, hi_arr, x)
    fx = np.maximum(fx, f_hi)
    if x.ndim == 0:
        return float(x), float(fx)
    return x, fx
