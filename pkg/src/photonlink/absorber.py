"""Transfer-matrix model of a chain of photon absorbers on a 1-D waveguide.

A single absorber with complex coupling ``gamma`` has transfer matrix
``[[1 - 1/g, -1/g], [1/g, 1 + 1/g]]`` acting on (right-moving, left-moving)
amplitudes. Between neighbours the waves pick up ``diag(e^{i phi}, e^{-i phi})``.
For light incident from the left, ``r = -M21/M22`` and ``t = det(M)/M22``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import ELEMENTARY_CHARGE, HBAR

__all__ = [
    "AbsorberCoupling",
    "TransferMatrix",
    "CircuitParams",
    "ChainResponse",
    "ChainOptimum",
    "transfer_matrix",
    "propagation_matrix",
    "single_absorption",
    "chain_response",
    "chain_absorption",
    "optimize_chain",
    "smallest_chain_reaching",
    "gamma_from_circuit",
    "counter_efficiency",
]

MAX_CHAIN = 64


@dataclass(frozen=True)
class AbsorberCoupling:
    """Dimensionless coupling ``gamma = (Gamma - i delta) v_g / V^2``."""

    gamma: complex
    detuning: float = 0.0

    @property
    def physical(self) -> bool:
        return complex(self.gamma).real > 0


@dataclass(frozen=True)
class TransferMatrix:
    t11: complex
    t12: complex
    t21: complex
    t22: complex

    @classmethod
    def from_array(cls, m) -> "TransferMatrix":
        m = np.asarray(m, dtype=complex)
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))

    def as_array(self) -> np.ndarray:
        return np.array([[self.t11, self.t12], [self.t21, self.t22]], dtype=complex)

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix.from_array(self.as_array() @ other.as_array())

    @property
    def det(self) -> complex:
        return self.t11 * self.t22 - self.t12 * self.t21

    def reflection(self) -> complex:
        self._check_extractable()
        return -self.t21 / self.t22

    def transmission(self) -> complex:
        self._check_extractable()
        return self.det / self.t22

    def _check_extractable(self):
        if abs(self.t22) < 1e-300:
            raise ValueError("degenerate transfer matrix: |t22| ~ 0")


@dataclass(frozen=True)
class ChainResponse:
    reflectance: float
    transmittance: float
    absorption: float


@dataclass(frozen=True)
class ChainOptimum:
    n_absorbers: int
    best_gamma: float
    best_phase: float
    best_absorption: float


@dataclass(frozen=True)
class CircuitParams:
    """Josephson-absorber circuit quantities.

    Frequencies are angular (rad/s), capacitances in farads, ``decay_rate`` is
    the |1> to |g> tunnelling rate in 1/s and ``line_impedance`` in ohms.
    """

    junction_cap: float
    gate_cap: float
    decay_rate: float
    carrier_freq: float
    absorber_freq: float
    line_impedance: float

    def __post_init__(self):
        for name in ("junction_cap", "gate_cap", "decay_rate", "carrier_freq",
                     "absorber_freq", "line_impedance"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")

    @property
    def cap_ratio(self) -> float:
        """``C_g / (C_g + C_j)``."""
        return self.gate_cap / (self.gate_cap + self.junction_cap)

    @property
    def coupling_strength_sq(self) -> float:
        """``4 e^2 / (C_j hbar omega)``."""
        return 4.0 * ELEMENTARY_CHARGE**2 / (self.junction_cap * HBAR * self.carrier_freq)


def transfer_matrix(coupling: AbsorberCoupling) -> TransferMatrix:
    g = complex(coupling.gamma)
    if g == 0:
        raise ValueError("gamma must be nonzero")
    inv = 1.0 / g
    return TransferMatrix(1.0 - inv, -inv, inv, 1.0 + inv)


def propagation_matrix(phase: float) -> TransferMatrix:
    return TransferMatrix(complex(np.exp(1j * phase)), 0j, 0j, complex(np.exp(-1j * phase)))


def _check_physical(coupling: AbsorberCoupling):
    if not coupling.physical:
        raise ValueError(f"coupling needs Re(gamma) > 0, got gamma={coupling.gamma}")


def single_absorption(coupling: AbsorberCoupling) -> float:
    """Fraction of incident flux absorbed by one absorber.

    Equals ``2 gamma / (1 + gamma)^2`` for real ``gamma``.
    """
    _check_physical(coupling)
    m = transfer_matrix(coupling)
    return 1.0 - abs(m.reflection()) ** 2 - abs(m.transmission()) ** 2


def chain_response(couplings, phases) -> ChainResponse:
    """Reflectance, transmittance and absorption of a chain.

    ``phases[k]`` is the propagation phase between absorbers ``k`` and ``k+1``.
    """
    couplings = list(couplings)
    phases = list(phases)
    if couplings and len(phases) != len(couplings) - 1:
        raise ValueError("need exactly len(couplings) - 1 phases")
    if not couplings and phases:
        raise ValueError("an empty chain takes no phases")
    m = np.eye(2, dtype=complex)
    for k, c in enumerate(couplings):
        _check_physical(c)
        if k:
            m = propagation_matrix(phases[k - 1]).as_array() @ m
        m = transfer_matrix(c).as_array() @ m
    tm = TransferMatrix.from_array(m)
    refl = abs(tm.reflection()) ** 2
    trans = abs(tm.transmission()) ** 2
    return ChainResponse(refl, trans, 1.0 - refl - trans)


def chain_absorption(gamma, phase, n: int):
    """Absorption of a homogeneous chain, vectorized over ``gamma`` and ``phase``.

    ``gamma`` and ``phase`` broadcast against each other; the result has the
    broadcast shape.
    """
    g, ph = np.broadcast_arrays(np.asarray(gamma, dtype=complex), np.asarray(phase, dtype=float))
    inv = 1.0 / g
    t = np.empty(g.shape + (2, 2), dtype=complex)
    t[..., 0, 0] = 1.0 - inv
    t[..., 0, 1] = -inv
    t[..., 1, 0] = inv
    t[..., 1, 1] = 1.0 + inv
    p = np.zeros(g.shape + (2, 2), dtype=complex)
    p[..., 0, 0] = np.exp(1j * ph)
    p[..., 1, 1] = np.exp(-1j * ph)
    step = t @ p
    m = t.copy()
    for _ in range(n - 1):
        m = step @ m
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    refl = np.abs(m[..., 1, 0] / m[..., 1, 1]) ** 2
    trans = np.abs(det / m[..., 1, 1]) ** 2
    return 1.0 - refl - trans


def optimize_chain(n_absorbers: int, grid: int = 64, step_tol: float = 1e-9) -> ChainOptimum:
    """Best shared coupling and shared spacing phase for ``n_absorbers``.

    A ``grid x grid`` scan (``gamma`` log-spaced on [0.01, 10], phase on
    [0, pi)) is refined by compass-search coordinate descent in
    ``(log gamma, phase)`` until the step drops below ``step_tol``. Grid ties
    go to the smallest gamma, then the smallest phase.
    """
    if not 1 <= n_absorbers <= MAX_CHAIN:
        raise ValueError(f"n_absorbers must be in 1..{MAX_CHAIN}, got {n_absorbers}")
    log_g = np.linspace(math.log(0.01), math.log(10.0), grid)
    phases = np.linspace(0.0, math.pi, grid, endpoint=False)
    values = chain_absorption(np.exp(log_g)[:, None], phases[None, :], n_absorbers)
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    x = np.array([log_g[i], phases[j]])
    best = float(values[i, j])

    def f(v):
        return float(chain_absorption(math.exp(v[0]), v[1] % math.pi, n_absorbers))

    steps = np.array([log_g[1] - log_g[0], phases[1] - phases[0]])
    while steps.max() >= step_tol:
        moved = False
        for axis in range(2):
            if steps[axis] < step_tol:
                continue
            for sign in (1.0, -1.0):
                trial = x.copy()
                trial[axis] += sign * steps[axis]
                val = f(trial)
                if val > best:
                    x, best, moved = trial, val, True
                    break
        if not moved:
            steps *= 0.5
    # phase is irrelevant for a single absorber
    phase = float(x[1] % math.pi) if n_absorbers > 1 else 0.0
    return ChainOptimum(n_absorbers, math.exp(x[0]), phase, best)


def smallest_chain_reaching(target: float = 0.9, n_max: int = MAX_CHAIN):
    """Smallest ``N`` whose optimized absorption reaches ``target``, or None."""
    for n in range(1, n_max + 1):
        opt = optimize_chain(n)
        if opt.best_absorption >= target:
            return opt
    return None


def gamma_from_circuit(params: CircuitParams) -> AbsorberCoupling:
    """Coupling of a Josephson absorber from its circuit parameters."""
    denom = params.cap_ratio * ELEMENTARY_CHARGE * params.line_impedance * params.absorber_freq
    if denom == 0:
        raise ValueError("zero denominator in coupling expression")
    detuning = params.carrier_freq - params.absorber_freq
    gamma = params.coupling_strength_sq * HBAR * (params.decay_rate - 1j * detuning) / denom
    return AbsorberCoupling(complex(gamma), detuning)


def counter_efficiency(p_bright: float, p_dark: float) -> float:
    """Photon-counter efficiency ``P_bright (1 - P_dark)``."""
    for name, v in (("p_bright", p_bright), ("p_dark", p_dark)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {v}")
    return p_bright * (1.0 - p_dark)
