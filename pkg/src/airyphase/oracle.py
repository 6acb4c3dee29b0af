"""Brute-force references for the closed forms.

Nothing here is used by the analytic fast path.  The Wigner oracle integrates
the defining Fourier integral of the gated anti-diagonal directly; the
momentum oracle convolves the Gaussian momentum wavefunction with the Airy
kernel of the cubic gate.
"""

from dataclasses import dataclass

import numpy as np

from . import _quadrature
from ._reference import airy_ai_reference
from .engine import PhaseGate
from .errors import InvalidParameterError, PurityError
from .gaussian import GaussianState, _anti_diagonal_parts
from .special import airy_ai

__all__ = [
    "QuadratureSpec",
    "QuadratureResult",
    "airy_ai_reference",
    "wigner_quadrature",
    "wigner_quadrature_result",
    "momentum_wavefunction",
    "momentum_amplitude_quadrature",
    "momentum_distribution_quadrature",
]

PURITY_TOL = 1e-8


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances of the oracle.

    ``max_subdivisions`` bounds the adaptive bisections made after the
    initial oscillation-resolving partition.  ``truncation_threshold`` is the
    relative level of the Gaussian envelope at which the integration range
    is cut.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    truncation_threshold: float = 1e-18

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise InvalidParameterError("tolerances must be positive")
        if not (0 < self.truncation_threshold < 1):
            raise InvalidParameterError("truncation_threshold must lie in (0, 1)")
        if not (isinstance(self.max_subdivisions, (int, np.integer)) and self.max_subdivisions >= 1):
            raise InvalidParameterError("max_subdivisions must be a positive integer")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    imag_residual: float
    error_estimate: float
    n_panels: int
    half_width: float


def _single_mode(state):
    if not isinstance(state, GaussianState):
        raise InvalidParameterError("state must be a GaussianState")
    if state.n_modes != 1:
        raise InvalidParameterError("the quadrature oracle handles single-mode states")


def wigner_quadrature_result(state: GaussianState, gate: PhaseGate, q, p, spec=None) -> QuadratureResult:
    """W'(q, p) = (1/(pi hbar)) int exp(2ipt/hbar) exp(i(V(q+t) - V(q-t))/hbar) <q-t|rho|q+t> dt."""
    spec = spec or QuadratureSpec()
    _single_mode(state)
    if gate.mode != 0:
        raise InvalidParameterError("gate mode must be 0 for a single-mode state")
    q = float(q)
    p = float(p)
    if not (np.isfinite(q) and np.isfinite(p)):
        raise InvalidParameterError("q and p must be finite")
    hbar = state.hbar
    mu_q, mu_p, a_mat, gain, c_cond = _anti_diagonal_parts(state)
    mu_q, mu_p = float(mu_q[0]), float(mu_p[0])
    var_q = float(a_mat[0, 0])
    cc = float(c_cond[0, 0])
    m = mu_p + (q - mu_q) * float(gain[0, 0])
    ln_amp = -0.5 * (q - mu_q) ** 2 / var_q - 0.5 * np.log(2 * np.pi * var_q)
    amp = np.exp(ln_amp)
    half = hbar * np.sqrt(np.log(1.0 / spec.truncation_threshold) / (2.0 * cc))

    g1, g2, g3, g4 = gate.effective_gamma

    def potential_diff(t):
        # V(q+t) - V(q-t), odd in t
        return 2 * t * (g1 + g2 * q + g3 * (q * q + t * t / 3) + g4 * (q**3 + q * t * t))

    def f(t):
        k = 2.0 * t / hbar
        phase = 2.0 * (p - m) * t / hbar + potential_diff(t) / hbar
        return np.exp(1j * phase - 0.5 * cc * k * k)

    def rate(t):
        vp = lambda x: g1 + x * (g2 + x * (g3 + x * g4))
        return (2.0 * (p - m) + vp(q + t) + vp(q - t)) / hbar

    edges = _quadrature.oscillation_partition(-half, half, rate)
    scale = np.pi * hbar
    # tolerances apply to W itself
    res = _quadrature.integrate(
        f,
        edges,
        spec.abs_tol * scale / max(amp, 1e-300),
        spec.rel_tol,
        spec.max_subdivisions,
    )
    value = res.value * amp / scale
    return QuadratureResult(
        float(value.real), float(abs(value.imag)), float(res.error * amp / scale), res.n_panels, float(half)
    )


def wigner_quadrature(state: GaussianState, gate: PhaseGate, q, p, spec=None) -> float:
    """Real part of the oracle integral; see :func:`wigner_quadrature_result`."""
    return wigner_quadrature_result(state, gate, q, p, spec).value


# -- momentum distributions ----------------------------------------------------


def _require_pure(state):
    _single_mode(state)
    if abs(state.purity - 1.0) > PURITY_TOL:
        raise PurityError(f"state is mixed (purity {state.purity:.12g}); no wavefunction")


def momentum_wavefunction(state: GaussianState, p):
    """Momentum-space wavefunction of a pure single-mode Gaussian.

    Position form ``(2 pi s_q)^{-1/4} exp(-c (x - x0)^2 + i p0 (x - x0)/hbar)``
    with ``c = 1/(4 s_q) - i s_qp / (2 hbar s_q)``; the global phase is fixed
    by that choice.
    """
    _require_pure(state)
    hbar = state.hbar
    x0, p0, s_q, _, s_qp = state.mode_moments(0)
    c = 1.0 / (4.0 * s_q) - 1j * s_qp / (2.0 * hbar * s_q)
    p = np.asarray(p, dtype=float)
    norm = (2 * np.pi * s_q) ** -0.25 / np.sqrt(2 * np.pi * hbar) * np.sqrt(np.pi / c)
    return norm * np.exp(-1j * x0 * p / hbar - (p - p0) ** 2 / (4.0 * c * hbar * hbar))


def momentum_amplitude_quadrature(state: GaussianState, gamma3, p, spec=None) -> complex:
    """Airy convolution ``int |beta| Ai(beta (p - p')) phi(p') dp'``,
    ``beta = (hbar^2 gamma3)^{-1/3}``, of the momentum wavefunction."""
    spec = spec or QuadratureSpec()
    _require_pure(state)
    gamma3 = float(gamma3)
    p = float(p)
    if not np.isfinite(gamma3):
        raise InvalidParameterError("gamma3 must be finite")
    if gamma3 == 0.0:
        return complex(momentum_wavefunction(state, p))
    hbar = state.hbar
    beta = 1.0 / np.cbrt(hbar * hbar * gamma3)
    x0, p0, s_q, s_p, s_qp = state.mode_moments(0)
    c = 1.0 / (4.0 * s_q) - 1j * s_qp / (2.0 * hbar * s_q)
    inv = 1.0 / (4.0 * c * hbar * hbar)
    # |phi(p')| ~ exp(-Re(inv) (p' - p0)^2)
    half = np.sqrt(np.log(1.0 / spec.truncation_threshold) / inv.real)
    lo, hi = p0 - half, p0 + half

    def f(t):
        return abs(beta) * airy_ai(beta * (p - t)) * momentum_wavefunction(state, t)

    def rate(t):
        z = beta * (p - t)
        airy_rate = abs(beta) * np.sqrt(np.maximum(-z, 0.0))
        return airy_rate + abs(x0) / hbar + 2.0 * abs(inv.imag) * np.abs(t - p0)

    edges = _quadrature.oscillation_partition(lo, hi, rate, min_panels=64)
    res = _quadrature.integrate(f, edges, spec.abs_tol, spec.rel_tol, spec.max_subdivisions)
    return res.value


def momentum_distribution_quadrature(state: GaussianState, gamma3, p, spec=None) -> float:
    """|Airy convolution of phi|^2 at momentum ``p`` after the cubic gate."""
    amp = momentum_amplitude_quadrature(state, gamma3, p, spec)
    return float(abs(amp) ** 2)
