"""Closed-form Wigner functions after polynomial phase gates.

A gate ``exp(-i V(q) / hbar)`` with ``V(q) = sum_n gamma_n q^n / n`` (n <= 4)
turns the Wigner function into an Airy transform along the target momentum:

    W'(x) = int K(S - tau) W(x | p_target = tau) d tau,
    S = p + V'(q),   K(u) = Ai(u / a) / |a|,   a = (hbar / 2) alpha,
    alpha^3 = V'''(q) / hbar = (2 gamma_3 + 6 gamma_4 q) / hbar.

For a Gaussian input, the integrand is Gaussian in ``tau`` once everything
except the target momentum is fixed, and the transform has the closed form
evaluated by :func:`_log_airy_gauss`.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .errors import InvalidParameterError, InvalidStateError
from .evaluator import WignerEvaluator
from .gaussian import (
    EXTENT_SIGMAS,
    GaussianState,
    conditional,
    interleave,
    linear_phase_gate,
    tmss,
    wigner_gaussian,
)
from .special import LogValue, _log_airy_parts, _log_airy_split, log_airy_ai

ALPHA_EPS = 1e-9
# ln of the bound max|Ai(x)| < 0.54 on the real line
_LN_AI_BOUND = np.log(0.54)
# rows and tails below exp(_LN_CUTOFF) are treated as zero by p_window
_LN_CUTOFF = -42.0
_GAUSS_SIGMAS = 12.0


@dataclass(frozen=True)
class PhaseGate:
    """Polynomial phase gate on one mode.

    Args:
        gamma: (gamma_1, gamma_2, gamma_3, gamma_4) of ``V(q) = sum gamma_n q^n / n``.
        mode: target mode index.
        repetitions: number of identical applications ``k``; since the gates
            commute this is the single gate with ``gamma -> k gamma``.
    """

    gamma: Tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    mode: int = 0
    repetitions: int = 1

    def __post_init__(self):
        g = tuple(float(x) for x in self.gamma)
        if len(g) != 4:
            raise InvalidParameterError("gamma must have four entries (gamma_1..gamma_4)")
        if not all(np.isfinite(g)):
            raise InvalidParameterError("gamma coefficients must be finite")
        object.__setattr__(self, "gamma", g)
        if not (isinstance(self.repetitions, (int, np.integer)) and self.repetitions >= 1):
            raise InvalidParameterError("repetitions must be a positive integer")
        if not (isinstance(self.mode, (int, np.integer)) and self.mode >= 0):
            raise InvalidParameterError("mode must be a nonnegative integer")

    @classmethod
    def cubic(cls, gamma3, mode=0):
        return cls((0.0, 0.0, gamma3, 0.0), mode)

    @classmethod
    def quartic(cls, gamma4, mode=0):
        return cls((0.0, 0.0, 0.0, gamma4), mode)

    @property
    def effective_gamma(self):
        k = self.repetitions
        return tuple(k * g for g in self.gamma)

    @property
    def is_linear(self):
        g = self.effective_gamma
        return g[2] == 0.0 and g[3] == 0.0

    def potential(self, q):
        g1, g2, g3, g4 = self.effective_gamma
        q = np.asarray(q, dtype=float)
        return q * (g1 + q * (g2 / 2 + q * (g3 / 3 + q * g4 / 4)))


@dataclass(frozen=True)
class AirySpec:
    """Momentum map and Airy scale of a gate.

    ``s_poly`` holds (gamma_1, gamma_2, gamma_3, gamma_4) so that
    ``S(q, p) = p + gamma_1 + gamma_2 q + gamma_3 q^2 + gamma_4 q^3``.
    """

    s_poly: Tuple[float, float, float, float]
    hbar: float = 1.0

    @classmethod
    def from_gate(cls, gate: PhaseGate, hbar: float = 1.0):
        return cls(gate.effective_gamma, hbar)

    def force(self, q):
        """V'(q), the momentum kick."""
        g1, g2, g3, g4 = self.s_poly
        q = np.asarray(q, dtype=float)
        return g1 + q * (g2 + q * (g3 + q * g4))

    def s_map(self, q, p):
        return np.asarray(p, dtype=float) + self.force(q)

    def alpha_cubed_fn(self, q):
        _, _, g3, g4 = self.s_poly
        return (2 * g3 + 6 * g4 * np.asarray(q, dtype=float)) / self.hbar

    def alpha(self, q):
        return np.cbrt(self.alpha_cubed_fn(q))

    def airy_scale(self, q):
        """a = (hbar/2) alpha, the width of the kernel Ai(u/a)/|a|."""
        return 0.5 * self.hbar * self.alpha(q)

    def degenerate(self, q):
        return np.abs(self.alpha_cubed_fn(q) * self.hbar) < ALPHA_EPS


# -- closed-form Airy transform of a Gaussian ---------------------------------


def _gaussian_scale(var):
    """k = 1/sqrt(2 v), the scale turning N(tau; m, v) into exp(-(k tau + s)^2)."""
    return 1.0 / np.sqrt(2.0 * var)


def _log_airy_gauss(shift, mean, var, a):
    """Sign and ln of the Airy transform of N(.; mean, var) at ``shift``:

        int Ai((shift - tau) / a) / |a| N(tau; mean, var) d tau
          = k phi_{k a}(k shift + s),  s = -k mean,
        phi_alpha(y) = exp((y + 1/(24 alpha^3)) / (4 alpha^3)) Ai(y/alpha + 1/(16 alpha^4)) / |alpha|.

    The exponent of phi and the decay of Ai nearly cancel for large
    arguments, so the pair is combined analytically.
    """
    k = _gaussian_scale(var)
    ak = k * a
    x = (k * shift - k * mean) / ak
    eps = 1.0 / (4.0 * ak * ak)
    z = x + eps * eps
    sign, ln_ai, expo = _combine_exponent(x, eps, z)
    ln = np.log(k) - np.log(np.abs(ak)) + expo + ln_ai
    return sign, ln


def _combine_exponent(x, eps, z):
    """Split exp(eps x + 2 eps^3/3) Ai(z) into (sign, ln of a bounded factor,
    remaining exponent) without cancellation."""
    x, eps, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, eps, z)))
    lin = eps * x + 2.0 / 3.0 * eps**3
    # ln_ai is ln|Ai(z)| + decay(z); the decay is cancelled against lin below
    sign, ln_ai = _log_airy_split(z.ravel())
    sign, ln_ai = sign.reshape(z.shape), ln_ai.reshape(z.shape)
    expo = lin.copy()
    pos = z > 0
    if pos.any():
        zp = z[pos]
        decay = 2.0 / 3.0 * zp * np.sqrt(zp)
        a_ = lin[pos]
        xp = x[pos]
        ep = eps[pos]
        diff = a_ - decay
        # A - B = (A^2 - B^2)/(A + B) = -x^2 (3 eps^2 + 4 x) / (9 (A + B))
        big = a_ > 0
        diff[big] = -(xp[big] ** 2) * (3 * ep[big] ** 2 + 4 * xp[big]) / (9.0 * (a_[big] + decay[big]))
        expo[pos] = diff
    return sign, ln_ai, expo


def _envelope(x, eps):
    """Concave upper bound of the exponent in the transform, max 0 at x = 0."""
    z = x + eps * eps
    return eps * x + 2.0 / 3.0 * eps**3 - 2.0 / 3.0 * np.maximum(z, 0.0) ** 1.5


def _envelope_roots(eps, level):
    """X_lo < 0 < X_hi with envelope(X) = -level (level > 0)."""
    # left branch is linear once z < 0
    x_lo = (-level - 2.0 / 3.0 * eps**3) / eps
    if x_lo > -eps * eps:
        lo, hi = -eps * eps, 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if _envelope(mid, eps) < -level:
                lo = mid
            else:
                hi = mid
        x_lo = lo
    lo, hi = 0.0, 1.0
    while _envelope(hi, eps) > -level:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _envelope(mid, eps) > -level:
            lo = mid
        else:
            hi = mid
    return x_lo, hi


def airy_gauss_window(mean, var, a, ln_weight):
    """Interval of ``shift`` outside which ``weight * transform`` < exp(cutoff)."""
    k = _gaussian_scale(var)
    ak = k * a
    eps = 1.0 / (4.0 * ak * ak)
    ln_peak = ln_weight - np.log(abs(a)) + _LN_AI_BOUND
    level = ln_peak - _LN_CUTOFF
    if level <= 0:
        return None
    x_lo, x_hi = _envelope_roots(eps, level)
    ends = sorted((mean + a * x_lo, mean + a * x_hi))
    return ends[0], ends[1]


def _log_normal_1d(x, mean, var):
    return -0.5 * (x - mean) ** 2 / var - 0.5 * np.log(2 * np.pi * var)


# -- evaluators ------------------------------------------------------------------


def apply_phase_gate(state: GaussianState, gate: PhaseGate) -> WignerEvaluator:
    """Wigner function of a Gaussian state after ``gate``.

    Linear gates (gamma_3 = gamma_4 = 0) return the Gaussian evaluator of the
    sheared state.  Otherwise the input Gaussian is split into the marginal of
    every variable except the target momentum and the conditional normal of
    that momentum, and only the latter is Airy-transformed.  Points where
    ``|alpha^3 hbar| < ALPHA_EPS`` use the alpha -> 0 limit, the Gaussian with
    relabelled momentum.
    """
    if not isinstance(state, GaussianState):
        raise InvalidStateError("state must be a GaussianState")
    if gate.mode >= state.n_modes:
        raise InvalidParameterError(f"gate mode {gate.mode} out of range for {state.n_modes} modes")
    g1, g2, g3, g4 = gate.effective_gamma
    if gate.is_linear:
        out = state
        if g1 != 0.0:
            out = linear_phase_gate(out, gate.mode, 1, g1)
        if g2 != 0.0:
            out = linear_phase_gate(out, gate.mode, 2, g2)
        ev = wigner_gaussian(out)
        return WignerEvaluator(ev.n_modes, _describe(gate, state), ev.log_fn, ev.hbar, ev.p_window, ev.extent,
                               _key(gate, state))

    spec = AirySpec.from_gate(gate, state.hbar)
    n = state.n_modes
    mode = gate.mode
    target = 2 * mode + 1
    cond = conditional(state, target)

    def split(q, p):
        if n == 1:
            x = np.stack([q, p], axis=-1)
            qt = q
            pt = p
        else:
            x = interleave(q, p)
            qt = q[..., mode]
            pt = p[..., mode]
        x_rest = x[..., cond.rest]
        return qt, pt, cond.log_marginal(x_rest), cond.conditional_mean(x_rest)

    def log_fn(q, p):
        qt, pt, ln_g, m = split(q, p)
        qt, pt, ln_g, m = np.broadcast_arrays(qt, pt, ln_g, m)
        shape = qt.shape
        qt, pt, ln_g, m = (np.ravel(v) for v in (qt, pt, ln_g, m))
        s = spec.s_map(qt, pt)
        deg = spec.degenerate(qt)
        sign = np.ones(qt.shape, dtype=int)
        ln = np.empty(qt.shape)
        if deg.any():
            ln[deg] = ln_g[deg] + _log_normal_1d(s[deg], m[deg], cond.var)
        live = ~deg
        if live.any():
            a = spec.airy_scale(qt[live])
            s_w, ln_w = _log_airy_gauss(s[live], m[live], cond.var, a)
            sign[live] = s_w
            ln[live] = ln_g[live] + ln_w
        sign = np.where(np.isneginf(ln), 0, sign)
        return sign.reshape(shape), ln.reshape(shape)

    window = None
    extent = None
    if n == 1:
        sd = np.sqrt(cond.var)
        x0, p0, s_q, s_p, _ = state.mode_moments(0)
        q_lo = x0 - EXTENT_SIGMAS * np.sqrt(s_q)
        q_hi = x0 + EXTENT_SIGMAS * np.sqrt(s_q)
        sweep = float(np.max(np.abs(spec.force(np.linspace(q_lo, q_hi, 1001)))))
        half_p = EXTENT_SIGMAS * np.sqrt(s_p) + sweep
        extent = (q_lo, q_hi, p0 - half_p, p0 + half_p)

        def window(q):
            q = float(q)
            ln_g = float(cond.log_marginal(np.array([q])))
            m = float(cond.conditional_mean(np.array([q])))
            kick = float(spec.force(q))
            if spec.degenerate(q):
                if ln_g < _LN_CUTOFF:
                    return None
                return (m - kick - _GAUSS_SIGMAS * sd, m - kick + _GAUSS_SIGMAS * sd)
            win = airy_gauss_window(m, cond.var, float(spec.airy_scale(q)), ln_g)
            if win is None:
                return None
            return (win[0] - kick, win[1] - kick)

    return WignerEvaluator(n, _describe(gate, state), log_fn, state.hbar, window, extent, _key(gate, state))


def _key(gate, state):
    return ("phase_gate", gate.effective_gamma, gate.mode, state.mean.tobytes(), state.cov.tobytes())


def _describe(gate, state):
    g = ", ".join(repr(x) for x in gate.effective_gamma)
    return f"phase gate gamma=({g}) on mode {gate.mode} of a {state.n_modes}-mode Gaussian"


def eval_log_at(evaluator: WignerEvaluator, q, p) -> LogValue:
    return evaluator.eval_log(q, p)


def tdw_gate(state: GaussianState, mode: int = 0) -> WignerEvaluator:
    """Tilted double well ``V(q) = 15 q - 7 q^2/2 + 0.2 q^4/4``.

    The constant -18 in the potential is a global phase and drops out.
    """
    return apply_phase_gate(state, tdw_phase_gate(mode))


def tdw_phase_gate(mode: int = 0) -> PhaseGate:
    return PhaseGate((15.0, -7.0, 0.0, 0.2), mode)


def ideal_momentum_gate_wigner(gate: PhaseGate, hbar: float = 1.0) -> WignerEvaluator:
    """Idealised result of the gate on a zero-momentum eigenstate.

    ``W(q, p) = Ai(S(p); alpha) = 2/(hbar |alpha|) Ai(2 S / (hbar alpha))``.
    The input is not normalisable and neither is the output.  On points where
    alpha vanishes (the line q = 0 of a pure quartic gate) the function
    collapses to a delta along ``S = 0``, which is reported as zero.
    """
    if gate.is_linear:
        raise InvalidParameterError("ideal momentum result needs gamma_3 or gamma_4 nonzero")
    spec = AirySpec.from_gate(gate, hbar)

    def log_fn(q, p):
        q, p = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(p, dtype=float))
        shape = q.shape
        q = q.ravel()
        p = p.ravel()
        deg = spec.degenerate(q)
        sign = np.zeros(q.shape, dtype=int)
        ln = np.full(q.shape, -np.inf)
        live = ~deg
        if live.any():
            a = spec.airy_scale(q[live])
            s_ai, ln_ai = _log_airy_parts(spec.s_map(q[live], p[live]) / a)
            sign[live] = s_ai
            ln[live] = ln_ai - np.log(np.abs(a))
        return sign.reshape(shape), ln.reshape(shape)

    g = ", ".join(repr(x) for x in gate.effective_gamma)
    return WignerEvaluator(1, f"ideal momentum eigenstate after gamma=({g})", log_fn, hbar)


def scaled_airy(x, alpha, hbar=1.0):
    """Ai(x; alpha) = 2/(hbar |alpha|) Ai(2 x / (hbar alpha)) as a LogValue."""
    alpha = float(alpha)
    if alpha == 0.0:
        raise InvalidParameterError("alpha must be nonzero")
    v = log_airy_ai(2.0 * np.asarray(x, dtype=float) / (hbar * alpha))
    return LogValue(v.sign, v.ln_mag + np.log(2.0 / (hbar * abs(alpha))))


@dataclass(frozen=True)
class DeltaConstraint:
    """Support of the delta factor: ``p_k = value``."""

    variable: str
    value: float


@dataclass(frozen=True)
class DecomposedGateValue:
    airy_factor: float
    log_airy_factor: LogValue
    constraint: DeltaConstraint


def decomposed_gate_wigner(gamma3, gamma4, q_j, q_k, p_j, hbar=1.0) -> DecomposedGateValue:
    """Two-mode decomposed gate on a pair of zero-mean momentum eigenstates.

    The Wigner function is ``Ai(p_j - gamma3 Q^2 + gamma4 Q^3 + 2 q_k; alpha(Q))``
    times ``delta(p_k + 2 (Q - p_j))`` with ``Q = q_j + 2 q_k`` and
    ``alpha^3(Q) = (2 gamma3 + 6 gamma4 Q) / hbar``.  The delta is returned as
    its constraint surface.
    """
    vals = [float(v) for v in (gamma3, gamma4, q_j, q_k, p_j)]
    if not all(np.isfinite(vals)):
        raise InvalidParameterError("inputs must be finite")
    gamma3, gamma4, q_j, q_k, p_j = vals
    big_q = q_j + 2.0 * q_k
    arg = p_j - gamma3 * big_q**2 + gamma4 * big_q**3 + 2.0 * q_k
    alpha = np.cbrt((2.0 * gamma3 + 6.0 * gamma4 * big_q) / hbar)
    constraint = DeltaConstraint("p_k", -2.0 * (big_q - p_j))
    if abs(alpha**3 * hbar) < ALPHA_EPS:
        lv = LogValue(0, -np.inf)
    else:
        lv = scaled_airy(arg, alpha, hbar)
    return DecomposedGateValue(lv.value, lv, constraint)


def cpe_wigner(r: float, gamma3: float, hbar: float = 1.0) -> WignerEvaluator:
    """Cubic-phase-entangled state: cubic gate on mode 0 of ``tmss(r)``.

    Closed form of the two-mode Wigner function, with ``|gamma|^{1/3}`` in
    the prefactor and the real cube root elsewhere so negative gamma works.
    """
    if not (np.isfinite(r) and r > 0):
        raise InvalidParameterError("r must be positive")
    if not (np.isfinite(gamma3) and gamma3 != 0):
        raise InvalidParameterError("gamma3 must be finite and nonzero")
    g = float(gamma3)
    cg = np.cbrt(g)
    r2, r4 = r * r, r**4
    s4 = 1.0 + r4
    h23 = np.cbrt(hbar) ** 2
    ln_pre = (
        7.0 / 6.0 * np.log(2.0)
        + np.log(r)
        - 1.5 * np.log(np.pi)
        - 13.0 / 6.0 * np.log(hbar)
        - 0.5 * np.log(s4)
        - np.log(abs(cg))
    )
    c_eps = 2.0 ** (2.0 / 3.0) * r4 / (s4**2 * abs(cg) ** 4 * h23)

    def log_fn(q, p):
        q1, q2 = q[..., 0], q[..., 1]
        p1, p2 = p[..., 0], p[..., 1]
        mix = p1 + p2 + (p1 - p2) * r4
        expo = (
            4.0 * r**6 / (3.0 * s4**3 * g * g * hbar)
            + 2.0 * r2 * mix / (s4**2 * g * hbar)
            - (4.0 * r4 * p2**2 + (q2 - q1 + (q1 + q2) * r4) ** 2) / (2.0 * r2 * s4 * hbar)
        )
        x = 2.0 ** (2.0 / 3.0) * mix / (s4 * cg * h23) + 2.0 ** (2.0 / 3.0) * cg * cg * q1**2 / h23
        eps = np.sqrt(c_eps)
        z = x + c_eps
        # exponent eps x + 2 eps^3/3 is already inside `expo`; only its
        # cancellation against the Ai decay needs care
        sign, ln_ai, rest = _combine_exponent(x, eps, z)
        lin = eps * x + 2.0 / 3.0 * eps**3
        ln = ln_pre + (expo - lin) + rest + ln_ai
        return sign, ln

    return WignerEvaluator(2, f"CPE state r={r!r}, gamma3={g!r}", log_fn, hbar)


def cpe_pipeline(r: float, gamma3: float, hbar: float = 1.0) -> WignerEvaluator:
    """Same state built from the generic pieces."""
    return apply_phase_gate(tmss(r, hbar), PhaseGate.cubic(gamma3, 0))
