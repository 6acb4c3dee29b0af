"""Grids, cuts, marginals, negativity, momentum distributions and nonlinear squeezing."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import minimize

from .engine import PhaseGate, _log_airy_gauss
from .errors import (
    InvalidParameterError,
    PoisonedCellError,
    PurityError,
    UnboundedSupportError,
)
from .evaluator import WignerEvaluator
from .gaussian import GaussianState, gaussian_moment
from .oracle import PURITY_TOL, QuadratureSpec, momentum_distribution_quadrature

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_OUTER_NODES, _OUTER_WEIGHTS = np.polynomial.legendre.leggauss(10)

# shared by the CLI and tests: the threshold line in squeezing plots is an
# externally derived number, so it is carried as data only
DEFAULT_NG_THRESHOLD = None


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def _check_range(r, name):
    lo, hi = (float(v) for v in r)
    if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
        raise InvalidParameterError(f"{name} must be a finite interval with max > min")
    return lo, hi


# -- grids and cuts ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Grid:
    """Samples ``values[i, j] = W(q_i, p_j)`` on a rectangular grid."""

    q_range: Tuple[float, float]
    p_range: Tuple[float, float]
    n_q: int
    n_p: int
    values: np.ndarray
    signs: Optional[np.ndarray] = None
    ln_mags: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.n_q < 2 or self.n_p < 2:
            raise InvalidParameterError("grids need at least 2 samples per axis")
        object.__setattr__(self, "values", _frozen(self.values).reshape(self.n_q, self.n_p))
        if self.signs is not None:
            object.__setattr__(self, "signs", _frozen(self.signs, int).reshape(self.n_q, self.n_p))
            object.__setattr__(self, "ln_mags", _frozen(self.ln_mags).reshape(self.n_q, self.n_p))

    @property
    def q_axis(self):
        return np.linspace(*self.q_range, self.n_q)

    @property
    def p_axis(self):
        return np.linspace(*self.p_range, self.n_p)

    @property
    def cell_area(self):
        dq = (self.q_range[1] - self.q_range[0]) / (self.n_q - 1)
        dp = (self.p_range[1] - self.p_range[0]) / (self.n_p - 1)
        return dq * dp

    def trapezoid(self, values=None):
        v = self.values if values is None else values
        wq = np.full(self.n_q, 1.0)
        wq[[0, -1]] = 0.5
        wp = np.full(self.n_p, 1.0)
        wp[[0, -1]] = 0.5
        return float(wq @ v @ wp * self.cell_area)


def grid_eval(evaluator: WignerEvaluator, q_range, p_range, n_q: int, n_p: int, workers: int = 1) -> Grid:
    """Evaluate on a grid, one row of constant q per task.

    Each row is the same vectorised call whatever the number of workers, so
    the output does not depend on ``workers``.
    """
    if evaluator.n_modes != 1:
        raise InvalidParameterError("grid_eval needs a single-mode evaluator")
    q_range = _check_range(q_range, "q_range")
    p_range = _check_range(p_range, "p_range")
    n_q, n_p = int(n_q), int(n_p)
    if n_q < 2 or n_p < 2:
        raise InvalidParameterError("grids need at least 2 samples per axis")
    qs = np.linspace(*q_range, n_q)
    ps = np.linspace(*p_range, n_p)

    def row(i):
        lv = evaluator.eval_log(np.full(n_p, qs[i]), ps)
        return np.asarray(lv.sign), np.asarray(lv.ln_mag)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, range(n_q)))
    else:
        rows = [row(i) for i in range(n_q)]
    signs = np.stack([r[0] for r in rows])
    lns = np.stack([r[1] for r in rows])
    bad = ~(np.isfinite(lns) | ((signs == 0) & np.isneginf(lns)))
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise PoisonedCellError(f"non-finite value at q={qs[i]!r}, p={ps[j]!r}", float(qs[i]), float(ps[j]))
    with np.errstate(over="ignore"):
        values = signs * np.exp(lns)
    if not np.all(np.isfinite(values)):
        i, j = np.argwhere(~np.isfinite(values))[0]
        raise PoisonedCellError(f"value overflows at q={qs[i]!r}, p={ps[j]!r}", float(qs[i]), float(ps[j]))
    return Grid(q_range, p_range, n_q, n_p, values, signs, lns)


@dataclass(frozen=True, eq=False)
class Cut:
    axis: str
    fixed_value: float
    coords: np.ndarray
    values: np.ndarray
    signs: np.ndarray
    ln_mags: np.ndarray


def cut(evaluator: WignerEvaluator, axis: str, fixed_value: float, value_range, n: int) -> Cut:
    """Samples along q (``axis="q"``, p fixed) or along p (``axis="p"``, q fixed)."""
    if axis not in ("q", "p"):
        raise InvalidParameterError("axis must be 'q' or 'p'")
    lo, hi = _check_range(value_range, "range")
    if n < 2:
        raise InvalidParameterError("a cut needs at least 2 samples")
    coords = np.linspace(lo, hi, int(n))
    fixed = np.full(coords.shape, float(fixed_value))
    lv = evaluator.eval_log(coords, fixed) if axis == "q" else evaluator.eval_log(fixed, coords)
    sign = np.asarray(lv.sign)
    ln = np.asarray(lv.ln_mag)
    return Cut(axis, float(fixed_value), _frozen(coords), _frozen(sign * np.exp(ln)), _frozen(sign, int), _frozen(ln))


# -- line integrals with sign-change breakpoints ------------------------------------


def _roots(f, a, b, fa, fb, iters=8):
    """Illinois (modified regula falsi) on each bracket [a_i, b_i] at once."""
    side = np.zeros(a.shape, dtype=int)
    for _ in range(iters):
        denom = fb - fa
        c = np.where(denom != 0, (a * fb - b * fa) / np.where(denom != 0, denom, 1.0), 0.5 * (a + b))
        c = np.clip(c, np.minimum(a, b), np.maximum(a, b))
        fc = f(c)
        same_a = np.sign(fc) == np.sign(fa)
        # replace the endpoint on the side of c; halve the stale one when the
        # same side is kept twice in a row
        a = np.where(same_a, c, a)
        fa = np.where(same_a, fc, fa)
        b = np.where(same_a, b, c)
        fb = np.where(same_a, fb, fc)
        fb = np.where(same_a & (side == 1), 0.5 * fb, fb)
        fa = np.where(~same_a & (side == -1), 0.5 * fa, fa)
        side = np.where(same_a, 1, -1)
        done = fc == 0
        if done.all():
            break
    denom = fb - fa
    return np.where(denom != 0, (a * fb - b * fa) / np.where(denom != 0, denom, 1.0), 0.5 * (a + b))


def line_integrals(f, lo, hi, powers=(), n_scan=2001, max_scan=2**17, max_width=None):
    """Integrals of f, |f| and f t^k for k in ``powers`` over [lo, hi].

    ``f`` is vectorised and real.  Sign changes found on a uniform scan are
    located by bisection and used as breakpoints, so every Gauss-Legendre
    panel sees a single-signed smooth integrand.  The scan is refined while it
    sees few points per sign change.
    """
    if not hi > lo:
        return 0.0, 0.0, np.zeros(len(powers))
    while True:
        t = np.linspace(lo, hi, n_scan)
        v = f(t)
        s = np.sign(v)
        change = np.nonzero(s[:-1] * s[1:] < 0)[0]
        if 16 * len(change) < n_scan or n_scan >= max_scan:
            break
        n_scan = 4 * n_scan - 3
    roots = _roots(f, t[change], t[change + 1], v[change], v[change + 1]) if len(change) else np.empty(0)
    n_uniform = 32 if max_width is None else max(32, int(np.ceil((hi - lo) / max_width)))
    edges = np.union1d(np.linspace(lo, hi, n_uniform + 1), roots)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    x = 0.5 * (a + b)[:, None] + half[:, None] * _GL_NODES[None, :]
    fx = f(x.ravel()).reshape(x.shape)
    w = half[:, None] * _GL_WEIGHTS[None, :]
    total = float(np.sum(w * fx))
    absolute = float(np.sum(w * np.abs(fx)))
    moments = np.array([np.sum(w * fx * x**k) for k in powers], dtype=float)
    return total, absolute, moments


# -- phase-space integrals over an adaptive extent ----------------------------------


@dataclass(frozen=True)
class ExtentPolicy:
    """Box growth rule for integrals over phase space.

    The box starts at the evaluator's extent hint (or ``box``), and both
    half-widths are doubled until the integral of |W| changes by less than
    ``ring_tol``.
    """

    box: Optional[Tuple[float, float, float, float]] = None
    ring_tol: float = 1e-8
    max_doublings: int = 6
    outer_panel_sigma: float = 0.125

    def start(self, evaluator):
        box = self.box or evaluator.extent
        if box is None:
            raise InvalidParameterError("evaluator has no extent hint; pass ExtentPolicy(box=...)")
        return tuple(float(b) for b in box)


@dataclass(frozen=True)
class PhaseSpaceIntegrals:
    total: float
    absolute: float
    moments: dict
    box: Tuple[float, float, float, float]
    n_doublings: int


def _row_function(evaluator, q):
    def f(p):
        p = np.asarray(p, dtype=float)
        return evaluator.eval(np.full(p.shape, q), p)

    return f


def _box_integrals(evaluator, box, monomials, panel_width):
    q_lo, q_hi, p_lo, p_hi = box
    n_panels = max(8, int(np.ceil((q_hi - q_lo) / panel_width)))
    edges = np.linspace(q_lo, q_hi, n_panels + 1)
    half = 0.5 * np.diff(edges)
    qs = (0.5 * (edges[:-1] + edges[1:])[:, None] + half[:, None] * _OUTER_NODES[None, :]).ravel()
    wq = (half[:, None] * _OUTER_WEIGHTS[None, :]).ravel()
    p_powers = sorted({j for _, j in monomials})
    total = absolute = 0.0
    mom = {m: 0.0 for m in monomials}
    for q, w in zip(qs, wq):
        lo, hi = p_lo, p_hi
        if evaluator.p_window is not None:
            win = evaluator.p_window(q)
            if win is None:
                continue
            lo, hi = max(lo, win[0]), min(hi, win[1])
            if not hi > lo:
                continue
        t, a, m = line_integrals(_row_function(evaluator, q), lo, hi, p_powers)
        total += w * t
        absolute += w * a
        by_power = dict(zip(p_powers, m))
        for i, j in monomials:
            mom[(i, j)] += w * q**i * by_power[j]
    return total, absolute, mom


def phase_space_integrals(evaluator: WignerEvaluator, policy: ExtentPolicy = None, monomials=()) -> PhaseSpaceIntegrals:
    """∫W, ∫|W| and ∫W q^i p^j over an adaptively grown box.

    Raises UnboundedSupportError when the box has been doubled
    ``max_doublings`` times without the ring contribution dropping below
    ``ring_tol`` (the expected outcome for non-normalisable states).
    """
    if evaluator.n_modes != 1:
        raise InvalidParameterError("phase-space integrals need a single-mode evaluator")
    policy = policy or ExtentPolicy()
    monomials = tuple(tuple(int(k) for k in m) for m in monomials)
    box = policy.start(evaluator)
    width0 = box[1] - box[0]
    panel = policy.outer_panel_sigma * width0 / 2.0  # box half-width is several sigma
    prev = _box_integrals(evaluator, box, monomials, panel)
    for n in range(1, policy.max_doublings + 1):
        qc, pc = 0.5 * (box[0] + box[1]), 0.5 * (box[2] + box[3])
        qh, ph = box[1] - qc, box[3] - pc
        box = (qc - 2 * qh, qc + 2 * qh, pc - 2 * ph, pc + 2 * ph)
        cur = _box_integrals(evaluator, box, monomials, panel)
        if abs(cur[1] - prev[1]) < policy.ring_tol:
            return PhaseSpaceIntegrals(cur[0], cur[1], cur[2], box, n)
        prev = cur
    raise UnboundedSupportError(
        f"integral of |W| still changing by {abs(cur[1] - prev[1]):.3e} after {policy.max_doublings} doublings"
    )


def normalization(evaluator: WignerEvaluator, policy: ExtentPolicy = None) -> float:
    return phase_space_integrals(evaluator, policy).total


# -- negativity ------------------------------------------------------------------------


@dataclass(frozen=True)
class NegativityReport:
    """Negativity summary.

    ``negative_volume`` is ``∫|W| - ∫W`` (twice the integral of the negative
    part), which equals ``∫|W| - 1`` for a normalised W but cannot go below
    zero through quadrature error.  ``negative_fraction`` is the share of
    ``∫|W|`` carried by the negative part.
    """

    min_value: float
    argmin: Tuple[float, float]
    negative_volume: float
    negative_fraction: float
    integral: float
    abs_integral: float
    box: Tuple[float, float, float, float]


def _minimum(evaluator, box, n=201):
    q_lo, q_hi, p_lo, p_hi = box
    g = grid_eval(evaluator, (q_lo, q_hi), (p_lo, p_hi), n, n)
    i, j = np.unravel_index(np.argmin(g.values), g.values.shape)
    x0 = np.array([g.q_axis[i], g.p_axis[j]])
    best = float(g.values[i, j])
    if best >= 0:
        return best, (float(x0[0]), float(x0[1]))

    def objective(x):
        if not (q_lo <= x[0] <= q_hi and p_lo <= x[1] <= p_hi):
            return np.inf
        return float(evaluator.eval(x[0], x[1]))

    step = max((q_hi - q_lo) / (n - 1), (p_hi - p_lo) / (n - 1))
    simplex = np.array([x0, x0 + [step, 0.0], x0 + [0.0, step]])
    res = minimize(objective, x0, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "xatol": 1e-10, "fatol": 1e-15, "maxiter": 2000})
    if res.fun < best:
        return float(res.fun), (float(res.x[0]), float(res.x[1]))
    return best, (float(x0[0]), float(x0[1]))


def _grid_negativity(grid: Grid) -> NegativityReport:
    total = grid.trapezoid()
    absolute = grid.trapezoid(np.abs(grid.values))
    i, j = np.unravel_index(np.argmin(grid.values), grid.values.shape)
    neg_vol = max(absolute - total, 0.0)
    frac = 0.5 * neg_vol / absolute if absolute > 0 else 0.0
    box = (*grid.q_range, *grid.p_range)
    return NegativityReport(float(grid.values[i, j]), (float(grid.q_axis[i]), float(grid.p_axis[j])),
                            neg_vol, frac, total, absolute, box)


def negativity(source, policy: ExtentPolicy = None) -> NegativityReport:
    """Negativity of a single-mode evaluator (adaptive extent) or of a Grid (trapezoid rule)."""
    if isinstance(source, Grid):
        return _grid_negativity(source)
    ints = phase_space_integrals(source, policy)
    neg_vol = max(ints.absolute - ints.total, 0.0)
    frac = 0.5 * neg_vol / ints.absolute if ints.absolute > 0 else 0.0
    min_value, argmin = _minimum(source, (policy or ExtentPolicy()).start(source))
    return NegativityReport(min_value, argmin, neg_vol, frac, ints.total, ints.absolute, ints.box)


# -- marginals ------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Marginal:
    axis: str
    coords: np.ndarray
    density: np.ndarray


def marginal(evaluator: WignerEvaluator, axis: str, value_range, n: int, policy: ExtentPolicy = None) -> Marginal:
    """Position (``axis="q"``) or momentum (``axis="p"``) density.

    The conjugate variable is integrated over the evaluator's extent after
    one doubling, which by construction covers the Gaussian window in q and
    the classical momentum sweep in p.
    """
    if evaluator.n_modes != 1:
        raise InvalidParameterError("marginal needs a single-mode evaluator")
    if axis not in ("q", "p"):
        raise InvalidParameterError("axis must be 'q' or 'p'")
    lo, hi = _check_range(value_range, "range")
    policy = policy or ExtentPolicy()
    q_lo, q_hi, p_lo, p_hi = policy.start(evaluator)
    qc, qh = 0.5 * (q_lo + q_hi), 0.5 * (q_hi - q_lo)
    pc, ph = 0.5 * (p_lo + p_hi), 0.5 * (p_hi - p_lo)
    coords = np.linspace(lo, hi, int(n))
    out = np.empty(coords.shape)
    for k, x in enumerate(coords):
        if axis == "q":
            a, b = pc - 2 * ph, pc + 2 * ph
            if evaluator.p_window is not None:
                win = evaluator.p_window(x)
                if win is None:
                    out[k] = 0.0
                    continue
                a, b = max(a, win[0]), min(b, win[1])
            out[k] = line_integrals(_row_function(evaluator, x), a, b)[0]
        else:
            def f(q, x=x):
                q = np.asarray(q, dtype=float)
                return evaluator.eval(q, np.full(q.shape, x))

            out[k] = line_integrals(f, qc - 2 * qh, qc + 2 * qh, max_width=qh / 16)[0]
    return Marginal(axis, _frozen(coords), _frozen(out))


# -- momentum distribution ---------------------------------------------------------------


def momentum_distribution_airy(state: GaussianState, gamma3: float, p_samples, spec: QuadratureSpec = None):
    """Momentum density after the cubic gate, ``|Airy transform of phi|^2``.

    For a centred state with uncorrelated quadratures the momentum
    wavefunction is a real Gaussian and the transform is closed-form; other
    pure states go through the convolution quadrature.
    """
    if not isinstance(state, GaussianState) or state.n_modes != 1:
        raise InvalidParameterError("momentum_distribution_airy needs a single-mode Gaussian state")
    if abs(state.purity - 1.0) > PURITY_TOL:
        raise PurityError(f"state is mixed (purity {state.purity:.12g}); no wavefunction")
    gamma3 = float(gamma3)
    if not np.isfinite(gamma3):
        raise InvalidParameterError("gamma3 must be finite")
    p = np.asarray(p_samples, dtype=float)
    hbar = state.hbar
    x0, p0, _, s_p, s_qp = state.mode_moments(0)
    if gamma3 == 0.0:
        return np.exp(-((p - p0) ** 2) / (2 * s_p)) / np.sqrt(2 * np.pi * s_p)
    if x0 == 0.0 and s_qp == 0.0:
        a_m = np.cbrt(hbar * hbar * gamma3)
        sign, ln = _log_airy_gauss(p.ravel(), p0, 2.0 * s_p, a_m)
        # phi = (8 pi s_p)^{1/4} N(.; p0, 2 s_p)
        ln_amp = 0.25 * np.log(8 * np.pi * s_p) + ln
        return (np.exp(2.0 * ln_amp) * (sign != 0)).reshape(p.shape)
    flat = [momentum_distribution_quadrature(state, gamma3, x, spec) for x in p.ravel()]
    return np.array(flat).reshape(p.shape)


# -- nonlinear squeezing --------------------------------------------------------------------


def _poly_mul(a, b):
    out = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            key = (i1 + i2, j1 + j2)
            out[key] = out.get(key, 0.0) + c1 * c2
    return out


def _expect(state, poly):
    total = 0.0
    for (i, j), c in poly.items():
        if c != 0.0:
            total += c * gaussian_moment(state, (i, j))
    return total


@dataclass(frozen=True, eq=False)
class SqueezingCurve:
    """Var(p - g q^2) after the gate over sampled g.

    ``ratio`` is ``min_variance / (hbar / 2)``, the vacuum momentum variance
    being the unit.  ``threshold`` is whatever constant the caller supplied.
    """

    gamma_tilde: np.ndarray
    variance: np.ndarray
    min_gamma_tilde: float
    min_variance: float
    ratio: float
    exact_min_gamma_tilde: float
    exact_min_variance: float
    threshold: Optional[float] = None


def squeezing_coefficients(state: GaussianState, gate: PhaseGate):
    """(Var g, Cov(g, h), Var h) with g = p - V'(q) and h = q^2 under the pre-gate
    state, so that Var(p - t q^2) after the gate is Var g - 2 t Cov + t^2 Var h."""
    if state.n_modes != 1:
        raise InvalidParameterError("nonlinear squeezing is defined here for one mode")
    g1, g2, g3, g4 = gate.effective_gamma
    # post-gate p is the pre-gate p - V'(q)
    g = {(0, 1): 1.0, (0, 0): -g1, (1, 0): -g2, (2, 0): -g3, (3, 0): -g4}
    h = {(2, 0): 1.0}
    eg, eh = _expect(state, g), _expect(state, h)
    var_g = _expect(state, _poly_mul(g, g)) - eg * eg
    cov = _expect(state, _poly_mul(g, h)) - eg * eh
    var_h = _expect(state, _poly_mul(h, h)) - eh * eh
    return var_g, cov, var_h


def nonlinear_squeezing(state: GaussianState, gate: PhaseGate, gamma_tilde_range=(-5.0, 5.0), n: int = 1001,
                        threshold: Optional[float] = DEFAULT_NG_THRESHOLD) -> SqueezingCurve:
    lo, hi = _check_range(gamma_tilde_range, "gamma_tilde_range")
    var_g, cov, var_h = squeezing_coefficients(state, gate)
    t = np.linspace(lo, hi, int(n))
    v = var_g - 2.0 * t * cov + t * t * var_h
    k = int(np.argmin(v))
    t_star = cov / var_h
    v_star = var_g - cov * cov / var_h
    half_hbar = state.hbar / 2.0
    return SqueezingCurve(_frozen(t), _frozen(v), float(t[k]), float(v[k]), float(v[k] / half_hbar),
                          float(t_star), float(v_star), threshold)


def squeezing_from_moments(moments: dict, gamma_tilde):
    """Var(p - t q^2) from phase-space moments keyed by (i, j) for q^i p^j.

    Needs (0,1), (0,2), (2,0), (2,1), (4,0) and the zeroth moment (0,0).
    """
    m = {k: v / moments[(0, 0)] for k, v in moments.items()}
    t = np.asarray(gamma_tilde, dtype=float)
    mean = m[(0, 1)] - t * m[(2, 0)]
    second = m[(0, 2)] - 2 * t * m[(2, 1)] + t * t * m[(4, 0)]
    return second - mean * mean


SQUEEZING_MONOMIALS = ((0, 0), (0, 1), (0, 2), (2, 0), (2, 1), (4, 0))
