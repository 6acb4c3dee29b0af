"""Multimode Gaussian states and the symplectic maps acting on them.

Phase-space vectors are ordered (q_1, p_1, ..., q_N, p_N) and the covariance
is ``cov_ij = <sym(x_i x_j)> - <x_i><x_j>``, so the vacuum has
``cov = (hbar/2) I``.  A Gaussian unitary with symplectic matrix ``S`` sends
``mean -> S mean + shift`` and ``cov -> S cov S^T``.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import (
    ConventionMismatchError,
    InvalidParameterError,
    InvalidStateError,
    UnsupportedDegreeError,
)
from .evaluator import WignerEvaluator

SYMMETRY_TOL = 1e-12
UNCERTAINTY_TOL = 1e-10
PURITY_TOL = 1e-10
SYMPLECTIC_TOL = 1e-10
MAX_MOMENT_DEGREE = 8

# Rows whose marginal weight is below exp(this) are treated as empty.
_LOG_NEGLIGIBLE = -80.0
_WINDOW_SIGMAS = 12.0
# half-width, in standard deviations, of the starting integration box
EXTENT_SIGMAS = 6.0


@dataclass(frozen=True)
class Conventions:
    hbar: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.hbar) and self.hbar > 0):
            raise InvalidParameterError("hbar must be a positive finite number")


def symplectic_form(n_modes):
    """Omega for the interleaved (q_1, p_1, ...) ordering."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GaussianState:
    """An N-mode Gaussian state given by its mean vector and covariance."""

    mean: np.ndarray
    cov: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        mean = _frozen(self.mean).reshape(-1)
        cov = _frozen(self.cov)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        Conventions(self.hbar)
        dim = mean.shape[0]
        if dim == 0 or dim % 2:
            raise InvalidStateError("mean must have even, nonzero length 2N")
        if cov.shape != (dim, dim):
            raise InvalidStateError(f"cov must be {dim}x{dim}, got {cov.shape}")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise InvalidStateError("mean and cov must be finite")
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL * max(1.0, np.max(np.abs(cov))):
            raise InvalidStateError("cov is not symmetric")
        omega = symplectic_form(dim // 2)
        eig = np.linalg.eigvalsh(cov + 0.5j * self.hbar * omega)
        if eig.min() < -UNCERTAINTY_TOL:
            raise InvalidStateError(
                f"cov violates the uncertainty relation (min eigenvalue {eig.min():.3e})"
            )
        det = np.linalg.det(cov)
        if not det > 0:
            raise InvalidStateError("cov is singular")
        if self.purity > 1 + PURITY_TOL:
            raise InvalidStateError(f"purity {self.purity} exceeds 1")

    @property
    def n_modes(self) -> int:
        return self.mean.shape[0] // 2

    @property
    def conventions(self) -> Conventions:
        return Conventions(self.hbar)

    @property
    def purity(self) -> float:
        n = self.n_modes
        return float((self.hbar / 2) ** n / np.sqrt(np.linalg.det(self.cov)))

    def mode_moments(self, mode):
        """(mean_q, mean_p, sigma_q, sigma_p, sigma_qp) of one mode."""
        i = 2 * _check_mode(self, mode)
        c = self.cov
        return (self.mean[i], self.mean[i + 1], c[i, i], c[i + 1, i + 1], c[i, i + 1])

    def allclose(self, other, atol=1e-12):
        return (
            self.hbar == other.hbar
            and self.mean.shape == other.mean.shape
            and np.allclose(self.mean, other.mean, rtol=0, atol=atol)
            and np.allclose(self.cov, other.cov, rtol=0, atol=atol)
        )


@dataclass(frozen=True, eq=False)
class SymplecticOp:
    """Affine phase-space map ``x -> matrix @ x + shift``."""

    matrix: np.ndarray
    shift: np.ndarray = field(default=None)

    def __post_init__(self):
        m = _frozen(self.matrix)
        dim = m.shape[0]
        shift = np.zeros(dim) if self.shift is None else self.shift
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "shift", _frozen(shift).reshape(-1))
        if m.shape != (dim, dim) or dim % 2 or self.shift.shape != (dim,):
            raise InvalidParameterError("matrix must be 2N x 2N and shift of length 2N")
        omega = symplectic_form(dim // 2)
        if np.max(np.abs(m @ omega @ m.T - omega)) > SYMPLECTIC_TOL:
            raise InvalidParameterError("matrix is not symplectic")

    def apply(self, state: GaussianState) -> GaussianState:
        if self.matrix.shape[0] != state.mean.shape[0]:
            raise InvalidParameterError("map and state dimensions differ")
        s = self.matrix
        cov = s @ state.cov @ s.T
        return GaussianState(s @ state.mean + self.shift, 0.5 * (cov + cov.T), state.hbar)


def _check_mode(state, mode):
    if not (isinstance(mode, (int, np.integer)) and 0 <= mode < state.n_modes):
        raise InvalidParameterError(f"mode index {mode!r} out of range for {state.n_modes} modes")
    return int(mode)


def _embed(state, modes, block):
    """Symplectic matrix acting as ``block`` on the listed modes."""
    dim = 2 * state.n_modes
    s = np.eye(dim)
    idx = [k for m in modes for k in (2 * m, 2 * m + 1)]
    s[np.ix_(idx, idx)] = block
    return s


def vacuum(n_modes: int = 1, hbar: float = 1.0) -> GaussianState:
    if not (isinstance(n_modes, (int, np.integer)) and n_modes >= 1):
        raise InvalidParameterError("n_modes must be a positive integer")
    return GaussianState(np.zeros(2 * n_modes), 0.5 * hbar * np.eye(2 * n_modes), hbar)


def thermal(n_bar: float, hbar: float = 1.0) -> GaussianState:
    """Single-mode thermal state with mean occupation ``n_bar``."""
    if not (np.isfinite(n_bar) and n_bar >= 0):
        raise InvalidParameterError("n_bar must be a nonnegative number")
    return GaussianState(np.zeros(2), 0.5 * hbar * (1 + 2 * n_bar) * np.eye(2), hbar)


def tensor(*states: GaussianState) -> GaussianState:
    """Product state; all factors must share one hbar."""
    hbars = {s.hbar for s in states}
    if len(hbars) != 1:
        raise ConventionMismatchError(f"cannot combine states with hbar values {sorted(hbars)}")
    mean = np.concatenate([s.mean for s in states])
    dim = mean.shape[0]
    cov = np.zeros((dim, dim))
    k = 0
    for s in states:
        d = s.mean.shape[0]
        cov[k : k + d, k : k + d] = s.cov
        k += d
    return GaussianState(mean, cov, hbars.pop())


def squeeze(state: GaussianState, mode: int, r: float, theta: float = 0.0) -> GaussianState:
    """Squeeze by the factor ``r``: at ``theta = 0`` q is stretched by ``r``, p by ``1/r``.

    A nonzero ``theta`` rotates the squeezing axis by ``theta/2``.
    """
    mode = _check_mode(state, mode)
    if not (np.isfinite(r) and r > 0):
        raise InvalidParameterError("squeeze factor r must be positive")
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    rot = np.array([[c, -s], [s, c]])
    block = rot @ np.diag([r, 1.0 / r]) @ rot.T
    return SymplecticOp(_embed(state, [mode], block)).apply(state)


def displace(state: GaussianState, mode: int, q: float, p: float) -> GaussianState:
    mode = _check_mode(state, mode)
    shift = np.zeros(2 * state.n_modes)
    shift[2 * mode : 2 * mode + 2] = (q, p)
    return SymplecticOp(np.eye(2 * state.n_modes), shift).apply(state)


def fourier(state: GaussianState, mode: int) -> GaussianState:
    """Quarter-period rotation: q -> p, p -> -q."""
    mode = _check_mode(state, mode)
    return SymplecticOp(_embed(state, [mode], np.array([[0.0, 1.0], [-1.0, 0.0]]))).apply(state)


def beamsplitter(state: GaussianState, i: int, j: int, theta: float) -> GaussianState:
    """Real beamsplitter mixing modes ``i`` and ``j`` with angle ``theta``."""
    i = _check_mode(state, i)
    j = _check_mode(state, j)
    if i == j:
        raise InvalidParameterError("beamsplitter needs two distinct modes")
    c, s = np.cos(theta), np.sin(theta)
    # (q_i, p_i, q_j, p_j)
    block = np.array(
        [
            [c, 0.0, s, 0.0],
            [0.0, c, 0.0, s],
            [-s, 0.0, c, 0.0],
            [0.0, -s, 0.0, c],
        ]
    )
    return SymplecticOp(_embed(state, [i, j], block)).apply(state)


def linear_phase_gate(state: GaussianState, mode: int, n: int, gamma: float) -> GaussianState:
    """exp(-i gamma q^n / (n hbar)) for n in {1, 2}.

    The Wigner function is relabelled as W(q, p) -> W(q, p + gamma q^{n-1}),
    which moves the state's momentum by ``-gamma q^{n-1}``.
    """
    mode = _check_mode(state, mode)
    if n not in (1, 2):
        raise InvalidParameterError("linear_phase_gate handles n = 1 or 2; use the Airy engine for n >= 3")
    if not np.isfinite(gamma):
        raise InvalidParameterError("gamma must be finite")
    dim = 2 * state.n_modes
    if n == 1:
        shift = np.zeros(dim)
        shift[2 * mode + 1] = -gamma
        return SymplecticOp(np.eye(dim), shift).apply(state)
    return SymplecticOp(_embed(state, [mode], np.array([[1.0, 0.0], [-gamma, 1.0]]))).apply(state)


def tmss(r: float, hbar: float = 1.0) -> GaussianState:
    """Two-mode squeezed vacuum in the parametrisation used for the CPE state.

    Its Wigner function is
    ``exp(-[(q1-q2)^2 + (p1+p2)^2 + ((p1-p2)^2 + (q1+q2)^2) r^4] / (2 hbar r^2)) / (pi hbar)^2``.
    """
    if not (np.isfinite(r) and r > 0):
        raise InvalidParameterError("r must be positive")
    st = squeeze(squeeze(vacuum(2, hbar), 0, r), 1, 1.0 / r)
    return beamsplitter(st, 0, 1, np.pi / 4)


# -- Gaussian densities -----------------------------------------------------


def _log_normal(x, mean, cov):
    """log N(x; mean, cov) for x with trailing axis len(mean)."""
    chol = np.linalg.cholesky(cov)
    d = x - mean
    y = np.linalg.solve(chol, d.reshape(-1, d.shape[-1]).T).T.reshape(d.shape)
    logdet = 2.0 * np.sum(np.log(np.diag(chol)))
    k = mean.shape[0]
    return -0.5 * np.sum(y * y, axis=-1) - 0.5 * (logdet + k * np.log(2 * np.pi))


def interleave(q, p):
    """Stack (q, p) with trailing axes of length N into x = (q1, p1, ...)."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    x = np.empty(q.shape[:-1] + (2 * q.shape[-1],))
    x[..., 0::2] = q
    x[..., 1::2] = p
    return x


@dataclass(frozen=True)
class Conditional:
    """Split of a Gaussian into the marginal of every variable but one and the
    conditional normal of that one.

    ``x[index] | rest ~ N(mean_j + coef @ (rest - mean_rest), var)``.
    """

    index: int
    rest: np.ndarray
    mean_rest: np.ndarray
    cov_rest: np.ndarray
    mean_j: float
    coef: np.ndarray
    var: float

    def conditional_mean(self, x_rest):
        return self.mean_j + (np.asarray(x_rest) - self.mean_rest) @ self.coef

    def log_marginal(self, x_rest):
        return _log_normal(np.asarray(x_rest, dtype=float), self.mean_rest, self.cov_rest)


def conditional(state: GaussianState, index: int) -> Conditional:
    dim = state.mean.shape[0]
    rest = np.array([k for k in range(dim) if k != index], dtype=int)
    c = state.cov
    c_rr = c[np.ix_(rest, rest)]
    c_jr = c[index, rest]
    coef = np.linalg.solve(c_rr, c_jr)
    var = float(c[index, index] - c_jr @ coef)
    if not var > 0:
        raise InvalidStateError("conditional variance is not positive")
    return Conditional(index, rest, state.mean[rest], c_rr, float(state.mean[index]), coef, var)


def wigner_gaussian(state: GaussianState) -> WignerEvaluator:
    """Closed-form Gaussian Wigner function ``N(x; mean, cov)``."""
    if not np.linalg.det(state.cov) > 0:
        raise InvalidStateError("singular covariance")
    n = state.n_modes
    mean, cov = state.mean.copy(), state.cov.copy()

    def log_fn(q, p):
        if n == 1:
            x = np.stack([q, p], axis=-1)
        else:
            x = interleave(q, p)
        ln = _log_normal(x, mean, cov)
        return np.ones(ln.shape, dtype=int), ln

    window = None
    extent = None
    if n == 1:
        x0, p0, s_q, s_p, _ = state.mode_moments(0)
        extent = (
            x0 - EXTENT_SIGMAS * np.sqrt(s_q),
            x0 + EXTENT_SIGMAS * np.sqrt(s_q),
            p0 - EXTENT_SIGMAS * np.sqrt(s_p),
            p0 + EXTENT_SIGMAS * np.sqrt(s_p),
        )
        cond = conditional(state, 1)
        sd = np.sqrt(cond.var)

        def window(q):
            if cond.log_marginal(np.array([q])) < _LOG_NEGLIGIBLE:
                return None
            m = cond.conditional_mean(np.array([q]))
            return (m - _WINDOW_SIGMAS * sd, m + _WINDOW_SIGMAS * sd)

    key = ("gaussian", state.mean.tobytes(), state.cov.tobytes())
    return WignerEvaluator(n, f"gaussian({n} modes)", log_fn, state.hbar, window, extent, key)


def position_log_density(state: GaussianState, mode: int, q):
    """log of the position marginal of ``mode`` at ``q``."""
    i = 2 * _check_mode(state, mode)
    q = np.asarray(q, dtype=float)[..., None]
    return _log_normal(q, state.mean[i : i + 1], state.cov[i : i + 1, i : i + 1])


def _anti_diagonal_parts(state: GaussianState):
    n = state.n_modes
    qi = np.arange(0, 2 * n, 2)
    pi = qi + 1
    c = state.cov
    a = c[np.ix_(qi, qi)]
    b = c[np.ix_(qi, pi)]
    c_pp = c[np.ix_(pi, pi)]
    gain = np.linalg.solve(a, b)  # A^{-1} B
    c_cond = c_pp - b.T @ gain
    return state.mean[qi], state.mean[pi], a, gain, c_cond


def anti_diagonal(state: GaussianState, q, t):
    """<q - t| rho |q + t> in closed form.

    ``q`` and ``t`` are vectors of length N (scalars for one mode); ``t`` may
    carry extra leading axes.  Computed as the Fourier integral of W over p.
    """
    if not np.linalg.det(state.cov) > 0:
        raise InvalidStateError("singular covariance")
    n = state.n_modes
    mu_q, mu_p, a, gain, c_cond = _anti_diagonal_parts(state)
    q = np.asarray(q, dtype=float).reshape(n)
    t = np.asarray(t, dtype=float)
    scalar_t = t.ndim == 0 or (n > 1 and t.ndim == 1)
    if n == 1:
        t = t[..., None]
    k = 2.0 * t / state.hbar
    m = mu_p + (q - mu_q) @ gain
    log_amp = _log_normal(q, mu_q, a)
    expo = -1j * (k @ m) - 0.5 * np.einsum("...i,ij,...j->...", k, c_cond, k)
    out = np.exp(log_amp + expo)
    if scalar_t:
        return complex(out)
    return out


def gaussian_moment(state: GaussianState, powers: Sequence[int]) -> float:
    """Weyl-ordered moment ``<sym(prod x_i^{k_i})>``, i.e. the phase-space
    average of the monomial under the Gaussian Wigner function.

    Uses the non-central Isserlis recursion
    ``E[x_i f] = mu_i E[f] + sum_j cov_ij E[d f / d x_j]``.
    """
    powers = tuple(int(k) for k in powers)
    if len(powers) != state.mean.shape[0] or any(k < 0 for k in powers):
        raise InvalidParameterError("powers must be a nonnegative multi-index of length 2N")
    if sum(powers) > MAX_MOMENT_DEGREE:
        raise UnsupportedDegreeError(f"moment degree {sum(powers)} exceeds {MAX_MOMENT_DEGREE}")
    return _moment_engine(tuple(state.mean), tuple(map(tuple, state.cov)))(powers)


@lru_cache(maxsize=64)
def _moment_engine(mean, cov):
    mu = np.array(mean)
    sig = np.array(cov)

    @lru_cache(maxsize=None)
    def moment(k):
        if not any(k):
            return 1.0
        i = next(idx for idx, v in enumerate(k) if v)
        rest = list(k)
        rest[i] -= 1
        total = mu[i] * moment(tuple(rest))
        for j, kj in enumerate(rest):
            if kj and sig[i, j] != 0.0:
                lower = rest.copy()
                lower[j] -= 1
                total += sig[i, j] * kj * moment(tuple(lower))
        return float(total)

    return moment
