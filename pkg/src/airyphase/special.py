"""Double-precision Airy function of the first kind.

Four evaluation regions, all vectorised over numpy arrays:

* ``|x| <= 2``: Maclaurin series about the origin.
* ``-9.25 <= x < -2`` and ``2 < x <= 8.25``: Taylor series about the nearest
  tabulated centre (step 0.5), with coefficients generated on the fly from the
  Airy equation ``y'' = x y``.  Neither the Maclaurin series (cancellation
  grows like Bi(x)) nor the asymptotic series (error ~ exp(-2 zeta)) reaches
  1e-13 absolute accuracy in this band.
* ``x > 8.25``: monotone asymptotic expansion, computed in scaled form.
* ``x < -9.25``: oscillatory asymptotic expansion.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from ._airy_table import CENTRE_MIN, CENTRE_STEP, TABLE
from .errors import DomainError

ArrayLike = Union[float, np.ndarray]

AI0 = 0.35502805388781723926
AIP0 = -0.25881940379280679840

MACLAURIN_LIMIT = 2.0
TAYLOR_LOW = -9.25
TAYLOR_HIGH = 8.25

_N_MACLAURIN = 24
_N_TAYLOR = 26
_TAB = np.array(TABLE)


def _asymptotic_coefficients(n=60):
    u = np.empty(n)
    u[0] = 1.0
    for k in range(1, n):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216.0 * k * (2 * k - 1))
    return u


_U = _asymptotic_coefficients()


@dataclass(frozen=True)
class LogValue:
    """A real number stored as ``sign * exp(ln_mag)``.

    ``sign`` is -1, 0 or +1 and ``ln_mag`` is ``-inf`` exactly when ``sign`` is
    0.  Both fields may also be numpy arrays of matching shape.
    """

    sign: Union[int, np.ndarray]
    ln_mag: Union[float, np.ndarray]

    @property
    def value(self):
        out = self.sign * np.exp(self.ln_mag)
        if np.ndim(out) == 0:
            return float(out)
        return out

    @classmethod
    def from_value(cls, x):
        x = np.asarray(x, dtype=float)
        sign = np.sign(x).astype(int)
        with np.errstate(divide="ignore"):
            ln = np.log(np.abs(x))
        if x.ndim == 0:
            return cls(int(sign), float(ln))
        return cls(sign, ln)

    def __mul__(self, other):
        if not isinstance(other, LogValue):
            return NotImplemented
        return LogValue(self.sign * other.sign, self.ln_mag + other.ln_mag)


def _as_array(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def _scalar_or_array(template, out):
    if np.ndim(template) == 0:
        return float(out)
    return out


def _maclaurin(x):
    z3 = x**3
    f_term = np.ones_like(x)
    g_term = x.copy()
    f = f_term.copy()
    g = g_term.copy()
    for k in range(1, _N_MACLAURIN):
        f_term = f_term * z3 / ((3 * k - 1) * (3 * k))
        g_term = g_term * z3 / ((3 * k) * (3 * k + 1))
        f += f_term
        g += g_term
    return AI0 * f + AIP0 * g


def _taylor_coefficients(table):
    """Taylor coefficients a_0..a_{N-1} about every tabulated centre.

    a_{n+2} = (c a_n + a_{n-1}) / ((n+2)(n+1)), from y'' = x y.
    """
    c = table[:, 0]
    coeffs = np.zeros((len(table), _N_TAYLOR))
    coeffs[:, 0] = table[:, 1]
    coeffs[:, 1] = table[:, 2]
    coeffs[:, 2] = c * coeffs[:, 0] / 2.0
    for n in range(1, _N_TAYLOR - 2):
        coeffs[:, n + 2] = (c * coeffs[:, n] + coeffs[:, n - 1]) / ((n + 2) * (n + 1))
    return coeffs


_TAYLOR = _taylor_coefficients(_TAB)


def _taylor(x):
    idx = np.rint((x - CENTRE_MIN) / CENTRE_STEP).astype(int)
    h = x - _TAB[idx, 0]
    coeffs = _TAYLOR[idx]
    total = coeffs[:, -1].copy()
    for n in range(_N_TAYLOR - 2, -1, -1):
        total = total * h + coeffs[:, n]
    return total


def _n_terms(zeta_min):
    """Terms to keep: up to the smallest term at ``zeta_min`` or until 1e-18.

    Terms shrink with growing zeta for a fixed index below 2 zeta, so the
    count chosen for the smallest zeta serves the whole array.
    """
    prev = np.inf
    for k in range(len(_U)):
        mag = _U[k] / zeta_min**k
        if mag >= prev:
            return k
        if mag < 1e-18:
            return k + 1
        prev = mag
    return len(_U)


_SERIES_SIGNS = {
    "scaled": (lambda k: (-1.0) ** k, None),
    "even": (lambda k: (-1.0) ** (k // 2), 0),
    "odd": (lambda k: (-1.0) ** ((k - 1) // 2), 1),
}


@lru_cache(maxsize=None)
def _series_coefficients(kind, n):
    signs, parity = _SERIES_SIGNS[kind]
    return tuple(signs(k) * _U[k] if parity is None or k % 2 == parity else 0.0 for k in range(n))[::-1]


def _series_sum(kind, zeta):
    """Sum of the kept terms u_k zeta^-k of one series by Horner's rule."""
    coef = _series_coefficients(kind, _n_terms(float(zeta.min())))
    inv = 1.0 / zeta
    total = np.zeros_like(zeta)
    for c in coef:
        total = total * inv + c
    return total


def _scaled_asymptotic(x):
    zeta = 2.0 / 3.0 * x * np.sqrt(x)
    s = _series_sum("scaled", zeta)
    return s / (2.0 * np.sqrt(np.pi) * np.sqrt(np.sqrt(x)))


def _oscillatory_asymptotic(x):
    ax = -x
    zeta = 2.0 / 3.0 * ax * np.sqrt(ax)
    even = _series_sum("even", zeta)
    odd = _series_sum("odd", zeta)
    chi = zeta + np.pi / 4.0
    return (np.sin(chi) * even - np.cos(chi) * odd) / (np.sqrt(np.pi) * np.sqrt(np.sqrt(ax)))


def _airy_array(x):
    out = np.empty_like(x)
    m_mac = np.abs(x) <= MACLAURIN_LIMIT
    m_pos = x > TAYLOR_HIGH
    m_neg = x < TAYLOR_LOW
    m_tay = ~(m_mac | m_pos | m_neg)
    if m_mac.any():
        out[m_mac] = _maclaurin(x[m_mac])
    if m_tay.any():
        out[m_tay] = _taylor(x[m_tay])
    if m_neg.any():
        out[m_neg] = _oscillatory_asymptotic(x[m_neg])
    if m_pos.any():
        xp = x[m_pos]
        with np.errstate(under="ignore"):
            out[m_pos] = _scaled_asymptotic(xp) * np.exp(-2.0 / 3.0 * xp * np.sqrt(xp))
    return out


def airy_ai(x: ArrayLike) -> ArrayLike:
    """Airy function Ai(x) for real, finite ``x`` (scalar or array).

    Absolute error is below 1e-13 on ``|x| <= 15``; for large positive ``x``
    the result underflows gracefully to a denormal or zero.
    """
    arr = _as_array(x)
    out = _airy_array(np.atleast_1d(arr).astype(float)).reshape(arr.shape)
    return _scalar_or_array(arr, out)


def airy_ai_scaled(x: ArrayLike) -> ArrayLike:
    """``Ai(x) * exp(2/3 x^{3/2})`` for ``x >= 0``."""
    arr = _as_array(x)
    if np.any(arr < 0):
        raise DomainError("airy_ai_scaled is defined for x >= 0 only")
    flat = np.atleast_1d(arr).astype(float)
    out = np.empty_like(flat)
    big = flat > TAYLOR_HIGH
    if big.any():
        out[big] = _scaled_asymptotic(flat[big])
    if (~big).any():
        xs = flat[~big]
        out[~big] = _airy_array(xs) * np.exp(2.0 / 3.0 * xs * np.sqrt(xs))
    return _scalar_or_array(arr, out.reshape(arr.shape))


def _log_airy_split(x):
    """Sign and ln of Ai(x) exp((2/3) max(x, 0)^{3/2}) for a float array.

    The decay is left out for x > 0 so callers that cancel it against a
    growing exponential never form the large intermediate.
    """
    sign = np.ones(x.shape, dtype=int)
    ln = np.empty_like(x)
    big = x > TAYLOR_HIGH
    if big.any():
        ln[big] = np.log(_scaled_asymptotic(x[big]))
    if (~big).any():
        xs = x[~big]
        v = _airy_array(xs)
        sign[~big] = np.sign(v).astype(int)
        with np.errstate(divide="ignore"):
            ln[~big] = np.log(np.abs(v)) + 2.0 / 3.0 * np.maximum(xs, 0.0) ** 1.5
    return sign, ln


def _log_airy_parts(x):
    """Sign and ln|Ai| for a float array, without underflow."""
    sign, ln = _log_airy_split(x)
    pos = x > 0
    ln[pos] -= 2.0 / 3.0 * x[pos] * np.sqrt(x[pos])
    return sign, ln


def log_airy_ai(x: ArrayLike) -> LogValue:
    """Ai(x) as a :class:`LogValue`; finite for any finite ``x``."""
    arr = _as_array(x)
    sign, ln = _log_airy_parts(np.atleast_1d(arr).astype(float))
    if arr.ndim == 0:
        return LogValue(int(sign[0]), float(ln[0]))
    return LogValue(sign.reshape(arr.shape), ln.reshape(arr.shape))
