"""Immutable Wigner-function evaluators."""

from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from .special import LogValue

# (q, p) -> (sign array, ln|W| array)
LogFunction = Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]
# q -> (p_lo, p_hi) outside which |W(q, p)| is negligible, or None for a
# row whose total weight is negligible.
WindowFunction = Callable[[float], Optional[Tuple[float, float]]]


def _prepare(n_modes, q, p):
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if n_modes > 1:
        if q.shape[-1:] != (n_modes,) or p.shape[-1:] != (n_modes,):
            raise ValueError(f"q and p need a trailing axis of length {n_modes}")
    q, p = np.broadcast_arrays(q, p)
    return q, p


@dataclass(frozen=True, eq=False)
class WignerEvaluator:
    """W(q, p) of a state, plus its overflow-free log form.

    For a single mode ``q`` and ``p`` broadcast against each other.  For
    ``n_modes > 1`` they carry a trailing axis of length ``n_modes`` holding
    (q_1..q_N) and (p_1..p_N).

    Two evaluators compare equal when they carry the same ``key``, the
    exact floating-point parameters they were built from.  Evaluators
    without a key are equal only to themselves.
    """

    n_modes: int
    description: str
    log_fn: LogFunction = field(repr=False)
    hbar: float = 1.0
    p_window: Optional[WindowFunction] = field(default=None, repr=False, compare=False)
    # (q_lo, q_hi, p_lo, p_hi): starting box for integrals over phase space
    extent: Optional[Tuple[float, float, float, float]] = field(default=None, repr=False, compare=False)
    key: Optional[tuple] = field(default=None, repr=False)

    def __eq__(self, other):
        if not isinstance(other, WignerEvaluator):
            return NotImplemented
        if self is other:
            return True
        return self.key is not None and (self.n_modes, self.hbar, self.key) == (other.n_modes, other.hbar, other.key)

    def __hash__(self):
        return hash((self.n_modes, self.hbar, self.key)) if self.key is not None else id(self)

    def eval_log(self, q, p) -> LogValue:
        q, p = _prepare(self.n_modes, q, p)
        sign, ln = self.log_fn(q, p)
        if np.ndim(sign) == 0:
            return LogValue(int(sign), float(ln))
        return LogValue(sign, ln)

    def eval(self, q, p):
        q, p = _prepare(self.n_modes, q, p)
        sign, ln = self.log_fn(q, p)
        out = sign * np.exp(ln)
        if np.ndim(out) == 0:
            return float(out)
        return out

    __call__ = eval
