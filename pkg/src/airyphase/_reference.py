"""Extended-precision Airy Ai from its Maclaurin series.

Kept free of any dependency on the double-precision implementation so it can
serve as its reference.  Arithmetic is done in mpmath floats whose working
precision is raised to absorb the cancellation between the two series
branches, which grows like exp((4/3)|x|^{3/2}).
"""

import math

import mpmath

from .errors import DomainError

X_MAX = 30.0
MAX_DIGITS = 25


def _working_dps(x, target_digits):
    zeta = 2.0 / 3.0 * abs(x) ** 1.5
    # Both branches grow like e^zeta while Ai(x) may be as small as e^-zeta.
    return target_digits + 20 + int(math.ceil(2.0 * zeta / math.log(10.0)))


def airy_ai_reference(x, target_digits=MAX_DIGITS, return_bound=False):
    """Ai(x) to ``target_digits`` significant digits.

    The series is summed until the geometric tail bound on the next term drops
    below ``10**-(target_digits + 5)`` relative to the partial sum.

    Args:
        x: real argument with ``|x| <= 30``.
        target_digits: requested precision, at most 25.
        return_bound: also return the certified truncation bound.

    Returns:
        ``mpmath.mpf`` (and the absolute tail bound if requested).
    """
    x = float(x)
    if not math.isfinite(x) or abs(x) > X_MAX:
        raise DomainError(f"airy_ai_reference needs |x| <= {X_MAX}, got {x!r}")
    if not 1 <= target_digits <= MAX_DIGITS:
        raise DomainError(f"target_digits must be in [1, {MAX_DIGITS}]")

    with mpmath.workdps(_working_dps(x, target_digits)):
        z = mpmath.mpf(x)
        z3 = z**3
        c1 = 1 / (mpmath.cbrt(9) * mpmath.gamma(mpmath.mpf(2) / 3))
        c2 = 1 / (mpmath.cbrt(3) * mpmath.gamma(mpmath.mpf(1) / 3))

        f_term = mpmath.mpf(1)
        g_term = z
        total = c1 * f_term - c2 * g_term
        rel = mpmath.mpf(10) ** (-(target_digits + 5))
        k = 0
        while True:
            k += 1
            f_term = f_term * z3 / ((3 * k - 1) * (3 * k))
            g_term = g_term * z3 / ((3 * k) * (3 * k + 1))
            total += c1 * f_term - c2 * g_term
            # ratio of successive terms from here on is below this value
            ratio = abs(z3) / ((3 * k + 2) * (3 * k + 3))
            if ratio < 0.5:
                nxt = (c1 * abs(f_term) + c2 * abs(g_term)) * ratio
                bound = nxt / (1 - ratio)
                if bound <= rel * abs(total) or (total == 0 and bound == 0):
                    break
        value = +total
    with mpmath.workdps(target_digits + 10):
        value = +value
        bound = +bound
    if return_bound:
        return value, bound
    return value
