"""Regenerate src/airyphase/_airy_table.py.

Ai and Ai' at the Taylor patch centres, evaluated with the extended-precision
series (Ai' by term-wise differentiation in the same working precision).

    python tools/gen_airy_table.py > src/airyphase/_airy_table.py
"""

import math

import mpmath

CENTRES = [c / 2 for c in range(-19, 18)]  # -9.5 .. 8.5


def ai_and_derivative(x):
    zeta = 2.0 / 3.0 * abs(x) ** 1.5
    dps = 60 + int(math.ceil(2.0 * zeta / math.log(10.0)))
    with mpmath.workdps(dps):
        z = mpmath.mpf(x)
        z3 = z**3
        c1 = 1 / (mpmath.cbrt(9) * mpmath.gamma(mpmath.mpf(2) / 3))
        c2 = 1 / (mpmath.cbrt(3) * mpmath.gamma(mpmath.mpf(1) / 3))
        # f_k = z^{3k} a_k, g_k = z^{3k+1} b_k ; derivatives 3k z^{3k-1} a_k etc.
        a = mpmath.mpf(1)
        b = mpmath.mpf(1)
        val = c1 - c2 * z
        der = -c2
        k = 0
        while True:
            k += 1
            a = a / ((3 * k - 1) * (3 * k))
            b = b / ((3 * k) * (3 * k + 1))
            tv = c1 * a * z ** (3 * k) - c2 * b * z ** (3 * k + 1)
            td = c1 * a * 3 * k * z ** (3 * k - 1) - c2 * b * (3 * k + 1) * z ** (3 * k)
            val += tv
            der += td
            if k > 10 and abs(tv) < mpmath.mpf(10) ** -45 and abs(td) < mpmath.mpf(10) ** -45:
                break
        return float(val), float(der)


def main():
    print('"""Ai and Ai\' at Taylor patch centres. Generated by tools/gen_airy_table.py."""')
    print()
    print(f"CENTRE_MIN = {CENTRES[0]!r}")
    print("CENTRE_STEP = 0.5")
    print()
    print("# (centre, Ai(centre), Ai'(centre))")
    print("TABLE = (")
    for c in CENTRES:
        v, d = ai_and_derivative(c)
        print(f"    ({c!r}, {v!r}, {d!r}),")
    print(")")


if __name__ == "__main__":
    main()
