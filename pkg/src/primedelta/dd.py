"""Double-double arithmetic shared by the numba and numpy kernels.

Every routine here uses only IEEE arithmetic and numpy ufuncs, so the same
source runs on float scalars inside jitted loops and on float arrays from
plain Python.  A value is carried as an unevaluated pair ``(hi, lo)`` with
``|lo| <= ulp(hi)/2``, giving roughly 32 significant digits.
"""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from math import factorial

import numpy as np

from ._backend import jitable

EULER_GAMMA = "0.577215664901532860606512090082"


def _split_exact(value: Fraction) -> tuple[float, float]:
    hi = float(value)
    lo = float(value - Fraction(hi))
    return hi, lo


GAMMA_HI, GAMMA_LO = _split_exact(Fraction(Decimal(EULER_GAMMA)))
# 2*gamma - 1, the linear coefficient of the smooth part of D(x)
LIN_HI, LIN_LO = _split_exact(2 * Fraction(Decimal(EULER_GAMMA)) - 1)
LN2_HI, LN2_LO = _split_exact(Fraction(Decimal("0.693147180559945309417232121458176568")))
INV_LN2 = 1.4426950408889634

_N_TAYLOR = 12
INV_FACT_HI = np.array([_split_exact(Fraction(1, factorial(j)))[0] for j in range(_N_TAYLOR + 1)])
INV_FACT_LO = np.array([_split_exact(Fraction(1, factorial(j)))[1] for j in range(_N_TAYLOR + 1)])

_SPLITTER = 134217729.0  # 2**27 + 1


@jitable
def two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


@jitable
def quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


@jitable
def split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


@jitable
def two_prod(a, b):
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


@jitable
def dd_add(ah, al, bh, bl):
    s, e = two_sum(ah, bh)
    t, f = two_sum(al, bl)
    e = e + t
    s, e = quick_two_sum(s, e)
    e = e + f
    return quick_two_sum(s, e)


@jitable
def dd_mul(ah, al, bh, bl):
    p, e = two_prod(ah, bh)
    e = e + (ah * bl + al * bh)
    return quick_two_sum(p, e)


@jitable
def dd_mul_d(ah, al, b):
    p, e = two_prod(ah, b)
    e = e + al * b
    return quick_two_sum(p, e)


@jitable
def dd_exp_d(x):
    """exp(x) for a double ``x`` (|x| < 700) as a double-double."""
    k = np.floor(x * INV_LN2 + 0.5)
    p, e = two_prod(k, LN2_HI)
    rh, rl = two_sum(x, -p)
    rl = rl - e - k * LN2_LO
    rh, rl = quick_two_sum(rh, rl)
    # |r| <= ln2/2, scaled by 2**-9 so the Taylor tail is below 1e-33
    rh = rh * 0.001953125
    rl = rl * 0.001953125
    ph = INV_FACT_HI[_N_TAYLOR]
    pl = INV_FACT_LO[_N_TAYLOR]
    for j in range(_N_TAYLOR - 1, 1, -1):
        ph, pl = dd_mul(ph, pl, rh, rl)
        ph, pl = dd_add(ph, pl, INV_FACT_HI[j], INV_FACT_LO[j])
    # expm1(r) = r + r^2 * p
    sh, sl = dd_mul(rh, rl, rh, rl)
    ph, pl = dd_mul(sh, sl, ph, pl)
    qh, ql = dd_add(rh, rl, ph, pl)
    # undo the scaling in expm1 form: q <- q * (q + 2)
    for _ in range(9):
        th, tl = dd_add(qh, ql, 2.0, 0.0)
        qh, ql = dd_mul(qh, ql, th, tl)
    qh, ql = dd_add(1.0, 0.0, qh, ql)
    scale = 2.0 ** k
    return qh * scale, ql * scale


@jitable
def dd_log_d(x):
    """log(x) for a positive double ``x`` as a double-double.

    One Newton step on exp from the libm guess: with ``t = x*exp(-y) - 1``,
    ``log x = y + t - t^2/2 + O(t^3)`` and ``|t|`` is about 1e-16.
    """
    y = np.log(x)
    eh, el = dd_exp_d(-y)
    ph, pl = dd_mul_d(eh, el, x)
    th, tl = dd_add(ph, pl, -1.0, 0.0)
    t = th + tl
    return two_sum(y, t - 0.5 * t * t)


@jitable
def smooth_main_dd(x):
    """``x log x + (2 gamma - 1) x`` as a double-double."""
    lh, ll = dd_log_d(x)
    ah, al = dd_mul_d(lh, ll, x)
    bh, bl = dd_mul_d(LIN_HI, LIN_LO, x)
    return dd_add(ah, al, bh, bl)


@jitable
def delta_from_count(big_d, x, quarter):
    """Delta(x) = D - x log x - (2 gamma - 1) x - quarter, rounded to double.

    ``big_d`` must be a float holding the exact integer D(floor x) (exact
    below 2**53); ``quarter`` is 0.25 or 0.0.
    """
    mh, ml = smooth_main_dd(x)
    rh, rl = dd_add(big_d, 0.0, -mh, -ml)
    rh, rl = dd_add(rh, rl, -quarter, 0.0)
    return rh + rl


@jitable
def dd_sqrt_prod(a, b):
    """sqrt(a*b) for positive doubles as a double-double."""
    ph, pl = two_prod(a, b)
    s = np.sqrt(ph)
    sh, sl = two_prod(s, s)
    rh, rl = dd_add(ph, pl, -sh, -sl)
    c = (rh + rl) / (2.0 * s)
    return quick_two_sum(s, c)


@jitable
def frac_dd(h, l):
    """Fractional part of ``h + l`` in [0, 1) as a double."""
    f = np.floor(h)
    r = (h - f) + l
    return r - np.floor(r)


class Neumaier:
    """Compensated running sum with a deterministic, order-only result."""

    __slots__ = ("total", "comp")

    def __init__(self, total=0.0, comp=0.0):
        self.total = float(total)
        self.comp = float(comp)

    def add(self, value):
        value = float(value)
        t = self.total + value
        if abs(self.total) >= abs(value):
            self.comp += (self.total - t) + value
        else:
            self.comp += (value - t) + self.total
        self.total = t

    def value(self):
        return self.total + self.comp
