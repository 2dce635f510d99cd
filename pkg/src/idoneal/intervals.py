"""Certified interval arithmetic over Fractions.

Comparisons against analytic constants (pi powers, log corrections, zeta
values at odd arguments) are decided through intervals with proven
enclosures.  A comparison that an interval cannot resolve is retried at
higher precision by the caller; nothing here rounds or trusts floats.

Enclosure sources:
  * pi        Machin 16 atan(1/5) - 4 atan(1/239), alternating-series tails
  * ln        range reduction to [1,2) then atanh series with geometric tail
  * zeta(s)   s even: exact pi-power; s odd: Euler-Maclaurin where the
              remainder after the B_{2m} term has the sign of, and is
              bounded by, the first omitted term (derivatives of x^-s have
              constant sign); we double that bound anyway for margin
  * sqrt      integer-sqrt bracketing at the working precision
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .arith import bernoulli_number


class Iv:
    """Closed interval [lo, hi] with Fraction endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        if hi is None:
            hi = lo
        self.lo = Fraction(lo)
        self.hi = Fraction(hi)
        assert self.lo <= self.hi

    def __add__(self, o):
        o = _coerce(o)
        return Iv(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return Iv(-self.hi, -self.lo)

    def __sub__(self, o):
        return self + (-_coerce(o))

    def __rsub__(self, o):
        return _coerce(o) + (-self)

    def __mul__(self, o):
        o = _coerce(o)
        c = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Iv(min(c), max(c))

    __rmul__ = __mul__

    def inv(self):
        assert not self.contains_zero(), "division through zero"
        return Iv(min(1 / self.lo, 1 / self.hi), max(1 / self.lo, 1 / self.hi))

    def __truediv__(self, o):
        return self * _coerce(o).inv()

    def __rtruediv__(self, o):
        return _coerce(o) * self.inv()

    def __pow__(self, n: int):
        if n < 0:
            return (self ** (-n)).inv()
        out = Iv(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def lt(self, x) -> bool:
        """Certainly less than x (a Fraction or Iv)."""
        x = _coerce(x)
        return self.hi < x.lo

    def gt(self, x) -> bool:
        x = _coerce(x)
        return self.lo > x.hi

    def width(self) -> Fraction:
        return self.hi - self.lo

    def rounded(self, bits: int) -> "Iv":
        """Outward rounding to denominator 2^bits, keeps enclosures valid
        while stopping Fraction blowup in long computations."""
        s = 1 << bits
        return Iv(Fraction(math.floor(self.lo * s), s),
                  Fraction(math.ceil(self.hi * s), s))

    def __repr__(self):
        return f"Iv({float(self.lo):.12g}, {float(self.hi):.12g})"


def _coerce(x) -> Iv:
    return x if isinstance(x, Iv) else Iv(Fraction(x))


def _atan_inv(x: int, bits: int) -> Iv:
    """atan(1/x) for integer x >= 2 via the alternating Taylor series."""
    target = Fraction(1, 1 << (bits + 8))
    s = Fraction(0)
    prev = None
    k = 0
    while True:
        term = Fraction(1, (2 * k + 1) * x ** (2 * k + 1))
        s = s + term if k % 2 == 0 else s - term
        if term < target and prev is not None:
            return Iv(min(s, prev), max(s, prev))
        prev = s
        k += 1


@lru_cache(maxsize=None)
def pi_iv(bits: int = 128) -> Iv:
    v = 16 * _atan_inv(5, bits + 6) - 4 * _atan_inv(239, bits + 6)
    return v.rounded(bits + 4)


def _atanh(t: Fraction, bits: int) -> Iv:
    """atanh(t) for 0 <= t <= 1/2, positive series with geometric tail."""
    assert 0 <= t <= Fraction(1, 2)
    if t == 0:
        return Iv(0)
    target = Fraction(1, 1 << (bits + 8))
    s = Fraction(0)
    k = 0
    while True:
        term = t ** (2 * k + 1) / (2 * k + 1)
        s += term
        tail = t ** (2 * k + 3) / ((2 * k + 3) * (1 - t * t))
        if tail < target:
            return Iv(s, s + tail)
        k += 1


@lru_cache(maxsize=None)
def ln2_iv(bits: int = 128) -> Iv:
    return (2 * _atanh(Fraction(1, 3), bits + 6)).rounded(bits + 4)


def ln_iv(x, bits: int = 128) -> Iv:
    """ln(x) for a positive Fraction x."""
    x = Fraction(x)
    assert x > 0
    if x == 1:
        return Iv(0)
    if x < 1:
        return -ln_iv(1 / x, bits)
    # x = 2^e * m with m in [1, 2)
    e = x.numerator.bit_length() - x.denominator.bit_length()
    m = x / Fraction(2) ** e
    if m < 1:
        e -= 1
        m *= 2
    assert 1 <= m < 2
    t = (m - 1) / (m + 1)            # in [0, 1/3)
    v = e * ln2_iv(bits) + 2 * _atanh(t, bits + 6)
    return v.rounded(bits + 4)


@lru_cache(maxsize=None)
def sqrt_iv(x, bits: int = 128) -> Iv:
    """sqrt(x) for a positive Fraction x."""
    x = Fraction(x)
    assert x > 0
    s = 1 << (bits + 4)
    n = x * s * s
    lo = math.isqrt(math.floor(n))
    hi = math.isqrt(math.ceil(n))
    if Fraction(hi * hi) < n:
        hi += 1
    return Iv(Fraction(lo, s), Fraction(hi, s))


@lru_cache(maxsize=None)
def zeta_iv(s: int, bits: int = 128) -> Iv:
    """zeta(s) for an integer s >= 2 by Euler-Maclaurin with N=32 terms."""
    assert s >= 2
    N = 32
    m = 14
    total = Iv(sum(Fraction(1, k ** s) for k in range(1, N)))
    total += Fraction(1, 2 * N ** s)
    total += Fraction(1, (s - 1) * N ** (s - 1))
    # correction terms B_{2j}/(2j)! * (s)(s+1)...(s+2j-2) * N^{-s-2j+1}
    rising = Fraction(1)          # (s)_{2j-1} built incrementally
    for j in range(1, m + 1):
        if j == 1:
            rising = Fraction(s)
        else:
            rising *= (s + 2 * j - 3) * (s + 2 * j - 2)
        term = bernoulli_number(2 * j) / math.factorial(2 * j) \
            * rising / Fraction(N) ** (s + 2 * j - 1)
        total += term
    # first omitted term bounds the remainder; double it for margin
    rising *= (s + 2 * m - 1) * (s + 2 * m)
    bound = abs(bernoulli_number(2 * m + 2)) / math.factorial(2 * m + 2) \
        * rising / Fraction(N) ** (s + 2 * m + 1)
    total += Iv(-2 * bound, 2 * bound)
    return total.rounded(bits + 4)


def _cos_series(x: Iv, bits: int) -> Iv:
    """cos on [0, pi/4]: alternating Taylor sum, first omitted term as tail."""
    target = Fraction(1, 1 << (bits + 8))
    total = Iv(0)
    term = Iv(1)
    k = 0
    while True:
        total = total + term if k % 2 == 0 else total - term
        k += 1
        term = (term * x * x / ((2 * k - 1) * 2 * k)).rounded(bits + 16)
        if term.hi < target:
            return (total + Iv(-term.hi, term.hi)).rounded(bits + 4)


def _sin_series(x: Iv, bits: int) -> Iv:
    target = Fraction(1, 1 << (bits + 8))
    total = Iv(0)
    term = x
    k = 0
    while True:
        total = total + term if k % 2 == 0 else total - term
        k += 1
        term = (term * x * x / (2 * k * (2 * k + 1))).rounded(bits + 16)
        if term.hi < target:
            return (total + Iv(-term.hi, term.hi)).rounded(bits + 4)


@lru_cache(maxsize=None)
def cospi_iv(t, bits: int = 128) -> Iv:
    """cos(pi t) for a rational t.  Argument reduction happens on the exact
    rational, so precision is lost only to the pi enclosure and the series
    tail, never to the folding."""
    t = Fraction(t) % 2
    if t > 1:
        t = 2 - t
    if t > Fraction(1, 2):
        return -cospi_iv(1 - t, bits)
    pi = pi_iv(bits + 8)
    if t > Fraction(1, 4):
        return _sin_series(pi * (Fraction(1, 2) - t), bits)
    return _cos_series(pi * t, bits)


def sinpi_iv(t, bits: int = 128) -> Iv:
    return cospi_iv(Fraction(t) - Fraction(1, 2), bits)
