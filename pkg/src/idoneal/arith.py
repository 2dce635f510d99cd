"""Scalar number theory: factorization, Kronecker symbols, Bernoulli numbers,
exact special values of zeta and of quadratic Dirichlet L-functions.

Everything here returns exact objects (int, Fraction, ExactVal).  sympy does
the factoring and supplies Bernoulli numbers/polynomials; the L-value and
zeta assembly is ours because we need the results in the ring Q[pi, sqrt p]
rather than as floating point.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from sympy import bernoulli as _sym_bernoulli
from sympy import factorint as _sym_factorint
from sympy import isprime, primerange
from sympy import Rational as _Rat
from sympy.functions.combinatorial.numbers import jacobi_symbol as _jacobi

__all__ = [
    "factorint", "factor_fraction", "valuation", "prime_divisors",
    "kronecker", "legendre", "squarefree_part", "fundamental_discriminant",
    "bernoulli_number", "bernoulli_poly", "gen_bernoulli",
    "zeta_even", "dirichlet_L", "gamma_half",
    "class_number_imag", "unit_count_imag",
    "isprime", "primerange",
]


def factorint(n: int) -> dict:
    """Prime factorization of a nonzero integer as {p: e} (sign dropped)."""
    n = int(n)
    assert n != 0
    return {int(p): int(e) for p, e in _sym_factorint(abs(n)).items()}


def factor_fraction(x) -> dict:
    """Factorization {p: e} of a positive rational, e negative on denominator."""
    x = Fraction(x)
    assert x > 0
    out = factorint(x.numerator) if x.numerator != 1 else {}
    for p, e in (factorint(x.denominator) if x.denominator != 1 else {}).items():
        out[p] = out.get(p, 0) - e
    return out


def valuation(x, p: int) -> int:
    """p-adic valuation of a nonzero int or Fraction."""
    if isinstance(x, Fraction):
        return valuation(x.numerator, p) - valuation(x.denominator, p)
    x = int(x)
    assert x != 0
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def prime_divisors(n: int) -> list:
    return sorted(factorint(n))


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a/n), defined for all integers n."""
    a, n = int(a), int(n)
    if n == 0:
        return 1 if a in (1, -1) else 0
    res = 1
    if n < 0:
        n = -n
        if a < 0:
            res = -res
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        e = (n & -n).bit_length() - 1
        n >>= e
        if e % 2 == 1 and a % 8 in (3, 5):
            res = -res
    if n == 1:
        return res
    return res * int(_jacobi(a % n, n))


def legendre(a: int, p: int) -> int:
    """Legendre symbol for an odd prime p (0 if p | a)."""
    assert p > 2
    return kronecker(a, p)


def squarefree_part(n: int) -> int:
    """The squarefree integer m with n = m * square, sign of n kept."""
    n = int(n)
    assert n != 0
    m = 1 if n > 0 else -1
    for p, e in factorint(n).items():
        if e % 2:
            m *= p
    return m


def fundamental_discriminant(D: int) -> int:
    """The fundamental discriminant d0 with D = d0 * f^2.

    D must be a discriminant, i.e. congruent to 0 or 1 mod 4 (D=1 allowed,
    giving the trivial character).
    """
    D = int(D)
    assert D != 0 and D % 4 in (0, 1), f"not a discriminant: {D}"
    m = squarefree_part(D)
    d0 = m if m % 4 == 1 else 4 * m
    q, r = divmod(D, d0)
    assert r == 0 and math.isqrt(q) ** 2 == q
    return d0


def field_discriminant(D: int) -> int:
    """Discriminant of the quadratic field Q(sqrt(D)), or 1 if D is square.

    Unlike :func:`fundamental_discriminant` this accepts any nonzero D;
    only its squarefree part matters.  field_discriminant(-1) == -4.
    """
    m = squarefree_part(int(D))
    return m if m % 4 == 1 else 4 * m


# -- Bernoulli machinery ----------------------------------------------------

@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """B_n for even n (the only ones we need; odd n>1 vanish anyway)."""
    assert n >= 0 and (n % 2 == 0 or n == 1)
    if n == 1:
        return Fraction(-1, 2)
    v = _sym_bernoulli(n)
    return Fraction(int(v.p), int(v.q))


def bernoulli_poly(n: int, x: Fraction) -> Fraction:
    """B_n(x) at a rational point, exactly."""
    v = _sym_bernoulli(n, _Rat(x.numerator, x.denominator))
    v = _Rat(v)
    return Fraction(int(v.p), int(v.q))


@lru_cache(maxsize=None)
def gen_bernoulli(n: int, d0: int) -> Fraction:
    """Generalized Bernoulli number B_{n,chi} for the quadratic character
    chi = (d0/.) of a fundamental discriminant d0 != 1."""
    assert d0 == fundamental_discriminant(d0) and d0 != 1
    f = abs(d0)
    total = Fraction(0)
    for a in range(1, f + 1):
        c = kronecker(d0, a)
        if c:
            total += c * bernoulli_poly(n, Fraction(a, f))
    return Fraction(f) ** (n - 1) * total


# -- Exact special values ---------------------------------------------------

def zeta_even(n: int):
    """zeta(n) for even n >= 2 as an ExactVal (rational times pi^n)."""
    from .exactval import ExactVal
    assert n >= 2 and n % 2 == 0
    rat = Fraction((-1) ** (n // 2 + 1)) * bernoulli_number(n) \
        * Fraction(2) ** n / (2 * math.factorial(n))
    return ExactVal(rat, pi_half=2 * n)


def dirichlet_L(s: int, d0: int):
    """L(s, chi_{d0}) exactly, for the primitive quadratic character of the
    fundamental discriminant d0 and s >= 1 of matching parity.

    Returns an ExactVal of the shape  rational * pi^s / sqrt(|d0|).
    Matching parity means s even for d0 > 0 and s odd for d0 < 0; those are
    the arguments where the value is a nonzero algebraic multiple of pi^s.
    """
    from .exactval import ExactVal
    assert d0 == fundamental_discriminant(d0)
    if d0 == 1:
        raise ValueError("use zeta for the trivial character")
    delta = 0 if d0 > 0 else 1
    assert s >= 1 and (s - delta) % 2 == 0, (s, d0)
    f = abs(d0)
    B = gen_bernoulli(s, d0)
    rat = Fraction((-1) ** (1 + (s - delta) // 2)) * Fraction(2) ** s * B \
        / (2 * Fraction(f) ** s * math.factorial(s))
    return ExactVal(rat, pi_half=2 * s) * ExactVal.sqrt_of(f)


def gamma_half(j: int):
    """Gamma(j/2) for a positive integer j, as an ExactVal."""
    from .exactval import ExactVal
    assert j >= 1
    if j % 2 == 0:
        return ExactVal(math.factorial(j // 2 - 1))
    k = (j - 1) // 2
    rat = Fraction(math.factorial(2 * k), 4 ** k * math.factorial(k))
    return ExactVal(rat, pi_half=1)


# -- Imaginary quadratic class numbers --------------------------------------

@lru_cache(maxsize=None)
def class_number_imag(d0: int) -> int:
    """h(d0) for a fundamental discriminant d0 < 0, by counting reduced
    binary forms (a, b, c) with b^2 - 4ac = d0."""
    assert d0 < 0 and d0 == fundamental_discriminant(d0)
    h = 0
    b = d0 % 2
    while b * b <= -d0 // 3:
        ac4 = b * b - d0
        if ac4 % 4 == 0:
            ac = ac4 // 4
            a = max(b, 1)
            while a * a <= ac:
                if a and ac % a == 0:
                    c = ac // a
                    # reduced: |b| <= a <= c, and b >= 0 when |b|=a or a=c
                    h += 1                      # the b >= 0 form
                    if 0 < b < a and a < c:
                        h += 1                  # its distinct b < 0 partner
                a += 1
        b += 2
    return h


def unit_count_imag(d0: int) -> int:
    """Number of units in the quadratic order of discriminant d0 < 0."""
    assert d0 < 0
    return 6 if d0 == -3 else 4 if d0 == -4 else 2
