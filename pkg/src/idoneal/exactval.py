"""Exact real numbers of the shape  q * pi^(a/2) * sqrt(r).

Mass formulas mix rationals with half-integer powers of pi and square roots
of integers (local cross terms contribute p^(1/2), the analytic factor
contributes pi^(n(n+1)/4) and Gamma(1/2)).  All of those live in the ring

    Q[pi^(1/2), 2^(1/2), 3^(1/2), 5^(1/2), ...]

and every quantity we ever need to *output* collapses back to Q.  ExactVal
tracks the rational part plus half-exponents of pi and of each prime, so the
collapse can be asserted instead of hoped for.
"""

from __future__ import annotations

from fractions import Fraction

from . import arith


class ExactVal:
    """q * pi^(pi_half/2) * prod_p p^(half[p]/2), all exponents integers.

    Normalized so that every stored prime exponent is odd (even parts are
    folded into the rational factor) and q carries the sign.
    """

    __slots__ = ("rat", "pi_half", "half")

    def __init__(self, rat=1, pi_half=0, half=None):
        rat = Fraction(rat)
        h = {}
        if half:
            for p, e in half.items():
                if e == 0:
                    continue
                h[p] = h.get(p, 0) + e
        # fold even half-exponents of primes into the rational part
        for p in list(h):
            e = h[p]
            if e % 2 == 0:
                rat *= Fraction(p) ** (e // 2)
                del h[p]
            else:
                keep = 1 if e > 0 else -1
                rat *= Fraction(p) ** ((e - keep) // 2)
                h[p] = keep
        self.rat = rat
        self.pi_half = int(pi_half)
        self.half = h
        if self.rat == 0:
            self.pi_half = 0
            self.half = {}

    @classmethod
    def sqrt_of(cls, x) -> "ExactVal":
        """The positive square root of a positive rational."""
        x = Fraction(x)
        assert x > 0, "sqrt_of needs a positive rational"
        half = {}
        for p, e in arith.factor_fraction(x).items():
            half[p] = e
        return cls(1, 0, half)

    # -- arithmetic ---------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, ExactVal):
            h = dict(self.half)
            for p, e in other.half.items():
                h[p] = h.get(p, 0) + e
            return ExactVal(self.rat * other.rat, self.pi_half + other.pi_half, h)
        return ExactVal(self.rat * Fraction(other), self.pi_half, self.half)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ExactVal):
            return self * other.inv()
        return ExactVal(self.rat / Fraction(other), self.pi_half, self.half)

    def __rtruediv__(self, other):
        return ExactVal(Fraction(other)) / self

    def inv(self) -> "ExactVal":
        assert self.rat != 0
        return ExactVal(1 / self.rat, -self.pi_half,
                        {p: -e for p, e in self.half.items()})

    def __pow__(self, n: int):
        n = int(n)
        if n == 0:
            return ExactVal(1)
        base = self if n > 0 else self.inv()
        out = ExactVal(1)
        for _ in range(abs(n)):
            out = out * base
        return out

    def __neg__(self):
        return ExactVal(-self.rat, self.pi_half, self.half)

    # -- predicates / conversion -------------------------------------------

    @property
    def is_rational(self) -> bool:
        return self.pi_half == 0 and not self.half

    def to_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"not rational: {self!r}")
        return self.rat

    def __eq__(self, other):
        if isinstance(other, ExactVal):
            return (self.rat == other.rat and self.pi_half == other.pi_half
                    and self.half == other.half)
        if self.is_rational:
            return self.rat == other
        return NotImplemented

    def __hash__(self):
        return hash((self.rat, self.pi_half, tuple(sorted(self.half.items()))))

    def __repr__(self):
        parts = [str(self.rat)]
        if self.pi_half:
            parts.append(f"pi^({self.pi_half}/2)")
        for p, e in sorted(self.half.items()):
            parts.append(f"{p}^({e}/2)")
        return " * ".join(parts)


ONE = ExactVal(1)
