"""Genus symbols of integral lattices and the exact mass formula.

A genus is stored as a signature pair plus one canonical local symbol per
relevant prime: always p = 2, and every odd p dividing the determinant.
Local symbols use the block format of :mod:`idoneal.symbols`, so symbol
equality is genus equality.

Masses are assembled as

    mass(g) = std_global(n, d) * prod_{p | 2d} mass_p(g) / std_p(n)

where the global factor folds the archimedean term and the standard local
values at the remaining primes into zeta and L-values, all kept exact.
"""

import re
from fractions import Fraction
from itertools import product as _iproduct
from typing import NamedTuple

from . import symbols as S
from .arith import (dirichlet_L, field_discriminant, gamma_half, kronecker,
                    prime_divisors, valuation, zeta_even)
from .exactval import ExactVal
from .lattices import IntLattice, jordan_decomposition


class GenusSymbol:
    """Genus of a nondegenerate integral lattice.

    ``sig`` is the pair (s+, s-); ``local`` maps each stored prime to its
    canonical block tuple.  Instances are immutable and hashable.
    """

    __slots__ = ("sig", "local", "_key")

    def __init__(self, sig, local):
        sp, sm = sig
        if sp < 0 or sm < 0:
            raise ValueError("negative signature entries")
        self.sig = (int(sp), int(sm))
        loc = {}
        for p, blocks in local.items():
            loc[int(p)] = tuple(tuple(b) for b in blocks)
        if 2 not in loc:
            raise ValueError("2-adic symbol is mandatory")
        self.local = loc
        self._key = (self.sig, tuple(sorted(loc.items())))
        self._validate()

    # -- derived data --------------------------------------------------------

    @property
    def rank(self) -> int:
        return self.sig[0] + self.sig[1]

    @property
    def det(self) -> int:
        d = 1
        for p, blocks in self.local.items():
            d *= p ** sum(b[0] * b[1] for b in blocks)
        return d if self.sig[1] % 2 == 0 else -d

    @property
    def is_even(self) -> bool:
        for b in self.local[2]:
            if b[0] == 0 and b[1] and b[3] == "I":
                return False
        return True

    @property
    def is_definite(self) -> bool:
        return 0 in self.sig

    # -- bookkeeping ---------------------------------------------------------

    def _validate(self):
        n = self.rank
        det = self.det
        for p, blocks in self.local.items():
            if sum(b[1] for b in blocks) != n:
                raise ValueError(f"rank mismatch in {p}-adic symbol")
            if any(b[0] < 0 or b[1] <= 0 for b in blocks):
                raise ValueError(f"bad block in {p}-adic symbol")
            v = sum(b[0] * b[1] for b in blocks)
            unit = det // p ** v
            if p == 2:
                if any(blocks[i][0] >= blocks[i + 1][0]
                       for i in range(len(blocks) - 1)):
                    raise ValueError("2-adic scales not strictly ascending")
                cls = 1
                in_comp = set()
                for ci in S.compartments(blocks):
                    in_comp.update(ci)
                    shape = tuple(blocks[i][:3] for i in ci)
                    if any(blocks[i][4] for i in ci[1:]):
                        raise ValueError("oddity off the compartment leader")
                    c = S.compartment_det_class(shape, blocks[ci[0]][4])
                    if c is None:
                        raise ValueError(f"invalid compartment label {shape}")
                    cls = cls * c % 8
                for i, b in enumerate(blocks):
                    if i in in_comp:
                        continue
                    if b[3] != "II" or not S.is_valid_block_2(b[1], b[2], b[3], b[4]):
                        raise ValueError(f"unrealizable 2-adic block {b}")
                    cls = cls * S.det_class_2(b[1], b[2], b[3], b[4]) % 8
                if cls != unit % 8:
                    raise ValueError("2-adic determinant class mismatch")
            else:
                sign = 1
                for b in blocks:
                    sign *= b[2]
                if sign != kronecker(unit, p):
                    raise ValueError(f"{p}-adic determinant sign mismatch")
                if v == 0:
                    raise ValueError(f"superfluous {p}-adic symbol")
        if n and self._oddity_defect() != 0:
            raise ValueError("no genus with these local symbols exists")

    def _oddity_defect(self) -> int:
        """Left minus right side of the global existence condition, mod 8."""
        rhs = self.sig[0] - self.sig[1]
        for p, blocks in self.local.items():
            if p != 2:
                rhs += S.excess_odd(blocks, p)
        return (S.total_oddity(self.local[2]) - rhs) % 8

    def __eq__(self, other):
        return isinstance(other, GenusSymbol) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"GenusSymbol({format_genus(self)!r})"

    def sort_key(self):
        return self._key

    def positive_scale_blocks(self):
        """Per-prime blocks at scale >= 1; the discriminant form data."""
        out = {}
        for p, blocks in self.local.items():
            kept = tuple(b for b in blocks if b[0] >= 1)
            if kept:
                out[p] = kept
        return out


def genus_of(lat: IntLattice) -> GenusSymbol:
    """Genus symbol of a nondegenerate integral lattice."""
    local = {2: S.canonical_two(jordan_decomposition(lat, 2))}
    for p in prime_divisors(abs(lat.det)):
        if p != 2:
            local[p] = S.canonical_odd(jordan_decomposition(lat, p))
    return GenusSymbol(lat.signature, local)


def negate(g: GenusSymbol) -> GenusSymbol:
    """Genus of L(-1) for L in g."""
    local = {}
    for p, blocks in g.local.items():
        if p == 2:
            nb = [(b[0], b[1], b[2], b[3], (-b[4]) % 8) for b in blocks]
            local[2] = S.canonical_two(nb)
        else:
            u = kronecker(-1, p)
            nb = [(b[0], b[1], b[2] * u ** (b[1] % 2)) for b in blocks]
            local[p] = S.canonical_odd(nb)
    return GenusSymbol((g.sig[1], g.sig[0]), local)


# -- text form ---------------------------------------------------------------

_BLOCK_RE = re.compile(r"^(\d+)\^([+-])(\d+)(?:_(\d+)|(e))?$")


def _format_blocks(p, blocks):
    parts = []
    for b in blocks:
        q = p ** b[0]
        sign = "+" if b[2] == 1 else "-"
        if p == 2:
            tag = "e" if b[3] == "II" else f"_{b[4]}"
            parts.append(f"{q}^{sign}{b[1]}{tag}")
        else:
            parts.append(f"{q}^{sign}{b[1]}")
    return f"{p}:" + ",".join(parts)


def format_genus(g: GenusSymbol) -> str:
    """Readable one-line form, e.g. ``II_(0,8) 2:1^+8e``."""
    head = ("II" if g.is_even else "I") + f"_({g.sig[0]},{g.sig[1]})"
    parts = [head]
    for p in sorted(g.local):
        if g.local[p]:
            parts.append(_format_blocks(p, g.local[p]))
    return " ".join(parts)


def parse_genus(text: str) -> GenusSymbol:
    """Inverse of :func:`format_genus`."""
    toks = text.split()
    if not toks:
        raise ValueError("empty genus text")
    m = re.match(r"^(I|II)_\((\d+),(\d+)\)$", toks[0])
    if not m:
        raise ValueError(f"bad genus header {toks[0]!r}")
    sig = (int(m.group(2)), int(m.group(3)))
    local = {2: ()}
    for tok in toks[1:]:
        if ":" not in tok:
            raise ValueError(f"bad prime part {tok!r}")
        ptxt, rest = tok.split(":", 1)
        p = int(ptxt)
        blocks = []
        for btxt in rest.split(","):
            bm = _BLOCK_RE.match(btxt)
            if not bm:
                raise ValueError(f"bad block {btxt!r}")
            q, sign, dim = int(bm.group(1)), bm.group(2), int(bm.group(3))
            scale = valuation(q, p) if q > 1 else 0
            if p ** scale != q:
                raise ValueError(f"scale {q} is not a power of {p}")
            eps = 1 if sign == "+" else -1
            if p == 2:
                if bm.group(5):
                    blocks.append((scale, dim, eps, "II", 0))
                elif bm.group(4) is not None:
                    blocks.append((scale, dim, eps, "I", int(bm.group(4)) % 8))
                else:
                    raise ValueError(f"2-adic block {btxt!r} lacks a type tag")
            else:
                if bm.group(4) is not None or bm.group(5):
                    raise ValueError(f"odd block {btxt!r} has a type tag")
                blocks.append((scale, dim, eps))
        local[p] = (S.canonical_two(blocks) if p == 2
                    else S.canonical_odd(blocks))
    g = GenusSymbol(sig, local)
    if (m.group(1) == "II") != g.is_even:
        raise ValueError("parity tag contradicts the 2-adic symbol")
    return g


# -- local and global masses -------------------------------------------------

class PMass(NamedTuple):
    value: ExactVal
    diagonal: Fraction
    cross: ExactVal
    type2: Fraction


def _blocks_at(g: GenusSymbol, p: int):
    if p in g.local:
        return g.local[p]
    return ((0, g.rank, kronecker(g.det, p)),)


def p_mass(g: GenusSymbol, p: int) -> PMass:
    """Local mass at p with its diagonal, cross and type factors."""
    if g.rank == 0:
        one = ExactVal(Fraction(1))
        return PMass(one, Fraction(1), one, Fraction(1))
    blocks = _blocks_at(g, p)
    diag = S.diagonal_factor(blocks, p)
    cross = S.cross_factor(blocks, p)
    typ = S.type_factor_two(blocks) if p == 2 else Fraction(1)
    return PMass(ExactVal(diag) * cross * ExactVal(typ), diag, cross, typ)


def standard_p_mass(g: GenusSymbol, p: int) -> Fraction:
    """The standard value taken by mass_p at every p not dividing 2 det."""
    n = g.rank
    base = S.std_p(p, n)
    if n % 2 == 0:
        s = n // 2
        D = (-1) ** s * g.det
        base /= 1 - kronecker(D, p) * Fraction(p) ** (-s)
    return base


def _std_global(n: int, det: int) -> ExactVal:
    s = (n + 1) // 2
    val = ExactVal(Fraction(2), pi_half=-(n * (n + 1)) // 2)
    for j in range(1, n + 1):
        val = val * gamma_half(j)
    for k in range(1, s):
        val = val * zeta_even(2 * k)
    if n % 2 == 0:
        D = (-1) ** s * det
        d0 = field_discriminant(D)
        val = val * (zeta_even(s) if d0 == 1 else dirichlet_L(s, d0))
        for p in prime_divisors(2 * abs(det)):
            val = val * ExactVal(1 - kronecker(d0, p) * Fraction(p) ** (-s))
    return val


def mass(g: GenusSymbol) -> Fraction:
    """Exact mass of a definite genus."""
    if not g.is_definite:
        raise ValueError("mass is only defined for definite genera")
    if g.sig[0] == 0 and g.sig[1] > 0:
        g = negate(g)
    n = g.rank
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(1, 2)
    val = _std_global(n, g.det)
    for p in prime_divisors(2 * abs(g.det)):
        val = val * p_mass(g, p).value / ExactVal(S.std_p(p, n))
    return val.to_fraction()


# -- the extra [1] summand ---------------------------------------------------

def add_one(g: GenusSymbol) -> GenusSymbol:
    """Genus of [1] + L for L in g, computed on symbols."""
    local = {}
    for p, blocks in g.local.items():
        if p == 2:
            local[p] = S.add_unit_two(blocks)
        else:
            local[p] = S.add_unit_odd(blocks)
    return GenusSymbol((g.sig[0] + 1, g.sig[1]), local)


def twigs(f: GenusSymbol):
    """All genera g with add_one(g) == f; at most two exist."""
    if f.rank == 0 or f.sig[0] == 0:
        return []
    sig = (f.sig[0] - 1, f.sig[1])
    out = [g for g in enumerate_genera(f.rank - 1, f.det, sig)
           if add_one(g) == f]
    assert len(out) <= 2, f"more than two twigs of {f}"
    return out


# -- enumeration -------------------------------------------------------------

def enumerate_genera(rank: int, det: int, signature=None, parity=None):
    """All genera with the given rank, determinant and signature.

    ``parity`` restricts to "even" or "odd" lattices; None keeps both.
    The result is sorted by canonical symbol, so the order is reproducible.
    """
    if det == 0:
        raise ValueError("determinant must be nonzero")
    if signature is None:
        if det < 0:
            raise ValueError("signature required for indefinite determinants")
        signature = (rank, 0)
    sp, sm = signature
    if sp < 0 or sm < 0 or sp + sm != rank:
        raise ValueError("signature inconsistent with rank")
    if (-1) ** sm != (1 if det > 0 else -1):
        raise ValueError("determinant sign inconsistent with signature")
    if parity not in (None, "even", "odd"):
        raise ValueError(f"bad parity filter {parity!r}")
    if rank == 0:
        if abs(det) != 1:
            return []
        return [] if parity == "odd" else [GenusSymbol((0, 0), {2: ()})]

    d = abs(det)
    v2 = valuation(d, 2)
    cands2 = []
    for raw in S.local_symbols_two(rank, v2, (det // 2 ** v2) % 8):
        scale0 = next((b for b in raw if b[0] == 0), None)
        even = scale0 is None or scale0[3] == "II"
        if parity == "even" and not even:
            continue
        if parity == "odd" and even:
            continue
        cands2.append((S.total_oddity(raw), raw))

    odd_ps = [p for p in prime_divisors(d) if p != 2]
    per_odd = []
    for p in odd_ps:
        vp = valuation(d, p)
        unit_sign = kronecker(det // p ** vp, p)
        per_odd.append([(S.excess_odd(raw, p), raw)
                        for raw in S.local_symbols_odd(p, rank, vp, unit_sign)])

    found = {}
    for combo in _iproduct(*per_odd):
        rhs = (sp - sm + sum(exc for exc, _ in combo)) % 8
        for odd2, raw2 in cands2:
            if odd2 % 8 != rhs:
                continue
            local = {2: S.canonical_two(raw2)}
            for p, (_, rawp) in zip(odd_ps, combo):
                local[p] = S.canonical_odd(rawp)
            g = GenusSymbol(signature, local)
            found[g.sort_key()] = g
    return [found[k] for k in sorted(found)]


# -- mass comparison ---------------------------------------------------------

class MassRatio(NamedTuple):
    value: Fraction          # mass(add_one(g)) / mass(g)
    prefactor: ExactVal      # pi^(-(n+1)/2) Gamma((n+1)/2)
    A: Fraction              # 2-adic diagonal ratio
    B: Fraction              # odd p | d diagonal ratios
    C: ExactVal              # remaining primes, exact residual
    D: ExactVal              # cross ratio, equals sqrt(det)
    E: Fraction              # 2-adic type ratio


def mass_ratio(g: GenusSymbol) -> MassRatio:
    """mass(add_one(g))/mass(g) with its factor decomposition."""
    gt = add_one(g)
    value = mass(gt) / mass(g)
    n = g.rank
    pref = gamma_half(n + 1) * ExactVal(Fraction(1), pi_half=-(n + 1))
    A = S.diagonal_factor(gt.local[2], 2) / S.diagonal_factor(g.local[2], 2)
    B = Fraction(1)
    D = ExactVal(Fraction(1))
    for p in sorted(g.local):
        D = D * S.cross_factor(gt.local[p], p) / S.cross_factor(g.local[p], p)
        if p != 2:
            B *= S.diagonal_factor(gt.local[p], p) / S.diagonal_factor(g.local[p], p)
    E = S.type_factor_two(gt.local[2]) / S.type_factor_two(g.local[2])
    C = ExactVal(value) / (pref * ExactVal(A) * ExactVal(B) * D * ExactVal(E))
    return MassRatio(value, pref, A, B, C, D, E)
