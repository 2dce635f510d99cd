"""Finite quadratic forms q: A -> Q/2Z with nondegenerate polarization.

A form is stored as a multiset of elementary blocks:

    ("w", p, k, e)   cyclic of order p^k.  For p = 2 the generator takes
                     the value e/2^k (e odd, and only e mod 4 matters when
                     k = 1); for odd p it takes c/p^k with c the smallest
                     positive even integer prime to p of Legendre class e.
    ("u", k)         hyperbolic plane on (Z/2^k)^2, values 2xy/2^k.
    ("v", k)         the other even rank-2 form there, 2(x^2+xy+y^2)/2^k.

Isomorphism and normal forms route through the local symbol machinery in
symbols.py: the blocks map to 2-adic and odd-p Jordan data, which is
canonicalized per prime.  On top of the lattice-level identifications one
extra relation holds for forms only: a level-2 generator value is defined
mod 4, so an odd block there may trade sign class against oddity,
(eps, t) ~ (-eps, t+4).  The elementary multiset written back out is the
lexicographically least realization of the canonical data.

The signature mod 8 is the argument of the Gauss sum G(q) = sum_x e(q(x)/2),
which is sqrt|A| times an eighth root of unity (Milgram).  Each block's sum
is held exactly as an integer vector over powers of zeta_M, and the eighth
root is identified by a divisibility test against the M-th cyclotomic
polynomial; no floating point is involved.
"""

from __future__ import annotations

import itertools
import math
import re
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from . import symbols as S
from .arith import isprime, kronecker, prime_divisors, valuation
from .genus import GenusSymbol
from .lattices import IntLattice, jordan_decomposition

_UNITS = (1, 3, 5, 7)


def _norm_block(b):
    """Validate one elementary block and normalize its unit class."""
    if not isinstance(b, tuple) or not b:
        raise ValueError(f"malformed block {b!r}")
    kind = b[0]
    if kind in ("u", "v"):
        if len(b) != 2 or not isinstance(b[1], int) or b[1] < 1:
            raise ValueError(f"malformed block {b!r}")
        return (kind, b[1])
    if kind != "w" or len(b) != 4:
        raise ValueError(f"malformed block {b!r}")
    _, p, k, e = b
    if not isinstance(p, int) or not isprime(p) or not isinstance(k, int) or k < 1:
        raise ValueError(f"malformed block {b!r}")
    if p == 2:
        e %= 8
        if e % 2 == 0:
            raise ValueError(f"unit class of {b!r} is even")
        if k == 1:
            e %= 4
        return ("w", 2, k, e)
    if kronecker(e, p) == 0:
        raise ValueError(f"unit class of {b!r} is divisible by {p}")
    return ("w", p, k, kronecker(e, p))


def _block_key(b):
    if b[0] == "w":
        return (b[1], b[2], 2, b[3] % 8)
    return (2, b[1], 0 if b[0] == "u" else 1, 0)


def _block_order(b) -> int:
    return 4 ** b[1] if b[0] in ("u", "v") else b[1] ** b[2]


class TorsionForm:
    """A finite quadratic form as an immutable multiset of blocks."""

    __slots__ = ("blocks",)

    def __init__(self, blocks=()):
        self.blocks = tuple(sorted((_norm_block(b) for b in blocks),
                                   key=_block_key))

    def __eq__(self, other):
        return isinstance(other, TorsionForm) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __add__(self, other):
        if not isinstance(other, TorsionForm):
            return NotImplemented
        return TorsionForm(self.blocks + other.blocks)

    def __rmul__(self, n):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        return TorsionForm(self.blocks * n)

    def __repr__(self):
        return f"TorsionForm({format_form(self)!r})"

    @property
    def order(self) -> int:
        n = 1
        for b in self.blocks:
            n *= _block_order(b)
        return n

    def primes(self):
        return sorted({b[1] if b[0] == "w" else 2 for b in self.blocks})


def elementary(kind, p=2, k=1, eps=1) -> TorsionForm:
    """A single elementary block; kind is "u", "v" or "w"."""
    if kind in ("u", "v"):
        if p != 2:
            raise ValueError("u and v blocks live at p = 2")
        return TorsionForm([(kind, k)])
    return TorsionForm([("w", p, k, eps)])


def direct_sum(q: TorsionForm, q2: TorsionForm) -> TorsionForm:
    return q + q2


def negate(q: TorsionForm) -> TorsionForm:
    """The form -q on the same group."""
    out = []
    for b in q.blocks:
        if b[0] == "w":
            _, p, k, e = b
            out.append(("w", p, k, -e if p == 2 else e * kronecker(-1, p)))
        else:
            out.append(b)
    return TorsionForm(out)


# ---------------------------------------------------------------- symbols

def _genus_raws(q: TorsionForm) -> dict:
    """Jordan-style block data per prime, one entry per elementary block."""
    raws = {}
    for b in q.blocks:
        if b[0] == "u":
            raws.setdefault(2, []).append((b[1], 2, 1, "II", 0))
        elif b[0] == "v":
            raws.setdefault(2, []).append((b[1], 2, -1, "II", 0))
        elif b[1] == 2:
            e = b[3] % 8
            raws.setdefault(2, []).append(
                (b[2], 1, 1 if e in (1, 7) else -1, "I", e))
        else:
            raws.setdefault(b[1], []).append((b[2], 1, b[3]))
    return raws


def _collapse_two(blocks):
    """Normalize a canonical 2-adic symbol by the level-2 identification
    (eps, t) ~ (-eps, t+4).  A level-2 odd block is always the leader of
    its compartment here (all scales are >= 1), so its stored oddity is
    the compartment total and the trade is a plain rewrite."""
    out = []
    for b in blocks:
        if b[0] == 1 and b[3] == "I" and b[2] == -1:
            out.append((1, b[1], 1, "I", (b[4] + 4) % 8))
        else:
            out.append(tuple(b))
    return tuple(out)


def _genus_data(q: TorsionForm) -> dict:
    """Canonical local symbol data per prime; a complete invariant."""
    data = {}
    for p, raw in _genus_raws(q).items():
        if p == 2:
            data[2] = _collapse_two(S.canonical_two(raw))
        else:
            data[p] = S.canonical_odd(raw)
    return data


@lru_cache(maxsize=None)
def _compartment_units(shape, total):
    """Lexicographically least per-level unit multisets whose w-blocks
    realize a fused compartment label, found by re-canonicalizing the
    candidates.  Every valid label has one."""
    target = tuple((sc, n, e, "I", total if i == 0 else 0)
                   for i, (sc, n, e) in enumerate(shape))
    pools = []
    for sc, n, _ in shape:
        alphabet = (1, 3) if sc == 1 else _UNITS
        pools.append(list(itertools.combinations_with_replacement(alphabet, n)))
    for combo in itertools.product(*pools):
        raw = []
        for (sc, n, _), units in zip(shape, combo):
            cls = 1
            for u in units:
                cls = cls * u % 8
            raw.append((sc, n, 1 if cls in (1, 7) else -1, "I",
                        sum(units) % 8))
        if _collapse_two(S.canonical_two(raw)) == target:
            return combo
    raise AssertionError(f"label {(shape, total)} has no elementary form")


def _elementary_two(blocks):
    out = []
    comps = S.compartments(blocks)
    fused = {i for c in comps for i in c}
    for i, b in enumerate(blocks):
        if i in fused:
            continue
        k, n, eps = b[0], b[1], b[2]
        out += [("v", k)] * (eps == -1)
        out += [("u", k)] * (n // 2 - (eps == -1))
    for c in comps:
        shape = tuple(blocks[i][:3] for i in c)
        units = _compartment_units(shape, blocks[c[0]][4])
        for (sc, _, _), us in zip(shape, units):
            out += [("w", 2, sc, u) for u in us]
    return out


def _elementary_odd(p, blocks):
    out = []
    for k, n, eps in blocks:
        out += [("w", p, k, 1)] * (n - 1)
        out.append(("w", p, k, eps))
    return out


def normal_form(q: TorsionForm) -> TorsionForm:
    """Canonical representative of the isomorphism class."""
    out = []
    for p, blocks in sorted(_genus_data(q).items()):
        out += _elementary_two(blocks) if p == 2 else _elementary_odd(p, blocks)
    return TorsionForm(out)


def is_isomorphic(q: TorsionForm, q2: TorsionForm) -> bool:
    return _genus_data(q) == _genus_data(q2)


# ------------------------------------------------------------- invariants

def ell_p(q: TorsionForm, p: int) -> int:
    """Minimal number of generators of the p-part."""
    n = 0
    for b in q.blocks:
        if b[0] == "w":
            n += b[1] == p
        elif p == 2:
            n += 2
    return n


def parity(q: TorsionForm) -> str:
    """"odd" when some element has half-integer value, else "even"."""
    return "odd" if any(b[0] == "w" and b[1] == 2 and b[2] == 1
                        for b in q.blocks) else "even"


@lru_cache(maxsize=None)
def _block_values(b):
    """Value tally {q(x) in Q/2Z: multiplicity} over the block's group."""
    tally = Counter()
    if b[0] == "w":
        _, p, k, e = b
        if p == 2:
            for x in range(2 ** k):
                tally[Fraction(e * x * x, 2 ** k) % 2] += 1
        else:
            c = 2
            while c % p == 0 or kronecker(c, p) != e:
                c += 2
            for x in range(p ** k):
                tally[Fraction(c * x * x, p ** k) % 2] += 1
    else:
        m = 2 ** b[1]
        for x in range(m):
            for y in range(m):
                v = 2 * x * y if b[0] == "u" else 2 * (x * x + x * y + y * y)
                tally[Fraction(v, m) % 2] += 1
    return tally


def _vanishes(vec, M, p) -> bool:
    """Whether sum_e vec[e] zeta_M^e = 0.  Only M = 2^m and M = 8 p^k occur
    here, and both cyclotomic reductions have closed form: zeta^(M/2) = -1
    in the first case, and in the second the zeta_8 factor reduces the same
    way while the p^k factor folds by the relation that the p-th powers of
    zeta_{p^k} sum over each residue class to zero."""
    if p == 2:
        half = M // 2
        c = [0] * half
        for e, x in vec.items():
            e %= M
            if e < half:
                c[e] += x
            else:
                c[e - half] -= x
        return not any(c)
    pk = M // 8
    inv8 = pow(8, -1, pk)
    invp = pow(pk, -1, 8)
    c = [[0] * pk for _ in range(4)]
    for e, x in vec.items():
        i = e * invp % 8
        j = e * inv8 % pk
        if i >= 4:
            c[i - 4][j] -= x
        else:
            c[i][j] += x
    q = pk // p
    for i in range(4):
        row = c[i]
        for r in range(q):
            top = row[(p - 1) * q + r]
            if top:
                for a in range(p - 1):
                    row[a * q + r] -= top
        if any(row[: (p - 1) * q]):
            return False
    return True


def _sqrt_vec(p, a, M):
    """sqrt(p^a) as an integer vector over powers of zeta_M, using the
    quadratic Gauss sum for the odd square roots and zeta_8 + zeta_8^-1
    for sqrt 2."""
    r = p ** (a // 2)
    if a % 2 == 0:
        return {0: r}
    if p == 2:
        return {M // 8: r, 7 * M // 8: r}
    vec = Counter()
    for x in range(p):
        vec[x * x % p * (M // p)] += r
    if p % 4 == 3:
        vec = Counter({(e + 6 * M // 8) % M: c for e, c in vec.items()})
    return vec


@lru_cache(maxsize=None)
def _block_sig(b) -> int:
    tally = _block_values(b)
    M = 8
    for t in tally:
        M = math.lcm(M, 2 * t.denominator)
    vec = Counter()
    for t, c in tally.items():
        vec[int(t * (M // 2)) % M] += c
    p = 2 if b[0] in ("u", "v") else b[1]
    a = 2 * b[1] if b[0] in ("u", "v") else b[2]
    root = _sqrt_vec(p, a, M)
    hits = []
    for s in range(8):
        diff = Counter(vec)
        for e, c in root.items():
            diff[(e + s * M // 8) % M] -= c
        if _vanishes(diff, M, p):
            hits.append(s)
    assert len(hits) == 1, (b, hits)
    return hits[0]


def signature_mod8(q: TorsionForm) -> int:
    """Residue s with G(q) = sqrt|q| e(s/8); additive over blocks."""
    return sum(_block_sig(b) for b in q.blocks) % 8


# ---------------------------------------------------- existence criteria

def _discr_class_odd(q, p) -> int:
    """Legendre class of the unit determinant of the rank-ell_p p-adic
    lattice whose discriminant form is the p-part."""
    eps = 1
    for _, _, e in _genus_data(q).get(p, ()):
        eps *= e
    return eps


def _discr_class_two(q) -> int:
    """Odd part mod 8 of the determinant of the rank-ell_2 2-adic lattice
    whose discriminant form is the 2-part; meaningful for even forms,
    where that lattice is unique."""
    blocks = _genus_data(q).get(2, ())
    comps = S.compartments(blocks)
    fused = {i for c in comps for i in c}
    cls = 1
    for c in comps:
        shape = tuple(blocks[i][:3] for i in c)
        cc = S.compartment_det_class(shape, blocks[c[0]][4])
        assert cc is not None, shape
        cls = cls * cc % 8
    for i, b in enumerate(blocks):
        if i not in fused:
            cls = cls * S.det_class_2(b[1], b[2], b[3], b[4]) % 8
    return cls


class NikulinConditions(NamedTuple):
    """The three constraints tying a form to a signature pair: a residue
    for the signature test, the pair itself for the odd-prime determinant
    tests, and the rank for the 2-adic one."""

    a: int
    b: tuple
    c: int

    @classmethod
    def for_signature(cls, s_plus, s_minus):
        return cls((s_plus - s_minus) % 8, (s_plus, s_minus), s_plus + s_minus)

    def holds(self, q: TorsionForm) -> bool:
        return (check_A(q, self.a) and check_B(q, *self.b)
                and check_C(q, self.c))


def check_A(q: TorsionForm, s) -> bool:
    """sign q = s mod 8."""
    return (signature_mod8(q) - s) % 8 == 0


def check_B(q: TorsionForm, s_plus, s_minus) -> bool:
    """At every odd p: ell_p(q) <= s_plus + s_minus, and when equality
    holds the order |q| matches (-1)^s_minus det K_p(q) up to unit
    squares."""
    if s_plus < 0 or s_minus < 0:
        raise ValueError("signature entries must be nonnegative")
    n = s_plus + s_minus
    N = q.order
    if n == 0:
        # every odd p sits at the boundary, including p not dividing |q|;
        # jointly the unit conditions say |q| is a square
        return (all(b[0] != "w" or b[1] == 2 for b in q.blocks)
                and math.isqrt(N) ** 2 == N)
    for p in prime_divisors(N):
        if p == 2:
            continue
        l = ell_p(q, p)
        if l > n:
            return False
        if l == n:
            m = N // p ** valuation(N, p)
            if kronecker(m, p) != kronecker(-1, p) ** s_minus \
                    * _discr_class_odd(q, p):
                return False
    return True


def check_C(q: TorsionForm, s) -> bool:
    """ell_2(q) <= s, and when equality holds with q even the order |q|
    matches +-det K_2(q) up to unit squares.  For odd q at the boundary
    there is no determinant clause."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    l = ell_p(q, 2)
    if l > s:
        return False
    if l == s and parity(q) == "even":
        m = q.order >> valuation(q.order, 2)
        cls = _discr_class_two(q)
        if m % 8 not in (cls, -cls % 8):
            return False
    return True


def exists_even_lattice(q: TorsionForm, s_plus, s_minus) -> bool:
    """Whether an even lattice of signature (s_plus, s_minus) with
    discriminant form q exists."""
    if s_plus < 0 or s_minus < 0:
        raise ValueError("signature entries must be nonnegative")
    return NikulinConditions.for_signature(s_plus, s_minus).holds(q)


# -------------------------------------------------------- lattice bridge

@lru_cache(maxsize=None)
def _raw_preimage_compartment(shape, total):
    """Lexicographically least per-block (eps, oddity) assignment whose
    canonical symbol is the given fused compartment."""
    target = tuple((sc, n, e, "I", total if i == 0 else 0)
                   for i, (sc, n, e) in enumerate(shape))
    pools = []
    for _, n, _ in shape:
        pools.append([(e, o) for e, t, o in S.two_adic_classes(n)
                      if t == "I"])
    for combo in itertools.product(*pools):
        raw = [(sc, n, e, "I", o)
               for (sc, n, _), (e, o) in zip(shape, combo)]
        if S.canonical_two(raw) == target:
            return tuple(raw)
    raise AssertionError(f"compartment {(shape, total)} has no raw symbol")


def _raw_preimage_two(blocks):
    """A blockwise-realizable 2-adic symbol equivalent to a canonical one,
    undoing oddity fusion."""
    out = list(map(tuple, blocks))
    for c in S.compartments(out):
        shape = tuple(out[i][:3] for i in c)
        for i, rb in zip(c, _raw_preimage_compartment(shape, out[c[0]][4])):
            out[i] = rb
    return tuple(out)


def discriminant_form(x) -> TorsionForm:
    """The form on L*/L induced by v.v mod 2Z, for an even lattice or an
    even genus.  Reads the positive-scale Jordan data verbatim."""
    raws = {}
    if isinstance(x, IntLattice):
        if not x.is_even:
            raise ValueError("discriminant forms need an even lattice")
        for p in prime_divisors(2 * abs(x.det)):
            bl = [b for b in jordan_decomposition(x, p) if b[0] >= 1]
            if bl:
                raws[p] = bl
    elif isinstance(x, GenusSymbol):
        if not x.is_even:
            raise ValueError("discriminant forms need an even genus")
        for p, blocks in x.local.items():
            if p == 2:
                bl = [b for b in _raw_preimage_two(blocks) if b[0] >= 1]
            else:
                bl = [b for b in blocks if b[0] >= 1]
            if bl:
                raws[p] = bl
    else:
        raise TypeError(f"no discriminant form for {type(x).__name__}")
    out = []
    for p, raw in sorted(raws.items()):
        if p == 2:
            out += _elementary_two(_collapse_two(S.canonical_two(raw)))
        else:
            out += _elementary_odd(p, S.canonical_odd(raw))
    return TorsionForm(out)


# ------------------------------------------------------------- text form

_TOKEN_RE = re.compile(
    r"\s*(\d+)?\s*(?:([uv])(\d+)"
    r"|w\[\s*(\d+)\s*,\s*(\d+)\s*,\s*([+-]?\d+)\s*\])\s*")


def format_form(q: TorsionForm) -> str:
    """Render as in "2u1 + v1 + w[3,1,+1]"; the trivial form is "0"."""
    if not q.blocks:
        return "0"
    parts = []
    for b, grp in itertools.groupby(q.blocks):
        n = len(list(grp))
        if b[0] in ("u", "v"):
            core = f"{b[0]}{b[1]}"
        elif b[1] == 2:
            core = f"w[2,{b[2]},{b[3]}]"
        else:
            core = f"w[{b[1]},{b[2]},{'+1' if b[3] == 1 else '-1'}]"
        parts.append(core if n == 1 else f"{n}{core}")
    return " + ".join(parts)


def parse_form(text: str) -> TorsionForm:
    """Inverse of format_form; accepts any block order and repeat counts."""
    s = text.strip()
    if s == "0":
        return TorsionForm()
    blocks = []
    pos = 0
    while True:
        m = _TOKEN_RE.match(s, pos)
        if not m:
            raise ValueError(f"cannot parse {text!r} at offset {pos}")
        n = int(m.group(1)) if m.group(1) else 1
        if m.group(2):
            blk = (m.group(2), int(m.group(3)))
        else:
            blk = ("w", int(m.group(4)), int(m.group(5)), int(m.group(6)))
        blocks += [blk] * n
        pos = m.end()
        if pos == len(s):
            return TorsionForm(blocks)
        if s[pos] != "+":
            raise ValueError(f"cannot parse {text!r} at offset {pos}")
        pos += 1
