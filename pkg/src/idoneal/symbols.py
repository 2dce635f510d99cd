"""Local (p-adic) genus symbol machinery.

A constituent at an odd prime is a tuple ``(scale, dim, eps)``; at p = 2 it
is ``(scale, dim, eps, typ, oddity)`` with ``typ`` one of ``"I"``/``"II"``.
The scale is the exponent k of the constituent sitting at p^k, eps is the
determinant class (+1 for a square unit class, -1 otherwise), and the
oddity is the trace invariant mod 8 (zero for type II).

This module knows nothing about global lattices or signatures; it supplies

* realizability tables for 2-adic unimodular blocks,
* canonical forms (oddity fusion and sign walking at 2),
* the oddity / p-excess invariants entering the global existence relation,
* species lists and the local mass factors (diagonal, cross, type),
* raw enumeration of local symbols with prescribed rank and valuation.

See genus.py for the assembled symbol object and the mass formula.
"""

from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct

from .arith import kronecker
from .exactval import ExactVal

UNITS_8 = (1, 3, 5, 7)


def _diag_invariants(units):
    det, odd = 1, 0
    for u in units:
        det = det * u % 8
        odd = (odd + u) % 8
    eps = 1 if det in (1, 7) else -1
    return eps, odd, det


@lru_cache(maxsize=None)
def two_adic_classes(dim: int):
    """All (eps, typ, oddity) realized by a unimodular 2-adic form of rank dim.

    For dim >= 3 every odd oddity pattern of the right parity occurs with
    either sign; the small ranks are genuinely restricted (e.g. a rank-1
    block with eps = +1 must have oddity 1 or 7).
    """
    if dim == 0:
        return ((1, "II", 0),)
    out = set()
    if dim <= 2:
        for units in iproduct(UNITS_8, repeat=dim):
            eps, odd, _ = _diag_invariants(units)
            out.add((eps, "I", odd))
    else:
        for eps in (1, -1):
            for odd in range(dim % 2, 8, 2):
                out.add((eps, "I", odd))
    if dim % 2 == 0:
        # sums of hyperbolic (det 7) and twisted (det 3) even blocks; only
        # the parity of the twisted count survives
        out.add((1 if dim % 4 == 0 else -1, "II", 0))
        out.add((-1 if dim % 4 == 0 else 1, "II", 0))
    return tuple(sorted(out, key=lambda c: (c[1], -c[0], c[2])))


def is_valid_block_2(dim, eps, typ, oddity) -> bool:
    return (eps, typ, oddity) in two_adic_classes(dim)


@lru_cache(maxsize=None)
def det_class_2(dim, eps, typ, oddity) -> int:
    """Unit determinant mod 8 of the unimodular block with the given data."""
    if typ == "II":
        base = 7 if eps == 1 else 3
        return base * pow(7, dim // 2 - 1, 8) % 8
    if dim > 3:
        return det_class_2(3, eps, "I", (oddity - (dim - 3)) % 8)
    for units in iproduct(UNITS_8, repeat=dim):
        e, o, det = _diag_invariants(units)
        if e == eps and o == oddity:
            return det
    raise ValueError(f"unrealizable 2-adic block: {(dim, eps, typ, oddity)}")


# -- canonical forms ---------------------------------------------------------

def _merge_same_scale(blocks, two: bool):
    by = {}
    for b in blocks:
        if b[1] == 0:
            continue
        k = b[0]
        if k not in by:
            by[k] = list(b)
        else:
            cur = by[k]
            cur[1] += b[1]
            cur[2] *= b[2]
            if two:
                cur[3] = "I" if "I" in (cur[3], b[3]) else "II"
                cur[4] = (cur[4] + b[4]) % 8
    return [by[k] for k in sorted(by)]


def canonical_odd(blocks):
    """Canonical symbol at an odd prime: merged, scale-sorted tuple."""
    return tuple(tuple(b) for b in _merge_same_scale(blocks, two=False))


def compartments(blocks):
    """Index lists of maximal runs of type-I blocks at consecutive scales."""
    comps, cur, prev = [], [], None
    for i, b in enumerate(blocks):
        if b[3] == "I":
            if cur and b[0] == prev + 1:
                cur.append(i)
            else:
                if cur:
                    comps.append(cur)
                cur = [i]
            prev = b[0]
        else:
            if cur:
                comps.append(cur)
            cur, prev = [], None
    if cur:
        comps.append(cur)
    return comps


def trains(blocks):
    """Partition of block indices into trains.

    Scales s and s+1 belong to the same train when at least one of the two
    constituents there is type I, where a missing scale counts as a type II
    constituent of dimension zero.
    """
    out, cur = [], [0]
    for i in range(1, len(blocks)):
        a, b = blocks[i - 1], blocks[i]
        if b[0] == a[0] + 1:
            joined = "I" in (a[3], b[3])
        elif b[0] == a[0] + 2:
            joined = a[3] == "I" and b[3] == "I"
        else:
            joined = False
        if joined:
            cur.append(i)
        else:
            out.append(cur)
            cur = [i]
    out.append(cur)
    return out


def canonical_two(blocks):
    """Canonical 2-adic symbol: merge, fuse oddities, walk signs.

    Oddity fusion concentrates each compartment's total oddity on its first
    block.  Sign walking moves every minus sign within a train onto the
    train's first block.  A walk is a chain of single-scale steps (s, s+1),
    and each step adds 4 to the oddity of the one compartment holding a
    type-I constituent of the step (both endpoints type I means both lie in
    that same compartment, which still gains just the one 4).  Symbols of
    2-adically equivalent forms agree afterwards; inequivalent ones do not.
    """
    bl = _merge_same_scale(blocks, two=True)
    comps = compartments(bl)
    comp_at = {}
    for ci, comp in enumerate(comps):
        for i in comp:
            comp_at[bl[i][0]] = ci
    totals = [sum(bl[i][4] for i in comp) % 8 for comp in comps]

    for tr in trains(bl):
        lead = tr[0]
        for i in tr[1:]:
            if bl[i][2] == -1:
                bl[i][2] = 1
                bl[lead][2] = -bl[lead][2]
                for s in range(bl[lead][0], bl[i][0]):
                    ci = comp_at.get(s, comp_at.get(s + 1))
                    totals[ci] = (totals[ci] + 4) % 8
    for ci, comp in enumerate(comps):
        for i in comp:
            bl[i][4] = 0
        bl[comp[0]][4] = totals[ci]
    return tuple(tuple(b) for b in bl)


# -- invariants entering the global existence relation -----------------------

def excess_odd(blocks, p: int) -> int:
    """p-excess mod 8: sum of n_k(p^k - 1), plus 4 per odd-scale minus sign."""
    e = 0
    for k, n, eps in blocks:
        e += n * (pow(p, k) - 1)
        if k % 2 and eps == -1:
            e += 4
    return e % 8


def total_oddity(blocks) -> int:
    """2-adic oddity mod 8: block oddities plus 4 per odd-scale minus sign."""
    o = 0
    for b in blocks:
        o += b[4]
        if b[0] % 2 and b[2] == -1:
            o += 4
    return o % 8


def unit_det_odd(blocks) -> int:
    """Product of the determinant classes eps (the unit-part class of det)."""
    s = 1
    for b in blocks:
        s *= b[2]
    return s


@lru_cache(maxsize=None)
def compartment_det_class(shape, total):
    """Unit determinant class mod 8 of a compartment label, or None.

    ``shape`` is the tuple of (scale, dim, eps) of the compartment's type I
    blocks at consecutive scales, ``total`` the fused oddity stored on its
    leading block.  Canonical labels need not be realizable block by block:
    signs inside a compartment may have been walked, each step shifting the
    total by 4.  A raw assignment (eps_i, odd_i) belongs to the same label
    iff the sign product and the walk invariant

        total + 4 * sum of scales carrying a minus sign   (mod 8)

    both agree.  All matching assignments share one determinant class; that
    class is returned, None when no assignment matches (an invalid label).
    """
    target_sign = 1
    tau = total
    for scale, _, eps in shape:
        target_sign *= eps
        if eps == -1:
            tau += 4 * scale
    tau %= 8
    per_block = []
    for _, dim, _ in shape:
        per_block.append([(eps, odd, det_class_2(dim, eps, "I", odd))
                          for eps, typ, odd in two_adic_classes(dim)
                          if typ == "I"])
    classes = set()
    for combo in iproduct(*per_block):
        sign = 1
        t = 0
        cls = 1
        for (scale, _, _), (eps, odd, c) in zip(shape, combo):
            sign *= eps
            t += odd + (4 * scale if eps == -1 else 0)
            cls = cls * c % 8
        if sign == target_sign and t % 8 == tau:
            classes.add(cls)
    if not classes:
        return None
    assert len(classes) == 1, (shape, total, classes)
    return classes.pop()


def unit_det_two(blocks) -> int:
    """Unit part of the determinant mod 8 encoded by a 2-adic raw symbol.

    Only meaningful for block-by-block realizable symbols (enumeration
    candidates, Jordan output); canonical symbols may carry fused oddities
    with no single-block realization.
    """
    d = 1
    for k, n, eps, typ, odd in blocks:
        d = d * det_class_2(n, eps, typ, odd) % 8
    return d


# -- species and local mass factors ------------------------------------------

def species_odd(blocks, p: int):
    out = []
    for _, n, eps in blocks:
        if n == 0:
            continue
        if n % 2:
            out.append(n)
        else:
            out.append(n if eps == kronecker(-1, p) ** (n // 2) else -n)
    return out


def species_two(blocks):
    """Species of every constituent from one below the lowest scale to one
    above the highest, including the empty bound slots that still carry a
    factor 1/2."""
    here = {b[0]: b for b in blocks if b[1]}
    if not here:
        return []

    def typ_at(k):
        b = here.get(k)
        return b[3] if b else "II"

    out = []
    for k in range(min(here) - 1, max(here) + 2):
        bound = typ_at(k - 1) == "I" or typ_at(k + 1) == "I"
        b = here.get(k)
        if b is None:
            out.append(1 if bound else 0)
            continue
        n = b[1]
        o = (b[4] + (4 if b[2] == -1 else 0)) % 8
        t = n // 2 if (b[3] == "II" or n % 2) else n // 2 - 1
        if not bound and o in (0, 1, 7):
            out.append(2 * t)
        elif not bound and o in (3, 4, 5):
            out.append(-2 * t)
        else:
            out.append(2 * t + 1)
    return out


def m_species(p: int, sp: int) -> Fraction:
    """Diagonal mass factor of a single constituent of the given species."""
    if sp == 0:
        return Fraction(1)
    r = (abs(sp) + 1) // 2 if sp % 2 else abs(sp) // 2
    den = Fraction(1)
    for k in range(1, r):
        den *= 1 - Fraction(p) ** (-2 * k)
    if sp % 2 == 0:
        den *= (1 - Fraction(p) ** (-r)) if sp > 0 else (1 + Fraction(p) ** (-r))
    return 1 / (2 * den)


def diagonal_factor(blocks, p: int) -> Fraction:
    species = species_two(blocks) if p == 2 else species_odd(blocks, p)
    out = Fraction(1)
    for sp in species:
        out *= m_species(p, sp)
    return out


def cross_factor(blocks, p: int) -> ExactVal:
    """Product over constituent pairs of p^((k_j - k_i) n_i n_j / 2)."""
    bs = [b for b in blocks if b[1]]
    e = 0
    for i in range(len(bs)):
        for j in range(i + 1, len(bs)):
            e += (bs[j][0] - bs[i][0]) * bs[i][1] * bs[j][1]
    val = ExactVal(Fraction(p) ** (e // 2))
    if e % 2:
        val = val * ExactVal.sqrt_of(p)
    return val


def type_factor_two(blocks) -> Fraction:
    nII = sum(b[1] for b in blocks if b[3] == "II")
    here = {b[0]: b for b in blocks if b[1]}
    pairs = sum(1 for k, b in here.items()
                if b[3] == "I" and k + 1 in here and here[k + 1][3] == "I")
    return Fraction(2) ** (pairs - nII)


def p_mass_blocks(blocks, p: int) -> ExactVal:
    val = ExactVal(diagonal_factor(blocks, p)) * cross_factor(blocks, p)
    if p == 2:
        val = val * ExactVal(type_factor_two(blocks))
    return val


def std_p(p: int, n: int) -> Fraction:
    """Standard local mass at a prime not dividing 2 det, for rank n >= 2."""
    s = (n + 1) // 2
    den = Fraction(1)
    for k in range(1, s):
        den *= 1 - Fraction(p) ** (-2 * k)
    return 1 / (2 * den)


# -- raw local enumeration ---------------------------------------------------

def scale_partitions(n: int, v: int):
    """All ((k, n_k), ...) with ascending scales k >= 0, dims n_k >= 1,
    sum of dims n and sum of k*n_k equal to v."""
    out = []

    def rec(k, rank_left, val_left, acc):
        if rank_left == 0:
            if val_left == 0:
                out.append(tuple(acc))
            return
        if k == 0:
            for nk in range(rank_left, -1, -1):
                if nk:
                    acc.append((0, nk))
                    rec(1, rank_left - nk, val_left, acc)
                    acc.pop()
                else:
                    rec(1, rank_left, val_left, acc)
            return
        if val_left < k:
            return
        for nk in range(min(rank_left, val_left // k), -1, -1):
            if nk:
                acc.append((k, nk))
                rec(k + 1, rank_left - nk, val_left - k * nk, acc)
                acc.pop()
            else:
                rec(k + 1, rank_left, val_left, acc)

    rec(0, n, v, [])
    return out


def local_symbols_odd(p: int, n: int, v: int, unit_sign: int):
    """Raw odd-p symbols of rank n, valuation v, det unit class unit_sign."""
    out = []
    for part in scale_partitions(n, v):
        for signs in iproduct((1, -1), repeat=len(part)):
            prod = 1
            for s in signs:
                prod *= s
            if prod != unit_sign:
                continue
            out.append(tuple((k, nk, s) for (k, nk), s in zip(part, signs)))
    return out


def local_symbols_two(n: int, v: int, unit_mod8: int):
    """Raw 2-adic symbols of rank n, valuation v, unit determinant mod 8."""
    out = []
    for part in scale_partitions(n, v):
        choices = [two_adic_classes(nk) for _, nk in part]
        for combo in iproduct(*choices):
            det = 1
            for (scale, nk), (eps, typ, odd) in zip(part, combo):
                det = det * det_class_2(nk, eps, typ, odd) % 8
            if det != unit_mod8 % 8:
                continue
            out.append(tuple((k, nk, eps, typ, odd)
                             for (k, nk), (eps, typ, odd) in zip(part, combo)))
    return out


# -- the extra unit block ----------------------------------------------------

def add_unit_odd(blocks):
    """Symbol after an orthogonal [1] summand joins (odd prime)."""
    return canonical_odd(list(blocks) + [(0, 1, 1)])


def add_unit_two(blocks):
    """Symbol after an orthogonal [1] summand joins (p = 2)."""
    return canonical_two(list(blocks) + [(0, 1, 1, "I", 1)])
