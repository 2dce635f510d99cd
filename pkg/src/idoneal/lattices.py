"""Integral lattices given by symmetric Gram matrices.

A lattice here is a free Z-module with a nondegenerate symmetric integer
bilinear form, recorded by its Gram matrix.  The class is a small immutable
value object; everything derived (determinant, signature, local data) is
computed exactly and cached.

Shorthand notation: ``[b11, b12, b22, b13, b23, b33, ...]`` lists the upper
triangle column by column, and an optional trailing ``(n)`` rescales the
whole form by the integer n.  So ``[0,1,0]`` is the hyperbolic plane and
``[2,1,2](-1)`` is the negative definite hexagonal lattice.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache

from . import _mat
from .arith import kronecker, valuation


class IntLattice:
    """Nondegenerate integral lattice, as an immutable Gram matrix."""

    __slots__ = ("gram", "_hash")

    def __init__(self, gram):
        rows = tuple(tuple(int(x) for x in row) for row in gram)
        n = len(rows)
        assert all(len(r) == n for r in rows), "square matrix required"
        for i in range(n):
            for j in range(i):
                assert rows[i][j] == rows[j][i], "symmetric matrix required"
        if n and _det_cached(rows) == 0:
            raise ValueError("degenerate Gram matrix")
        self.gram = rows
        self._hash = hash(rows)

    # -- construction -------------------------------------------------------

    @classmethod
    def diagonal(cls, entries) -> "IntLattice":
        e = list(entries)
        n = len(e)
        return cls([[e[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_shorthand(cls, text: str) -> "IntLattice":
        m = re.fullmatch(r"\s*\[([^\]]*)\]\s*(?:\(\s*(-?\d+)\s*\))?\s*", text)
        if not m:
            raise ValueError(f"bad lattice shorthand: {text!r}")
        entries = [int(t) for t in m.group(1).split(",")] if m.group(1).strip() else []
        scale = int(m.group(2)) if m.group(2) else 1
        # k(k+1)/2 entries for rank k
        k = (math.isqrt(8 * len(entries) + 1) - 1) // 2
        if k * (k + 1) // 2 != len(entries):
            raise ValueError(f"entry count {len(entries)} is not triangular")
        g = [[0] * k for _ in range(k)]
        idx = 0
        for col in range(k):
            for row in range(col + 1):
                g[row][col] = g[col][row] = entries[idx] * scale
                idx += 1
        return cls(g)

    def to_shorthand(self) -> str:
        out = []
        for col in range(self.rank):
            for row in range(col + 1):
                out.append(str(self.gram[row][col]))
        return "[" + ",".join(out) + "]"

    # -- basic invariants ----------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def det(self) -> int:
        return _det_cached(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @property
    def signature(self):
        """(positive, negative) inertia indices, computed exactly."""
        return _signature_cached(self.gram)

    @property
    def is_positive_definite(self) -> bool:
        return self.signature == (self.rank, 0)

    @property
    def is_negative_definite(self) -> bool:
        return self.signature == (0, self.rank)

    # -- operations ----------------------------------------------------------

    def rescale(self, n: int) -> "IntLattice":
        n = int(n)
        assert n != 0
        return IntLattice([[n * x for x in row] for row in self.gram])

    def dsum(self, other: "IntLattice") -> "IntLattice":
        a, b = self.gram, other.gram
        n, m = len(a), len(b)
        g = [[0] * (n + m) for _ in range(n + m)]
        for i in range(n):
            for j in range(n):
                g[i][j] = a[i][j]
        for i in range(m):
            for j in range(m):
                g[n + i][n + j] = b[i][j]
        return IntLattice(g)

    __add__ = dsum

    def transformed(self, u) -> "IntLattice":
        """Gram matrix in the new basis with rows of u as coordinates."""
        return IntLattice(_mat.conjugate(u, [list(r) for r in self.gram]))

    def lll(self):
        """LLL-reduced copy (positive definite only); returns (lattice, u)."""
        assert self.is_positive_definite
        g, u = _mat.lll_gram(self.gram)
        return IntLattice(g), u

    def elementary_divisors(self) -> list:
        """Invariant factors of the discriminant group, 1s dropped."""
        return [d for d in _mat.snf_diagonal([list(r) for r in self.gram])
                if d != 1]

    # -- dunder --------------------------------------------------------------

    def __eq__(self, other):
        return isinstance(other, IntLattice) and self.gram == other.gram

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"IntLattice({self.to_shorthand()})"


@lru_cache(maxsize=4096)
def _det_cached(gram) -> int:
    return _mat.det_bareiss(gram)


@lru_cache(maxsize=4096)
def _signature_cached(gram):
    n = len(gram)
    m = [[Fraction(x) for x in row] for row in gram]
    pos = neg = 0
    size = n
    while size:
        piv = next((i for i in range(size) if m[i][i] != 0), None)
        if piv is None:
            # all diagonal zero: mix in a row with a nonzero off-diagonal
            i, j = next((i, j) for i in range(size) for j in range(size)
                        if m[i][j] != 0)
            for t in range(size):
                m[i][t] += m[j][t]
            for t in range(size):
                m[t][i] += m[t][j]
            piv = i
        if piv != 0:
            m[0], m[piv] = m[piv], m[0]
            for row in m:
                row[0], row[piv] = row[piv], row[0]
        d = m[0][0]
        if d > 0:
            pos += 1
        else:
            neg += 1
        nxt = [[m[i][j] - m[i][0] * m[0][j] / d
                for j in range(1, size)] for i in range(1, size)]
        m = nxt
        size -= 1
    return (pos, neg)


# -- local (Jordan) data ----------------------------------------------------

def jordan_decomposition(lat: IntLattice, p: int):
    """Jordan constituents of lat over Z_p, grouped by scale.

    For odd p returns [(scale, dim, eps)] with eps the Legendre class of the
    unit determinant.  For p = 2 returns [(scale, dim, eps, type, oddity)]
    where type is "I" or "II", eps is +-1 for unit determinant = +-1 mod 8,
    and oddity is the trace of the odd diagonal part mod 8.  Scales ascend.
    """
    return _jordan_cached(lat.gram, p)


@lru_cache(maxsize=8192)
def _jordan_cached(gram, p):
    m = [[Fraction(x) for x in row] for row in gram]
    pieces = []          # (scale, "d", unit num*den)  or  (scale, "b", det-unit)
    while m:
        size = len(m)
        best_v = None
        best = None       # (is_diag, i, j)
        for i in range(size):
            for j in range(i, size):
                if m[i][j] == 0:
                    continue
                v = valuation(m[i][j], p)
                key = (v, 0 if i == j else 1, i, j)
                if best_v is None or key < best_v:
                    best_v = key
                    best = (i == j, i, j)
        assert best is not None, "degenerate form"
        v = best_v[0]
        diag, i, j = best
        if not diag and p != 2:
            # make the minimum show on the diagonal: e_i += e_j (or -=)
            for t in range(size):
                m[i][t] += m[j][t]
            for t in range(size):
                m[t][i] += m[t][j]
            if valuation(m[i][i], p) != v:
                for t in range(size):
                    m[i][t] -= 2 * m[j][t]
                for t in range(size):
                    m[t][i] -= 2 * m[t][j]
            assert valuation(m[i][i], p) == v
            diag = True
        if diag:
            if not (i == j):
                i = j = best[1]
            a = m[i][i]
            pieces.append((v, "d", a / Fraction(p) ** v))
            rest = [t for t in range(size) if t != i]
            nxt = [[m[r][c] - m[r][i] * m[i][c] / a for c in rest] for r in rest]
            m = nxt
        else:
            # p = 2, genuine even 2x2 block at scale v
            a, b, c = m[i][i], m[i][j], m[j][j]
            det = a * c - b * b
            pieces.append((v, "b", det / Fraction(p) ** (2 * v)))
            rest = [t for t in range(size) if t not in (i, j)]
            nxt = []
            for r in rest:
                row = []
                # subtract the projection onto the block, solving the 2x2 system
                s1, s2 = m[r][i], m[r][j]
                c1 = (s1 * c - s2 * b) / det
                c2 = (s2 * a - s1 * b) / det
                for cc in rest:
                    row.append(m[r][cc] - c1 * m[i][cc] - c2 * m[j][cc])
                nxt.append(row)
            m = nxt
    return _group_pieces(pieces, p)


def _unit_residue(x: Fraction, p: int) -> int:
    """x a p-adic unit rational; its residue class usable for symbols."""
    num, den = x.numerator, x.denominator
    if p == 2:
        r = (num * den) % 8
        return r
    return kronecker(num, p) * kronecker(den, p)


def _group_pieces(pieces, p):
    by_scale = {}
    for piece in pieces:
        by_scale.setdefault(piece[0], []).append(piece)
    out = []
    for scale in sorted(by_scale):
        group = by_scale[scale]
        dim = sum(1 if kind == "d" else 2 for _, kind, _ in group)
        if p != 2:
            eps = 1
            for _, kind, unit in group:
                eps *= _unit_residue(unit, p)
            out.append((scale, dim, eps))
        else:
            det_res = 1
            oddity = 0
            has_odd = False
            for _, kind, unit in group:
                r = _unit_residue(unit, 2)
                det_res = (det_res * r) % 8
                if kind == "d":
                    has_odd = True
                    oddity = (oddity + r) % 8
            eps = 1 if det_res in (1, 7) else -1
            out.append((scale, dim, eps, "I" if has_odd else "II", oddity))
    return out


# -- named lattices ---------------------------------------------------------

def hyperbolic_U(scale: int = 1) -> IntLattice:
    return IntLattice([[0, scale], [scale, 0]])


def _cartan(n, edges):
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = 2
    for i, j in edges:
        g[i - 1][j - 1] = g[j - 1][i - 1] = -1
    return g


def root_lattice(name: str) -> IntLattice:
    """Negative definite root lattice A_n, D_n, E_6, E_7 or E_8."""
    kind, num = name[0].upper(), int(name[1:])
    if kind == "A":
        assert num >= 1
        edges = [(i, i + 1) for i in range(1, num)]
    elif kind == "D":
        assert num >= 3
        edges = [(i, i + 1) for i in range(1, num - 1)] + [(num - 2, num)]
    elif kind == "E":
        assert num in (6, 7, 8)
        edges = [(1, 3), (3, 4), (4, 5), (2, 4)]
        edges += [(5, 6)] if num >= 6 else []
        edges += [(6, 7)] if num >= 7 else []
        edges += [(7, 8)] if num == 8 else []
    else:
        raise ValueError(f"unknown root lattice {name!r}")
    cart = _cartan(num, edges)
    return IntLattice([[-x for x in row] for row in cart])


_NAME_RE = re.compile(r"([ADUE])(\d*)", re.I)


def parse_lattice(text: str) -> IntLattice:
    """Parse a direct-sum expression of lattices.

    Terms are separated by '+'.  Each term is an optional integer
    multiplicity, then a name (U, A1.., D3.., E6/E7/E8, diag(a,b,...)) or a
    bracket shorthand, then an optional '(n)' rescaling.  Root lattices are
    negative definite; use '(-1)' for their positive forms.

    Examples: "U + E8(2)", "12diag(1) + [17]", "2[2,1,2]".
    """
    total = None
    for raw in text.split("+"):
        term = raw.strip()
        if not term:
            raise ValueError(f"empty term in {text!r}")
        mult = 1
        m = re.match(r"(\d+)\s*(?=[\[AaDdEeUu])", term)
        if m:
            mult = int(m.group(1))
            term = term[m.end():]
        lat, term = _parse_atom(term)
        sm = re.fullmatch(r"\s*\(\s*(-?\d+)\s*\)\s*", term) if term else None
        if term and not sm:
            raise ValueError(f"trailing junk in term {raw!r}")
        if sm:
            lat = lat.rescale(int(sm.group(1)))
        for _ in range(mult):
            total = lat if total is None else total + lat
    assert total is not None
    return total


def _parse_atom(term):
    term = term.strip()
    if term.startswith("["):
        close = term.index("]")
        return IntLattice.from_shorthand(term[:close + 1]), term[close + 1:]
    low = term.lower()
    if low.startswith("diag("):
        close = term.index(")")
        inside = term[5:close]
        entries = [int(t) for t in inside.split(",")]
        return IntLattice.diagonal(entries), term[close + 1:]
    if low.startswith("u"):
        return hyperbolic_U(), term[1:]
    m = re.match(r"([ADEade])(\d+)", term)
    if m:
        return root_lattice(m.group(1) + m.group(2)), term[m.end():]
    raise ValueError(f"cannot parse lattice term {term!r}")
