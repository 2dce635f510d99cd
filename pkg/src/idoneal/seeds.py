"""Build one lattice in a prescribed definite genus.

The searches run cheapest-first: plain diagonal forms, then splitting off
unit vectors through the rank-lowering genus operation, then direct sums
of root-lattice blocks, and finally overlattice gluing: sublattices of the
target are direct sums of small pieces with determinant det(g) times a
square, and the target is recovered by adjoining glue vectors of prime
order from the dual.  Each candidate is accepted or rejected by comparing
genus symbols, so a returned lattice is correct by construction; a genus
that survives every tier up to the internal caps raises, which existence
theory says cannot happen for symbols built by enumerate_genera.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from . import genus as G
from ._mat import hnf_rows, matmul, transpose
from .arith import factorint
from .lattices import IntLattice, root_lattice

_GLUE_CAP = 6          # largest glue index f tried during tier D
_ENTRY_CAP = 24        # largest diagonal entry tried for gluing bases


def _diagonals(n, d, cap=None):
    """Ascending diagonals (a_1 <= ... <= a_n) with product d."""
    if n == 0:
        if d == 1:
            yield ()
        return
    start = 1
    while start ** n <= d:
        if d % start == 0 and (cap is None or start <= cap):
            for rest in _diagonals(n - 1, d // start, cap):
                if not rest or start <= rest[0]:
                    yield (start,) + rest
        start += 1


def _binaries(d):
    """All reduced positive binary lattices of determinant d."""
    a = 1
    while a * a <= 4 * d // 3:
        for b in range(0, a // 2 + 1):
            c, r = divmod(d + b * b, a)
            if r == 0 and c >= a:
                yield IntLattice([[a, b], [b, c]])
        a += 1


@lru_cache(maxsize=None)
def _root_blocks():
    blocks = []
    for name in ("A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8",
                 "D4", "D5", "D6", "D7", "D8", "E6", "E7", "E8"):
        L = root_lattice(name).rescale(-1)
        for m in (1, 2, 3, 4):
            blocks.append(L.rescale(m))
    return tuple(sorted(blocks, key=lambda L: (L.rank, abs(L.det))))


def _block_sums(n, d):
    """Direct sums of scaled root blocks and diagonal entries matching
    rank n and determinant d."""
    blocks = _root_blocks()

    def rec(i, rank_left, det_left, parts):
        if rank_left == 0:
            if det_left == 1:
                yield parts
            return
        # pure diagonal tail
        for diag in _diagonals(rank_left, det_left):
            yield parts + [IntLattice([[a]]) for a in diag]
        for j in range(i, len(blocks)):
            B = blocks[j]
            if B.rank <= rank_left and det_left % abs(B.det) == 0:
                yield from rec(j, rank_left - B.rank,
                               det_left // abs(B.det), parts + [B])

    for parts in rec(0, n, d, []):
        L = parts[0]
        for Q in parts[1:]:
            L = L + Q
        yield L


def _glue_steps(L, q, even):
    """Index-q integral overlattices of L: adjoin x = y/q with y in the
    kernel of the Gram matrix mod q, subject to integrality of the norm
    (evenness when asked)."""
    n = L.rank
    g = L.gram
    # kernel of G mod q
    rows = [[g[i][j] % q for j in range(n)] for i in range(n)]
    basis = _modp_kernel(rows, q)
    seen = set()
    for coeffs in itertools.product(range(q), repeat=len(basis)):
        if not any(coeffs):
            continue
        y = [sum(c * b[k] for c, b in zip(coeffs, basis)) % q
             for k in range(n)]
        key = tuple(y)
        if key in seen or not any(y):
            continue
        for s in range(2, q):
            seen.add(tuple(x * s % q for x in y))
        seen.add(key)
        norm_num = sum(y[i] * g[i][j] * y[j] for i in range(n) for j in range(n))
        if norm_num % (q * q):
            continue
        if even and (norm_num // (q * q)) % 2:
            continue
        stack = [[q * (i == k) for k in range(n)] for i in range(n)] + [list(y)]
        b = hnf_rows(stack)
        gram = matmul(matmul(b, g), transpose(b))
        new = [[x // (q * q) for x in row] for row in gram]
        yield IntLattice(new).lll()[0]


def _modp_kernel(rows, p):
    """Basis of the kernel of a square matrix over F_p."""
    n = len(rows)
    m = [list(r) for r in rows]
    pivots = {}
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, n) if m[i][c] % p), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(n):
            if i != r and m[i][c] % p:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        pivots[c] = r
        r += 1
    kernel = []
    for c in range(n):
        if c in pivots:
            continue
        v = [0] * n
        v[c] = 1
        for pc, pr in pivots.items():
            v[pc] = (-m[pr][c]) % p
        kernel.append(v)
    return kernel


def build_seed(g: "G.GenusSymbol") -> IntLattice:
    """One lattice in the definite genus g."""
    if not g.is_definite:
        raise ValueError("seeds exist only for definite genera")
    if g.sig[0] == 0 and g.rank > 0:
        return build_seed(G.negate(g)).rescale(-1)
    L = _seed_positive(g)
    assert G.genus_of(L) == g, (g, L)
    return L


def _seed_positive(g):
    n, d = g.rank, abs(g.det)
    if n == 0:
        return IntLattice([])
    if n == 1:
        return IntLattice([[d]])
    if n == 2:
        for L in _binaries(d):
            if G.genus_of(L) == g:
                return L
        raise AssertionError(f"no binary lattice found for {G.format_genus(g)}")

    for diag in _diagonals(n, d):
        L = IntLattice([[0] * n for _ in range(n)])
        L = IntLattice([[diag[i] * (i == j) for j in range(n)]
                        for i in range(n)])
        if G.genus_of(L) == g:
            return L

    # split off unit vectors: any genus of the shape [1] + g' yields to
    # recursion on g'
    try:
        tws = G.twigs(g)
    except ValueError:
        tws = []
    for tw in tws:
        if G.add_one(tw) == g:
            try:
                return IntLattice([[1]]) + _seed_positive(tw)
            except AssertionError:
                continue

    for L in _block_sums(n, d):
        if G.genus_of(L) == g:
            return L

    # overlattice gluing from coarser bases
    for f in range(2, _GLUE_CAP + 1):
        bases = itertools.chain(
            (IntLattice([[a * (i == j) for j in range(n)] for i in range(n)])
             for a in [None] for _ in [0] for a in [0]),  # placeholder, unused
        )
        found = _glue_search(g, n, d, f)
        if found is not None:
            return found
    raise AssertionError(f"seed construction exhausted for {G.format_genus(g)}")


def _glue_search(g, n, d, f):
    even = g.is_even
    primes = sorted(factorint(f))
    targets = []
    for base in itertools.chain(
            _diagonals(n, d * f * f, cap=_ENTRY_CAP), _block_sums(n, d * f * f)):
        if isinstance(base, tuple):
            L = IntLattice([[base[i] * (i == j) for j in range(n)]
                            for i in range(n)])
        else:
            L = base
        targets.append(L)
        if len(targets) > 400:
            break
    frontier = targets
    index_left = f
    # peel the glue index one prime at a time
    for q in _prime_chain(f):
        nxt = []
        seen = set()
        for L in frontier:
            for M in _glue_steps(L, q, even):
                if M.gram not in seen:
                    seen.add(M.gram)
                    nxt.append(M)
        frontier = nxt
        index_left //= q
    for L in frontier:
        if G.genus_of(L) == g:
            return L
    return None


def _prime_chain(f):
    out = []
    for p, e in sorted(factorint(f).items()):
        out += [p] * e
    return out
