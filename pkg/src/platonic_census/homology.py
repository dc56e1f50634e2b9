"""First homology of the census subgroups.

H1(M,Z) = K/[K,K] is computed by rewriting the reflection presentation to a
presentation of K along a spanning tree of the coset table (one Schreier
generator per non-tree edge, one rewritten relator per relator and point),
abelianizing to an integer matrix of exponent sums, and reducing to Smith
normal form with exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence

from .coset import CosetTable, PresentationLike, spanning_tree
from .errors import OverflowSlotError
from .fp import FpPresentation, SignedWord, free_reduce_signed, simplify


def rewrite_subgroup_presentation(pres: PresentationLike, t: CosetTable) -> FpPresentation:
    """Presentation of the base-point stabilizer on the Schreier generators.

    Generator k+1 corresponds to the k-th non-tree edge (a, i, b), a <= b, in
    scan order; tree edges rewrite to nothing.  Relators are each reflection
    relator traced from each point.
    """
    rep, tree_edge, nontree = spanning_tree(t)
    gen_of: dict[tuple[int, int], int] = {}
    for k, (a, i, b) in enumerate(nontree):
        gen_of[(a, i)] = k + 1
        if a != b:
            gen_of[(b, i)] = -(k + 1)
    relators: list[SignedWord] = []
    for alpha in range(t.size):
        for rel in pres.relators:
            u = alpha
            out: list[int] = []
            for x in rel:
                if not tree_edge[u][x]:
                    out.append(gen_of[(u, x)])
                u = t.rows[u][x]
            assert u == alpha, "relator does not close on a complete table"
            w = free_reduce_signed(out)
            if w:
                relators.append(w)
    return FpPresentation(ngens=len(nontree), relators=tuple(relators))


def rewrite_signed_presentation(pres: FpPresentation, table: list[list[int]]) -> FpPresentation:
    """Reidemeister-Schreier over a signed-alphabet coset table.

    Same construction as rewrite_subgroup_presentation, for subgroups of the
    census fundamental groups themselves (columns come in inverse pairs).
    """
    n = len(table)
    ncols = 2 * pres.ngens

    def inv_col(c: int) -> int:
        return c + 1 if c % 2 == 0 else c - 1

    tree_edge = [[False] * ncols for _ in range(n)]
    seen = [False] * n
    seen[0] = True
    queue = [0]
    head = 0
    while head < len(queue):
        a = queue[head]
        head += 1
        for c in range(ncols):
            b = table[a][c]
            if not seen[b]:
                seen[b] = True
                tree_edge[a][c] = True
                tree_edge[b][inv_col(c)] = True
                queue.append(b)
    assert all(seen), "table is not transitive"

    gen_of: dict[tuple[int, int], int] = {}
    ngens = 0
    for a in range(n):
        for c in range(0, ncols, 2):        # one directed edge per positive column
            if tree_edge[a][c]:
                continue
            b = table[a][c]
            ngens += 1
            gen_of[(a, c)] = ngens
            gen_of[(b, inv_col(c))] = -ngens

    relators: list[SignedWord] = []
    for alpha in range(n):
        for rel in pres.relators:
            u = alpha
            out: list[int] = []
            for x in rel:
                c = 2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1
                if not tree_edge[u][c]:
                    out.append(gen_of[(u, c)])
                u = table[u][c]
            assert u == alpha
            w = free_reduce_signed(out)
            if w:
                relators.append(w)
    return FpPresentation(ngens=ngens, relators=tuple(relators))


def abelianized_matrix(fp: FpPresentation) -> list[list[int]]:
    """Exponent-sum matrix: one row per relator over the generators."""
    rows = []
    for r in fp.relators:
        row = [0] * fp.ngens
        for x in r:
            row[abs(x) - 1] += 1 if x > 0 else -1
        rows.append(row)
    return rows


def smith_normal_form(rows: Sequence[Sequence[int]], ncols: Optional[int] = None
                      ) -> tuple[list[int], int]:
    """Invariant factors of an integer matrix.

    Returns (diag, rank): diag is the divisibility chain d_1 | d_2 | ... of
    the nonzero diagonal entries, rank its length.  Arbitrary precision
    throughout; pivoting on the smallest nonzero entry keeps growth down.
    """
    m = [list(map(int, r)) for r in rows]
    nrows = len(m)
    if ncols is None:
        ncols = len(m[0]) if m else 0
    diag = []
    t = 0
    while True:
        pivot = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                v = m[i][j]
                if v and (pivot is None or abs(v) < pivot[0]):
                    pivot = (abs(v), i, j)
        if pivot is None:
            break
        _, pi, pj = pivot
        m[t], m[pi] = m[pi], m[t]
        for row in m:
            row[t], row[pj] = row[pj], row[t]
        while True:
            # clear the pivot column
            changed = False
            for i in range(t + 1, nrows):
                if m[i][t]:
                    q = m[i][t] // m[t][t]
                    if q:
                        m[i] = [a - q * b for a, b in zip(m[i], m[t])]
                    if m[i][t]:
                        m[t], m[i] = m[i], m[t]
                        changed = True
            if changed:
                continue
            # clear the pivot row
            for j in range(t + 1, ncols):
                if m[t][j]:
                    q = m[t][j] // m[t][t]
                    if q:
                        for row in m:
                            row[j] -= q * row[t]
                    if m[t][j]:
                        for row in m:
                            row[t], row[j] = row[j], row[t]
                        changed = True
                        break
            if not changed:
                break
        d = abs(m[t][t])
        # enforce divisibility d | every remaining entry
        fixed = False
        for i in range(t + 1, nrows):
            for j in range(t + 1, ncols):
                if m[i][j] % d:
                    m[t] = [a + b for a, b in zip(m[t], m[i])]
                    fixed = True
                    break
            if fixed:
                break
        if fixed:
            continue
        diag.append(d)
        t += 1
    for a, b in zip(diag, diag[1:]):
        assert b % a == 0, "invariant factors must form a divisibility chain"
    return diag, len(diag)


@dataclass(frozen=True)
class AbelianInvariants:
    """H1 as torsion chain (each entry >= 2, d_i | d_{i+1}) plus free rank."""

    torsion: tuple[int, ...]
    free_rank: int

    def __str__(self):
        parts = [f"Z_{d}" for d in self.torsion]
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"

    def key(self) -> tuple:
        return (self.torsion, self.free_rank)


def invariants_from_matrix(rows: Sequence[Sequence[int]], ncols: int) -> AbelianInvariants:
    diag, rank = smith_normal_form(rows, ncols)
    torsion = tuple(d for d in diag if d > 1)
    return AbelianInvariants(torsion=torsion, free_rank=ncols - rank)


def h1_of(rec, pres: PresentationLike, presimplify: bool = False) -> AbelianInvariants:
    """First homology of the subgroup encoded by rec.table."""
    fp = rewrite_subgroup_presentation(pres, rec.table)
    if presimplify:
        fp = simplify(fp)
    return invariants_from_matrix(abelianized_matrix(fp), fp.ngens)


def canonical_decomposition(factors: Sequence[int], free_rank: int = 0) -> AbelianInvariants:
    """Canonicalize any direct-sum decomposition into invariant factors.

    The published tables mix conventions (Z_2+Z_2+Z_9 next to Z_3+Z_16), so
    comparisons go through this normal form.
    """
    primary: dict[int, list[int]] = {}
    for n in factors:
        n = int(n)
        assert n >= 2
        d = 2
        while d * d <= n:
            if n % d == 0:
                q = 1
                while n % d == 0:
                    n //= d
                    q *= d
                primary.setdefault(d, []).append(q)
            d += 1
        if n > 1:
            primary.setdefault(n, []).append(n)
    chain_len = max((len(v) for v in primary.values()), default=0)
    chain = [1] * chain_len
    for p, powers in primary.items():
        powers.sort(reverse=True)
        for k, q in enumerate(powers):
            chain[k] *= q
    chain = [c for c in sorted(chain) if c > 1]
    return AbelianInvariants(torsion=tuple(chain), free_rank=free_rank)


def format_h1(inv: AbelianInvariants) -> str:
    """Five-slot string: torsion factors, zero padding, free rank last;
    multi-digit entries go in brackets."""
    if len(inv.torsion) > 4:
        raise OverflowSlotError(f"more than four torsion factors: {inv.torsion}")

    def slot(n: int) -> str:
        return f"({n})" if n >= 10 else str(n)

    parts = [slot(d) for d in inv.torsion]
    parts += ["0"] * (4 - len(parts))
    parts.append(slot(inv.free_rank))
    return "".join(parts)


def parse_h1(text: str) -> AbelianInvariants:
    """Read the five-slot string back (any decomposition convention)."""
    slots = []
    i = 0
    while i < len(text):
        if text[i] == "(":
            j = text.index(")", i)
            slots.append(int(text[i + 1:j]))
            i = j + 1
        else:
            slots.append(int(text[i]))
            i += 1
    assert len(slots) == 5, text
    factors = [s for s in slots[:4] if s > 0]
    return canonical_decomposition(factors, free_rank=slots[4])
