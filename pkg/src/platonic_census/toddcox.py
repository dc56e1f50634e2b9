"""Todd-Coxeter coset enumeration over an arbitrary column alphabet.

This is the one enumeration core in the package.  Callers describe their
alphabet as columns plus an involution `inv` pairing each column with its
inverse (a column may be its own inverse, which is how the reflection
generators are handled).  Words here are tuples of column indices.

The strategy is HLT with coincidence processing: relators are scanned and
filled at every live coset in increasing order, remaining row entries are
filled by new definitions, and coincidences are merged through a union-find
with column transfer.  Everything iterates in fixed index order, so the
output table is a deterministic function of the input.
"""

from __future__ import annotations

from collections import deque
from typing import Optional, Sequence

from .errors import BudgetExceeded

ColWord = tuple[int, ...]


def enumerate_cosets(
    ncols: int,
    inv: Sequence[int],
    relators: Sequence[ColWord],
    subgroup: Sequence[ColWord],
    max_cosets: int,
) -> list[list[int]]:
    """Complete coset table of <subgroup> in the presented group.

    Returns the table as rows over the column alphabet, renumbered so live
    cosets keep their relative order, with the subgroup's coset first.
    Raises BudgetExceeded when more than max_cosets live cosets are needed.
    """
    table: list[list[Optional[int]]] = [[None] * ncols]
    p = [0]                      # union-find over cosets; p[a] <= a
    live = 1

    def rep(k: int) -> int:
        while p[k] != k:
            p[k] = p[p[k]]
            k = p[k]
        return k

    def define(a: int, x: int) -> int:
        nonlocal live
        if live >= max_cosets:
            raise BudgetExceeded(
                f"coset enumeration needs more than {max_cosets} live cosets")
        b = len(table)
        table.append([None] * ncols)
        p.append(b)
        live += 1
        table[a][x] = b
        table[b][inv[x]] = a
        return b

    merge_queue: deque[int] = deque()

    def merge(a: int, b: int) -> None:
        nonlocal live
        a, b = rep(a), rep(b)
        if a != b:
            a, b = min(a, b), max(a, b)
            p[b] = a
            live -= 1
            merge_queue.append(b)

    def coincidence(a: int, b: int) -> None:
        merge(a, b)
        while merge_queue:
            g = merge_queue.popleft()
            for x in range(ncols):
                d = table[g][x]
                if d is None:
                    continue
                table[d][inv[x]] = None
                mu, nu = rep(g), rep(d)
                if table[mu][x] is not None:
                    merge(nu, table[mu][x])
                elif table[nu][inv[x]] is not None:
                    merge(mu, table[nu][inv[x]])
                else:
                    table[mu][x] = nu
                    table[nu][inv[x]] = mu

    def scan_and_fill(a: int, w: ColWord) -> None:
        f, i = a, 0
        b, j = a, len(w) - 1
        while True:
            while i <= j and table[f][w[i]] is not None:
                f = table[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    coincidence(f, b)
                return
            while j >= i and table[b][inv[w[j]]] is not None:
                b = table[b][inv[w[j]]]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if j == i:
                table[f][w[i]] = b
                table[b][inv[w[i]]] = f
                return
            define(f, w[i])

    for w in subgroup:
        if w:
            scan_and_fill(0, w)
    a = 0
    while a < len(table):
        if p[a] != a:
            a += 1
            continue
        for w in relators:
            if not w:
                continue
            scan_and_fill(a, w)
            if p[a] != a:
                break
        if p[a] == a:
            for x in range(ncols):
                if table[a][x] is None:
                    define(a, x)
        a += 1

    return _compact(table, p, rep, ncols)


def _compact(table, p, rep, ncols) -> list[list[int]]:
    order = [a for a in range(len(table)) if p[a] == a]
    number = {a: k for k, a in enumerate(order)}
    out = []
    for a in order:
        row = table[a]
        assert all(v is not None for v in row), "incomplete table after HLT"
        out.append([number[rep(v)] for v in row])
    return out


def standardize(rows: list[list[int]], base: int = 0) -> list[list[int]]:
    """Renumber cosets in first-appearance scan order starting from base."""
    n = len(rows)
    ncols = len(rows[0]) if rows else 0
    old_of = [-1] * n
    new_of = [-1] * n
    old_of[0] = base
    new_of[base] = 0
    assigned = 1
    out = [[-1] * ncols for _ in range(n)]
    for a in range(n):
        for x in range(ncols):
            t = rows[old_of[a]][x]
            c = new_of[t]
            if c == -1:
                c = assigned
                new_of[t] = c
                old_of[c] = t
                assigned += 1
            out[a][x] = c
    assert assigned == n, "table is not transitive"
    return out
