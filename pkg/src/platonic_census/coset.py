"""Coset tables for the reflection presentations, and what the census reads
off them: word actions, fixed points, orientability parity, Schreier
generators, orbit counts, and full element stores for the finite groups.

A table is a complete transitive right action of the group on cosets of a
subgroup; the subgroup itself is the stabilizer of the base point 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Protocol, Sequence

from . import toddcox
from .errors import BudgetExceeded
from .words import Word, free_reduce


class PresentationLike(Protocol):
    ngens: int
    relators: tuple[Word, ...]


@dataclass(frozen=True)
class CosetTable:
    """Complete transitive action of an involution-generated group.

    rows[a][i] is the image of coset a under generator i; every column is an
    involutive permutation because the generators are reflections.
    """

    ngens: int
    rows: tuple[tuple[int, ...], ...]

    base = 0

    @property
    def size(self) -> int:
        return len(self.rows)

    def act(self, point: int, w: Word) -> int:
        for i in w:
            point = self.rows[point][i]
        return point

    def column(self, i: int) -> tuple[int, ...]:
        return tuple(row[i] for row in self.rows)

    def to_json(self) -> str:
        return json.dumps({"size": self.size, "ngens": self.ngens,
                           "columns": [list(self.column(i)) for i in range(self.ngens)]})

    @classmethod
    def from_json(cls, text: str) -> "CosetTable":
        data = json.loads(text)
        cols = data["columns"]
        rows = tuple(tuple(cols[i][a] for i in range(data["ngens"]))
                     for a in range(data["size"]))
        return cls(ngens=data["ngens"], rows=rows)

    def validate(self, pres: PresentationLike) -> None:
        """Check completeness, involutive columns, relator closure, transitivity."""
        n = self.size
        for i in range(self.ngens):
            col = self.column(i)
            assert sorted(col) == list(range(n)), f"column {i} is not a permutation"
            assert all(col[col[a]] == a for a in range(n)), f"column {i} not involutive"
        for w in pres.relators:
            assert all(self.act(a, w) == a for a in range(n)), f"relator {w} does not close"
        seen = [False] * n
        seen[0] = True
        stack = [0]
        while stack:
            a = stack.pop()
            for i in range(self.ngens):
                b = self.rows[a][i]
                if not seen[b]:
                    seen[b] = True
                    stack.append(b)
        assert all(seen), "table is not transitive"


def coset_enumeration(pres: PresentationLike, subgroup_words: Sequence[Word],
                      max_cosets: int = 10**6) -> CosetTable:
    """Todd-Coxeter enumeration of cosets of <subgroup_words>.

    Deterministic for fixed input; raises BudgetExceeded when the enumeration
    needs more live cosets than allowed (the usual sign of infinite index).
    """
    k = pres.ngens
    rows = toddcox.enumerate_cosets(
        ncols=k,
        inv=list(range(k)),
        relators=[tuple(w) for w in pres.relators],
        subgroup=[tuple(w) for w in subgroup_words],
        max_cosets=max_cosets,
    )
    return CosetTable(ngens=k, rows=tuple(tuple(r) for r in rows))


def word_action(t: CosetTable, w: Word) -> list[int]:
    """The permutation of {0..m-1} given by the word (composition of columns)."""
    perm = list(range(t.size))
    for i in w:
        col = t.rows
        perm = [col[a][i] for a in perm]
    return perm


def is_fixed_point_free(t: CosetTable, w: Word) -> bool:
    return all(t.act(a, w) != a for a in range(t.size))


def parity_orientable(t: CosetTable) -> bool:
    """Whether the base-point stabilizer consists of even-length words.

    Equivalent to the Schreier graph being bipartite with every generator
    edge crossing sides, since each generator flips the sign character.
    """
    n = t.size
    parity: list[Optional[int]] = [None] * n
    parity[0] = 0
    queue = [0]
    while queue:
        a = queue.pop()
        for i in range(t.ngens):
            b = t.rows[a][i]
            want = 1 - parity[a]
            if parity[b] is None:
                parity[b] = want
                queue.append(b)
            elif parity[b] != want:
                return False
    return True


def spanning_tree(t: CosetTable):
    """Breadth-first tree from the base point, edges tried in generator order.

    Returns (rep_words, tree_edge, nontree_edges): rep_words[a] is the word
    labelling the tree path 0 -> a; tree_edge marks positions (a, i) lying on
    the tree; nontree_edges lists each remaining undirected edge once as
    (a, i, b) with a <= b, in scan order.
    """
    n = t.size
    rep: list[Optional[Word]] = [None] * n
    rep[0] = ()
    tree_edge = [[False] * t.ngens for _ in range(n)]
    queue = [0]
    head = 0
    while head < len(queue):
        a = queue[head]
        head += 1
        for i in range(t.ngens):
            b = t.rows[a][i]
            if rep[b] is None:
                rep[b] = rep[a] + (i,)
                tree_edge[a][i] = True
                tree_edge[b][i] = True
                queue.append(b)
    nontree = []
    for a in range(n):
        for i in range(t.ngens):
            b = t.rows[a][i]
            if not tree_edge[a][i] and a <= b:
                nontree.append((a, i, b))
    return rep, tree_edge, nontree


def schreier_generators(t: CosetTable) -> list[Word]:
    """Generators of the base-point stabilizer, one per non-tree edge."""
    rep, _, nontree = spanning_tree(t)
    gens = []
    for a, i, b in nontree:
        gens.append(free_reduce(rep[a] + (i,) + tuple(reversed(rep[b]))))
    return gens


def orbit_count(t: CosetTable, gens: Iterable[Word]) -> int:
    """Number of orbits of the subgroup generated by the words on the points."""
    n = t.size
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    count = n
    for w in gens:
        for a in range(n):
            ra, rb = find(a), find(t.act(a, w))
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
                count -= 1
    return count


def orbits(t: CosetTable, gens: Iterable[Word]) -> list[list[int]]:
    n = t.size
    gens = list(gens)
    seen = [False] * n
    out = []
    for start in range(n):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        stack = [start]
        while stack:
            a = stack.pop()
            for w in gens:
                b = t.act(a, w)
                if not seen[b]:
                    seen[b] = True
                    comp.append(b)
                    stack.append(b)
        out.append(sorted(comp))
    return out


class FiniteGroupStore:
    """All elements of a finite group, living as points of its regular action.

    Elements are points of the coset table over the trivial subgroup; the
    point of g acted on the right by a word w is the point of g*w.  Left
    multiplication by generators is precomputed so conjugation and general
    products cost one table step per word letter.
    """

    def __init__(self, pres: PresentationLike, max_order: int = 10**6):
        self.pres = pres
        self.table = coset_enumeration(pres, [], max_cosets=max_order)
        n = self.table.size
        rep, _, _ = spanning_tree(self.table)
        self.words: list[Word] = [w for w in rep]  # shortest-ish word per element
        # left[i][g] = point of x_i * g, built along the same tree: for
        # g = h * x_j we have x_i g = (x_i h) x_j.
        self.left: list[list[int]] = [[-1] * n for _ in range(pres.ngens)]
        order_of_visit = sorted(range(n), key=lambda a: len(self.words[a]))
        for i in range(pres.ngens):
            li = self.left[i]
            li[0] = self.table.rows[0][i]
            for g in order_of_visit:
                if g == 0:
                    continue
                w = self.words[g]
                h = self.table.act(0, w[:-1])
                li[g] = self.table.rows[li[h]][w[-1]]

    @property
    def size(self) -> int:
        return self.table.size

    def mult(self, a: int, b: int) -> int:
        """Point of the product ab."""
        for i in reversed(self.words[a]):
            b = self.left[i][b]
        return b

    def inverse(self, a: int) -> int:
        return self.table.act(0, tuple(reversed(self.words[a])))

    def order(self, a: int) -> int:
        k = 1
        x = a
        w = self.words[a]
        while x != 0:
            x = self.table.act(x, w)
            k += 1
        return k

    def conjugacy_class(self, a: int) -> list[int]:
        """Orbit of a under conjugation, via x_i * g * x_i steps."""
        seen = {a}
        stack = [a]
        while stack:
            g = stack.pop()
            for i in range(self.pres.ngens):
                c = self.left[i][self.table.rows[g][i]]
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return sorted(seen)

    def elements_of_prime_order(self) -> dict[int, list[int]]:
        """Map prime -> sorted list of elements of that order."""
        out: dict[int, list[int]] = {}
        for g in range(1, self.size):
            k = self.order(g)
            if k >= 2 and all(k % d for d in range(2, int(k**0.5) + 1)):
                out.setdefault(k, []).append(g)
        return out


def finite_group_elements(pres: PresentationLike, max_order: int = 10**6) -> FiniteGroupStore:
    """Element store for a finite group; BudgetExceeded if it is not finite."""
    try:
        return FiniteGroupStore(pres, max_order=max_order)
    except BudgetExceeded:
        raise BudgetExceeded(
            f"group is not finite within the {max_order}-element budget")
