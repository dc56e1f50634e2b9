"""Backtracking search for the census subgroups.

Enumerates one coset table per conjugacy class of index-m subgroups of a
rank-4 reflection group, subject to the census constraints: every listed
torsion word acts without fixed points and the subgroup is orientation
preserving.

The search space is cut down by a structural fact before any backtracking
happens: for a subgroup of index |Gamma_v| whose torsion filter passes,
Gamma_v = <x2,x3,x4> is a transversal, so the x2,x3,x4 columns of the coset
table form the regular action of the finite group Gamma_v.  Scanning those
columns ahead of the x1 column therefore fills them with zero branching:
the points become Gamma_v elements in breadth-first order, their sign
parities are fixed, and the only thing left to search is the x1 column,
which is exactly the face pairing of the solid.

Constraint folding for the x1 column:

* torsion reflections make it a fixed-point-free involution;
* the prime-order powers of x1*x_j force every alternating (1,j)-cycle to
  have full length 2*m_1j, enforced (and exploited for deductions) by
  walking those paths whenever a pairing entry appears; the pairs inside
  {x2,x3,x4} hold automatically in the regular action;
* leftover filter words (the extra spherical classes) are traced explicitly.

Conjugacy-class canonicity is the standard first-in-class test: reject a
partial table as soon as renumbering from another base point gives a
lexicographically smaller table.  With the pinned Gamma_v part, renumbering
from base b is left translation by b, so the test compares the x1 column
against 119 precomputed permutations of itself and is cheap enough to run
at every node.
"""

from __future__ import annotations

import multiprocessing
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .coset import (CosetTable, PresentationLike, coset_enumeration,
                    parity_orientable, schreier_generators)
from .errors import BudgetExceeded
from .words import Word
from . import toddcox

Decision = tuple[int, int, int]          # (point, generator=0, value)


@dataclass(frozen=True)
class SearchConstraints:
    target_index: int
    torsion_words: tuple[Word, ...]
    require_orientable: bool = True
    require_transitive: bool = True      # tables are built connected; kept for the record


@dataclass
class SubgroupRecord:
    """An accepted subgroup, encoded by its (canonical) coset table."""

    table: CosetTable
    orientable: bool
    schreier_gens: list[Word] = field(default_factory=list)
    presentation_of_K: Optional[object] = None   # filled by the homology stage

    def key(self) -> tuple:
        return self.table.rows


@dataclass
class SearchReport:
    accepted: list[SubgroupRecord]
    nodes_explored: int
    wall_time: float


def _pair_orders(pres: PresentationLike) -> list[list[int]]:
    m = [[0] * 4 for _ in range(4)]
    for i in range(4):
        m[i][i] = 1
    for rel in pres.relators:
        letters = sorted(set(rel))
        if len(letters) == 1:
            continue
        if len(letters) != 2 or len(rel) % 2:
            raise ValueError(f"not a rank-4 reflection presentation: relator {rel}")
        i, j = letters
        if rel != (rel[0], rel[1]) * (len(rel) // 2) or {rel[0], rel[1]} != {i, j}:
            raise ValueError(f"relator {rel} is not an alternating pair power")
        m[i][j] = m[j][i] = len(rel) // 2
    for i in range(4):
        for j in range(i + 1, 4):
            if m[i][j] == 0:
                raise ValueError(f"missing pair relator for generators {i},{j}")
    return m


def _split_filter(pair_orders, torsion_words):
    """Classify filter words into column/cycle constraints and extras.

    The engine only supports the census situation where all four generators
    are filtered and every pair has its full set of prime-order powers
    filtered, so that (i,j)-cycles must have exact length; whatever remains
    (the extra spherical classes) is returned for explicit tracing.
    """
    fpf = set()
    pair_exponents: dict[tuple[int, int], set[int]] = {}
    extras: list[Word] = []
    for w in torsion_words:
        if len(w) == 1:
            fpf.add(w[0])
        elif len(set(w)) == 2 and w == (w[0], w[1]) * (len(w) // 2) and len(w) % 2 == 0:
            i, j = min(w[0], w[1]), max(w[0], w[1])
            pair_exponents.setdefault((i, j), set()).add(len(w) // 2)
        else:
            extras.append(tuple(w))
    if fpf != {0, 1, 2, 3}:
        raise NotImplementedError("census search expects all four reflections filtered")
    for i in range(4):
        for j in range(i + 1, 4):
            mij = pair_orders[i][j]
            need = {mij // s for s in _primes(mij)}
            have = pair_exponents.get((i, j), set())
            if not need <= have:
                raise NotImplementedError(
                    f"pair ({i},{j}) is missing prime-power filters {need - have}")
    return extras


def _primes(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class CensusFrame:
    """Fixed data shared by every node of one search: the pinned Gamma_v part
    of the table, point parities, and the base-change translation maps."""

    def __init__(self, pair_orders, target_index: int, extras: Sequence[Word],
                 orientable: bool):
        from .coxeter import Presentation  # local import to avoid a cycle

        self.M = pair_orders
        self.m = target_index
        self.extras = [tuple(w) for w in extras]
        self.orientable = orientable

        rels: list[Word] = [(i, i) for i in range(3)]
        for a in range(1, 4):
            for b in range(a + 1, 4):
                rels.append(((a - 1, b - 1) * pair_orders[a][b]))
        pres_v = Presentation(ngens=3, relators=tuple(rels))
        table = coset_enumeration(pres_v, [], max_cosets=4 * target_index + 64)
        if table.size != target_index:
            raise ValueError(
                f"target index {target_index} is not the order {table.size} of "
                "<x2,x3,x4>; the census search requires them equal")
        rows = toddcox.standardize([list(r) for r in table.rows])
        m = self.m
        self.gcols = [[rows[a][j] for a in range(m)] for j in range(3)]

        parity = [-1] * m
        parity[0] = 0
        queue = [0]
        while queue:
            a = queue.pop()
            for j in range(3):
                b = self.gcols[j][a]
                if parity[b] == -1:
                    parity[b] = 1 - parity[a]
                    queue.append(b)
        self.parity = parity

        # Base change to point b = breadth-first renumbering from b, which on
        # the regular graph is left translation; the Gamma_v columns are
        # invariant under it, so first-in-class only ever compares the x1
        # column through these maps.
        self.mu = [self._bfs_from(b) for b in range(m)]
        self.nu = []
        for b in range(m):
            inv = [0] * m
            for a in range(m):
                inv[self.mu[b][a]] = a
            self.nu.append(inv)
        for b in range(m):
            mu_b, nu_b = self.mu[b], self.nu[b]
            for j in range(3):
                col = self.gcols[j]
                assert all(nu_b[col[mu_b[a]]] == col[a] for a in range(m)), \
                    "Gamma_v columns must be invariant under base change"

    def _bfs_from(self, base: int) -> list[int]:
        order = [base]
        seen = [False] * self.m
        seen[base] = True
        head = 0
        while head < len(order):
            a = order[head]
            head += 1
            for j in range(3):
                b = self.gcols[j][a]
                if not seen[b]:
                    seen[b] = True
                    order.append(b)
        return order


class _Engine:
    """One in-progress search over the x1 column; cheap to replay."""

    def __init__(self, frame: CensusFrame):
        self.f = frame
        self.pair = [-1] * frame.m
        self.undo: list[int] = []
        self.nodes = 0

    def _rollback(self, mark: int) -> None:
        pair = self.pair
        undo = self.undo
        while len(undo) > mark:
            a = undo.pop()
            pair[pair[a]] = -1
            pair[a] = -1

    def _frontier(self, start: int) -> int:
        pair = self.pair
        for a in range(start, self.f.m):
            if pair[a] == -1:
                return a
        return -1

    def _candidates(self, a: int) -> list[int]:
        pair = self.pair
        parity = self.f.parity
        pa = parity[a]
        if self.f.orientable:
            return [b for b in range(self.f.m)
                    if pair[b] == -1 and b != a and parity[b] != pa]
        return [b for b in range(self.f.m) if pair[b] == -1 and b != a]

    def _apply(self, a: int, b: int) -> bool:
        """Pair a with b, propagate cycle deductions, run the node filters."""
        f = self.f
        pair = self.pair
        gcols = f.gcols
        M = f.M
        parity = f.parity
        orientable = f.orientable
        pair[a] = b
        pair[b] = a
        self.undo.append(a)
        queue = [a]
        while queue:
            ua = queue.pop()
            for j in range(1, 4):
                L = 2 * M[0][j]
                gc = gcols[j - 1]
                # walk the alternating (x1,xj)-path through the pairing at ua
                u, on_pair, cnt = ua, True, 0
                closed = False
                while cnt < L:
                    v = pair[u] if on_pair else gc[u]
                    if v == -1:
                        break
                    u = v
                    on_pair = not on_pair
                    cnt += 1
                    if u == ua and on_pair:
                        closed = True
                        break
                if closed:
                    if cnt != L:
                        return False
                    continue
                if cnt >= L:
                    return False
                end_f, f_on_pair = u, on_pair
                u, on_pair, cnt_b = ua, False, 0
                while cnt_b < L:
                    v = pair[u] if on_pair else gc[u]
                    if v == -1:
                        break
                    u = v
                    on_pair = not on_pair
                    cnt_b += 1
                end_b, b_on_pair = u, on_pair
                total = cnt + cnt_b
                if total >= L:
                    return False
                if total == L - 1:
                    # the closing edge is always a pairing edge: gcols are total
                    if not (f_on_pair and b_on_pair) or end_f == end_b:
                        return False
                    if orientable and parity[end_f] == parity[end_b]:
                        return False
                    if pair[end_f] != -1 or pair[end_b] != -1:
                        return False
                    pair[end_f] = end_b
                    pair[end_b] = end_f
                    self.undo.append(end_f)
                    queue.append(end_f)
        if f.extras and not self._extras_ok():
            return False
        return self._first_in_class()

    def _extras_ok(self) -> bool:
        pair = self.pair
        gcols = self.f.gcols
        for w in self.f.extras:
            for start in range(self.f.m):
                u = start
                for x in w:
                    u = pair[u] if x == 0 else gcols[x - 1][u]
                    if u == -1:
                        break
                else:
                    if u == start:
                        return False
        return True

    def _first_in_class(self) -> bool:
        """Reject pairings that renumber strictly smaller from another base.

        Conservative on partial tables (prunes only when the renumbered
        column is already smaller on defined entries); exact once complete.
        """
        pair = self.pair
        f = self.f
        for beta in range(1, f.m):
            mu_b = f.mu[beta]
            nu_b = f.nu[beta]
            for a in range(f.m):
                t = pair[mu_b[a]]
                if t == -1:
                    break
                o = pair[a]
                if o == -1:
                    break
                c = nu_b[t]
                if c != o:
                    if c < o:
                        return False
                    break
        return True

    # -- search driver -----------------------------------------------------

    def replay(self, decisions: Sequence[Decision]) -> None:
        start = 0
        for a, i, b in decisions:
            assert i == 0
            pos = self._frontier(start)
            assert pos == a, f"replay diverged: {pos} vs {a}"
            ok = self._apply(a, b)
            assert ok, "replay of a committed decision failed"
            start = a

    def run(self, split_depth: Optional[int] = None, max_nodes: Optional[int] = None):
        """Depth-first search from the current state.

        Yields ('table', rows) for accepted complete tables, and, when
        split_depth is given, ('root', decisions) for unexplored subtree
        roots at that depth instead of descending into them.
        """
        pos0 = self._frontier(0)
        if pos0 == -1:
            yield ("table", self._snapshot())
            return
        stack = [[pos0, self._candidates(pos0), 0, len(self.undo)]]
        while stack:
            frame = stack[-1]
            a, cands, idx, mark = frame
            self._rollback(mark)
            if idx >= len(cands):
                stack.pop()
                continue
            if max_nodes is not None and self.nodes >= max_nodes:
                raise BudgetExceeded(f"search exceeded {max_nodes} nodes")
            frame[2] += 1
            b = cands[idx]
            self.nodes += 1
            if not self._apply(a, b):
                continue
            pos = self._frontier(a)
            if pos == -1:
                yield ("table", self._snapshot())
                continue
            if split_depth is not None and len(stack) >= split_depth:
                yield ("root", [(fr[0], 0, fr[1][fr[2] - 1]) for fr in stack])
                continue
            stack.append([pos, self._candidates(pos), 0, len(self.undo)])

    def _snapshot(self) -> tuple[tuple[int, ...], ...]:
        f = self.f
        return tuple(
            (self.pair[a], f.gcols[0][a], f.gcols[1][a], f.gcols[2][a])
            for a in range(f.m))


def _make_frame(pres: PresentationLike, c: SearchConstraints) -> CensusFrame:
    pair_orders = _pair_orders(pres)
    extras = _split_filter(pair_orders, c.torsion_words)
    return CensusFrame(pair_orders, c.target_index, extras, c.require_orientable)


def _pick_backend(backend: str) -> str:
    if backend == "auto":
        from . import _fastsearch
        return "numba" if _fastsearch.HAVE_NUMBA else "python"
    if backend not in ("python", "numba"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


def _run_phase(pres: PresentationLike, c: SearchConstraints, backend: str,
               replay: Sequence[Decision] = (), split_depth: int = 0,
               max_nodes: Optional[int] = None):
    """One search pass; returns (tables, roots, nodes)."""
    frame = _make_frame(pres, c)
    if backend == "numba":
        from . import _fastsearch
        return _fastsearch.run_fast(frame, replay=replay, split_depth=split_depth,
                                    max_nodes=max_nodes)
    engine = _Engine(frame)
    engine.replay(replay)
    tables, roots = [], []
    for kind, payload in engine.run(split_depth=split_depth or None,
                                    max_nodes=max_nodes):
        (tables if kind == "table" else roots).append(payload)
    return tables, roots, engine.nodes


_worker_state: dict = {}


def _worker_init(pres, constraints, backend, max_nodes):
    _worker_state["args"] = (pres, constraints, backend, max_nodes)


def _worker_run(decisions):
    pres, constraints, backend, max_nodes = _worker_state["args"]
    tables, _, nodes = _run_phase(pres, constraints, backend, replay=decisions,
                                  max_nodes=max_nodes)
    return tables, nodes


def low_index_search(pres: PresentationLike, c: SearchConstraints,
                     threads: int = 1, split_depth: int = 3,
                     backend: str = "auto",
                     max_nodes: Optional[int] = None) -> SearchReport:
    """All census subgroups of exact index c.target_index, one per class.

    With threads > 1 the backtrack tree is split at a fixed depth and the
    subtrees are searched by worker processes; the accepted set and its
    canonical order are identical for any thread count and either backend
    (the compiled backend mirrors the pure-Python engine step for step).
    Raises BudgetExceeded if max_nodes is set and hit.
    """
    t0 = time.monotonic()
    backend = _pick_backend(backend)
    tables: list[tuple] = []
    nodes = 0
    if threads <= 1:
        tables, _, nodes = _run_phase(pres, c, backend, max_nodes=max_nodes)
    else:
        tables, roots, nodes = _run_phase(pres, c, backend, split_depth=split_depth,
                                          max_nodes=max_nodes)
        if roots:
            with multiprocessing.Pool(threads, initializer=_worker_init,
                                      initargs=(pres, c, backend, max_nodes)) as pool:
                for sub_tables, sub_nodes in pool.imap_unordered(
                        _worker_run, roots, chunksize=max(1, len(roots) // (8 * threads))):
                    tables.extend(sub_tables)
                    nodes += sub_nodes
    tables.sort()
    accepted = []
    for rows in tables:
        table = CosetTable(ngens=4, rows=rows)
        record = SubgroupRecord(table=table, orientable=parity_orientable(table),
                                schreier_gens=schreier_generators(table))
        if c.require_orientable:
            assert record.orientable
        accepted.append(record)
    return SearchReport(accepted=accepted, nodes_explored=nodes,
                        wall_time=time.monotonic() - t0)


def verify_record(pres: PresentationLike, c: SearchConstraints,
                  record: SubgroupRecord) -> None:
    """Recheck a search result from scratch (used by tests and certify)."""
    from .coset import is_fixed_point_free
    t = record.table
    t.validate(pres)
    assert t.size == c.target_index
    for w in c.torsion_words:
        assert is_fixed_point_free(t, w), f"torsion word {w} fixes a point"
    if c.require_orientable:
        assert parity_orientable(t)
