"""Invariants that tell the census manifolds apart.

Fundamental groups arrive as rewritten presentations.  The cheap invariants
(cusp count, first homology, order) separate most pairs; the workhorse for
the rest is the number of conjugacy classes of low-index subgroups, found by
a first-in-class backtracking search over coset tables of the presentation
(this one over a signed alphabet, since the subgroup generators are not
involutions).  A derived-series quotient K'/K'' is computed when the
abelianization is finite, as a last resort.

The report never asserts two manifolds are the same: records that no
computed invariant separates are listed as undistinguished, together with
whatever external facts the census attaches to them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import BudgetExceeded
from .fp import FpPresentation, SignedWord, free_reduce_signed, simplify
from .homology import AbelianInvariants, abelianized_matrix, invariants_from_matrix


def _cols(ngens: int) -> int:
    return 2 * ngens


def _col(x: int) -> int:
    return 2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1


def _inv_col(c: int) -> int:
    return c + 1 if c % 2 == 0 else c - 1


class _GeneralLowIndex:
    """All conjugacy classes of subgroups of index <= n_max of an fp group.

    Standard standardized-table backtracking with first-in-class rejection;
    built for the small indices the census needs (n_max <= ~8).
    """

    def __init__(self, pres: FpPresentation, n_max: int, max_nodes: int = 10**7):
        self.ncols = _cols(pres.ngens)
        self.relators = [tuple(_col(x) for x in r) for r in pres.relators]
        self.n_max = n_max
        self.max_nodes = max_nodes
        self.nodes = 0
        self.found: list[tuple] = []

    def run(self) -> list[tuple]:
        table = [[-1] * self.ncols]
        self._extend(table)
        return self.found

    # -- constraint propagation -------------------------------------------

    def _deduce(self, table) -> bool:
        changed = True
        while changed:
            changed = False
            for alpha in range(len(table)):
                for rel in self.relators:
                    if not self._scan(table, alpha, rel):
                        return False
                    changed = changed or self._scan_changed
        return True

    def _scan(self, table, alpha, rel) -> bool:
        """Trace rel from alpha; deduce on a single gap; detect clashes."""
        self._scan_changed = False
        f, i = alpha, 0
        n = len(rel)
        while i < n and table[f][rel[i]] != -1:
            f = table[f][rel[i]]
            i += 1
        if i == n:
            return f == alpha
        b, j = alpha, n - 1
        while j > i and table[b][_inv_col(rel[j])] != -1:
            b = table[b][_inv_col(rel[j])]
            j -= 1
        if j == i:
            c = rel[i]
            if table[f][c] != -1 or table[b][_inv_col(c)] != -1:
                return table[f][c] == b
            table[f][c] = b
            table[b][_inv_col(c)] = f
            self._scan_changed = True
        return True

    def _first_in_class(self, table) -> bool:
        n = len(table)
        for beta in range(1, n):
            mu = [-1] * n
            nu = [-1] * n
            mu[0] = beta
            nu[beta] = 0
            next_label = 1
            a = 0
            verdict = 0
            while a < next_label:
                stop = False
                for c in range(self.ncols):
                    t = table[mu[a]][c]
                    if t == -1:
                        stop = True
                        break
                    cc = nu[t]
                    if cc == -1:
                        cc = next_label
                        nu[t] = cc
                        mu[cc] = t
                        next_label += 1
                    o = table[a][c]
                    if o == -1:
                        stop = True
                        break
                    if cc != o:
                        if cc < o:
                            verdict = 1
                        stop = True
                        break
                if stop:
                    break
                a += 1
            if verdict:
                return False
        return True

    # -- search -------------------------------------------------------------

    def _extend(self, table) -> None:
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise BudgetExceeded(f"low-index profile exceeded {self.max_nodes} nodes")
        pos = None
        for a in range(len(table)):
            for c in range(self.ncols):
                if table[a][c] == -1:
                    pos = (a, c)
                    break
            if pos:
                break
        if pos is None:
            self.found.append(tuple(tuple(r) for r in table))
            return
        a, c = pos
        candidates = [b for b in range(len(table)) if table[b][_inv_col(c)] == -1]
        if len(table) < self.n_max:
            candidates.append(len(table))
        for b in candidates:
            work = [row[:] for row in table]
            if b == len(work):
                work.append([-1] * self.ncols)
            work[a][c] = b
            work[b][_inv_col(c)] = a
            if not self._deduce(work):
                continue
            if not self._first_in_class(work):
                continue
            self._extend(work)


def low_index_profile(pres: FpPresentation, n_max: int = 6,
                      max_nodes: int = 10**7) -> dict[int, int]:
    """index -> number of conjugacy classes of subgroups of that index."""
    pres = simplify(pres)
    tables = _GeneralLowIndex(pres, n_max, max_nodes).run()
    out = {k: 0 for k in range(2, n_max + 1)}
    for t in tables:
        if len(t) >= 2:
            out[len(t)] += 1
    return out


def order_of_K(solid, rec) -> Optional[int]:
    """|K| for spherical solids (|Gamma| / |Gamma_v|), None when infinite."""
    from .coxeter import GeometryClass, presentation
    from .coset import finite_group_elements

    if solid.geometry is not GeometryClass.SPHERICAL:
        return None
    store = finite_group_elements(presentation(solid.working_symbol))
    return store.size // solid.target_index


def derived_quotient(pres: FpPresentation, h1: AbelianInvariants,
                     max_cosets: int = 10**5) -> Optional[AbelianInvariants]:
    """K'/K'' when K/K' is finite, else None.

    The coset table of K' in K is the regular table of the abelianization
    (obtained by adding commutator relators); rewriting K's presentation over
    it presents K', whose abelianization is the answer.
    """
    from .fp import coset_table
    from .homology import rewrite_signed_presentation

    if h1.free_rank > 0:
        return None
    order = math.prod(h1.torsion) if h1.torsion else 1
    commutators = []
    for i in range(1, pres.ngens + 1):
        for j in range(i + 1, pres.ngens + 1):
            commutators.append((i, j, -i, -j))
    aug = FpPresentation(pres.ngens, pres.relators + tuple(commutators))
    table = coset_table(aug, [], max_cosets=4 * order + 64)
    assert len(table) == order
    derived = rewrite_signed_presentation(pres, table)
    return invariants_from_matrix(abelianized_matrix(derived), derived.ngens)


@dataclass
class InvariantProfile:
    h1: AbelianInvariants
    cusp_count: int
    order: Optional[int]                      # None = infinite
    low_index_classes: dict[int, int] = field(default_factory=dict)
    derived_quotient: Optional[AbelianInvariants] = None

    def key(self) -> tuple:
        return (self.cusp_count, self.h1.key(),
                -1 if self.order is None else self.order,
                tuple(sorted(self.low_index_classes.items())),
                None if self.derived_quotient is None else self.derived_quotient.key())


@dataclass
class DistinguishReport:
    groups: list[list[int]]                   # record indices, grouped when not separated
    justifications: list[str]
    profiles: list[InvariantProfile]


def distinguish_report(records: Sequence, n_max: int = 6,
                       max_nodes: int = 10**7) -> DistinguishReport:
    """Partition records (of one solid) by computed invariants.

    Separation is attempted in order: cusp count, H1, |K|, low-index class
    counts, derived-series quotient.  Each successful separation is logged
    with the invariant that achieved it; groups that remain are reported as
    not distinguished.
    """
    profiles: list[InvariantProfile] = []
    for r in records:
        assert r.invariant_profile is not None, "profiles must be computed first"
        profiles.append(r.invariant_profile)

    log: list[str] = []
    groups: dict[tuple, list[int]] = {}
    stages = [
        ("cusp count", lambda p: p.cusp_count),
        ("H1", lambda p: p.h1.key()),
        ("|K|", lambda p: -1 if p.order is None else p.order),
        ("low-index subgroup class counts", lambda p: tuple(sorted(p.low_index_classes.items()))),
        ("derived quotient K'/K''",
         lambda p: None if p.derived_quotient is None else p.derived_quotient.key()),
    ]
    current = {(): list(range(len(records)))}
    for name, keyfn in stages:
        nxt: dict[tuple, list[int]] = {}
        for prefix, members in current.items():
            if len(members) == 1:
                nxt[prefix] = members
                continue
            split: dict[object, list[int]] = {}
            for i in members:
                split.setdefault(keyfn(profiles[i]), []).append(i)
            if len(split) > 1:
                pretty = {records[i].id: keyfn(profiles[i]) for i in members}
                log.append(f"{name} separates {[records[i].id for i in members]}: {pretty}")
            for val, sub in sorted(split.items(), key=lambda kv: repr(kv[0])):
                nxt[prefix + (repr(val),)] = sub
        current = nxt
    final_groups = sorted(current.values())
    for g in final_groups:
        if len(g) > 1:
            ids = [records[i].id for i in g]
            flags = sorted({f for i in g for f in records[i].external_flags})
            note = f"not distinguished by computed invariants: {ids}"
            if flags:
                note += f" (external facts: {flags})"
            log.append(note)
    return DistinguishReport(groups=final_groups, justifications=log, profiles=profiles)
