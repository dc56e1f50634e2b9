"""Certification of search results as face-identified manifolds.

A search-accepted subgroup K comes as a coset table of index |Gamma_v|.
This module re-derives, from scratch, the geometric content the census
claims for it:

* Gamma_v is a transversal, giving a bijection between table points and
  the chambers of the solid (verify_transversal);
* crossing the x1 wall and flowing back through the transversal induces a
  chamber involution that is equivariant for the face stabilizer, hence a
  side pairing of the solid: faces are identified in pairs by elements of K
  fixing no point of the glued face;
* tracing pairings around edges partitions the edges into cycles of length
  exactly p, with orientation signs read from the transport of endpoints;
* for spherical solids, every nontrivial element of K is checked to fix no
  coset of any maximal parabolic (free action), with an eigenvalue test in
  the reflection representation as a numerical cross-check.

Everything here is a condition check: the search is supposed to emit only
certifiable subgroups, and a CertificationFailure signals a bug upstream.
The payoff is the ManifoldRecord: face/edge identification strings, cusp
count and the canonical identification code used for deduplication.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .coset import (CosetTable, FiniteGroupStore, coset_enumeration,
                    finite_group_elements, orbit_count)
from .coxeter import (CENTER_NODES, CoxeterSymbol, GeometryClass, Presentation,
                      SolidDescriptor, standard_parabolic)
from .errors import CertificationFailure
from .search import SubgroupRecord
from .words import Word, free_reduce


@lru_cache(maxsize=None)
def _center_store(sym: CoxeterSymbol) -> FiniteGroupStore:
    """Element store of Gamma_v = <x2,x3,x4> of the working symbol."""
    pres = standard_parabolic(sym, CENTER_NODES).presentation
    return finite_group_elements(pres)


def _cells(store: FiniteGroupStore, gens: tuple[int, ...]) -> tuple[list[int], list[list[int]]]:
    """Orbits of a stabilizer subgroup on the chambers, numbered by first
    appearance in breadth-first chamber order.

    Returns (cell_of_chamber, cells); chambers are store points reordered by
    a breadth-first walk from the identity with generator-index tie-breaks.
    """
    n = store.size
    bfs_rank = [-1] * n
    order = [0]
    bfs_rank[0] = 0
    head = 0
    while head < len(order):
        a = order[head]
        head += 1
        for j in range(store.pres.ngens):
            b = store.table.rows[a][j]
            if bfs_rank[b] == -1:
                bfs_rank[b] = len(order)
                order.append(b)
    cell_of = [-1] * n
    cells: list[list[int]] = []
    for a in sorted(range(n), key=lambda x: bfs_rank[x]):
        if cell_of[a] != -1:
            continue
        idx = len(cells)
        comp = [a]
        cell_of[a] = idx
        stack = [a]
        while stack:
            u = stack.pop()
            for j in gens:
                v = store.table.rows[u][j]
                if cell_of[v] == -1:
                    cell_of[v] = idx
                    comp.append(v)
                    stack.append(v)
        cells.append(sorted(comp, key=lambda x: bfs_rank[x]))
    return cell_of, cells


@dataclass
class CellIndexing:
    """Faces, edges and vertices of the solid as chamber classes of Gamma_v.

    Chambers are the elements of Gamma_v; a cell's number is its rank in
    breadth-first discovery order.  Local generator indices: 0,1,2 stand for
    x2,x3,x4.
    """

    store: FiniteGroupStore
    face_of: list[int]
    faces: list[list[int]]
    edge_of: list[int]
    edges: list[list[int]]
    vertex_of: list[int]
    vertices: list[list[int]]

    @classmethod
    def of(cls, solid: SolidDescriptor) -> "CellIndexing":
        store = _center_store(solid.working_symbol)
        face_of, faces = _cells(store, (1, 2))      # stabilizer <x3,x4>
        edge_of, edges = _cells(store, (0, 2))      # stabilizer <x2,x4>
        vertex_of, vertices = _cells(store, (0, 1))  # stabilizer <x2,x3>
        ci = cls(store, face_of, faces, edge_of, edges, vertex_of, vertices)
        if (len(faces), len(edges), len(vertices)) != \
                (solid.faces, solid.edges, solid.vertices):
            raise CertificationFailure(
                f"cell counts {(len(faces), len(edges), len(vertices))} do not "
                f"match the solid {solid}")
        return ci


def transversal_labels(solid: SolidDescriptor, table: CosetTable) -> Optional[list[int]]:
    """Map table points to Gamma_v chambers, or None if Gamma_v is not a
    transversal (non-transitive or colliding orbit)."""
    store = _center_store(solid.working_symbol)
    m = table.size
    if m != store.size:
        return None
    label = [-1] * m
    used = [False] * store.size
    label[0] = 0
    used[0] = True
    stack = [0]
    while stack:
        p = stack.pop()
        for j in (1, 2, 3):
            q = table.rows[p][j]
            want = store.table.rows[label[p]][j - 1]
            if label[q] == -1:
                if used[want]:
                    return None
                label[q] = want
                used[want] = True
                stack.append(q)
            elif label[q] != want:
                return None
    if any(l == -1 for l in label):
        return None
    return label


def verify_transversal(solid: SolidDescriptor, rec: SubgroupRecord) -> bool:
    """Theorem-level condition: the solid's symmetry group is a transversal
    for K, i.e. its generators already sweep out all cosets."""
    return transversal_labels(solid, rec.table) is not None


def chamber_pairing(solid: SolidDescriptor, rec: SubgroupRecord) -> list[int]:
    """The x1-wall crossing as an involution of chambers.

    lam[g] is the chamber whose coset equals (coset of g) * x1; it encodes
    every face identification at once.
    """
    label = transversal_labels(solid, rec.table)
    if label is None:
        raise CertificationFailure(f"Gamma_v is not a transversal for {solid}")
    point_of = [0] * len(label)
    for p, l in enumerate(label):
        point_of[l] = p
    return [label[rec.table.rows[point_of[g]][0]] for g in range(len(label))]


@dataclass
class SidePairing:
    """Face partners and pairing words; partner[f] == f never happens."""

    partner: list[int]
    pairing_word: list[Word]        # gamma for face f: maps partner[f] onto f
    lam: list[int] = field(repr=False)


def side_pairings(solid: SolidDescriptor, rec: SubgroupRecord,
                  ci: Optional[CellIndexing] = None) -> SidePairing:
    ci = ci or CellIndexing.of(solid)
    store = ci.store
    lam = chamber_pairing(solid, rec)
    nf = len(ci.faces)
    partner = [-1] * nf
    words: list[Optional[Word]] = [None] * nf
    for f, chambers in enumerate(ci.faces):
        images = {ci.face_of[lam[g]] for g in chambers}
        if len(images) != 1:
            raise CertificationFailure(f"face {f} does not glue onto a single face")
        f2 = images.pop()
        if f2 == f:
            raise CertificationFailure(f"face {f} glues to itself")
        partner[f] = f2
        w = ci.faces[f][0]
        # gamma = w * x1 * lam(w)^{-1} in ambient letters; fixes the base coset
        w_word = _ambient(store.words[w])
        lam_word = _ambient(store.words[lam[w]])
        words[f] = free_reduce(w_word + (0,) + tuple(reversed(lam_word)))
    for f in range(nf):
        if partner[partner[f]] != f:
            raise CertificationFailure("face pairing is not an involution")
    table = rec.table
    for f in range(nf):
        if table.act(0, words[f]) != 0:
            raise CertificationFailure("pairing word does not lie in the subgroup")
        g = free_reduce(words[f] + words[partner[f]])
        if any(table.act(p, g) != p for p in range(table.size)):
            raise CertificationFailure("paired words are not inverse on the table")
    return SidePairing(partner=partner, pairing_word=[w for w in words], lam=lam)


def _ambient(word_v: Word) -> Word:
    """Lift a Gamma_v word (letters 0..2 for x2..x4) to ambient letters."""
    return tuple(i + 1 for i in word_v)


@dataclass
class EdgeCycle:
    """One edge class: (edge, sign) in trace order, sign relative to the
    first edge; cycles have length exactly p."""

    entries: list[tuple[int, int]]


def edge_cycles(solid: SolidDescriptor, rec: SubgroupRecord,
                sp: Optional[SidePairing] = None,
                ci: Optional[CellIndexing] = None) -> list[EdgeCycle]:
    ci = ci or CellIndexing.of(solid)
    sp = sp or side_pairings(solid, rec, ci)
    store = ci.store
    lam = sp.lam
    p = solid.dihedral_denominator

    def endpoint_sign(g: int) -> int:
        # canonical direction: from the lower-numbered endpoint
        v_here = ci.vertex_of[g]
        v_other = ci.vertex_of[store.table.rows[g][2]]   # across x4
        if v_here == v_other:
            raise CertificationFailure("edge with identified endpoints in the solid")
        return 1 if v_here < v_other else -1

    done = [False] * len(ci.edges)
    cycles = []
    for e0 in range(len(ci.edges)):
        if done[e0]:
            continue
        g = ci.edges[e0][0]
        sign0 = endpoint_sign(g)
        entries = [(e0, 1)]
        done[e0] = True
        seen_flags = {(ci.edge_of[g], ci.face_of[g])}
        cur = g
        for _ in range(4 * p):
            cur = store.table.rows[lam[cur]][0]          # glue, then swap face via x2
            e = ci.edge_of[cur]
            flag = (e, ci.face_of[cur])
            if flag == (ci.edge_of[g], ci.face_of[g]):
                break
            if flag in seen_flags:
                raise CertificationFailure("edge trace revisited a flag without closing")
            seen_flags.add(flag)
            if done[e]:
                raise CertificationFailure("edge classes do not partition the edges")
            done[e] = True
            entries.append((e, sign0 * endpoint_sign(cur)))
        else:
            raise CertificationFailure("edge cycle failed to close")
        if len(entries) != p:
            raise CertificationFailure(
                f"edge class of size {len(entries)}, expected {p}")
        cycles.append(EdgeCycle(entries))
    if len(cycles) * p != len(ci.edges):
        raise CertificationFailure("edge cycles do not cover the edge set")
    return cycles


# -- identification strings ----------------------------------------------------

def _letters(k: int) -> str:
    return string.ascii_lowercase[k]


def encode_FI_EI(solid: SolidDescriptor, sp: SidePairing,
                 cycles: list[EdgeCycle]) -> tuple[str, str]:
    """Letter encodings: same letter marks paired faces / one edge class;
    an edge letter's first occurrence carries p-1 signs telling whether the
    class's later edges (in numbering order) match its orientation."""
    return _encode_fi(sp.partner), _encode_ei(cycles)


def _encode_fi(partner: list[int]) -> str:
    letter_of: dict[int, str] = {}
    out = []
    k = 0
    for f, f2 in enumerate(partner):
        if f not in letter_of:
            letter_of[f] = letter_of[f2] = _letters(k)
            k += 1
        out.append(letter_of[f])
    return "".join(out)


def _encode_ei(cycles: list[EdgeCycle]) -> str:
    nedges = sum(len(c.entries) for c in cycles)
    letter_of = [""] * nedges
    block_of = [""] * nedges
    order = sorted(range(len(cycles)), key=lambda ci_: min(e for e, _ in cycles[ci_].entries))
    for k, ci_ in enumerate(order):
        entries = cycles[ci_].entries
        sign = dict(entries)
        edges = sorted(sign)
        first = edges[0]
        rebase = sign[first]
        for e in edges:
            letter_of[e] = _letters(k)
        block = "".join("+" if sign[e] * rebase > 0 else "-" for e in edges[1:])
        block_of[first] = f"({block})"
    return "".join(letter_of[e] + block_of[e] for e in range(nedges))


@lru_cache(maxsize=None)
def _left_translations(sym: CoxeterSymbol) -> list[list[int]]:
    """Left multiplication permutations of Gamma_v's chambers, sorted so the
    canonical code is a deterministic minimum."""
    store = _center_store(sym)
    n = store.size
    perms = []
    for u in range(n):
        perms.append([store.mult(u, g) for g in range(n)])
    return perms


def canonical_identification_code(solid: SolidDescriptor, sp: SidePairing,
                                  ci: Optional[CellIndexing] = None) -> str:
    """Minimal FI/EI text over relabelings of the solid by its symmetry group.

    Orientation signs are kept (recomputed from each relabeled numbering):
    normalizing them away would identify manifolds that differ only in edge
    gluing twists, such as the euclidean pair with equal homology.  The
    letters-only, flip-free form used to compare against published strings
    lives in census.record_comparison_code.
    """
    ci = ci or CellIndexing.of(solid)
    best: Optional[tuple[str, str]] = None
    for perm in _left_translations(solid.working_symbol):
        lam2 = [0] * len(sp.lam)
        for g, image in enumerate(sp.lam):
            lam2[perm[g]] = perm[image]
        fi, ei = _strings_from_lam(solid, ci, lam2, signs=True)
        if best is None or (fi, ei) < best:
            best = (fi, ei)
    return best[0] + "|" + best[1]


def _strings_from_lam(solid: SolidDescriptor, ci: CellIndexing, lam: list[int],
                      signs: bool = True) -> tuple[str, str]:
    """FI/EI for a chamber pairing; used for both records and canonical codes."""
    store = ci.store
    p = solid.dihedral_denominator
    nf = len(ci.faces)
    partner = [-1] * nf
    for f, chambers in enumerate(ci.faces):
        images = {ci.face_of[lam[g]] for g in chambers}
        if len(images) != 1 or images == {f}:
            raise CertificationFailure("pairing does not glue faces properly")
        partner[f] = images.pop()
    fi = _encode_fi(partner)

    def endpoint_sign(g: int) -> int:
        v_here = ci.vertex_of[g]
        v_other = ci.vertex_of[store.table.rows[g][2]]
        return 1 if v_here < v_other else -1

    done = [False] * len(ci.edges)
    cycles = []
    for e0 in range(len(ci.edges)):
        if done[e0]:
            continue
        g = ci.edges[e0][0]
        sign0 = endpoint_sign(g)
        entries = [(e0, 1)]
        done[e0] = True
        cur = g
        start_flag = (ci.edge_of[g], ci.face_of[g])
        for _ in range(4 * p):
            cur = store.table.rows[lam[cur]][0]
            e = ci.edge_of[cur]
            if (e, ci.face_of[cur]) == start_flag:
                break
            if done[e]:
                raise CertificationFailure("edge classes do not partition the edges")
            done[e] = True
            entries.append((e, sign0 * endpoint_sign(cur) if signs else 1))
        cycles.append(EdgeCycle(entries))
    ei = _encode_ei(cycles)
    return fi, ei


def cusp_count(solid: SolidDescriptor, rec: SubgroupRecord) -> int:
    """Orbits of the ideal-vertex stabilizer <x1,x2,x3> on the cosets."""
    if solid.compact:
        raise ValueError(f"{solid} is compact; it has no cusps")
    return orbit_count(rec.table, [(0,), (1,), (2,)])


# -- spherical freeness recheck -------------------------------------------------

def _spherical_free_action_check(solid: SolidDescriptor, rec: SubgroupRecord) -> None:
    """Every nontrivial element of K must fix no coset of any maximal
    parabolic, cross-checked numerically in the reflection representation."""
    from .freeness import _group_data, word_matrix

    sym = solid.working_symbol
    store, tables = _group_data(sym)
    gens = [store.table.act(0, w) for w in rec.schreier_gens]
    elements = {0}
    frontier = [0]
    while frontier:
        g = frontier.pop()
        for h in gens:
            prod = store.mult(g, h)
            if prod not in elements:
                elements.add(prod)
                frontier.append(prod)
    expected = store.size // rec.table.size
    if len(elements) != expected:
        raise CertificationFailure(
            f"subgroup closure has order {len(elements)}, expected {expected}")
    for g in sorted(elements - {0}):
        w = store.words[g]
        for t in tables:
            perm = np.arange(t.size)
            for i in w:
                perm = np.array(t.column(i))[perm]
            if np.any(perm == np.arange(t.size)):
                raise CertificationFailure(
                    "a nontrivial subgroup element fixes a parabolic coset")
        mat = word_matrix(sym, w)
        if np.linalg.svd(mat - np.eye(4), compute_uv=False)[-1] < 1e-9:
            raise CertificationFailure(
                "reflection representation shows a fixed point on the sphere")


# -- the record ------------------------------------------------------------------

@dataclass
class ManifoldRecord:
    id: str
    solid: SolidDescriptor
    subgroup: SubgroupRecord
    FI: str
    EI: str
    cusp_count: int                       # 0 for compact solids
    canonical_code: str
    homology: Optional[object] = None     # AbelianInvariants, filled later
    invariant_profile: Optional[object] = None
    external_flags: list[str] = field(default_factory=list)
    annotations: list[str] = field(default_factory=list)


def certify(solid: SolidDescriptor, rec: SubgroupRecord, record_id: str = "") -> ManifoldRecord:
    """Full condition check (transversal, pairing, edge cycles, freeness for
    spherical solids) followed by record assembly."""
    ci = CellIndexing.of(solid)
    if not verify_transversal(solid, rec):
        raise CertificationFailure(f"Gamma_v is not a transversal for {solid}")
    sp = side_pairings(solid, rec, ci)
    cycles = edge_cycles(solid, rec, sp, ci)
    if solid.geometry is GeometryClass.SPHERICAL:
        _spherical_free_action_check(solid, rec)
    fi, ei = _strings_from_lam(solid, ci, sp.lam, signs=True)
    code = canonical_identification_code(solid, sp, ci)
    cusps = 0 if solid.compact else cusp_count(solid, rec)
    return ManifoldRecord(
        id=record_id or solid.address(),
        solid=solid,
        subgroup=rec,
        FI=fi,
        EI=ei,
        cusp_count=cusps,
        canonical_code=code,
    )
