"""Fixed-point analysis for the spherical groups.

On the sphere, finite order does not imply fixed points, so the torsion
filter for a spherical census keeps only the elements that actually fix a
point of S^3.  An element fixes a point exactly when it lies in a conjugate
of a proper standard parabolic, which we test combinatorially: it must fix
a coset of one of the four maximal parabolics.  A 4x4 reflection
representation built from the Gram matrix provides a redundant numerical
cross-check (eigenvalue 1 within 1e-9); the combinatorial test is the one
the pipeline trusts.

The generating reflections and prime-order pair powers do not reach every
prime-order conjugacy class of a spherical group (products of three
orthogonal reflections are the typical omission), so the torsion set is
closed up by a brute-force scan of the whole finite group.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .coset import CosetTable, FiniteGroupStore, coset_enumeration, finite_group_elements
from .coxeter import (CoxeterSymbol, GeometryClass, TorsionEntry, TorsionSet,
                      classify_geometry, presentation, standard_parabolic)
from .words import Word


@lru_cache(maxsize=None)
def _group_data(sym: CoxeterSymbol):
    store = finite_group_elements(presentation(sym))
    tables = [
        coset_enumeration(presentation(sym),
                          [(i,) for i in nodes],
                          max_cosets=store.size + 16)
        for nodes in itertools.combinations(range(4), 3)
    ]
    return store, tables


def fixes_point_on_sphere(sym: CoxeterSymbol, w: Word) -> bool:
    """Whether the element fixes a point of S^3 (spherical symbols only).

    True iff the word fixes a coset of some maximal standard parabolic.
    """
    if classify_geometry(sym) is not GeometryClass.SPHERICAL:
        raise ValueError(f"{sym} is not spherical")
    _, tables = _group_data(sym)
    for t in tables:
        if any(t.act(a, w) == a for a in range(t.size)):
            return True
    return False


def prime_order_classes(sym: CoxeterSymbol) -> list[tuple[Word, int, bool]]:
    """One representative per conjugacy class of prime-order elements.

    Returns (word, order, fixes_point) triples, word chosen shortest (ties by
    word value) within the class; deterministic order by (order, word).
    """
    store, tables = _group_data(sym)
    by_prime = store.elements_of_prime_order()
    out = []
    seen = [False] * store.size
    for prime in sorted(by_prime):
        for g in by_prime[prime]:
            if seen[g]:
                continue
            cls = store.conjugacy_class(g)
            for h in cls:
                seen[h] = True
            rep = min(cls, key=lambda h: (len(store.words[h]), store.words[h]))
            w = store.words[rep]
            fixes = any(
                any(t.act(a, w) == a for a in range(t.size)) for t in tables)
            out.append((w, prime, fixes))
    out.sort(key=lambda e: (e[1], e[0]))
    return out


def annotate_spherical_torsion(sym: CoxeterSymbol, ts: TorsionSet) -> TorsionSet:
    """Set the fixed-point flag on every entry and close up the set so every
    prime-order conjugacy class of the finite group has a representative."""
    if classify_geometry(sym) is not GeometryClass.SPHERICAL:
        raise ValueError(f"{sym} is not spherical")
    store, tables = _group_data(sym)
    classes = prime_order_classes(sym)
    class_of_point: dict[int, int] = {}
    for k, (w, _, _) in enumerate(classes):
        for h in store.conjugacy_class(store.table.act(0, w)):
            class_of_point[h] = k

    entries = []
    covered = set()
    for e in ts.entries:
        g = store.table.act(0, e.word)
        k = class_of_point[g]
        covered.add(k)
        order, fixes = classes[k][1], classes[k][2]
        assert order == e.order, (e.word, order, e.order)
        entries.append(TorsionEntry(e.word, e.order, fixes))
    for k, (w, order, fixes) in enumerate(classes):
        if k not in covered:
            entries.append(TorsionEntry(w, order, fixes))
    return TorsionSet(tuple(entries))


# -- numerical cross-check ----------------------------------------------------

def gram_matrix(sym: CoxeterSymbol) -> np.ndarray:
    m = sym.coxeter_matrix()
    return np.array([[-np.cos(np.pi / m[i][j]) if i != j else 1.0
                      for j in range(4)] for i in range(4)])


def reflection_matrices(sym: CoxeterSymbol) -> list[np.ndarray]:
    """Generators of the geometric representation: r_i = I - 2 e_i gram_i."""
    g = gram_matrix(sym)
    mats = []
    for i in range(4):
        r = np.eye(4)
        r[i, :] -= 2.0 * g[i, :]
        mats.append(r)
    return mats


def word_matrix(sym: CoxeterSymbol, w: Word) -> np.ndarray:
    mats = reflection_matrices(sym)
    out = np.eye(4)
    for i in w:
        out = out @ mats[i]
    return out


def fixes_point_numerically(sym: CoxeterSymbol, w: Word, tol: float = 1e-9) -> bool:
    """Eigenvalue-1 test in the reflection representation (validator only)."""
    m = word_matrix(sym, w) - np.eye(4)
    return bool(np.linalg.svd(m, compute_uv=False)[-1] < tol)
