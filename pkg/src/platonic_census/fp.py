"""General finitely presented groups on a signed alphabet.

The reflection groups themselves live on an involution alphabet (see
coset.py); the subgroups the census extracts do not, so their rewritten
presentations need inverse letters.  Words here are tuples of nonzero ints:
+g is generator number g (1-based), -g its inverse.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import toddcox

SignedWord = tuple[int, ...]


@dataclass(frozen=True)
class FpPresentation:
    ngens: int
    relators: tuple[SignedWord, ...]

    def __post_init__(self):
        for r in self.relators:
            assert all(x != 0 and abs(x) <= self.ngens for x in r), r


def free_reduce_signed(w: Sequence[int]) -> SignedWord:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def invert(w: Sequence[int]) -> SignedWord:
    return tuple(-x for x in reversed(w))


def _col(x: int) -> int:
    return 2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1


def coset_table(pres: FpPresentation, subgroup: Sequence[SignedWord],
                max_cosets: int = 10**6) -> list[list[int]]:
    """Coset table over the signed alphabet (2*ngens columns)."""
    ncols = 2 * pres.ngens
    inv = [c + 1 if c % 2 == 0 else c - 1 for c in range(ncols)]
    return toddcox.enumerate_cosets(
        ncols=ncols, inv=inv,
        relators=[tuple(_col(x) for x in r) for r in pres.relators],
        subgroup=[tuple(_col(x) for x in w) for w in subgroup],
        max_cosets=max_cosets)


def group_order(pres: FpPresentation, max_cosets: int = 10**6) -> int:
    """Order of the presented group by enumeration over the trivial subgroup."""
    return len(coset_table(pres, [], max_cosets=max_cosets))


def _cyclic_canonical(w: SignedWord) -> SignedWord:
    """Minimal rotation of the cyclically reduced word or its inverse."""
    w = list(free_reduce_signed(w))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    if not w:
        return ()
    best = None
    for cand in (tuple(w), invert(w)):
        for k in range(len(cand)):
            rot = cand[k:] + cand[:k]
            if best is None or rot < best:
                best = rot
    return best


def simplify(pres: FpPresentation, max_passes: int = 200) -> FpPresentation:
    """Tietze simplification: eliminate generators that occur exactly once in
    some relator, shortest solving relator first; drop duplicate relators.

    Abelianization and group order are invariants of this transformation;
    the tests rely on that.
    """
    rels = [list(free_reduce_signed(r)) for r in pres.relators]
    ngens = pres.ngens

    for _ in range(max_passes):
        canon = {}
        for r in rels:
            c = _cyclic_canonical(tuple(r))
            if c:
                canon.setdefault(c, list(c))
        rels = sorted(canon.values(), key=lambda r: (len(r), r))
        best = None
        for ri, r in enumerate(rels):
            counts: dict[int, int] = {}
            for x in r:
                counts[abs(x)] = counts.get(abs(x), 0) + 1
            for g, cnt in counts.items():
                if cnt == 1:
                    other = sum(c.count(g) + c.count(-g)
                                for rj, c in enumerate(rels) if rj != ri)
                    cost = (len(r) - 1) * other
                    key = (cost, len(r), g, ri)
                    if best is None or key < best[0]:
                        best = (key, ri, g)
        if best is None:
            break
        _, ri, g = best
        r = rels.pop(ri)
        k = next(i for i, x in enumerate(r) if abs(x) == g)
        rot = r[k:] + r[:k]
        if rot[0] == g:
            replacement = invert(rot[1:])          # g * w = 1  =>  g = w^-1
        else:
            replacement = tuple(rot[1:])           # g^-1 * w = 1  =>  g = w
        new_rels = []
        for c in rels:
            out: list[int] = []
            for x in c:
                if x == g:
                    out.extend(replacement)
                elif x == -g:
                    out.extend(invert(replacement))
                else:
                    out.append(x)
            new_rels.append(list(free_reduce_signed(out)))
        # renumber the generators above g down by one
        def renum(x: int) -> int:
            a = abs(x)
            a2 = a - 1 if a > g else a
            return a2 if x > 0 else -a2
        rels = [[renum(x) for x in c] for c in new_rels]
        ngens -= 1

    canon = {}
    for r in rels:
        c = _cyclic_canonical(tuple(r))
        if c:
            canon.setdefault(c, c)
    out = tuple(sorted(canon.values(), key=lambda r: (len(r), r)))
    return FpPresentation(ngens=ngens, relators=out)
