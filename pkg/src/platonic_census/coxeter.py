"""Rank-4 linear Coxeter symbols {p,q,r} and the Platonic solids they carry.

The group Gamma = {p,q,r} is generated by four reflections x1..x4 (indices
0..3 in code), with (x_i x_{i+1}) of order p, q, r along the diagram and
commuting non-adjacent pairs.  Deleting an end node leaves a rank-3 parabolic;
when that parabolic is finite, the orbit of the fundamental chamber under it
is a Platonic solid whose faces get identified by the census subgroups.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

from .words import Word
from . import coset

Symbol = tuple[int, int, int]

#: The complete list of rank-4 linear Coxeter simplex symbols, per geometry.
SPHERICAL_SYMBOLS: tuple[Symbol, ...] = ((3, 3, 3), (4, 3, 3), (3, 4, 3), (3, 3, 5))
EUCLIDEAN_SYMBOLS: tuple[Symbol, ...] = ((4, 3, 4),)
HYPERBOLIC_COMPACT_SYMBOLS: tuple[Symbol, ...] = ((4, 3, 5), (3, 5, 3), (5, 3, 5))
HYPERBOLIC_NONCOMPACT_SYMBOLS: tuple[Symbol, ...] = (
    (4, 4, 3), (4, 3, 6), (5, 3, 6), (3, 3, 6), (3, 6, 3), (4, 4, 4), (6, 3, 6))

ALL_SYMBOLS: tuple[Symbol, ...] = (
    SPHERICAL_SYMBOLS + EUCLIDEAN_SYMBOLS
    + HYPERBOLIC_COMPACT_SYMBOLS + HYPERBOLIC_NONCOMPACT_SYMBOLS)

#: Combinatorics of the Platonic solid with s-gonal faces, v per vertex:
#: (name, faces, edges, vertices, order of the symmetry group).
PLATONIC = {
    (3, 3): ("tetrahedron", 4, 6, 4, 24),
    (4, 3): ("cube", 6, 12, 8, 48),
    (3, 4): ("octahedron", 8, 12, 6, 48),
    (5, 3): ("dodecahedron", 12, 30, 20, 120),
    (3, 5): ("icosahedron", 20, 30, 12, 120),
}


class GeometryClass(enum.Enum):
    SPHERICAL = "spherical"
    EUCLIDEAN = "euclidean"
    HYPERBOLIC_COMPACT = "hyperbolic-compact"
    HYPERBOLIC_NONCOMPACT = "hyperbolic-noncompact"
    NOT_LISTED = "not-listed"


@dataclass(frozen=True)
class CoxeterSymbol:
    p: int
    q: int
    r: int

    def __post_init__(self):
        if min(self.p, self.q, self.r) < 2:
            raise ValueError(f"edge labels must be >= 2, got {self.as_tuple()}")

    def as_tuple(self) -> Symbol:
        return (self.p, self.q, self.r)

    def reversed(self) -> "CoxeterSymbol":
        return CoxeterSymbol(self.r, self.q, self.p)

    def is_palindromic(self) -> bool:
        return self.p == self.r

    def coxeter_matrix(self) -> list[list[int]]:
        m = [[2] * 4 for _ in range(4)]
        for i in range(4):
            m[i][i] = 1
        for i, label in enumerate((self.p, self.q, self.r)):
            m[i][i + 1] = m[i + 1][i] = label
        return m

    def pair_order(self, i: int, j: int) -> int:
        """Order of x_i x_j (0-based indices)."""
        return self.coxeter_matrix()[i][j]

    def __str__(self):
        return "{%d,%d,%d}" % self.as_tuple()


def parse_symbol(text: str) -> CoxeterSymbol:
    parts = text.replace("{", "").replace("}", "").split(",")
    if len(parts) != 3:
        raise ValueError(f"expected 'p,q,r', got {text!r}")
    return CoxeterSymbol(*(int(s.strip()) for s in parts))


@dataclass(frozen=True)
class Presentation:
    """The standard presentation of {p,q,r}: 4 involutions, 6 pair relators."""

    ngens: int
    relators: tuple[Word, ...]

    @classmethod
    def of(cls, sym: CoxeterSymbol) -> "Presentation":
        return presentation(sym)


@lru_cache(maxsize=None)
def presentation(sym: CoxeterSymbol) -> Presentation:
    rels: list[Word] = [(i, i) for i in range(4)]
    m = sym.coxeter_matrix()
    for i in range(4):
        for j in range(i + 1, 4):
            rels.append((i, j) * m[i][j])
    return Presentation(ngens=4, relators=tuple(rels))


def classify_geometry(sym: CoxeterSymbol) -> GeometryClass:
    t = sym.as_tuple()
    rt = sym.reversed().as_tuple()
    for cls, symbols in (
        (GeometryClass.SPHERICAL, SPHERICAL_SYMBOLS),
        (GeometryClass.EUCLIDEAN, EUCLIDEAN_SYMBOLS),
        (GeometryClass.HYPERBOLIC_COMPACT, HYPERBOLIC_COMPACT_SYMBOLS),
        (GeometryClass.HYPERBOLIC_NONCOMPACT, HYPERBOLIC_NONCOMPACT_SYMBOLS),
    ):
        if t in symbols or rt in symbols:
            return cls
    return GeometryClass.NOT_LISTED


# -- parabolic subgroups ------------------------------------------------------

@dataclass(frozen=True)
class ParabolicDescriptor:
    """Standard parabolic on a node subset J, with its induced presentation."""

    symbol: CoxeterSymbol
    nodes: tuple[int, ...]          # 0-based, sorted
    presentation: Presentation      # on len(nodes) generators, in node order
    finite: bool
    order: Optional[int]            # None when infinite

    def generator_words(self) -> list[Word]:
        """The parabolic's generators as words in the ambient group."""
        return [(i,) for i in self.nodes]


def _diagram_components(sym: CoxeterSymbol, nodes: Sequence[int]) -> list[list[int]]:
    m = sym.coxeter_matrix()
    nodes = sorted(nodes)
    comps: list[list[int]] = []
    for v in nodes:
        for comp in comps:
            if any(m[v][u] > 2 for u in comp):
                comp.append(v)
                break
        else:
            comps.append([v])
    return comps


def _component_finite_order(sym: CoxeterSymbol, comp: list[int]) -> Optional[int]:
    """Order of the (connected, linear) component group, or None if infinite."""
    m = sym.coxeter_matrix()
    if len(comp) == 1:
        return 2
    if len(comp) == 2:
        return 2 * m[comp[0]][comp[1]]
    if len(comp) == 3:
        a, b = m[comp[0]][comp[1]], m[comp[1]][comp[2]]
        excess = Fraction(1, a) + Fraction(1, b) - Fraction(1, 2)
        if excess <= 0:
            return None
        order = Fraction(4) / excess
        assert order.denominator == 1
        return int(order)
    raise ValueError("rank-4 components are never finite simplex stabilizers here")


def standard_parabolic(sym: CoxeterSymbol, nodes: Sequence[int]) -> ParabolicDescriptor:
    """Parabolic on the given 0-based node subset.

    Finiteness comes from the classical spherical criterion on diagram
    components; the order of a finite parabolic is recomputed by coset
    enumeration over the trivial subgroup and checked against the product of
    component orders.
    """
    nodes = tuple(sorted(set(nodes)))
    if any(i not in range(4) for i in nodes):
        raise ValueError(f"nodes must be within 0..3, got {nodes}")
    m = sym.coxeter_matrix()
    relabel = {v: k for k, v in enumerate(nodes)}
    rels: list[Word] = [(relabel[v], relabel[v]) for v in nodes]
    for a in nodes:
        for b in nodes:
            if a < b:
                rels.append((relabel[a], relabel[b]) * m[a][b])
    pres = Presentation(ngens=len(nodes), relators=tuple(rels))

    orders = [_component_finite_order(sym, comp) for comp in _diagram_components(sym, nodes)]
    finite = all(o is not None for o in orders)
    order = None
    if finite:
        expected = 1
        for o in orders:
            expected *= o
        table = coset.coset_enumeration(pres, [], max_cosets=4 * expected + 16)
        assert table.size == expected, (sym, nodes, table.size, expected)
        order = table.size
    return ParabolicDescriptor(sym, nodes, pres, finite, order)


#: Node subsets of the cell stabilizers, for a solid centered at the left node.
CENTER_NODES = (1, 2, 3)      # Gamma_v, the solid's symmetry group
FACE_NODES = (0, 2, 3)        # Gamma_f
EDGE_NODES = (0, 1, 3)        # Gamma_e
VERTEX_NODES = (0, 1, 2)      # Gamma_w; infinite exactly for ideal vertices


# -- torsion representatives --------------------------------------------------

def _prime_factors(n: int) -> list[int]:
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


@dataclass(frozen=True)
class TorsionEntry:
    word: Word
    order: int                                  # a prime
    has_fixed_point_on_sphere: Optional[bool] = None


@dataclass(frozen=True)
class TorsionSet:
    entries: tuple[TorsionEntry, ...]

    def words(self) -> list[Word]:
        return [e.word for e in self.entries]

    def filter_words(self) -> list[Word]:
        """Words the census subgroup must avoid (acting without fixed points).

        Entries with has_fixed_point_on_sphere=False are isometries acting
        freely on the sphere and impose no constraint; unset means the ambient
        geometry is Euclidean/hyperbolic, where all torsion is constrained.
        """
        return [e.word for e in self.entries if e.has_fixed_point_on_sphere is not False]


def torsion_representatives(sym: CoxeterSymbol) -> TorsionSet:
    """Generating reflections plus prime-order powers of pairwise products.

    For a rank-4 simplex group in Euclidean/hyperbolic space this meets every
    conjugacy class of prime-order elements; spherical groups need the
    brute-force closure in freeness.annotate_spherical_torsion.
    """
    entries: list[TorsionEntry] = [TorsionEntry((i,), 2) for i in range(4)]
    m = sym.coxeter_matrix()
    for i in range(4):
        for j in range(i + 1, 4):
            mij = m[i][j]
            for s in _prime_factors(mij):
                entries.append(TorsionEntry((i, j) * (mij // s), s))
    return TorsionSet(tuple(entries))


# -- Platonic solids ----------------------------------------------------------

class Node(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class SolidDescriptor:
    """A Platonic solid extracted from an end node of a listed symbol.

    All attributes describe the solid in the *working* symbol, i.e. the symbol
    reversed if node is RIGHT, so the solid's center always sits at the left
    node and the cell stabilizers are the fixed node subsets above.
    """

    symbol: CoxeterSymbol           # as given by the user
    node: Node
    working_symbol: CoxeterSymbol = field(compare=False)
    name: str = field(compare=False)
    polygon_sides: int = field(compare=False)
    vertex_valence: int = field(compare=False)
    dihedral_denominator: int = field(compare=False)   # dihedral angle 2*pi/this
    faces: int = field(compare=False)
    edges: int = field(compare=False)
    vertices: int = field(compare=False)
    compact: bool = field(compare=False)
    center_stabilizer: ParabolicDescriptor = field(compare=False)
    geometry: GeometryClass = field(compare=False)

    @property
    def target_index(self) -> int:
        """Index of a census subgroup = order of the solid's symmetry group."""
        order = self.center_stabilizer.order
        assert order is not None
        return order

    def address(self) -> str:
        return "%d,%d,%d:%s" % (*self.symbol.as_tuple(), self.node.value)

    def __str__(self):
        return f"{self.name} in {self.symbol} ({self.node.value} node), angle 2pi/{self.dihedral_denominator}"


def _solid_at_left(user_sym: CoxeterSymbol, node: Node, work: CoxeterSymbol,
                   geometry: GeometryClass) -> Optional[SolidDescriptor]:
    center = standard_parabolic(work, CENTER_NODES)
    if not center.finite:
        return None
    p, q, r = work.as_tuple()
    name, faces, edges, vertices, order = PLATONIC[(r, q)]
    # The lookup is the oracle; the counts themselves come from orbit counting
    # on the symmetry group's regular action (cells = cosets of stabilizers).
    assert center.order == order
    table = coset.coset_enumeration(center.presentation, [], max_cosets=4 * order + 16)
    # Generators of Gamma_v are x2,x3,x4, i.e. local indices 0,1,2 for nodes 1,2,3.
    f_count = coset.orbit_count(table, [(1,), (2,)])   # faces: <x3,x4>-cosets
    e_count = coset.orbit_count(table, [(0,), (2,)])   # edges: <x2,x4>-cosets
    v_count = coset.orbit_count(table, [(0,), (1,)])   # vertices: <x2,x3>-cosets
    assert (f_count, e_count, v_count) == (faces, edges, vertices), \
        (user_sym, node, f_count, e_count, v_count)
    compact = standard_parabolic(work, VERTEX_NODES).finite
    return SolidDescriptor(
        symbol=user_sym, node=node, working_symbol=work, name=name,
        polygon_sides=r, vertex_valence=q, dihedral_denominator=p,
        faces=faces, edges=edges, vertices=vertices, compact=compact,
        center_stabilizer=center, geometry=geometry)


def enumerate_solids(sym: CoxeterSymbol) -> list[SolidDescriptor]:
    """The solids at the two end nodes of a listed symbol (duplicates merged).

    The right-node solid is realized by reversing the symbol, so both ends go
    through a single left-node code path.  A palindromic symbol yields each
    solid once.
    """
    geometry = classify_geometry(sym)
    if geometry is GeometryClass.NOT_LISTED:
        raise ValueError(f"{sym} is not a listed simplex symbol")
    solids = []
    left = _solid_at_left(sym, Node.LEFT, sym, geometry)
    if left is not None:
        solids.append(left)
    if not sym.is_palindromic():
        right = _solid_at_left(sym, Node.RIGHT, sym.reversed(), geometry)
        if right is not None:
            solids.append(right)
    return solids


def all_solids() -> list[SolidDescriptor]:
    out = []
    for t in ALL_SYMBOLS:
        out.extend(enumerate_solids(CoxeterSymbol(*t)))
    return out


def edge_divisibility_filter(solid: SolidDescriptor) -> bool:
    """True when the solid can yield manifolds: p divides the edge count.

    Edge classes have size exactly p, so p must divide the number of edges.
    """
    return solid.edges % solid.dihedral_denominator == 0


def solid_for_address(address: str) -> SolidDescriptor:
    """Look up a solid by its 'p,q,r:left|right' address."""
    sym_part, _, node_part = address.partition(":")
    sym = parse_symbol(sym_part)
    node = Node(node_part or "left")
    for solid in enumerate_solids(sym):
        if solid.node is node:
            return solid
    raise ValueError(f"no solid at the {node.value} node of {sym}")
