import pytest

from platonic_census.coset import coset_enumeration, word_action
from platonic_census.coxeter import (ALL_SYMBOLS, CoxeterSymbol, GeometryClass,
                                     Node, all_solids, classify_geometry,
                                     edge_divisibility_filter, enumerate_solids,
                                     parse_symbol, presentation, solid_for_address,
                                     standard_parabolic, torsion_representatives)


def sym(p, q, r):
    return CoxeterSymbol(p, q, r)


class TestClassify:
    def test_listed_examples(self):
        assert classify_geometry(sym(3, 3, 3)) is GeometryClass.SPHERICAL
        assert classify_geometry(sym(4, 3, 4)) is GeometryClass.EUCLIDEAN
        assert classify_geometry(sym(5, 3, 6)) is GeometryClass.HYPERBOLIC_NONCOMPACT
        assert classify_geometry(sym(5, 3, 5)) is GeometryClass.HYPERBOLIC_COMPACT
        assert classify_geometry(sym(7, 3, 3)) is GeometryClass.NOT_LISTED

    def test_reversals_classify_alike(self):
        for t in ALL_SYMBOLS:
            s = CoxeterSymbol(*t)
            assert classify_geometry(s) is classify_geometry(s.reversed())

    def test_census_split(self):
        classes = [classify_geometry(CoxeterSymbol(*t)) for t in ALL_SYMBOLS]
        assert classes.count(GeometryClass.SPHERICAL) == 4
        assert classes.count(GeometryClass.EUCLIDEAN) == 1
        assert classes.count(GeometryClass.HYPERBOLIC_COMPACT) == 3
        assert classes.count(GeometryClass.HYPERBOLIC_NONCOMPACT) == 7

    def test_classification_matches_parabolic_finiteness(self):
        # spherical <=> all four maximal parabolics finite;
        # compact hyperbolic also has all four finite; noncompact has not
        for t in ALL_SYMBOLS:
            s = CoxeterSymbol(*t)
            finite = [standard_parabolic(s, [i for i in range(4) if i != k]).finite
                      for k in range(4)]
            cls = classify_geometry(s)
            if cls in (GeometryClass.SPHERICAL, GeometryClass.HYPERBOLIC_COMPACT,
                       GeometryClass.EUCLIDEAN):
                assert all(finite)
            else:
                assert not all(finite)


class TestPresentation:
    def test_relator_counts(self):
        for t in ALL_SYMBOLS:
            pres = presentation(CoxeterSymbol(*t))
            invol = [r for r in pres.relators if len(set(r)) == 1]
            pairs = [r for r in pres.relators if len(set(r)) == 2]
            assert len(invol) == 4 and len(pairs) == 6

    def test_labels(self):
        pres = presentation(sym(4, 3, 3))
        assert (0, 1) * 4 in pres.relators
        assert (0, 2) * 2 in pres.relators
        pres = presentation(sym(5, 3, 6))
        assert (2, 3) * 6 in pres.relators


class TestParabolic:
    def test_orders(self):
        assert standard_parabolic(sym(4, 3, 3), [1, 2, 3]).order == 24
        assert standard_parabolic(sym(4, 3, 3), [0, 1, 2]).order == 48
        assert standard_parabolic(sym(3, 3, 5), [1, 2, 3]).order == 120

    def test_infinite(self):
        par = standard_parabolic(sym(4, 4, 3), [0, 1, 2])
        assert not par.finite and par.order is None

    def test_rank_two(self):
        assert standard_parabolic(sym(4, 3, 3), [0, 1]).order == 8
        assert standard_parabolic(sym(4, 3, 3), [0, 2]).order == 4


class TestTorsion:
    def test_pair_contributions(self):
        ts = torsion_representatives(sym(6, 3, 5))
        words = set(ts.words())
        assert (0, 1) * 3 in words      # order 2 power of the 6-pair
        assert (0, 1) * 2 in words      # order 3 power
        assert (2, 3) in words          # order 5 pair

    def test_orders_via_regular_action(self):
        # oracle: each entry's order in the regular representation equals the
        # recorded prime (checked on the finite symbol {3,3,3})
        s = sym(3, 3, 3)
        table = coset_enumeration(presentation(s), [], max_cosets=10**4)
        for e in torsion_representatives(s).entries:
            perm = word_action(table, e.word)
            order = 1
            cur = perm
            while cur != list(range(table.size)):
                cur = [perm[x] for x in cur]
                order += 1
            assert order == e.order

    def test_333_profile(self):
        ts = torsion_representatives(sym(3, 3, 3))
        assert len([e for e in ts.entries if len(e.word) == 1]) == 4
        pair_orders = sorted(e.order for e in ts.entries if len(e.word) > 1)
        assert pair_orders == [2, 2, 2, 3, 3, 3]


class TestSolids:
    def test_inventory(self):
        solids = all_solids()
        assert len(solids) == 15
        by_geom = {}
        for s in solids:
            by_geom.setdefault(s.geometry, []).append(s)
        assert len(by_geom[GeometryClass.SPHERICAL]) == 6
        assert len(by_geom[GeometryClass.EUCLIDEAN]) == 1
        assert len(by_geom[GeometryClass.HYPERBOLIC_COMPACT]) + \
            len(by_geom[GeometryClass.HYPERBOLIC_NONCOMPACT]) == 8

    def test_filter_removes_four(self):
        removed = [s for s in all_solids() if not edge_divisibility_filter(s)]
        assert len(removed) == 4
        assert {s.address() for s in removed} == {
            "4,3,3:left", "3,3,5:right", "4,3,5:left", "4,3,5:right"}

    def test_single_octahedron(self):
        solids = enumerate_solids(sym(4, 4, 3))
        assert len(solids) == 1
        s = solids[0]
        assert s.name == "octahedron" and s.dihedral_denominator == 4
        assert not s.compact and edge_divisibility_filter(s)

    def test_536_dodecahedron(self):
        s = solid_for_address("5,3,6:right")
        assert s.name == "dodecahedron"
        assert s.dihedral_denominator == 6
        assert s.center_stabilizer.order == 120
        assert (s.faces, s.edges, s.vertices) == (12, 30, 20)

    def test_divisibility_examples(self):
        tetra = solid_for_address("3,3,3:left")
        assert edge_divisibility_filter(tetra)
        bad = solid_for_address("4,3,3:left")
        assert bad.name == "tetrahedron" and not edge_divisibility_filter(bad)

    def test_not_listed_errors(self):
        with pytest.raises(ValueError):
            enumerate_solids(sym(7, 3, 3))

    def test_parse(self):
        assert parse_symbol("4,3,5").as_tuple() == (4, 3, 5)
        with pytest.raises(ValueError):
            parse_symbol("4,3")
        assert solid_for_address("4,3,3:right").node is Node.RIGHT
