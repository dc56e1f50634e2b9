import pytest

from platonic_census.coset import is_fixed_point_free, parity_orientable, word_action
from platonic_census.coxeter import (CoxeterSymbol, presentation,
                                     solid_for_address, torsion_representatives)
from platonic_census.errors import BudgetExceeded
from platonic_census.freeness import annotate_spherical_torsion, fixes_point_on_sphere
from platonic_census.search import (SearchConstraints, low_index_search,
                                    verify_record)
from platonic_census.census import constraints_for, spherical_subgroup_search


def _search(symbol, index, backend="auto", threads=1, spherical=False, **kw):
    sym = CoxeterSymbol(*symbol)
    ts = torsion_representatives(sym)
    if spherical:
        ts = annotate_spherical_torsion(sym, ts)
    c = SearchConstraints(target_index=index, torsion_words=tuple(ts.filter_words()))
    return low_index_search(presentation(sym), c, backend=backend,
                            threads=threads, **kw), c


EXPECTED_COUNTS = [
    ((4, 4, 3), 48, False, 2),     # octahedron, two cusped manifolds
    ((6, 3, 4), 48, False, 3),     # cube with angle 2pi/6
    ((6, 3, 3), 24, False, 0),     # tetrahedron gives nothing orientable
    ((4, 3, 4), 48, False, 6),     # the euclidean cube
    ((3, 3, 3), 24, True, 1),
    ((3, 3, 4), 48, True, 2),      # cube with angle 2pi/3, reversed addressing
    ((3, 4, 3), 48, True, 3),
]


class TestCounts:
    @pytest.mark.parametrize("symbol,index,spherical,expected", EXPECTED_COUNTS)
    def test_class_counts(self, symbol, index, spherical, expected):
        report, c = _search(symbol, index, spherical=spherical)
        assert len(report.accepted) == expected
        for rec in report.accepted:
            verify_record(presentation(CoxeterSymbol(*symbol)), c, rec)

    def test_spherical_wrapper(self):
        solid = solid_for_address("3,3,3:left")
        report = spherical_subgroup_search(solid)
        assert len(report.accepted) == 1
        # |K| = 120/24 = 5
        assert report.accepted[0].table.size == 24

    def test_z8_generator_word(self):
        # the cube census over {3,3,4} contains a record whose fundamental
        # group is cyclic of order 8, generated by an element of order 8
        # (x2*x3*x4*x1 in the reversed addressing); that element must have
        # order 8 in the group and a conjugate inside the subgroup
        from platonic_census.coset import finite_group_elements
        report, _ = _search((3, 3, 4), 48, spherical=True)
        store = finite_group_elements(presentation(CoxeterSymbol(3, 3, 4)))
        w = (1, 2, 3, 0)
        assert store.order(store.table.act(0, w)) == 8
        hits = [rec for rec in report.accepted
                if any(rec.table.act(a, w) == a for a in range(rec.table.size))]
        assert len(hits) == 1          # exactly one of the two records is Z_8


class TestBackendsAndThreads:
    @pytest.mark.parametrize("symbol,index", [((4, 4, 3), 48), ((6, 3, 4), 48)])
    def test_backends_identical(self, symbol, index):
        rp, _ = _search(symbol, index, backend="python")
        rn, _ = _search(symbol, index, backend="numba")
        assert [r.table.rows for r in rp.accepted] == [r.table.rows for r in rn.accepted]
        assert rp.nodes_explored == rn.nodes_explored

    def test_thread_determinism(self):
        r1, _ = _search((4, 4, 3), 48, threads=1)
        r2, _ = _search((4, 4, 3), 48, threads=2, split_depth=2)
        assert [r.table.rows for r in r1.accepted] == [r.table.rows for r in r2.accepted]

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            _search((4, 3, 4), 48, max_nodes=3)


class TestSoundness:
    def test_accepted_satisfy_all_predicates(self):
        report, c = _search((6, 3, 4), 48)
        pres = presentation(CoxeterSymbol(6, 3, 4))
        for rec in report.accepted:
            t = rec.table
            t.validate(pres)
            assert t.size == 48
            for w in c.torsion_words:
                assert is_fixed_point_free(t, w)
            assert parity_orientable(t)

    def test_extra_filters_only_prune(self):
        # the closure filters of the spherical search can only shrink the
        # result and the tree relative to the bare torsion set
        sym = CoxeterSymbol(3, 3, 4)
        base = torsion_representatives(sym)
        ann = annotate_spherical_torsion(sym, base)
        c_base = SearchConstraints(48, tuple(base.filter_words()))
        c_full = SearchConstraints(48, tuple(ann.filter_words()))
        r_base = low_index_search(presentation(sym), c_base, backend="python")
        r_full = low_index_search(presentation(sym), c_full, backend="python")
        base_tables = {r.table.rows for r in r_base.accepted}
        full_tables = {r.table.rows for r in r_full.accepted}
        assert full_tables <= base_tables
        assert r_full.nodes_explored <= r_base.nodes_explored

    def test_brute_force_class_oracle_333(self):
        """The {3,3,3} census equals a brute-force subgroup enumeration.

        Index 24 in the order-120 group means order-5 subgroups: enumerate
        them all, filter by free action and orientability, count conjugacy
        classes, and compare against the search.
        """
        from platonic_census.coset import finite_group_elements
        sym = CoxeterSymbol(3, 3, 3)
        store = finite_group_elements(presentation(sym))
        fives = store.elements_of_prime_order()[5]
        subgroups = set()
        for g in fives:
            h = {0}
            x = g
            while x != 0:
                h.add(x)
                x = store.mult(x, g)
            subgroups.add(frozenset(h))
        assert len(subgroups) == 6          # the Sylow subgroups

        def acts_freely(h):
            return not any(fixes_point_on_sphere(sym, store.words[x])
                           for x in h if x != 0)

        def orientable(h):
            return all(len(store.words[x]) % 2 == 0 for x in h)

        good = {h for h in subgroups if acts_freely(h) and orientable(h)}
        classes = set()
        for h in good:
            orbit = {h}
            frontier = [h]
            while frontier:
                cur = frontier.pop()
                for i in range(4):
                    img = frozenset(store.left[i][store.table.rows[x][i]] for x in cur)
                    if img not in orbit:
                        orbit.add(img)
                        frontier.append(img)
            classes.add(min(orbit, key=sorted))
        report, _ = _search((3, 3, 3), 24, spherical=True)
        assert len(classes) == len(report.accepted) == 1
