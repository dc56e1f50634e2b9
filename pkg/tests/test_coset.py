import itertools

import pytest

from platonic_census.coset import (CosetTable, coset_enumeration,
                                   finite_group_elements, is_fixed_point_free,
                                   orbit_count, parity_orientable,
                                   schreier_generators, spanning_tree, word_action)
from platonic_census.coxeter import CoxeterSymbol, presentation
from platonic_census.errors import BudgetExceeded


def _pres(p, q, r):
    return presentation(CoxeterSymbol(p, q, r))


def _perm_closure(gens):
    """Brute-force closure of permutations given as tuples."""
    n = len(gens[0])
    ident = tuple(range(n))
    seen = {ident}
    frontier = [ident]
    while frontier:
        g = frontier.pop()
        for h in gens:
            prod = tuple(h[g[i]] for i in range(n))
            if prod not in seen:
                seen.add(prod)
                frontier.append(prod)
    return seen


class TestEnumeration:
    def test_regular_order_333(self):
        table = coset_enumeration(_pres(3, 3, 3), [])
        assert table.size == 120
        # independent oracle: adjacent transpositions of 5 points close to 120
        gens = []
        for i in range(4):
            p = list(range(5))
            p[i], p[i + 1] = p[i + 1], p[i]
            gens.append(tuple(p))
        assert len(_perm_closure(gens)) == 120

    def test_parabolic_index(self):
        # <x1,x2,x3> has order 48 in the group of order 384
        table = coset_enumeration(_pres(4, 3, 3), [(0,), (1,), (2,)])
        assert table.size == 8

    def test_budget_exceeded_on_infinite(self):
        with pytest.raises(BudgetExceeded):
            coset_enumeration(_pres(4, 3, 4), [(1,), (2,), (3,)], max_cosets=10**5)

    def test_deterministic(self):
        a = coset_enumeration(_pres(3, 4, 3), [(0,), (1,)])
        b = coset_enumeration(_pres(3, 4, 3), [(0,), (1,)])
        assert a.rows == b.rows

    def test_validate(self):
        pres = _pres(4, 3, 3)
        table = coset_enumeration(pres, [(0,), (1,), (2,)])
        table.validate(pres)

    def test_json_round_trip(self):
        table = coset_enumeration(_pres(3, 3, 3), [(1,), (2,), (3,)])
        again = CosetTable.from_json(table.to_json())
        assert again == table


class TestActions:
    def test_word_action_identity(self):
        t = coset_enumeration(_pres(4, 3, 3), [(1,), (2,), (3,)])
        assert word_action(t, ()) == list(range(t.size))
        for i in range(4):
            assert word_action(t, (i, i)) == list(range(t.size))
        assert word_action(t, (0, 1) * 4) == list(range(t.size))

    def test_fixed_point_free(self):
        t = coset_enumeration(_pres(4, 3, 3), [(1,), (2,), (3,)])
        assert not is_fixed_point_free(t, ())
        assert not is_fixed_point_free(t, (1,))   # reflection in its own parabolic
        assert is_fixed_point_free(t, (0,))

    def test_orbit_count(self):
        t = coset_enumeration(_pres(4, 3, 3), [(1,), (2,), (3,)])
        assert orbit_count(t, [(i,) for i in range(4)]) == 1
        assert orbit_count(t, []) == t.size


class TestParityAndSchreier:
    def test_regular_rep_orientable(self):
        t = coset_enumeration(_pres(3, 3, 3), [])
        assert parity_orientable(t)

    def test_index_one_not_orientable(self):
        t = coset_enumeration(_pres(3, 3, 3), [(0,), (1,), (2,), (3,)])
        assert t.size == 1
        assert not parity_orientable(t)
        # index-1 table: the Schreier generators are the generators themselves
        assert schreier_generators(t) == [(0,), (1,), (2,), (3,)]

    def test_schreier_index_oracle(self):
        # stabilizer of the base point has index exactly m: re-enumerate
        pres = _pres(4, 3, 3)
        t = coset_enumeration(pres, [(1,), (2,), (3,)])
        gens = schreier_generators(t)
        assert all(t.act(0, w) == 0 for w in gens)
        again = coset_enumeration(pres, gens)
        assert again.size == t.size

    def test_nontree_edge_count(self):
        # Euler count: (4m + loops)/2 undirected edges, m-1 of them tree edges
        pres = _pres(3, 3, 3)
        t = coset_enumeration(pres, [(1,), (2,), (3,)])
        _, _, nontree = spanning_tree(t)
        loops = sum(1 for a in range(t.size) for i in range(4)
                    if t.rows[a][i] == a)
        assert len(nontree) == (4 * t.size + loops) // 2 - (t.size - 1)


class TestFiniteStore:
    @pytest.mark.parametrize("symbol,order", [
        ((3, 3, 3), 120), ((4, 3, 3), 384), ((3, 4, 3), 1152)])
    def test_orders(self, symbol, order):
        store = finite_group_elements(presentation(CoxeterSymbol(*symbol)))
        assert store.size == order

    def test_h4_order(self):
        store = finite_group_elements(_pres(3, 3, 5))
        assert store.size == 14400

    def test_budget_on_infinite(self):
        with pytest.raises(BudgetExceeded):
            finite_group_elements(_pres(4, 3, 4), max_order=10**4)

    def test_mult_inverse_order(self):
        store = finite_group_elements(_pres(3, 3, 3))
        import random
        rng = random.Random(7)
        pts = [rng.randrange(store.size) for _ in range(20)]
        for a in pts:
            assert store.mult(a, store.inverse(a)) == 0
            assert store.mult(store.inverse(a), a) == 0
        # associativity spot check through the regular action
        for a, b in zip(pts, pts[1:]):
            ab = store.mult(a, b)
            assert store.mult(ab, store.inverse(b)) == a

    def test_conjugacy_classes_partition(self):
        store = finite_group_elements(_pres(3, 3, 3))
        # transposition class in the symmetric group of degree 5 has size 10
        cls = store.conjugacy_class(store.table.act(0, (0,)))
        assert len(cls) == 10
        by_order = store.elements_of_prime_order()
        assert sorted(by_order) == [2, 3, 5]
        assert len(by_order[5]) == 24
