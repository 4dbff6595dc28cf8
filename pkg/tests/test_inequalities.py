import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from causal_inflation.distributions import random_model, simulate
from causal_inflation.facets import facet_inequality, linear_equalities
from causal_inflation.graph import nodes
from causal_inflation.inequalities import (
    Atom, Polynomial, PolynomialInequality, correlator_form, orbit, orbit_representative, probability_form,
    reduce_modulo, symmetry_classes, table_from_json, table_to_json, TRIANGLE_COLUMNS,
)


def corr(labels):
    return Polynomial.atom(Atom.corr(sorted(nodes(labels))))


def prob(labels, values):
    return Polynomial.atom(Atom.prob(sorted(nodes(labels)), [int(c) for c in values]))


def test_pair_probability_in_correlators():
    want = (1 - corr("A") - corr("B") + corr("A B")) * Fraction(1, 4)
    assert correlator_form(prob("A B", "11")) == want


def test_first_table_row(table_rows):
    # <AB> + <AC> <= 1 + <B><C>
    row = PolynomialInequality.leq(corr("A B") + corr("A C"), 1 + corr("B") * corr("C"))
    assert table_rows[0].key() == row.key()
    assert len(table_rows) == 52


def test_table_rows_survive_both_conversions(table_rows):
    for row in table_rows:
        assert correlator_form(probability_form(row.expr)) == row.expr


def test_table_json_round_trip(table_rows):
    data = table_to_json(table_rows, TRIANGLE_COLUMNS)
    back = table_from_json(json.loads(json.dumps(data)))
    assert [q.key() for q in back] == [q.key() for q in table_rows]


def test_inequality_json_round_trip(table_rows):
    q = table_rows[20]
    assert PolynomialInequality.from_json(q.to_json()).key() == q.key()


def test_symmetry_group_order_and_closure(symmetry):
    assert len(symmetry) == 48
    keys = set(symmetry.elements)
    for a in symmetry.generators:
        for b in symmetry.elements[:10]:
            assert a.compose(b) in keys
    for e in symmetry.elements:
        assert e.compose(e.inverse()).is_identity()


def test_orbit_of_a_symmetric_inequality_is_small(symmetry):
    positivity = PolynomialInequality(prob("A B C", "000") + prob("A B C", "111"))
    # relabeling the three values jointly keeps the pair {000, 111}
    assert len(orbit(positivity, symmetry)) == 4


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 47), st.integers(0, 51), st.integers(0, 10_000))
def test_symmetry_acts_consistently_on_inequalities_and_tables(symmetry, table_rows, triangle, k, r, seed):
    g = symmetry.elements[k]
    dist = simulate(random_model(triangle, seed, latent_cardinality=2, exact=True))
    q = table_rows[r]
    assert g.apply(q).evaluate(g.apply_table(dist))[0] == q.evaluate(dist)[0]


def test_table_splits_into_four_symmetry_classes(table_rows, symmetry):
    reps = symmetry_classes(table_rows, symmetry)
    assert len(reps) == 4
    assert [r.key() for r in reps] == [orbit_representative(table_rows[i - 1], symmetry).key() for i in (1, 13, 21, 45)]


def test_reduce_modulo_without_equalities_is_the_identity(table_rows):
    assert reduce_modulo(table_rows, []) == table_rows


def test_inequalities_differing_by_an_equality_collapse():
    e = prob("A", "0") + prob("A", "1") - 1
    q1 = PolynomialInequality(prob("A B", "00"))
    q2 = PolynomialInequality(prob("A B", "00") + 3 * e)
    q3 = PolynomialInequality(prob("A B", "01"))
    assert len(reduce_modulo([q1, q2, q3], [e])) == 2


def test_exact_evaluation_is_rational(table_rows, w_dist):
    value, ok = table_rows[12].evaluate(w_dist)
    assert isinstance(value, Fraction)
    assert value == Fraction(-8, 27) and not ok


@pytest.mark.slow
def test_spiral_facets_reduce_to_the_irredundant_bound(spiral_problem, spiral_polytope):
    facets = [facet_inequality(spiral_problem, n) for n, _ in spiral_polytope.facets]
    reduced = reduce_modulo(facets, linear_equalities(spiral_problem))
    assert len(reduced) <= 1433
