from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from causal_inflation.distributions import JointTable
from causal_inflation.errors import ContractError
from causal_inflation.graph import node, nodes
from causal_inflation.hardy import (
    ContextHypergraph, HardyImplication, antecedent_sweep, brute_force_transversals, build_hypergraph,
    implications, implications_to_inequalities, is_tautology, minimal_transversals, restrict, union_bound, vertex,
)
from causal_inflation.inequalities import orbit
from causal_inflation.marginal_lp import MarginalProblem, description_matrix


def tiny_problem(labels, cards, contexts):
    joint = [node(v) for v in labels]
    ctx = [sorted(nodes(c)) for c in contexts]
    M, rows = description_matrix(joint, tuple(cards), ctx)
    return MarginalProblem(tuple(joint), tuple(cards), ctx, M, [], row_labels=rows)


def test_single_binary_context():
    h = build_hypergraph(tiny_problem(["A"], [2], ["A"]))
    assert (h.n_vertices, h.n_edges) == (2, 2)


def test_cut_counts(cut_problem):
    h = build_hypergraph(cut_problem)
    assert (h.n_vertices, h.n_edges) == (12, 8)


def test_cut_restriction_counts(cut_problem):
    r = restrict(build_hypergraph(cut_problem), vertex("A2 B1", "00"))
    assert (r.n_vertices, r.n_edges) == (8, 2)


def test_antecedent_covering_every_variable_leaves_one_edge():
    h = build_hypergraph(tiny_problem(["A", "B"], [2, 2], ["A B", "A"]))
    r = restrict(h, vertex("A B", "01"))
    assert r.n_edges == 1
    assert r.vertices == (vertex("A", "0"),)


def test_one_edge_has_singleton_transversals():
    h = ContextHypergraph(tuple(range(4)), (0b1011,), ((0,),), ())
    assert minimal_transversals(h) == [0b0001, 0b0010, 0b1000]


def test_no_edges_means_the_empty_transversal_only():
    h = ContextHypergraph(tuple(range(3)), (), (), ())
    assert minimal_transversals(h) == [0]


def test_empty_consequent_is_rejected():
    with pytest.raises(ContractError):
        union_bound(HardyImplication(vertex("A", "0"), ()))


def test_antecedent_must_be_a_vertex(cut_problem):
    with pytest.raises(ContractError):
        restrict(build_hypergraph(cut_problem), vertex("A2 B1 C1", "000"))


def test_pair_tautology_on_the_cut(cut_problem):
    # A=0, C=0 forces either A=0, B=0 or B=1, C=0
    h = build_hypergraph(cut_problem)
    found = {frozenset(i.consequent) for i in implications(h, vertex("A2 C1", "00"))}
    assert frozenset([vertex("A2 B1", "00"), vertex("B1 C1", "10")]) in found


@st.composite
def hypergraphs(draw):
    n = draw(st.integers(1, 9))
    edges = draw(st.lists(st.integers(1, (1 << n) - 1), max_size=8))
    return ContextHypergraph(tuple(range(n)), tuple(edges), tuple((i,) for i in range(len(edges))), ())


@settings(max_examples=300, deadline=None)
@given(hypergraphs())
def test_berge_dualization_matches_exhaustive_search(h):
    assert minimal_transversals(h) == brute_force_transversals(h)


def _vertex_tables(problem):
    return [JointTable.point_mass(problem.joint_vars, problem.cards, col) for col in problem.columns()]


@pytest.mark.parametrize("name", ["cut", "spiral"])
def test_emitted_implications_are_tautologies_and_union_bounds_hold(name, cut_problem, spiral_problem):
    p = {"cut": cut_problem, "spiral": spiral_problem}[name]
    h = build_hypergraph(p)
    points = _vertex_tables(p)
    for ant in h.vertices[::7]:
        for imp in implications(h, ant):
            assert is_tautology(h, imp)
            for t in imp.consequent:
                assert not is_tautology(h, HardyImplication(imp.antecedent, tuple(x for x in imp.consequent if x != t)))
            q = union_bound(imp)
            assert all(q.evaluate(pt)[1] for pt in points)


def test_w_violates_the_weak_spiral_inequality(spiral, spiral_problem, w_dist):
    h = build_hypergraph(spiral_problem)
    imp = HardyImplication(vertex("A2 B2 C2", "111"),
                           (vertex("A1 B2", "11"), vertex("B1 C2", "11"), vertex("A2 C1", "11"),
                            vertex("A1 B1 C1", "000")), minimal=False)
    assert is_tautology(h, imp)
    (q,) = implications_to_inequalities(spiral, [imp])
    assert q.evaluate(w_dist) == (Fraction(-1, 27), False)


def test_sweep_is_the_same_with_a_process_pool(cut, cut_problem, symmetry):
    one = antecedent_sweep(cut, cut_problem, symmetry, workers=1)
    two = antecedent_sweep(cut, cut_problem, symmetry, workers=2)
    assert [i.to_json() for i in one[0]] == [i.to_json() for i in two[0]]
    assert [q.key() for q in one[1]] == [q.key() for q in two[1]]


@pytest.fixture(scope="module")
def spiral_sweep(spiral, spiral_problem, symmetry):
    return antecedent_sweep(spiral, spiral_problem, symmetry)


@pytest.mark.slow
def test_spiral_sweep_counts(spiral_sweep):
    imps, ineqs = spiral_sweep
    assert len(imps) == 6048
    assert len(ineqs) == 214


@pytest.mark.slow
@pytest.mark.parametrize("row", [1, 13, 21, 45])
def test_spiral_sweep_recovers_each_representative_class(row, spiral_sweep, table_rows, symmetry):
    keys = {q.key() for q in orbit(table_rows[row - 1], symmetry)}
    assert any(q.key() in keys for q in spiral_sweep[1])
