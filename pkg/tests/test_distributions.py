from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from causal_inflation.distributions import (
    JointTable, MarginalFamily, conditional_mutual_information, conditional_product, deterministic_model, entropy,
    mutual_information, product, random_model, simulate,
)
from causal_inflation.errors import ContractError, ValidationError
from causal_inflation.graph import node, nodes, structure


def test_ghz_and_w_pair_marginals(ghz, w_dist):
    ab = ghz.marginalize(nodes("A B"))
    assert ab.prob({"A": 0, "B": 0}) == Fraction(1, 2)
    assert ab.prob({"A": 0, "B": 1}) == 0
    bc = w_dist.marginalize(nodes("B C"))
    assert bc.prob({"B": 0, "C": 0}) == Fraction(1, 3)
    assert bc.prob({"B": 1, "C": 1}) == 0


def test_product_of_uniform_binaries():
    t = product([JointTable.uniform(["A"], 2), JointTable.uniform(["B"], 2), JointTable.uniform(["C"], 2)])
    assert t.equals(JointTable.uniform(["A", "B", "C"], 2))
    with pytest.raises(ContractError):
        product([JointTable.uniform(["A"], 2), JointTable.uniform(["A", "B"], 2)])


def test_product_of_w_singletons(w_dist):
    singles = [w_dist.marginalize(nodes(v)) for v in "ABC"]
    t = product(singles)
    assert t.prob({"A": 1, "B": 1, "C": 1}) == Fraction(1, 27)
    assert t.prob({"A": 0, "B": 0, "C": 0}) == Fraction(8, 27)


def test_conditional_product_without_conditioning_is_the_product(w_dist):
    a, b = w_dist.marginalize(nodes("A")), w_dist.marginalize(nodes("B"))
    assert conditional_product(a, b, []).equals(product([a, b]))


def test_conditional_product_zero_where_the_condition_is_impossible():
    xz = JointTable.from_dict(["X", "Z"], 2, {"00": Fraction(1, 2), "10": Fraction(1, 2)})
    yz = JointTable.from_dict(["Y", "Z"], 2, {"10": 1})
    t = conditional_product(xz, yz, nodes("Z"))
    assert t.prob({"Z": 1}) == 0
    assert t.prob({"X": 0, "Y": 1, "Z": 0}) == Fraction(1, 2)


def test_conditional_product_rejects_disagreeing_tables():
    xz = JointTable.from_dict(["X", "Z"], 2, {"00": 1})
    yz = JointTable.from_dict(["Y", "Z"], 2, {"01": 1})
    with pytest.raises(ContractError):
        conditional_product(xz, yz, nodes("Z"))


def test_pienaar_conditionals_on_y(pienaar):
    # y=0: A=0, B=C uniform; y=1: B=0, A=C uniform
    for y, support in ((0, {(0, 0, 0), (0, 1, 1)}), (1, {(0, 0, 0), (1, 0, 1)})):
        py = pienaar.prob({"Y": y})
        for a, b, c in np.ndindex(2, 2, 2):
            want = Fraction(1, 2) if (a, b, c) in support else 0
            assert pienaar.prob({"A": a, "B": b, "C": c, "Y": y}) / py == want
    assert conditional_mutual_information(pienaar, nodes("C"), nodes("Y")) == pytest.approx(0, abs=1e-12)


def test_deterministic_model_simulates_to_a_point_mass():
    g = structure("A B", "L", ["L->A", "L->B", "A->B"])
    m = deterministic_model(g, {node("L"): lambda: 1, node("A"): lambda l: l, node("B"): lambda a, l: 1 - a},
                            {"L": 2})
    assert simulate(m).equals(JointTable.point_mass(["A", "B"], 2, (1, 0)))


def test_entropy_reference_values(w_dist):
    assert entropy(JointTable.point_mass(["A"], 2, (1,))) == 0
    assert entropy(JointTable.uniform(["A"], 2)) == pytest.approx(1.0)
    assert entropy(JointTable.uniform(["A", "B"], [2, 4])) == pytest.approx(3.0)
    hc = entropy(w_dist, nodes("C"))
    assert hc == pytest.approx(np.log2(3) - 2 / 3)
    total = mutual_information(w_dist, nodes("A"), nodes("C")) + mutual_information(w_dist, nodes("B"), nodes("C"))
    assert total < hc


def test_cmi_vanishes_on_product_tables():
    t = product([JointTable.from_dict(["X"], 2, {"0": Fraction(1, 3), "1": Fraction(2, 3)}),
                 JointTable.uniform(["Y", "Z"], 2)])
    assert conditional_mutual_information(t, nodes("X"), nodes("Y"), nodes("Z")) == pytest.approx(0, abs=1e-12)
    assert conditional_mutual_information(t, nodes("X"), nodes("Y Z")) == pytest.approx(0, abs=1e-12)


def test_validation_of_tables():
    with pytest.raises(ValidationError):
        JointTable(["A"], [2], [Fraction(1, 2), Fraction(1, 3)])
    with pytest.raises(ValidationError):
        JointTable(["A"], [2], [1.5, -0.5])
    with pytest.raises(ValidationError):
        JointTable.from_json({"variables": [{"name": "A", "cardinality": 2}], "probs": ["1"]})


def test_json_round_trip_keeps_rationals(w_dist):
    back = JointTable.from_json(w_dist.to_json())
    assert back.exact and back.equals(w_dist)
    assert w_dist.to_json()["probs"].count("1/3") == 3


def test_marginal_family_catches_disagreement(ghz, w_dist):
    MarginalFamily([nodes("A B"), nodes("B C")], [ghz.marginalize(nodes("A B")), ghz.marginalize(nodes("B C"))])
    with pytest.raises(ValidationError):
        MarginalFamily([nodes("A B"), nodes("B C")],
                       [ghz.marginalize(nodes("A B")), w_dist.marginalize(nodes("B C"))])


def test_float_and_exact_simulation_agree(triangle):
    m = random_model(triangle, 11, latent_cardinality=3, exact=True)
    exact = simulate(m)
    assert exact.exact
    floats = {v: k.astype(float) for v, k in m.kernels.items()}
    fm = type(m)(triangle, floats, m.latent_cardinality)
    assert simulate(fm).equals(exact.to_float(), tol=1e-12)


@st.composite
def tables(draw, n_vars=3):
    cards = draw(st.lists(st.integers(1, 3), min_size=n_vars, max_size=n_vars))
    size = int(np.prod(cards))
    weights = draw(st.lists(st.integers(0, 5), min_size=size, max_size=size).filter(any))
    total = sum(weights)
    probs = np.array([Fraction(w, total) for w in weights], dtype=object)
    return JointTable(["A", "B", "C"][:n_vars], cards, probs)


@settings(max_examples=100, deadline=None)
@given(tables(), st.permutations(["A", "B", "C"]))
def test_marginalization_commutes_and_reorder_is_harmless(t, order):
    first = t.marginalize(nodes("A B")).marginalize(nodes("A"))
    assert first.equals(t.marginalize(nodes("A")))
    assert t.reorder([node(v) for v in order]).equals(t)
    assert sum(t.flat(), Fraction(0)) == 1


@settings(max_examples=100, deadline=None)
@given(tables())
def test_conditional_product_reproduces_ci_tables(t):
    # build P_XZ P_YZ / P_Z from the marginals of t; it keeps both marginals
    xz, yz = t.marginalize(nodes("A C")), t.marginalize(nodes("B C"))
    cp = conditional_product(xz, yz, nodes("C"))
    assert cp.marginalize(nodes("A C")).equals(xz)
    assert cp.marginalize(nodes("B C")).equals(yz)
    assert conditional_mutual_information(cp, nodes("A"), nodes("B"), nodes("C")) == pytest.approx(0, abs=1e-9)
