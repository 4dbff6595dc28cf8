from fractions import Fraction

import numpy as np
import pytest

from causal_inflation import fixtures as fx
from causal_inflation.distributions import inflation_family, random_model, simulate
from causal_inflation.errors import ContractError
from causal_inflation.graph import nodes
from causal_inflation.inflation import ai_expressible_sets
from causal_inflation.marginal_lp import (
    build_problem, certificate_expression, certificate_to_inequality, description_matrix, noisy_ghz, solve,
    verify_certificate, verify_witness,
)


def problem(inf, dist, contexts=None, **kw):
    contexts = ai_expressible_sets(inf) if contexts is None else contexts
    return build_problem(inf, inflation_family(inf, dist, contexts), **kw)


def test_single_context_matrix_is_the_identity():
    M, labels = description_matrix(sorted(nodes("A B")), (2, 3), [sorted(nodes("A B"))])
    assert M.tolist() == np.eye(6, dtype=int).tolist()
    assert labels[5] == (tuple(sorted(nodes("A B"))), (1, 2))


def test_every_column_has_one_entry_per_context(spiral_problem):
    assert spiral_problem.shape == (40, 64)
    assert (spiral_problem.M.sum(axis=0) == 5).all()
    assert spiral_problem.exact


def test_known_witnesses(cut, spiral, bell_inf, ghz, w_dist, pr_box):
    for inf, dist in ((cut, ghz), (spiral, w_dist), (bell_inf, pr_box)):
        p = problem(inf, dist)
        v = solve(p)
        assert v.status == "infeasible"
        assert verify_certificate(p, v.certificate)
        assert all(y.denominator == 1 for y in v.certificate)


def test_pienaar_needs_y2_in_the_expressible_context(dolls, pienaar):
    short = problem(dolls, pienaar, fx.select_contexts(dolls, "maximal-ai", ["A1 C2 Y1"]))
    full = problem(dolls, pienaar, fx.select_contexts(dolls, "maximal-ai", ["A1 C2 Y1 Y2"]))
    assert short.shape == (88, 128) and solve(short).feasible
    assert full.shape == (96, 128)
    v = solve(full)
    assert v.status == "infeasible" and verify_certificate(full, v.certificate)


def test_feasible_witness_reproduces_the_marginals(cut, triangle):
    dist = simulate(random_model(triangle, 3, latent_cardinality=2, exact=True))
    p = problem(cut, dist)
    v = solve(p)
    assert v.feasible
    assert all(isinstance(x, Fraction) for x in v.witness)
    assert sum(v.witness) == 1
    assert (p.M.astype(object) @ np.array(v.witness, dtype=object)).tolist() == p.b


def test_float_mode_verdicts(cut, ghz):
    p = problem(cut, ghz.to_float())
    assert solve(p, mode="float").status == "infeasible"
    ok = problem(cut, noisy_ghz(0.5, exact=False))
    v = solve(ok, mode="float")
    assert v.feasible and verify_witness(ok, v.witness, tol=1e-9)
    with pytest.raises(ContractError):
        solve(ok, mode="interval")


def test_simplex_engine_agrees_with_the_accelerated_path(cut):
    for alpha in ("1/2", "5/8", "0.635", "1"):
        p = problem(cut, noisy_ghz(alpha))
        a, b = solve(p), solve(p, engine="simplex")
        assert a.status == b.status
        if not b.feasible:
            assert verify_certificate(p, b.certificate)


def test_noisy_ghz_just_above_the_cut_threshold(cut):
    v = solve(problem(cut, noisy_ghz(Fraction(5, 8) + Fraction(1, 100))))
    assert v.status == "infeasible"


def test_zero_vector_is_not_a_certificate(cut_problem):
    with pytest.raises(ContractError):
        certificate_expression(cut_problem, [0] * cut_problem.shape[0])
    assert not verify_certificate(cut_problem, [Fraction(0)] * cut_problem.shape[0])
    with pytest.raises(ContractError):
        certificate_to_inequality(cut_problem, [Fraction(1)] * cut_problem.shape[0])


def test_ghz_certificate_gives_a_valid_inequality(cut, cut_problem, ghz, triangle):
    v = solve(cut_problem)
    ineq = certificate_to_inequality(cut_problem, v.certificate)
    value, ok = ineq.evaluate(ghz)
    assert not ok and value < 0
    rng = np.random.default_rng(7)
    for _ in range(30):
        assert ineq.evaluate(simulate(random_model(triangle, rng, exact=True)))[1]


def test_pr_box_certificate_holds_for_local_models(bell_inf, pr_box):
    p = problem(bell_inf, pr_box)
    ineq = certificate_to_inequality(p, solve(p).certificate)
    assert not ineq.evaluate(pr_box)[1]
    bell = fx.load_graph("bell")
    rng = np.random.default_rng(8)
    for _ in range(30):
        assert ineq.evaluate(simulate(random_model(bell, rng, exact=True)))[1]


def test_copy_isomorphism_equalities_only_tighten(spiral, triangle, w_dist):
    rng = np.random.default_rng(9)
    dists = [noisy_ghz(a) for a in ("1/2", "0.7", "1")] + [w_dist]
    dists += [simulate(random_model(triangle, rng, latent_cardinality=2, exact=True)) for _ in range(3)]
    for d in dists:
        plain = problem(spiral, d)
        tight = problem(spiral, d, use_copy_isomorphism_equalities=True)
        assert len(tight.extra_equalities) > 0
        if solve(tight).feasible:
            assert solve(plain).feasible
