from itertools import combinations

import numpy as np
import pytest

from causal_inflation import fixtures as fx
from causal_inflation.distributions import (
    context_table, inflation_family, product, random_model, replay_recipe, simulate,
)
from causal_inflation.errors import InflationError
from causal_inflation.graph import CausalStructure, node, nodes
from causal_inflation.inflation import (
    ai_expressible_sets, expressible_closure, has_inflationary_fanout, inflationary_isomorphisms,
    injectable_sets, verify_inflation, verify_recipe,
)


def label(s):
    return " ".join(str(v) for v in sorted(s))


def test_fixture_inflations_verify(cut, spiral, bell_inf, dolls):
    for inf in (cut, spiral, bell_inf, dolls):
        assert inf.inflated.observed


def test_broken_parentage_names_the_node(triangle):
    data = fx.load_graph("cut").to_json()
    data["edges"] = [e for e in data["edges"] if e != ["Z1", "A2"]]
    with pytest.raises(InflationError) as err:
        verify_inflation(triangle, CausalStructure.from_json(data))
    assert str(err.value.node) == "A2"


def test_cut_injectable_sets(cut):
    assert sorted(label(s.members) for s in injectable_sets(cut)) == sorted(["A2", "B1", "C1", "A2 C1", "B1 C1"])


def test_bell_injectable_sets_include_full_copies(bell_inf):
    found = {label(s.members) for s in injectable_sets(bell_inf)}
    assert {"A1 B1 X1 Y1", "A2 B2 X2 Y2", "X1", "Y2"} <= found


def test_russian_dolls_injectable_sets_include_the_transcription_checks(dolls):
    found = {label(s.members) for s in injectable_sets(dolls)}
    assert {"A1 C1 Y1", "B2 C2 Y2", "B2 C1 Y2"} <= found


def test_cut_maximal_ai_sets(cut):
    got = {label(a.members): sorted(label(b.members) for b in a.blocks) for a in ai_expressible_sets(cut)}
    assert got == {"A2 C1": ["A2 C1"], "B1 C1": ["B1 C1"], "A2 B1": ["A2", "B1"]}


def test_bell_maximal_ai_sets_contain_every_setting(bell_inf):
    found = ai_expressible_sets(bell_inf)
    assert len(found) == 4
    for a in found:
        assert len(a.members) == 6
        assert nodes("X1 X2 Y1 Y2") <= set(a.members)


@pytest.mark.parametrize("inflated", ["cut", "spiral", "web", "capped"])
def test_ai_blocks_are_injectable_and_independent(inflated):
    inf = fx.load_inflation("triangle", inflated)
    for a in ai_expressible_sets(inf, all_cliques=True):
        for b in a.blocks:
            assert inf.is_injective_on(b.members)
        parts = [frozenset(b.members) for b in a.blocks]
        assert inf.inflated.ancestrally_independent(parts)


def test_all_cliques_contain_the_maximal_sets(spiral):
    every = {label(a.members) for a in ai_expressible_sets(spiral, all_cliques=True)}
    assert {label(a.members) for a in ai_expressible_sets(spiral)} <= every
    assert len(every) > 5


def test_russian_dolls_expressible_recipe(dolls):
    (ex,) = expressible_closure(dolls, [nodes("A1 C2 Y1")])
    assert ex.found
    r = ex.recipe
    assert r.op == "marginalize" and label(r.members) == "A1 C2 Y1"
    (cp,) = r.children
    assert cp.op == "conditional_product"
    x, y, z = cp.condition
    assert (label(x), label(y), label(z)) == ("A1", "C2", "B1 Y1")
    assert sorted(label(leaf) for leaf in cp.leaves()) == ["A1 B1 Y1", "B1 C2 Y1"]
    assert verify_recipe(dolls, r)


def test_injectable_target_is_a_leaf(spiral):
    (ex,) = expressible_closure(spiral, [nodes("A1 B1 C1")])
    assert ex.recipe.op == "injectable"


def test_unexpressible_set_is_reported(spiral):
    (ex,) = expressible_closure(spiral, [nodes("A1 A2 C2")], depth=3)
    assert not ex.found
    assert "no recipe" in ex.reason


def test_recipes_replay_like_a_full_joint(dolls):
    # an inflation model of a random original model gives the reference joint on all inflated variables
    original = dolls.original
    rng = np.random.default_rng(5)
    model = random_model(original, rng, latent_cardinality=3, exact=True)
    observed = simulate(model)
    inflated_model = _lift(model, dolls)
    joint = simulate(inflated_model)
    for target in ["A1 C2 Y1", "A1 C2 Y1 Y2", "B2 C1 Y1 Y2"]:
        (ex,) = expressible_closure(dolls, [nodes(target)])
        got = replay_recipe(dolls, observed, ex.recipe)
        want = joint.marginalize(nodes(target)).reorder(got.variables)
        assert got.equals(want)


def _lift(model, inf):
    """Inflation model: every copy reuses the kernel of its original node."""
    from causal_inflation.distributions import CausalModel

    g = inf.inflated
    kernels = {}
    for v in g.nodes:
        orig = v.erase()
        k = model.kernels[orig]
        # kernel axes follow sorted parents, so line the copy's parents up with the original's
        pa = sorted(g.parents(v))
        opa = sorted(model.structure.parents(orig))
        perm = [opa.index(p.erase()) for p in pa]
        kernels[v] = np.transpose(k, perm + [len(pa)])
    lat = {u: model.latent_cardinality[u.erase()] for u in g.latent}
    return CausalModel(g, kernels, lat)


def test_identity_isomorphism_on_singletons(spiral):
    (iso,) = inflationary_isomorphisms(spiral, nodes("A1"), nodes("A1"))
    assert iso.as_dict() == {node("A1"): node("A1")}


def test_spiral_isomorphisms_between_overlapping_triples(spiral):
    isos = inflationary_isomorphisms(spiral, nodes("A1 A2 B1"), nodes("A1 A2 B2"))
    maps = [{str(a): str(b) for a, b in iso.node_map} for iso in isos]
    assert {"A1": "A1", "A2": "A2", "B1": "B2"} in maps
    assert {"A1": "A2", "A2": "A1", "B1": "B2"} in maps
    assert len(maps) == 2


def test_instrumental_sets_have_no_copy_isomorphism():
    inf = fx.load_inflation("instrumental", "instrumental_inflation")
    assert inflationary_isomorphisms(inf, nodes("X1 Y2 Z1"), nodes("X1 Y2 Z2")) == []


def test_isomorphism_extensions_respect_edges(spiral):
    for iso in inflationary_isomorphisms(spiral, nodes("A1 B2"), nodes("A1 B2")) + \
            inflationary_isomorphisms(spiral, nodes("B1 C2"), nodes("A1 B2")):
        ext = iso.extension_dict()
        edges = spiral.inflated.edges
        for a, b in edges:
            if a in ext and b in ext:
                assert (ext[a], ext[b]) in edges
        assert all(ext[k].name == k.name for k in ext)


def test_fanout_detection(cut, spiral, bell_inf):
    assert has_inflationary_fanout(cut) == (False, None)
    assert has_inflationary_fanout(spiral)[0]
    found, (latent, children) = has_inflationary_fanout(bell_inf)
    assert found and str(latent) == "Λ1" and [str(c) for c in children] == ["A1", "A2"]


def test_ai_context_tables_factorize(spiral, w_dist):
    for a in ai_expressible_sets(spiral):
        t = context_table(spiral, w_dist, a)
        blocks = [t.marginalize(b.members) for b in a.blocks]
        assert product(blocks).reorder(t.variables).equals(t)
