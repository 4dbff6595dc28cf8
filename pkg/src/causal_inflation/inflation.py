"""Inflations of causal structures: validity, injectable / ai-expressible / expressible sets,
copy isomorphisms and fan-out detection."""
from dataclasses import dataclass
from itertools import combinations

import networkx as nx

from .errors import ContractError, InflationError
from .graph import CausalStructure, fmt_set, node, sorted_nodes


@dataclass(frozen=True)
class InflationStructure:
    original: CausalStructure
    inflated: CausalStructure

    def project(self, v):
        return node(v).erase()

    def image(self, s):
        return frozenset(self.project(v) for v in s)

    @property
    def observed(self):
        return sorted_nodes(self.inflated.observed)

    def is_injective_on(self, s):
        anc = self.inflated.ancestors(s)
        return len({v.erase() for v in anc}) == len(anc)


def verify_inflation(original, inflated):
    """Check the local parentage condition at every inflated node and return the inflation."""
    for v in inflated.nodes:
        orig = v.erase()
        if orig not in original.nodes:
            raise InflationError(f"node {v} has no counterpart {orig} in the original structure", v)
        if inflated.kind(v) != original.kind(orig):
            raise InflationError(f"node {v} is {inflated.kind(v)} but {orig} is {original.kind(orig)}", v)
        if inflated.cardinality.get(v) != original.cardinality.get(orig):
            raise InflationError(f"node {v} has cardinality {inflated.cardinality.get(v)}, "
                                 f"expected {original.cardinality.get(orig)}", v)
        pa = inflated.parents(v)
        erased = [p.erase() for p in pa]
        want = original.parents(orig)
        if len(set(erased)) != len(erased) or set(erased) != set(want):
            raise InflationError(f"parents of {v} are {fmt_set(pa)}, which do not map one-to-one onto "
                                 f"the parents {fmt_set(want)} of {orig}", v)
    return InflationStructure(original, inflated)


# injectable and ai-expressible sets

@dataclass(frozen=True)
class InjectableSet:
    members: tuple
    image: tuple

    def __str__(self):
        return fmt_set(self.members)


@dataclass(frozen=True)
class AiExpressibleSet:
    members: tuple
    blocks: tuple  # of InjectableSet

    def __str__(self):
        if len(self.blocks) == 1:
            return fmt_set(self.members)
        return "⊥".join(str(b) for b in self.blocks)


def _set_key(s):
    return (len(s), tuple(v.key() for v in sorted(s)))


def injection_graph(inf):
    g = nx.Graph()
    obs = inf.observed
    g.add_nodes_from(obs)
    for u, v in combinations(obs, 2):
        if inf.is_injective_on({u, v}):
            g.add_edge(u, v)
    return g


def injectable_sets(inf):
    """All injectable sets, found as the nonempty cliques of the pairwise injection graph."""
    g = injection_graph(inf)
    out = []
    for clique in nx.enumerate_all_cliques(g):
        members = sorted_nodes(clique)
        out.append(InjectableSet(members, sorted_nodes(inf.image(members))))
    out.sort(key=lambda s: _set_key(s.members))
    return out


def maximal_injectable_sets(inf):
    sets = injectable_sets(inf)
    mem = [frozenset(s.members) for s in sets]
    return [s for s, m in zip(sets, mem) if not any(m < o for o in mem)]


def ai_expressibility_graph(inf, injectables=None):
    injectables = injectable_sets(inf) if injectables is None else injectables
    g = nx.Graph()
    g.add_nodes_from(range(len(injectables)))
    ancs = [inf.inflated.ancestors(s.members) for s in injectables]
    for i, j in combinations(range(len(injectables)), 2):
        if not (ancs[i] & ancs[j]):
            g.add_edge(i, j)
    return g, injectables


def _as_ai(blocks):
    blocks = sorted(blocks, key=lambda b: _set_key(b.members))
    members = sorted_nodes(v for b in blocks for v in b.members)
    return AiExpressibleSet(members, tuple(blocks))


def ai_expressible_sets(inf, all_cliques=False):
    """Maximal ai-expressible sets, each with its coarsest partition into ancestrally independent
    injectable blocks. With all_cliques=True every clique of the ai-expressibility graph is returned."""
    g, inj = ai_expressibility_graph(inf)
    if all_cliques:
        out = [_as_ai([inj[i] for i in c]) for c in nx.enumerate_all_cliques(g)]
        out.sort(key=lambda a: (_set_key(a.members), [_set_key(b.members) for b in a.blocks]))
        return out
    best = {}
    for c in nx.find_cliques(g):
        cand = _as_ai([inj[i] for i in c])
        key = frozenset(cand.members)
        rank = (len(cand.blocks), [_set_key(b.members) for b in cand.blocks])
        if key not in best or rank < best[key][0]:
            best[key] = (rank, cand)
    unions = list(best)
    out = [best[u][1] for u in unions if not any(u < o for o in unions)]
    out.sort(key=lambda a: _set_key(a.members))
    return out


def ancestral_components(inf, s):
    """Split s into the connected components of the 'ancestries intersect' relation."""
    s = sorted_nodes(s)
    anc = {v: inf.inflated.ancestors([v]) for v in s}
    g = nx.Graph()
    g.add_nodes_from(s)
    for u, v in combinations(s, 2):
        if anc[u] & anc[v]:
            g.add_edge(u, v)
    comps = [sorted_nodes(c) for c in nx.connected_components(g)]
    comps.sort(key=lambda c: _set_key(c))
    return comps


def ai_partition(inf, s):
    """Finest factorization of an ai-expressible set, or None if some block is not injectable."""
    comps = ancestral_components(inf, s)
    if all(inf.is_injective_on(c) for c in comps):
        return [InjectableSet(c, sorted_nodes(inf.image(c))) for c in comps]
    return None


# expressible sets

@dataclass(frozen=True)
class Recipe:
    """Expression tree for computing a marginal of the inflation model from injectable marginals.

    op is "injectable" (leaf), "marginalize" (one child, keeps `members`) or
    "conditional_product" (children on X∪Z and Y∪Z, condition = (X, Y, Z))."""
    op: str
    members: tuple
    children: tuple = ()
    condition: tuple | None = None

    def to_json(self):
        d = {"op": self.op, "set": [str(v) for v in self.members],
             "children": [c.to_json() for c in self.children]}
        if self.condition is not None:
            x, y, z = self.condition
            d["condition"] = {"x": [str(v) for v in x], "y": [str(v) for v in y], "z": [str(v) for v in z]}
        return d

    def depth(self):
        inner = max((c.depth() for c in self.children), default=0)
        return inner + (1 if self.op == "conditional_product" else 0)

    def leaves(self):
        if self.op == "injectable":
            return [self.members]
        return [leaf for c in self.children for leaf in c.leaves()]


@dataclass(frozen=True)
class ExpressibleSet:
    members: tuple
    recipe: Recipe | None
    found: bool = True
    reason: str = ""

    def to_json(self):
        if not self.found:
            return {"set": [str(v) for v in self.members], "found": False, "reason": self.reason}
        return {"set": [str(v) for v in self.members], "found": True, "recipe": self.recipe.to_json()}


def _leaf(inf, s, injectables):
    s = frozenset(s)
    for inj in injectables:
        if s <= frozenset(inj.members):
            leaf = Recipe("injectable", inj.members)
            if s == frozenset(inj.members):
                return leaf
            return Recipe("marginalize", sorted_nodes(s), (leaf,))
    return None


def _subsets(items):
    items = list(items)
    for r in range(len(items) + 1):
        for c in combinations(items, r):
            yield frozenset(c)


def expressible_closure(inf, targets, depth=3):
    """Search for recipes expressing each target set; failures are reported explicitly."""
    injectables = injectable_sets(inf)
    obs = inf.observed
    g = inf.inflated
    memo = {}

    def search(s, d):
        key = (s, d)
        if key in memo:
            return memo[key]
        memo[key] = None
        leaf = _leaf(inf, s, injectables)
        if leaf is not None:
            memo[key] = leaf
            return leaf
        if d == 0:
            return None
        for z in sorted(_subsets(obs), key=_set_key):
            rest = sorted_nodes(s - z)
            if len(rest) < 2:
                continue
            first, others = rest[0], rest[1:]
            # X holds the lexicographically first node, which removes the X/Y mirror duplicates
            for extra in sorted(_subsets(others), key=_set_key):
                x = frozenset([first]) | extra
                y = frozenset(rest) - x
                if not y:
                    continue
                if not g.d_separated(x, y, z):
                    continue
                left = search(x | z, d - 1)
                if left is None:
                    continue
                right = search(y | z, d - 1)
                if right is None:
                    continue
                full = x | y | z
                rec = Recipe("conditional_product", sorted_nodes(full), (left, right),
                             (sorted_nodes(x), sorted_nodes(y), sorted_nodes(z)))
                if full != s:
                    rec = Recipe("marginalize", sorted_nodes(s), (rec,))
                memo[key] = rec
                return rec
        return None

    out = []
    for t in targets:
        t = frozenset(node(v) for v in t)
        if not t <= set(obs):
            raise ContractError(f"target {fmt_set(t)} contains non-observed nodes")
        rec = search(t, depth)
        if rec is None:
            out.append(ExpressibleSet(sorted_nodes(t), None, False, f"no recipe found within depth {depth}"))
        else:
            out.append(ExpressibleSet(sorted_nodes(t), rec))
    return out


def verify_recipe(inf, recipe):
    """Re-check every d-separation claim in a recipe and that leaves are injectable."""
    if recipe.op == "injectable":
        return inf.is_injective_on(recipe.members)
    if recipe.op == "conditional_product":
        x, y, z = recipe.condition
        if not inf.inflated.d_separated(x, y, z):
            return False
    return all(verify_recipe(inf, c) for c in recipe.children)


# copy isomorphisms

@dataclass(frozen=True)
class InflationaryIsomorphism:
    source: tuple
    target: tuple
    node_map: tuple  # pairs (source node, target node)
    ancestral_extension: tuple  # pairs over the ancestral subgraphs

    def as_dict(self):
        return dict(self.node_map)

    def extension_dict(self):
        return dict(self.ancestral_extension)


def _name_match(a, b):
    return a["name"] == b["name"] and a["kind"] == b["kind"]


def inflationary_isomorphisms(inf, source, target):
    """Copy isomorphisms source -> target that extend to copy isomorphisms of the ancestral subgraphs."""
    from networkx.algorithms.isomorphism import DiGraphMatcher

    src = frozenset(node(v) for v in source)
    tgt = frozenset(node(v) for v in target)
    for s in (src, tgt):
        if not s <= inf.inflated.observed:
            raise ContractError(f"{fmt_set(s)} is not a set of observed inflated nodes")
    if len(src) != len(tgt) or sorted(v.name for v in src) != sorted(v.name for v in tgt):
        return []
    g1 = inf.inflated.ancestral_subgraph(src).to_networkx()
    g2 = inf.inflated.ancestral_subgraph(tgt).to_networkx()
    if g1.number_of_nodes() != g2.number_of_nodes():
        return []
    matcher = DiGraphMatcher(g1, g2, node_match=_name_match)
    found = {}
    for mapping in matcher.isomorphisms_iter():
        if {mapping[v] for v in src} != set(tgt):
            continue
        restricted = tuple(sorted((v, mapping[v]) for v in src))
        ext = tuple(sorted(mapping.items()))
        if restricted not in found or ext < found[restricted]:
            found[restricted] = ext
    out = [InflationaryIsomorphism(sorted_nodes(src), sorted_nodes(tgt), r, found[r]) for r in sorted(found)]
    return out


def copy_isomorphism_equalities(inf, sets):
    """Pairs (V1, V2, phi) of distinct-or-equal observed sets related by a non-identity
    inflationary isomorphism; each induces P_V1 = P_V2 after relabeling."""
    sets = sorted({frozenset(s) for s in sets}, key=_set_key)
    out = []
    for i, a in enumerate(sets):
        for b in sets[i:]:
            if sorted(v.name for v in a) != sorted(v.name for v in b):
                continue
            for iso in inflationary_isomorphisms(inf, a, b):
                if all(x == y for x, y in iso.node_map):
                    continue
                out.append(iso)
    return out


def has_inflationary_fanout(inf):
    """Return (True, (latent, children)) if some latent node has two copy-equivalent children."""
    g = inf.inflated
    for v in g.nodes:
        if v not in g.latent:
            continue
        groups = {}
        for c in sorted(g.children(v)):
            groups.setdefault(c.name, []).append(c)
        for name in sorted(groups):
            if len(groups[name]) >= 2:
                return True, (v, tuple(groups[name]))
    return False, None
