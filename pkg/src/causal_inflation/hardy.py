"""Possibilistic (Hardy-type) inequalities from minimal transversals of context hypergraphs.

Vertices are (context, valuation) pairs, i.e. the rows of the marginal description matrix;
each global valuation is a hyperedge containing the vertices it extends. Fixing an antecedent
vertex and keeping only the hyperedges that extend it, any transversal T gives the tautology
antecedent => OR(T), hence P(antecedent) <= sum_{t in T} P(t)."""
from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .graph import node


@dataclass(frozen=True)
class ContextHypergraph:
    vertices: tuple  # (context tuple, valuation tuple)
    edges: tuple  # bitmask over vertices, one per global valuation
    edge_labels: tuple  # global valuations (tuples over joint_vars)
    joint_vars: tuple

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    def edge_members(self, e):
        return [self.vertices[i] for i in range(len(self.vertices)) if e >> i & 1]


def build_hypergraph(problem):
    M = np.asarray(problem.M)
    verts = tuple((tuple(c), tuple(o)) for c, o in problem.row_labels)
    edges = []
    for j in range(M.shape[1]):
        mask = 0
        for i in np.nonzero(M[:, j])[0]:
            mask |= 1 << int(i)
        edges.append(mask)
    return ContextHypergraph(verts, tuple(edges), tuple(problem.columns()), tuple(problem.joint_vars))


def _assignment(vertex):
    ctx, o = vertex
    return dict(zip(ctx, o))


def _contradicts(a, b):
    return any(v in b and b[v] != x for v, x in a.items())


def vertex(context, valuation):
    """Build a vertex from labels, e.g. vertex("A2 B2 C2", "111")."""
    if isinstance(context, str):
        context = context.split()
    if isinstance(valuation, str):
        valuation = [int(ch) for ch in valuation]
    pairs = sorted(zip((node(v) for v in context), (int(x) for x in valuation)))
    return (tuple(v for v, _ in pairs), tuple(x for _, x in pairs))


def restrict(h, antecedent):
    """Keep hyperedges extending the antecedent, drop contradicting vertices and the antecedent."""
    antecedent = (tuple(antecedent[0]), tuple(antecedent[1]))
    if antecedent not in h.vertices:
        raise ContractError("antecedent is not a vertex of the hypergraph")
    ai = h.vertices.index(antecedent)
    ant = _assignment(antecedent)
    keep_v = [i for i, v in enumerate(h.vertices) if i != ai and not _contradicts(_assignment(v), ant)]
    remap = {old: new for new, old in enumerate(keep_v)}
    edges, labels = [], []
    for e, lab in zip(h.edges, h.edge_labels):
        if not e >> ai & 1:
            continue
        mask = 0
        for old, new in remap.items():
            if e >> old & 1:
                mask |= 1 << new
        edges.append(mask)
        labels.append(lab)
    return ContextHypergraph(tuple(h.vertices[i] for i in keep_v), tuple(edges), tuple(labels), h.joint_vars)


def _minimize(sets):
    sets = sorted(set(sets), key=lambda s: (bin(s).count("1"), s))
    out = []
    for s in sets:
        if not any(t & s == t for t in out):
            out.append(s)
    return out


def minimal_transversals(h):
    """Berge dualization: fold in one hyperedge at a time, keeping only minimal hitting sets."""
    if any(e == 0 for e in h.edges):
        return []
    current = [0]
    for e in sorted(set(h.edges), key=lambda m: (bin(m).count("1"), m)):
        hit = [t for t in current if t & e]
        miss = [t for t in current if not t & e]
        bits = [1 << i for i in range(e.bit_length()) if e >> i & 1]
        fresh = set()
        for t in miss:
            for b in bits:
                c = t | b
                # an extension is minimal only if no surviving set already sits inside it
                if not any(x & c == x for x in hit):
                    fresh.add(c)
        current = hit + _minimize(fresh)
    return sorted(current, key=lambda s: (bin(s).count("1"), s))


def brute_force_transversals(h):
    """Oracle: test every vertex subset."""
    n = h.n_vertices
    hitting = [s for s in range(1 << n) if all(s & e for e in h.edges)]
    hs = set(hitting)
    return sorted((s for s in hitting if not any((s & ~(1 << i)) in hs for i in range(n) if s >> i & 1)),
                  key=lambda s: (bin(s).count("1"), s))


@dataclass(frozen=True)
class HardyImplication:
    antecedent: tuple
    consequent: tuple
    minimal: bool = True

    def render(self):
        def fmt(v):
            return "[" + ", ".join(f"{x}={o}" for x, o in zip(*v)) + "]"
        return fmt(self.antecedent) + " => " + " | ".join(fmt(t) for t in self.consequent)

    def to_json(self):
        def js(v):
            return {"context": [str(x) for x in v[0]], "valuation": list(v[1])}
        return {"antecedent": js(self.antecedent), "consequent": [js(t) for t in self.consequent],
                "minimal": self.minimal}


def implications(h, antecedent):
    r = restrict(h, antecedent)
    out = []
    for t in minimal_transversals(r):
        terms = tuple(r.vertices[i] for i in range(r.n_vertices) if t >> i & 1)
        out.append(HardyImplication((tuple(antecedent[0]), tuple(antecedent[1])), terms, True))
    return out


def is_tautology(h, imp):
    """Every global valuation extending the antecedent extends some consequent term."""
    jv = h.joint_vars
    for lab in h.edge_labels:
        g = dict(zip(jv, lab))
        if _contradicts(_assignment(imp.antecedent), g):
            continue
        if not any(not _contradicts(_assignment(t), g) for t in imp.consequent):
            return False
    return True


def union_bound(imp):
    """Inflated-level inequality sum P(term) - P(antecedent) >= 0."""
    from .inequalities import Atom, Polynomial, PolynomialInequality

    if not imp.consequent:
        raise ContractError("an implication needs a nonempty consequent")
    expr = -Polynomial.atom(Atom.prob(*imp.antecedent))
    for ctx, o in imp.consequent:
        expr = expr + Polynomial.atom(Atom.prob(ctx, o))
    return PolynomialInequality(expr, "union bound")


def implications_to_inequalities(inf, imps, recipes=None):
    from .inequalities import to_original

    return [to_original(union_bound(imp), inf, recipes) for imp in imps]


def _sweep_antecedent(inf, h, a, recipes, correlators, group, raw_seen):
    from .inequalities import orbit, orbit_representative

    imps, reps = implications(h, a), []
    for imp in imps:
        (q,) = implications_to_inequalities(inf, [imp], recipes)
        # cheap screen in probability form before the costlier correlator expansion
        if q.key() in raw_seen:
            continue
        raw_seen.update(i.canonical().key() for i in (orbit(q, group) if group is not None else [q]))
        if correlators:
            q = q.preferred_form()
        reps.append(orbit_representative(q, group) if group is not None else q.canonical())
    return imps, reps


def _sweep_job(args):
    return _sweep_antecedent(*args, set())


def antecedent_sweep(inf, problem, group=None, antecedents=None, recipes=None, correlators=None, workers=1):
    """Run every antecedent (or the given ones); return (implications, distinct inequalities).

    Inequalities are deduplicated by canonical form, or by orbit under `group` when given.
    With workers > 1 antecedents are processed in a process pool; the merged output is the same
    as the sequential one."""
    if correlators is None:
        correlators = all(c == 2 for c in problem.cards)
    if recipes is None:
        from .marginal_lp import _recipes_from_descriptors
        recipes = _recipes_from_descriptors(problem)
    h = build_hypergraph(problem)
    ants = list(h.vertices) if antecedents is None else [(tuple(c), tuple(o)) for c, o in antecedents]
    if workers > 1 and len(ants) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_job, [(inf, h, a, recipes, correlators, group) for a in ants]))
    else:
        raw_seen = set()
        results = [_sweep_antecedent(inf, h, a, recipes, correlators, group, raw_seen) for a in ants]
    imps, ineqs, seen = [], [], set()
    for part_imps, reps in results:
        imps.extend(part_imps)
        for rep in reps:
            k = rep.key()
            if k not in seen:
                seen.add(k)
                ineqs.append(rep)
    return imps, ineqs
