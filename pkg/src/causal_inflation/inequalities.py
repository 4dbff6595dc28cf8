"""Polynomial inequalities over marginal-probability atoms P_S(o) and correlators <S>.

Every inequality reads `expr >= 0`. Monomials are products of atoms with integer powers; a
negative power is a division, and a term whose divisor vanishes evaluates to 0.
Correlators use the convention value 0 -> +1, value 1 -> -1."""
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct

from .errors import ContractError, ValidationError
from .exact import format_rational, integer_normalize, rref, to_fraction
from .graph import fmt_set, node, sorted_nodes

FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class Atom:
    kind: str  # "P" or "E"
    variables: tuple
    values: tuple = ()

    @staticmethod
    def prob(variables, values):
        pairs = sorted(zip((node(v) for v in variables), (int(x) for x in values)))
        if len({v for v, _ in pairs}) != len(pairs):
            raise ContractError("repeated variable in atom")
        return Atom("P", tuple(v for v, _ in pairs), tuple(x for _, x in pairs))

    @staticmethod
    def corr(variables):
        vs = sorted_nodes(node(v) for v in variables)
        if len(set(vs)) != len(vs):
            raise ContractError("repeated variable in correlator")
        return Atom("E", vs)

    def key(self):
        return (len(self.variables), tuple(v.key() for v in self.variables), self.values, self.kind)

    def __lt__(self, other):
        return self.key() < other.key()

    def label(self, compact=False):
        if compact and all(len(str(v)) == 1 for v in self.variables):
            names = "".join(str(v) for v in self.variables)
            vals = "".join(str(x) for x in self.values)
        else:
            names = " ".join(str(v) for v in self.variables)
            vals = " ".join(str(x) for x in self.values)
        if self.kind == "E":
            return f"<{names}>"
        return f"P[{names}]({vals})"

    def rename(self, fn):
        vs = [fn(v) for v in self.variables]
        if self.kind == "E":
            return Atom.corr(vs)
        return Atom.prob(vs, self.values)


def _mono_key(m):
    return (sum(abs(p) for _, p in m), tuple((a.key(), p) for a, p in m))


def _mono(factors):
    """Normalize a list of (atom, power) into a sorted tuple with merged powers."""
    acc = {}
    for a, p in factors:
        acc[a] = acc.get(a, 0) + p
    return tuple(sorted(((a, p) for a, p in acc.items() if p != 0), key=lambda t: t[0].key()))


def mono_label(m, compact=False):
    if not m:
        return "1"
    parts = []
    for a, p in m:
        s = a.label(compact)
        parts.append(s if p == 1 else f"{s}^{p}")
    return ("" if compact else "*").join(parts)


class Polynomial:
    """Sparse rational combination of monomials."""

    def __init__(self, terms=None):
        self.terms = {}
        for m, c in (terms or {}).items():
            c = Fraction(c)
            if c != 0:
                self.terms[m] = self.terms.get(m, Fraction(0)) + c
        self.terms = {m: c for m, c in self.terms.items() if c != 0}

    @staticmethod
    def const(c):
        return Polynomial({(): c})

    @staticmethod
    def atom(a, power=1, coeff=1):
        return Polynomial({((a, power),): coeff})

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.const(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Polynomial) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return Polynomial({m: c * Fraction(other) for m, c in self.terms.items()})
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono(list(m1) + list(m2))
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Polynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = Polynomial.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.key())

    def key(self):
        return tuple((tuple((a.key(), p) for a, p in m), c) for m, c in self.sorted_terms())

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _mono_key(t[0]))

    def atoms(self):
        return sorted({a for m in self.terms for a, _ in m}, key=lambda a: a.key())

    def variables(self):
        return sorted({v for a in self.atoms() for v in a.variables})

    def is_zero(self):
        return not self.terms

    def map_atoms(self, fn):
        """Substitute every atom: fn(atom) returns a Polynomial (only positive powers expand;
        atoms raised to negative powers must map to a single monomial)."""
        out = Polynomial()
        for m, c in self.terms.items():
            term = Polynomial.const(c)
            for a, p in m:
                sub = fn(a)
                if p > 0:
                    term = term * (sub ** p)
                else:
                    if len(sub.terms) != 1:
                        raise ContractError(f"cannot invert the non-monomial expansion of {a.label()}")
                    ((sm, sc),) = sub.terms.items()
                    inv = Polynomial({tuple((x, -q) for x, q in sm): 1 / sc})
                    term = term * (inv ** (-p))
            out = out + term
        return out

    def rename(self, fn):
        return self.map_atoms(lambda a: Polynomial.atom(a.rename(fn)))

    def render(self, compact=True):
        if not self.terms:
            return "0"
        parts = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            ml = mono_label(m, compact)
            if not m:
                body = format_rational(mag)
            elif mag == 1:
                body = ml
            else:
                body = f"{format_rational(mag)}{'' if compact else '*'}{ml}"
            if i == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(f"{sign} {body}")
        return " ".join(parts)

    def __repr__(self):
        return f"Polynomial({self.render(False)})"


# evaluation

def _marginal_table(source, variables):
    from .distributions import JointTable, MarginalFamily

    vs = set(variables)
    if isinstance(source, JointTable):
        if not vs <= set(source.variables):
            raise ContractError(f"distribution lacks variables {fmt_set(vs - set(source.variables))}")
        return source
    if isinstance(source, MarginalFamily):
        for c, t in source:
            if vs <= set(c):
                return t
        raise ContractError(f"no context of the family contains {fmt_set(vs)}")
    raise TypeError("evaluate needs a JointTable or MarginalFamily")


def atom_value(a, source):
    t = _marginal_table(source, a.variables)
    if a.kind == "P":
        return t.prob(dict(zip(a.variables, a.values)))
    m = t.marginalize(a.variables).reorder(a.variables)
    if any(c != 2 for c in m.cards):
        raise ContractError("correlators need binary variables")
    total = Fraction(0) if m.exact else 0.0
    for idx, p in m.items():
        total += -p if sum(idx) % 2 else p
    return total


def evaluate_poly(expr, source):
    cache = {}
    exact = None
    total = None
    for m, c in expr.sorted_terms():
        term = c
        for a, p in m:
            if a not in cache:
                cache[a] = atom_value(a, source)
            v = cache[a]
            if exact is None:
                exact = isinstance(v, Fraction)
            if p < 0 and v == 0:
                term = 0
                break
            term = term * (v ** p)
        if exact is False:
            term = float(term)
        total = term if total is None else total + term
    if total is None:
        return Fraction(0)
    return total


class PolynomialInequality:
    """expr >= 0."""

    def __init__(self, expr, name=""):
        self.expr = expr if isinstance(expr, Polynomial) else Polynomial(expr)
        self.name = name

    @staticmethod
    def leq(lhs, rhs, name=""):
        """lhs <= rhs."""
        return PolynomialInequality(rhs - lhs, name)

    def canonical(self):
        terms = self.expr.sorted_terms()
        if not terms:
            return PolynomialInequality(Polynomial(), self.name)
        ints = integer_normalize([c for _, c in terms])
        return PolynomialInequality(Polynomial({m: i for (m, _), i in zip(terms, ints)}), self.name)

    def key(self):
        return self.canonical().expr.key()

    def __eq__(self, other):
        return isinstance(other, PolynomialInequality) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def evaluate(self, dist, tol=FLOAT_TOL):
        """Return (value, satisfied). Exact inputs give an exact verdict."""
        v = evaluate_poly(self.expr, dist)
        if isinstance(v, Fraction):
            return v, v >= 0
        return v, v >= -tol

    def correlator_form(self):
        return PolynomialInequality(correlator_form(self.expr), self.name)

    def probability_form(self):
        return PolynomialInequality(probability_form(self.expr), self.name)

    def has_divisions(self):
        return any(p < 0 for m in self.expr.terms for _, p in m)

    def preferred_form(self):
        """Canonical correlator form when it exists (no divisions), else canonical probability form."""
        if self.has_divisions():
            return self.probability_form().canonical()
        return self.correlator_form().canonical()

    def rename(self, fn):
        return PolynomialInequality(self.expr.rename(fn), self.name)

    def scaled(self, monomial_poly):
        """Multiply through by a positive monomial (e.g. P_Y(0)^-1 P_Y(1)^-1)."""
        return PolynomialInequality(self.expr * monomial_poly, self.name)

    def render(self, compact=True):
        return f"0 <= {self.expr.render(compact)}"

    def __repr__(self):
        return f"PolynomialInequality({self.render(False)})"

    def to_json(self):
        return {"sense": ">=0",
                "terms": [{"monomial": mono_label(m), "coefficient": format_rational(c)}
                          for m, c in self.expr.sorted_terms()],
                "text": self.render(False)}

    @classmethod
    def from_json(cls, data):
        terms = {}
        for t in data["terms"]:
            m = parse_monomial(t["monomial"])
            terms[m] = terms.get(m, Fraction(0)) + to_fraction(t["coefficient"])
        return cls(Polynomial(terms))


# label parsing (inverse of mono_label with compact=False)

def parse_atom(text):
    text = text.strip()
    if text.startswith("<") and text.endswith(">"):
        inner = text[1:-1].split()
        return Atom.corr(inner)
    if text.startswith("P[") and ")" in text:
        close = text.index("]")
        vs = text[2:close].split()
        vals = text[close + 2:-1].split()
        if len(vs) != len(vals):
            raise ValidationError(f"bad atom label {text!r}")
        return Atom.prob(vs, [int(x) for x in vals])
    raise ValidationError(f"bad atom label {text!r}")


def parse_monomial(text):
    text = text.strip()
    if text == "1":
        return ()
    factors = []
    for part in text.split("*"):
        if "^" in part:
            base, p = part.rsplit("^", 1)
            factors.append((parse_atom(base), int(p)))
        else:
            factors.append((parse_atom(part), 1))
    return _mono(factors)


# change of basis (binary variables)

def _sign(bits):
    return -1 if sum(bits) % 2 else 1


def prob_atom_to_correlators(a):
    """P_S(o) = 2^-|S| sum_{T subset S} prod_{i in T} s_i <T>, with s_i = +1 for o_i = 0."""
    n = len(a.variables)
    out = Polynomial()
    for mask in iproduct([0, 1], repeat=n):
        sub = [v for v, b in zip(a.variables, mask) if b]
        s = _sign([o for o, b in zip(a.values, mask) if b])
        if sub:
            out = out + Polynomial.atom(Atom.corr(sub), 1, Fraction(s, 2 ** n))
        else:
            out = out + Fraction(s, 2 ** n)
    return out


def correlator_to_probs(a):
    out = Polynomial()
    for vals in iproduct([0, 1], repeat=len(a.variables)):
        out = out + Polynomial.atom(Atom.prob(a.variables, vals), 1, _sign(vals))
    return out


def correlator_form(expr):
    for m in expr.terms:
        for a, p in m:
            if a.kind == "P" and p < 0:
                raise ContractError("correlator form needs a polynomial without divisions by probabilities")
    return expr.map_atoms(lambda a: prob_atom_to_correlators(a) if a.kind == "P" else Polynomial.atom(a))


def probability_form(expr):
    return expr.map_atoms(lambda a: correlator_to_probs(a) if a.kind == "E" else Polynomial.atom(a))


# translation from the inflated structure back to the original one

def recipe_expression(inf, recipe, assignment):
    """Polynomial (with divisions) for the recipe's marginal evaluated at a partial assignment."""
    members = set(recipe.members)
    keep = {v: x for v, x in assignment.items() if v in members}
    free = sorted(members - set(keep))
    card = inf.inflated.cardinality
    total = Polynomial()
    for vals in iproduct(*[range(card[v]) for v in free]):
        full = dict(keep)
        full.update(zip(free, vals))
        total = total + _recipe_point(inf, recipe, full)
    return total


def _factor_atoms(inf, variables, values, power=1):
    from .inflation import ancestral_components

    assignment = dict(zip(variables, values))
    out = Polynomial.const(1)
    for comp in ancestral_components(inf, variables):
        if not inf.is_injective_on(comp):
            return None
        out = out * Polynomial.atom(Atom.prob(comp, [assignment[v] for v in comp]), power)
    return out


def _recipe_point(inf, recipe, full):
    if recipe.op == "injectable":
        return Polynomial.atom(Atom.prob(recipe.members, [full[v] for v in recipe.members]))
    if recipe.op == "marginalize":
        return recipe_expression(inf, recipe.children[0], full)
    if recipe.op == "conditional_product":
        x, y, z = recipe.condition
        left = recipe_expression(inf, recipe.children[0], {v: full[v] for v in (*x, *z)})
        right = recipe_expression(inf, recipe.children[1], {v: full[v] for v in (*y, *z)})
        if not z:
            return left * right
        den = _factor_atoms(inf, z, [full[v] for v in z], power=-1)
        if den is None:
            raise ContractError(f"divisor marginal on {fmt_set(z)} is not a product of injectable marginals")
        return left * right * den
    raise ContractError(f"unknown recipe op {recipe.op!r}")


def factorize(expr, inf, recipes=None):
    """Rewrite inflated-level probability atoms as products of injectable-set atoms
    (ancestral independence), or via expressible-set recipes when needed."""
    from .inflation import expressible_closure

    recipes = dict(recipes or {})

    def sub(a):
        if a.kind != "P":
            raise ContractError("factorize works on probability atoms; convert correlators first")
        f = _factor_atoms(inf, a.variables, a.values)
        if f is not None:
            return f
        from .inflation import ancestral_components
        assignment = dict(zip(a.variables, a.values))
        out = Polynomial.const(1)
        for comp in ancestral_components(inf, a.variables):
            vals = [assignment[v] for v in comp]
            if inf.is_injective_on(comp):
                out = out * Polynomial.atom(Atom.prob(comp, vals))
                continue
            key = frozenset(comp)
            rec = recipes.get(key)
            if rec is None:
                (ex,) = expressible_closure(inf, [comp])
                if ex.found:
                    rec = ex.recipe
                else:
                    # marginalize a recipe known for a larger set
                    rec = next((r for s, r in recipes.items() if key < s), None)
                if rec is None:
                    raise ContractError(f"{fmt_set(comp)} is not expressible; cannot translate")
                recipes[key] = rec
            out = out * recipe_expression(inf, rec, dict(zip(comp, vals)))
        return out

    return expr.map_atoms(sub)


def drop_copy_indices(expr):
    return expr.rename(lambda v: v.erase())


def to_original(ineq, inf, recipes=None):
    """Inflated-level inequality -> causal compatibility inequality on the original structure."""
    expr = ineq.expr if isinstance(ineq, PolynomialInequality) else ineq
    return PolynomialInequality(drop_copy_indices(factorize(expr, inf, recipes)),
                                getattr(ineq, "name", "")).canonical()


# symmetry

@dataclass(frozen=True)
class SymmetryElement:
    """Sends variable v to var_map[v] and value x of v to value_maps[v][x]."""
    var_map: tuple  # sorted pairs (v, w)
    value_maps: tuple  # sorted pairs (v, permutation tuple)

    def vmap(self):
        return dict(self.var_map)

    def valmap(self):
        return dict(self.value_maps)

    def compose(self, other):
        """self after other."""
        a, b = other.vmap(), self.vmap()
        pa, pb = other.valmap(), self.valmap()
        vm = tuple(sorted((v, b[a[v]]) for v in a))
        vals = tuple(sorted((v, tuple(pb[a[v]][x] for x in pa[v])) for v in a))
        return SymmetryElement(vm, vals)

    def is_identity(self):
        return all(v == w for v, w in self.var_map) and all(p == tuple(range(len(p))) for _, p in self.value_maps)

    def apply_atom(self, a):
        vm, pm = self.vmap(), self.valmap()
        if a.kind == "P":
            return Polynomial.atom(Atom.prob([vm[v] for v in a.variables],
                                             [pm[v][x] for v, x in zip(a.variables, a.values)]))
        sign = 1
        for v in a.variables:
            p = pm[v]
            if len(p) != 2:
                raise ContractError("correlator symmetry needs binary variables")
            if p == (1, 0):
                sign = -sign
        return Polynomial.atom(Atom.corr([vm[v] for v in a.variables]), 1, sign)

    def apply(self, ineq):
        if isinstance(ineq, PolynomialInequality):
            return PolynomialInequality(ineq.expr.map_atoms(self.apply_atom), ineq.name)
        return ineq.map_atoms(self.apply_atom)

    def apply_table(self, t):
        """Transport a distribution: the image assigns P(g.x) = P(x)."""
        vm, pm = self.vmap(), self.valmap()
        out = t
        for v in t.variables:
            out = out.permute_values(v, pm[v])
        return out.rename(vm).sorted()

    def inverse(self):
        vm, pm = self.vmap(), self.valmap()
        inv_v = tuple(sorted((w, v) for v, w in vm.items()))
        inv_p = []
        for v, w in vm.items():
            p = pm[v]
            q = [0] * len(p)
            for i, j in enumerate(p):
                q[j] = i
            inv_p.append((w, tuple(q)))
        return SymmetryElement(inv_v, tuple(sorted(inv_p)))


class SymmetryGroup:
    def __init__(self, generators, elements):
        self.generators = list(generators)
        self.elements = list(elements)

    def __len__(self):
        return len(self.elements)

    @classmethod
    def generate(cls, generators, variables, cards):
        ident = SymmetryElement(tuple((v, v) for v in variables),
                                tuple((v, tuple(range(cards[v]))) for v in variables))
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for e in frontier:
                for g in generators:
                    h = g.compose(e)
                    if h not in seen:
                        seen.add(h)
                        nxt.append(h)
            frontier = nxt
        elements = sorted(seen, key=lambda e: (not e.is_identity(), repr(e)))
        return cls(generators, elements)


def symmetry_group(g):
    """Observed-variable permutations that extend to DAG automorphisms, plus value relabelings."""
    from networkx.algorithms.isomorphism import DiGraphMatcher

    ng = g.to_networkx()
    match = lambda a, b: a["kind"] == b["kind"] and a["card"] == b["card"]
    obs = sorted_nodes(g.observed)
    cards = dict(g.cardinality)
    ident_vals = tuple((v, tuple(range(cards[v]))) for v in obs)
    gens = set()
    for m in DiGraphMatcher(ng, ng, node_match=match).isomorphisms_iter():
        vm = tuple(sorted((v, m[v]) for v in obs))
        if any(v != w for v, w in vm):
            gens.add(SymmetryElement(vm, ident_vals))
    ident_vars = tuple((v, v) for v in obs)
    for v in obs:
        k = cards[v]
        for i in range(k - 1):
            p = list(range(k))
            p[i], p[i + 1] = p[i + 1], p[i]
            vals = tuple((u, tuple(p) if u == v else tuple(range(cards[u]))) for u in obs)
            gens.add(SymmetryElement(ident_vars, vals))
    gens = sorted(gens, key=repr)
    for e in gens:
        _check_automorphism(g, e)
    return SymmetryGroup.generate(gens, obs, cards)


def _check_automorphism(g, e):
    from networkx.algorithms.isomorphism import DiGraphMatcher

    vm = e.vmap()
    ng = g.to_networkx()
    match = lambda a, b: a["kind"] == b["kind"] and a["card"] == b["card"]
    for m in DiGraphMatcher(ng, ng, node_match=match).isomorphisms_iter():
        if all(m[v] == w for v, w in vm.items()):
            return
    raise ContractError("symmetry generator does not extend to a DAG automorphism")


def orbit(ineq, grp):
    """Distinct canonical images of an inequality under the group."""
    seen = {}
    for e in grp.elements:
        img = e.apply(ineq).canonical()
        k = img.key()
        if k not in seen:
            seen[k] = img
    return [seen[k] for k in sorted(seen)]


def orbit_representative(ineq, grp):
    imgs = orbit(ineq, grp)
    return min(imgs, key=lambda i: i.key())


def symmetry_classes(ineqs, grp):
    """One representative per orbit, in order of first appearance.

    Each orbit is computed once; later members are recognized by key."""
    seen, reps = set(), []
    for q in ineqs:
        if q.canonical().key() in seen:
            continue
        imgs = orbit(q, grp)
        seen.update(i.key() for i in imgs)
        reps.append(min(imgs, key=lambda i: i.key()))
    return reps


def reduce_modulo(ineqs, equalities):
    """Keep one representative per class of inequalities that differ by a combination of the
    given linear equalities (Polynomials that vanish on every admissible point)."""
    ineqs = list(ineqs)
    if not equalities:
        return ineqs
    monos = sorted({m for e in equalities for m in e.terms} | {m for i in ineqs for m in i.expr.terms},
                   key=_mono_key)
    idx = {m: i for i, m in enumerate(monos)}
    rows = []
    for e in equalities:
        r = [Fraction(0)] * len(monos)
        for m, c in e.terms.items():
            r[idx[m]] = c
        rows.append(r)
    red, piv = rref(rows, len(monos))
    out = []
    seen = set()
    for q in ineqs:
        v = [Fraction(0)] * len(monos)
        for m, c in q.expr.terms.items():
            v[idx[m]] = c
        for row, p in zip(red, piv):
            if v[p] != 0:
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        rep = PolynomialInequality(Polynomial({monos[i]: c for i, c in enumerate(v) if c != 0}), q.name).canonical()
        k = rep.key()
        if k not in seen:
            seen.add(k)
            out.append(rep)
    return out


# table file format: rows of coefficients keyed by monomial labels

TRIANGLE_COLUMNS = ["1", "<A>", "<B>", "<C>", "<A B>", "<A C>", "<B C>", "<A B C>",
                    "<A>*<B>", "<A>*<C>", "<B>*<C>", "<A>*<B C>", "<A C>*<B>", "<A B>*<C>", "<A>*<B>*<C>"]


def load_table(path):
    """Read {"columns": [...], "rows": [[...], ...]} into PolynomialInequalities."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON ({exc})") from None
    return table_from_json(data)


def table_from_json(data):
    cols = [parse_monomial(c) for c in data["columns"]]
    out = []
    for i, row in enumerate(data["rows"]):
        if len(row) != len(cols):
            raise ValidationError(f"row {i + 1} has {len(row)} entries, expected {len(cols)}")
        terms = {}
        for m, c in zip(cols, row):
            terms[m] = terms.get(m, Fraction(0)) + to_fraction(c)
        out.append(PolynomialInequality(Polynomial(terms), name=f"row {i + 1}"))
    return out


def table_to_json(ineqs, columns=None):
    if columns is None:
        monos = sorted({m for q in ineqs for m in q.expr.terms}, key=_mono_key)
        columns = [mono_label(m) for m in monos]
    parsed = [parse_monomial(c) for c in columns]
    rows = []
    for q in ineqs:
        extra = set(q.expr.terms) - set(parsed)
        if extra:
            raise ContractError(f"inequality has monomials outside the column set: {[mono_label(m) for m in extra]}")
        rows.append([format_rational(q.expr.terms.get(m, 0)) if q.expr.terms.get(m, 0).denominator != 1
                     else int(q.expr.terms.get(m, 0)) for m in parsed])
    return {"columns": list(columns), "rows": rows}


def render_table(ineqs, columns):
    """Fixed-width ASCII table with one column per monomial."""
    parsed = [parse_monomial(c) for c in columns]
    heads = [mono_label(m, compact=True) for m in parsed]
    cells = [[format_rational(q.expr.terms.get(m, 0)) for m in parsed] for q in ineqs]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(heads)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(heads, widths))]
    for r in cells:
        lines.append("  ".join(c.rjust(w) for c, w in zip(r, widths)))
    return "\n".join(lines) + "\n"
