"""Discrete joint probability tables, causal models and inflation-induced marginal families.

Tables hold either exact Fractions (numpy object arrays) or float64 arrays. Exact mode is the
default for anything that feeds a certificate; float mode is for bulk sampling."""
import json
import math
from fractions import Fraction

import numpy as np

from .errors import ContractError, ValidationError
from .exact import format_rational, to_fraction
from .graph import fmt_set, node, sorted_nodes

FLOAT_TOL = 1e-9


def _is_exact(arr):
    return arr.dtype == object


def _zero_like(exact):
    return Fraction(0) if exact else 0.0


class JointTable:
    """Probability table over an ordered list of variables; probs has one axis per variable."""

    def __init__(self, variables, cardinalities, probs, check=True):
        self.variables = tuple(node(v) for v in variables)
        self.cards = tuple(int(c) for c in cardinalities)
        if len(set(self.variables)) != len(self.variables):
            raise ValidationError("repeated variable in table")
        arr = np.asarray(probs)
        if arr.dtype != object:
            arr = arr.astype(np.float64)
        arr = arr.reshape(self.cards) if self.cards else arr.reshape(())
        self.probs = arr
        if check:
            self._validate()

    def _validate(self):
        flat = self.probs.reshape(-1)
        if self.exact:
            if any(p < 0 for p in flat):
                raise ValidationError("negative probability")
            if sum(flat, Fraction(0)) != 1:
                raise ValidationError(f"probabilities sum to {sum(flat, Fraction(0))}, not 1")
        else:
            if (flat < -FLOAT_TOL).any():
                raise ValidationError("negative probability")
            if abs(flat.sum() - 1.0) > 1e-12 * max(1, flat.size):
                raise ValidationError(f"probabilities sum to {flat.sum()!r}, not 1")

    @property
    def exact(self):
        return _is_exact(self.probs)

    @property
    def card(self):
        return dict(zip(self.variables, self.cards))

    def __repr__(self):
        return f"JointTable({fmt_set(self.variables)}, {'exact' if self.exact else 'float'})"

    # constructors

    @classmethod
    def from_dict(cls, variables, cards, entries, exact=True):
        """entries maps value tuples (or strings like "010") to probabilities; others are 0."""
        variables = [node(v) for v in variables]
        if isinstance(cards, int):
            cards = [cards] * len(variables)
        arr = np.empty(tuple(cards), dtype=object) if exact else np.zeros(tuple(cards))
        if exact:
            arr.fill(Fraction(0))
        for k, p in entries.items():
            idx = tuple(int(ch) for ch in k) if isinstance(k, str) else tuple(k)
            arr[idx] = to_fraction(p) if exact else float(p)
        return cls(variables, cards, arr)

    @classmethod
    def point_mass(cls, variables, cards, values, exact=True):
        return cls.from_dict(variables, cards, {tuple(values): 1}, exact)

    @classmethod
    def uniform(cls, variables, cards, exact=True):
        variables = [node(v) for v in variables]
        if isinstance(cards, int):
            cards = [cards] * len(variables)
        n = int(np.prod(cards)) if cards else 1
        if exact:
            arr = np.empty(tuple(cards), dtype=object)
            arr.fill(Fraction(1, n))
        else:
            arr = np.full(tuple(cards), 1.0 / n)
        return cls(variables, cards, arr)

    def to_exact(self):
        if self.exact:
            return self
        arr = np.empty(self.probs.shape, dtype=object)
        for idx in np.ndindex(*self.probs.shape):
            arr[idx] = Fraction(float(self.probs[idx]))
        return JointTable(self.variables, self.cards, arr, check=False)

    def to_float(self):
        if not self.exact:
            return self
        return JointTable(self.variables, self.cards, self.probs.astype(np.float64), check=False)

    # access

    def prob(self, assignment):
        """Probability of a partial assignment {var: value} (marginal if not all variables given)."""
        assignment = {node(k): v for k, v in assignment.items()}
        for k in assignment:
            if k not in self.variables:
                raise ContractError(f"variable {k} not in table")
        idx = tuple(assignment.get(v, slice(None)) for v in self.variables)
        sub = self.probs[idx]
        if isinstance(sub, np.ndarray):
            return sub.sum() if sub.size else _zero_like(self.exact)
        return sub

    def items(self):
        for idx in np.ndindex(*self.cards):
            yield idx, self.probs[idx]

    def flat(self):
        return list(self.probs.reshape(-1))

    # operations

    def marginalize(self, keep):
        keep = {node(v) for v in keep}
        missing = keep - set(self.variables)
        if missing:
            raise ContractError(f"cannot keep {fmt_set(missing)}: not in table")
        axes = tuple(i for i, v in enumerate(self.variables) if v not in keep)
        arr = self.probs.sum(axis=axes) if axes else self.probs
        vs = [v for v in self.variables if v in keep]
        cs = [c for v, c in zip(self.variables, self.cards) if v in keep]
        if not vs:
            arr = np.asarray(arr, dtype=object if self.exact else np.float64).reshape(())
        return JointTable(vs, cs, arr, check=False)

    def reorder(self, order):
        order = [node(v) for v in order]
        if set(order) != set(self.variables) or len(order) != len(self.variables):
            raise ContractError("reorder needs a permutation of the table variables")
        perm = [self.variables.index(v) for v in order]
        return JointTable(order, [self.cards[i] for i in perm], np.transpose(self.probs, perm), check=False)

    def rename(self, mapping):
        mapping = {node(k): node(v) for k, v in mapping.items()}
        return JointTable([mapping.get(v, v) for v in self.variables], self.cards, self.probs, check=False)

    def sorted(self):
        return self.reorder(sorted(self.variables))

    def permute_values(self, var, perm):
        """Relabel the values of one variable: new value perm[v] gets the old mass of v."""
        var = node(var)
        ax = self.variables.index(var)
        inv = [0] * len(perm)
        for old, new in enumerate(perm):
            inv[new] = old
        return JointTable(self.variables, self.cards, np.take(self.probs, inv, axis=ax), check=False)

    def equals(self, other, tol=None):
        if set(self.variables) != set(other.variables):
            return False
        o = other.reorder(self.variables)
        if self.exact and o.exact and tol is None:
            return bool(np.all(self.probs == o.probs))
        a = self.probs.astype(np.float64)
        b = o.probs.astype(np.float64)
        return bool(np.allclose(a, b, atol=FLOAT_TOL if tol is None else tol, rtol=0))

    def to_json(self):
        probs = [format_rational(p) if self.exact else float(p) for p in self.flat()]
        return {"variables": [{"name": str(v), "cardinality": c} for v, c in zip(self.variables, self.cards)],
                "probs": probs}

    @classmethod
    def from_json(cls, data, exact=True):
        try:
            variables = [node(d["name"]) for d in data["variables"]]
            cards = [int(d["cardinality"]) for d in data["variables"]]
            raw = data["probs"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad distribution JSON: {exc}")
        n = int(np.prod(cards)) if cards else 1
        if len(raw) != n:
            raise ValidationError(f"expected {n} probabilities, got {len(raw)}")
        if exact:
            arr = np.empty(n, dtype=object)
            for i, p in enumerate(raw):
                arr[i] = to_fraction(p)
        else:
            arr = np.array([float(to_fraction(p)) for p in raw])
        return cls(variables, cards, arr)

    @classmethod
    def load(cls, path, exact=True):
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: not valid JSON ({exc})")
        return cls.from_json(data, exact)


def _coerce_pair(tables):
    """Bring tables to a common arithmetic mode (float wins)."""
    if all(t.exact for t in tables):
        return tables
    return [t.to_float() for t in tables]


def marginalize(t, keep):
    return t.marginalize(keep)


def product(tables):
    """Independent product of tables on disjoint variable sets."""
    tables = _coerce_pair(list(tables))
    if not tables:
        raise ContractError("product of no tables")
    seen = set()
    for t in tables:
        if seen & set(t.variables):
            raise ContractError("product needs disjoint variable sets")
        seen |= set(t.variables)
    arr = tables[0].probs
    vs = list(tables[0].variables)
    cs = list(tables[0].cards)
    for t in tables[1:]:
        arr = np.multiply.outer(arr, t.probs)
        vs += t.variables
        cs += t.cards
    return JointTable(vs, cs, arr, check=False)


def _safe_divide(num, den, exact):
    if exact:
        out = np.empty(num.shape, dtype=object)
        for idx in np.ndindex(*num.shape):
            d = den[idx]
            out[idx] = Fraction(0) if d == 0 else num[idx] / d
        return out
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)


def conditional_product(xz, yz, z_vars):
    """P_XZ * P_YZ / P_Z, with 0 wherever P_Z = 0. Result order: xz's variables, then Y."""
    xz, yz = _coerce_pair([xz, yz])
    z = [node(v) for v in z_vars]
    zs = set(z)
    if not zs <= set(xz.variables) or not zs <= set(yz.variables):
        raise ContractError("z variables must appear in both tables")
    xs = [v for v in xz.variables if v not in zs]
    ys = [v for v in yz.variables if v not in zs]
    if set(xs) & set(ys):
        raise ContractError("x and y variables overlap")
    zorder = sorted(zs)
    pz1 = xz.marginalize(zs).reorder(zorder)
    pz2 = yz.marginalize(zs).reorder(zorder)
    if not pz1.equals(pz2):
        raise ContractError("tables disagree on the shared z-marginal")
    a = xz.reorder(xs + zorder).probs
    b = yz.reorder(ys + zorder).probs
    nx_, ny_ = len(xs), len(ys)
    # broadcast to axes (X..., Y..., Z...)
    a_b = a.reshape(a.shape[:nx_] + (1,) * ny_ + a.shape[nx_:])
    b_b = b.reshape((1,) * nx_ + b.shape)
    den = pz1.probs.reshape((1,) * (nx_ + ny_) + pz1.probs.shape)
    num = a_b * b_b
    den_full = np.broadcast_to(den, num.shape)
    arr = _safe_divide(num, den_full, xz.exact)
    cards = [xz.card[v] for v in xs] + [yz.card[v] for v in ys] + [xz.card[v] for v in zorder]
    t = JointTable(xs + ys + zorder, cards, arr, check=False)
    return t.reorder(list(xz.variables) + ys)


def entropy(t, variables=None):
    """Shannon entropy in bits of the marginal on `variables` (all by default)."""
    m = t if variables is None else t.marginalize(variables)
    h = 0.0
    for p in m.probs.reshape(-1):
        p = float(p)
        if p > 0:
            h -= p * math.log2(p)
    return h


def mutual_information(t, x, y):
    x = [node(v) for v in x]
    y = [node(v) for v in y]
    return entropy(t, x) + entropy(t, y) - entropy(t, x + y)


def conditional_mutual_information(t, x, y, z=()):
    """I(X:Y|Z) in bits; zero exactly when X and Y are independent given Z."""
    x, y, z = ([node(v) for v in s] for s in (x, y, z))
    hz = entropy(t, z) if z else 0.0
    return entropy(t, x + z) + entropy(t, y + z) - entropy(t, x + y + z) - hz


# marginal families

class MarginalFamily:
    """Tables on a list of contexts, checked for agreement on every pairwise intersection."""

    def __init__(self, contexts, tables, descriptors=None, tol=None):
        self.contexts = [sorted_nodes(c) for c in contexts]
        self.tables = [t.reorder(c) for c, t in zip(self.contexts, tables)]
        self.descriptors = list(descriptors) if descriptors is not None else [None] * len(self.contexts)
        for c, t in zip(self.contexts, self.tables):
            if set(c) != set(t.variables):
                raise ValidationError(f"table variables do not match context {fmt_set(c)}")
        for i in range(len(self.contexts)):
            for j in range(i + 1, len(self.contexts)):
                shared = set(self.contexts[i]) & set(self.contexts[j])
                a = self.tables[i].marginalize(shared)
                b = self.tables[j].marginalize(shared)
                if not a.equals(b, tol):
                    raise ValidationError(f"contexts {fmt_set(self.contexts[i])} and "
                                          f"{fmt_set(self.contexts[j])} disagree on {fmt_set(shared)}")

    def __len__(self):
        return len(self.contexts)

    def __iter__(self):
        return iter(zip(self.contexts, self.tables))

    @property
    def exact(self):
        return all(t.exact for t in self.tables)

    def table(self, context):
        c = sorted_nodes(node(v) for v in context)
        return self.tables[self.contexts.index(c)]


# causal models

class CausalModel:
    """Structure plus conditional tables. kernels[v] has axes (sorted parents..., v)."""

    def __init__(self, structure, kernels, latent_cardinality):
        self.structure = structure
        self.latent_cardinality = {node(k): int(v) for k, v in latent_cardinality.items()}
        self.kernels = {node(k): np.asarray(v) for k, v in kernels.items()}
        for v in structure.nodes:
            if v not in self.kernels:
                raise ValidationError(f"no kernel for {v}")
            k = self.kernels[v]
            want = tuple(self.cardinality(p) for p in sorted(structure.parents(v))) + (self.cardinality(v),)
            if k.shape != want:
                raise ValidationError(f"kernel of {v} has shape {k.shape}, expected {want}")
            sums = k.sum(axis=-1)
            if k.dtype == object:
                if not all(s == 1 for s in np.asarray(sums).reshape(-1)):
                    raise ValidationError(f"kernel of {v} is not normalized")
            elif not np.allclose(sums, 1.0, atol=1e-12):
                raise ValidationError(f"kernel of {v} is not normalized")

    def cardinality(self, v):
        if v in self.structure.cardinality:
            return self.structure.cardinality[v]
        return self.latent_cardinality[v]


def _quantize(weights, denominator):
    """Round a probability vector to multiples of 1/denominator, keeping it normalized."""
    counts = np.floor(np.asarray(weights) * denominator).astype(int)
    short = denominator - counts.sum()
    order = np.argsort(-(np.asarray(weights) * denominator - counts), kind="stable")
    for i in range(short):
        counts[order[i % len(counts)]] += 1
    return [Fraction(int(c), denominator) for c in counts]


def random_model(structure, rng, latent_cardinality=8, exact=False, denominator=64):
    """Random parameters: every kernel column Dirichlet(1,...,1). Exact mode rounds each column
    onto the grid 1/denominator so all later arithmetic stays rational."""
    if isinstance(rng, (int, np.integer)) or rng is None:
        rng = np.random.default_rng(rng)
    lat = {v: latent_cardinality for v in structure.latent}
    card = lambda v: structure.cardinality.get(v, lat.get(v))
    kernels = {}
    for v in structure.nodes:
        shape = tuple(card(p) for p in sorted(structure.parents(v)))
        k = card(v)
        cols = rng.dirichlet(np.ones(k), size=int(np.prod(shape)) if shape else 1)
        if exact:
            arr = np.empty((len(cols), k), dtype=object)
            for i, c in enumerate(cols):
                arr[i] = _quantize(c, denominator)
            kernels[v] = arr.reshape(shape + (k,))
        else:
            kernels[v] = cols.reshape(shape + (k,))
    return CausalModel(structure, kernels, lat)


def deterministic_model(structure, functions, latent_cardinality):
    """Model where each node is a function of its (sorted) parents' values."""
    kernels = {}
    lat = {node(k): v for k, v in latent_cardinality.items()}
    card = lambda v: structure.cardinality.get(v, lat.get(v))
    for v in structure.nodes:
        pa = sorted(structure.parents(v))
        shape = tuple(card(p) for p in pa) + (card(v),)
        arr = np.empty(shape, dtype=object)
        arr.fill(Fraction(0))
        f = functions[v]
        for idx in np.ndindex(*shape[:-1]):
            out = f(*idx)
            if isinstance(out, dict):
                for val, p in out.items():
                    arr[idx + (val,)] = to_fraction(p)
            else:
                arr[idx + (out,)] = Fraction(1)
        kernels[v] = arr
    return CausalModel(structure, kernels, lat)


def simulate(model):
    """Exact forward computation of the observed distribution of a causal model."""
    g = model.structure
    order = list(g.topological_order())
    exact = any(k.dtype == object for k in model.kernels.values())
    joint = np.array(Fraction(1) if exact else 1.0, dtype=object if exact else np.float64)
    axes = []  # variables along the axes of `joint`
    for v in order:
        pa = sorted(g.parents(v))
        k = model.kernels[v]
        if exact and k.dtype != object:
            k = np.vectorize(lambda x: Fraction(float(x)), otypes=[object])(k)
        # move the kernel's parent axes into the joint's axis order
        perm_src = [axes.index(p) for p in pa]
        order_pa = sorted(range(len(pa)), key=lambda i: perm_src[i])
        kt = np.transpose(k, order_pa + [len(pa)])
        shape = [1] * len(axes) + [k.shape[-1]]
        for i in order_pa:
            shape[perm_src[i]] = k.shape[i]
        joint = joint[..., None] * kt.reshape(shape)
        axes.append(v)
        # sum out latents with no remaining unprocessed children
        done = set(axes)
        drop = [i for i, u in enumerate(axes)
                if u in g.latent and all(c in done for c in g.children(u))]
        if drop:
            joint = joint.sum(axis=tuple(drop))
            axes = [u for i, u in enumerate(axes) if i not in drop]
    t = JointTable(axes, [model.cardinality(u) for u in axes], joint, check=False)
    return t.reorder(sorted(g.observed))


# inflation families

def injectable_marginal(inf, observed, members):
    """Marginal of an injectable set: the original marginal on its image, relabeled."""
    members = sorted_nodes(members)
    if not inf.is_injective_on(members):
        raise ContractError(f"{fmt_set(members)} is not injectable")
    image = [v.erase() for v in members]
    return observed.marginalize(image).reorder(image).rename(dict(zip(image, members)))


def replay_recipe(inf, observed, recipe):
    if recipe.op == "injectable":
        return injectable_marginal(inf, observed, recipe.members)
    if recipe.op == "marginalize":
        return replay_recipe(inf, observed, recipe.children[0]).marginalize(recipe.members).reorder(recipe.members)
    if recipe.op == "conditional_product":
        x, y, z = recipe.condition
        left = replay_recipe(inf, observed, recipe.children[0]).marginalize(set(x) | set(z))
        right = replay_recipe(inf, observed, recipe.children[1]).marginalize(set(y) | set(z))
        return conditional_product(left, right, z).reorder(recipe.members)
    raise ContractError(f"unknown recipe op {recipe.op!r}")


def context_table(inf, observed, context):
    """Inflation-model marginal on one context (InjectableSet, AiExpressibleSet, ExpressibleSet or node set)."""
    from .inflation import AiExpressibleSet, ExpressibleSet, InjectableSet, ai_partition, expressible_closure

    if isinstance(context, InjectableSet):
        return injectable_marginal(inf, observed, context.members)
    if isinstance(context, AiExpressibleSet):
        return product([injectable_marginal(inf, observed, b.members) for b in context.blocks]).reorder(context.members)
    if isinstance(context, ExpressibleSet):
        if not context.found:
            raise ContractError(f"{fmt_set(context.members)} has no recipe")
        return replay_recipe(inf, observed, context.recipe)
    members = sorted_nodes(node(v) for v in context)
    blocks = ai_partition(inf, members)
    if blocks is not None:
        return product([injectable_marginal(inf, observed, b.members) for b in blocks]).reorder(members)
    (ex,) = expressible_closure(inf, [members])
    if not ex.found:
        raise ContractError(f"context {fmt_set(members)} is neither ai-expressible nor expressible")
    return replay_recipe(inf, observed, ex.recipe)


def context_members(context):
    if hasattr(context, "members"):
        return sorted_nodes(context.members)
    return sorted_nodes(node(v) for v in context)


def inflation_family(inf, observed, contexts):
    """Marginal family the inflation model must reproduce, given the original observed distribution."""
    if set(observed.variables) != set(inf.original.observed):
        raise ContractError("distribution must cover exactly the original observed variables")
    tables = [context_table(inf, observed, c) for c in contexts]
    return MarginalFamily([context_members(c) for c in contexts], tables, contexts)
