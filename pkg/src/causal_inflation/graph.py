"""Causal structures: DAGs whose nodes are split into observed and latent variables."""
import json
import re
from dataclasses import dataclass
from functools import total_ordering
from pathlib import Path
from types import MappingProxyType

from .errors import ValidationError

_LABEL = re.compile(r"^(.*?)(\d+)?$")


@total_ordering
@dataclass(frozen=True)
class NodeId:
    name: str
    copy_index: int | None = None

    def key(self):
        return (self.name, -1 if self.copy_index is None else self.copy_index)

    def __lt__(self, other):
        return self.key() < other.key()

    def __str__(self):
        return self.name if self.copy_index is None else f"{self.name}{self.copy_index}"

    def __repr__(self):
        return f"NodeId({str(self)!r})"

    def erase(self):
        return NodeId(self.name)


def node(label):
    """Parse "A" or "A2" into a NodeId. NodeIds pass through unchanged."""
    if isinstance(label, NodeId):
        return label
    m = _LABEL.match(str(label))
    name, idx = m.group(1), m.group(2)
    if not name:
        raise ValidationError(f"bad node label {label!r}")
    return NodeId(name, int(idx) if idx is not None else None)


def nodes(labels):
    """Parse a whitespace/comma separated string or an iterable into a frozenset of NodeIds."""
    if isinstance(labels, str):
        labels = labels.replace(",", " ").split()
    return frozenset(node(x) for x in labels)


def sorted_nodes(s):
    return tuple(sorted(s))


def fmt_set(s):
    return "{" + " ".join(str(v) for v in sorted(s)) + "}"


class CausalStructure:
    """Immutable DAG with an observed/latent partition and observed cardinalities."""

    def __init__(self, observed, latent, edges, cardinality):
        observed = frozenset(node(v) for v in observed)
        latent = frozenset(node(v) for v in latent)
        edges = frozenset((node(a), node(b)) for a, b in edges)
        card = {node(k): int(v) for k, v in dict(cardinality).items()}
        if observed & latent:
            raise ValidationError(f"nodes both observed and latent: {fmt_set(observed & latent)}")
        allnodes = observed | latent
        for a, b in edges:
            if a not in allnodes or b not in allnodes:
                raise ValidationError(f"edge {a}->{b} has an endpoint outside the node set")
            if a == b:
                raise ValidationError(f"self loop at {a}")
        for v in observed:
            if v not in card:
                raise ValidationError(f"observed node {v} has no cardinality")
            if card[v] < 2:
                raise ValidationError(f"observed node {v} needs cardinality >= 2")
        for v in card:
            if v not in observed:
                raise ValidationError(f"cardinality given for non-observed node {v}")
        self.observed = observed
        self.latent = latent
        self.nodes = sorted_nodes(allnodes)
        self.edges = edges
        self.cardinality = MappingProxyType(card)
        pa = {v: set() for v in self.nodes}
        ch = {v: set() for v in self.nodes}
        for a, b in edges:
            pa[b].add(a)
            ch[a].add(b)
        self._pa = {v: frozenset(s) for v, s in pa.items()}
        self._ch = {v: frozenset(s) for v, s in ch.items()}
        self._topo = self._toposort()

    def __reduce__(self):
        # the read-only cardinality view does not pickle; rebuild from the constructor arguments
        return (CausalStructure, (self.observed, self.latent, self.edges, dict(self.cardinality)))

    def _toposort(self):
        indeg = {v: len(self._pa[v]) for v in self.nodes}
        ready = sorted(v for v in self.nodes if indeg[v] == 0)
        order = []
        while ready:
            v = ready.pop(0)
            order.append(v)
            for c in sorted(self._ch[v]):
                indeg[c] -= 1
                if indeg[c] == 0:
                    ready.append(c)
            ready.sort()
        if len(order) != len(self.nodes):
            raise ValidationError("graph has a directed cycle")
        return tuple(order)

    # basic queries

    def _check(self, s):
        s = frozenset(node(v) for v in s)
        bad = [v for v in s if v not in self._pa]
        if bad:
            raise ValidationError(f"unknown node(s) {fmt_set(bad)}")
        return s

    def kind(self, v):
        return "observed" if v in self.observed else "latent"

    def topological_order(self):
        return self._topo

    def parents(self, x):
        x = node(x)
        self._check([x])
        return self._pa[x]

    def children(self, x):
        x = node(x)
        self._check([x])
        return self._ch[x]

    def ancestors(self, s):
        s = self._check(s)
        seen = set(s)
        stack = list(s)
        while stack:
            v = stack.pop()
            for p in self._pa[v]:
                if p not in seen:
                    seen.add(p)
                    stack.append(p)
        return frozenset(seen)

    def descendants(self, s):
        s = self._check(s)
        seen = set(s)
        stack = list(s)
        while stack:
            v = stack.pop()
            for c in self._ch[v]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        return frozenset(seen)

    def induced_subgraph(self, s):
        s = self._check(s)
        return CausalStructure(
            observed=self.observed & s,
            latent=self.latent & s,
            edges=[(a, b) for a, b in self.edges if a in s and b in s],
            cardinality={v: c for v, c in self.cardinality.items() if v in s},
        )

    def ancestral_subgraph(self, s):
        return self.induced_subgraph(self.ancestors(s))

    def d_separated(self, x, y, z=()):
        """d-separation via reachability in the moralized ancestral graph."""
        x, y, z = self._check(x), self._check(y), self._check(z)
        if (x & y) or (x & z) or (y & z):
            raise ValidationError("d-separation needs pairwise disjoint node sets")
        if not x or not y:
            return True
        anc = self.ancestors(x | y | z)
        adj = {v: set() for v in anc}
        for v in anc:
            pa = [p for p in self._pa[v]]
            for p in pa:
                adj[v].add(p)
                adj[p].add(v)
            for i, p in enumerate(pa):
                for q in pa[i + 1:]:
                    adj[p].add(q)
                    adj[q].add(p)
        seen = set(x)
        stack = list(x)
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w in z or w in seen:
                    continue
                if w in y:
                    return False
                seen.add(w)
                stack.append(w)
        return True

    def ancestrally_independent(self, parts):
        parts = [self._check(p) for p in parts]
        for i, p in enumerate(parts):
            for q in parts[i + 1:]:
                if p & q:
                    raise ValidationError("ancestral independence needs disjoint parts")
        ancs = [self.ancestors(p) for p in parts]
        for i, a in enumerate(ancs):
            for b in ancs[i + 1:]:
                if a & b:
                    return False
        return True

    # comparison / io

    def __eq__(self, other):
        if not isinstance(other, CausalStructure):
            return NotImplemented
        return (self.observed == other.observed and self.latent == other.latent
                and self.edges == other.edges and dict(self.cardinality) == dict(other.cardinality))

    def __hash__(self):
        return hash((self.observed, self.latent, self.edges))

    def __repr__(self):
        return (f"CausalStructure(observed={fmt_set(self.observed)}, latent={fmt_set(self.latent)}, "
                f"edges={len(self.edges)})")

    def to_networkx(self):
        import networkx as nx

        g = nx.DiGraph()
        for v in self.nodes:
            g.add_node(v, kind=self.kind(v), name=v.name, card=self.cardinality.get(v))
        g.add_edges_from(sorted(self.edges))
        return g

    def to_json(self):
        out_nodes = []
        for v in self.nodes:
            d = {"name": v.name}
            if v.copy_index is not None:
                d["copy_index"] = v.copy_index
            d["kind"] = self.kind(v)
            if v in self.cardinality:
                d["cardinality"] = self.cardinality[v]
            out_nodes.append(d)
        return {"nodes": out_nodes, "edges": [[str(a), str(b)] for a, b in sorted(self.edges)]}

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict) or "nodes" not in data or "edges" not in data:
            raise ValidationError("graph JSON needs 'nodes' and 'edges'")
        observed, latent, card = [], [], {}
        seen = set()
        labels = {}
        for entry in data["nodes"]:
            try:
                name = entry["name"]
                kind = entry["kind"]
            except (KeyError, TypeError):
                raise ValidationError(f"bad node entry {entry!r}")
            ci = entry.get("copy_index")
            if ci is not None and (not isinstance(ci, int) or ci < 1):
                raise ValidationError(f"copy_index must be a positive integer in {entry!r}")
            v = NodeId(name, ci)
            if v in seen:
                raise ValidationError(f"duplicate node {v}")
            seen.add(v)
            labels[str(v)] = v
            if kind == "observed":
                observed.append(v)
                if "cardinality" not in entry:
                    raise ValidationError(f"observed node {v} lacks a cardinality")
                card[v] = entry["cardinality"]
            elif kind == "latent":
                latent.append(v)
                if "cardinality" in entry:
                    raise ValidationError(f"latent node {v} must not carry a cardinality")
            else:
                raise ValidationError(f"node kind must be observed or latent, got {kind!r}")
        edges = []
        for e in data["edges"]:
            if len(e) != 2 or e[0] not in labels or e[1] not in labels:
                raise ValidationError(f"edge {e!r} references unknown nodes")
            edges.append((labels[e[0]], labels[e[1]]))
        return cls(observed, latent, edges, card)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ValidationError(f"{path}: not valid JSON ({exc})")
        return cls.from_json(data)

    def dump(self, path):
        Path(path).write_text(dumps_graph(self.to_json()))


def dumps_graph(data):
    """Graph JSON with one node / edge per line."""
    lines = ['{', ' "nodes": [']
    lines.append(",\n".join("  " + json.dumps(n, ensure_ascii=False) for n in data["nodes"]))
    lines.append(' ],')
    lines.append(' "edges": [')
    lines.append(",\n".join("  " + json.dumps(e, ensure_ascii=False) for e in data["edges"]))
    lines.append(' ]')
    lines.append('}')
    return "\n".join(lines) + "\n"


def structure(observed, latent, edges, card=2):
    """Shorthand constructor: labels as strings, edges as "X->A" strings or pairs."""
    obs = nodes(observed)
    lat = nodes(latent)
    parsed = []
    for e in edges:
        if isinstance(e, str):
            a, b = e.split("->")
            parsed.append((node(a.strip()), node(b.strip())))
        else:
            parsed.append((node(e[0]), node(e[1])))
    cards = card if isinstance(card, dict) else {v: card for v in obs}
    return CausalStructure(obs, lat, parsed, {node(k): v for k, v in cards.items()})
