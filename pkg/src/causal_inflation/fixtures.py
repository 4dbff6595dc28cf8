"""Bundled graphs, distributions and inequality tables, looked up by name through the data manifest."""
import json
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .errors import ValidationError


def data_dir():
    return resources.files("causal_inflation") / "data"


@lru_cache(maxsize=None)
def manifest():
    with (data_dir() / "manifest.json").open() as fh:
        return json.load(fh)


def _resolve(kind, name_or_path):
    """Fixture name ("triangle") or a filesystem path."""
    entries = manifest()[kind]
    if name_or_path in entries:
        return data_dir() / entries[name_or_path]["file"]
    p = Path(name_or_path)
    if p.exists():
        return p
    raise ValidationError(f"unknown {kind[:-1]} {name_or_path!r}: not a bundled name and no such file")


def _read_json(kind, name_or_path):
    path = _resolve(kind, name_or_path)
    with path.open() as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{name_or_path}: not valid JSON ({exc})") from None


def graph_path(name):
    return _resolve("graphs", name)


def load_graph(name):
    from .graph import CausalStructure

    return CausalStructure.from_json(_read_json("graphs", name))


def load_distribution(name, exact=True):
    from .distributions import JointTable

    return JointTable.from_json(_read_json("distributions", name), exact=exact)


def load_inequalities(name):
    from .inequalities import table_from_json

    return table_from_json(_read_json("inequalities", name))


def load_inflation(original, inflated):
    from .inflation import verify_inflation

    return verify_inflation(load_graph(original), load_graph(inflated))


def scenarios():
    return manifest()["scenarios"]


def scenario(sid):
    try:
        return scenarios()[sid]
    except KeyError:
        raise ValidationError(f"unknown scenario {sid!r}; known: {', '.join(sorted(scenarios()))}") from None


def select_contexts(inf, selection="maximal-ai", extra=()):
    """Context list for the marginal problem.

    selection: "maximal-ai" (maximal ai-expressible sets), "all-ai" (every clique of the
    ai-expressibility graph), or "none"; `extra` lists further node sets that are added as
    expressible sets (their recipes are searched for, and a missing recipe is an error)."""
    from .graph import nodes
    from .inflation import ai_expressible_sets, expressible_closure

    if selection == "maximal-ai":
        out = list(ai_expressible_sets(inf))
    elif selection == "all-ai":
        out = list(ai_expressible_sets(inf, all_cliques=True))
    elif selection == "none":
        out = []
    else:
        raise ValidationError(f"unknown context selection {selection!r}")
    targets = [nodes(s) for s in extra]
    if targets:
        for ex in expressible_closure(inf, targets):
            if not ex.found:
                raise ValidationError(f"no recipe for {' '.join(map(str, ex.members))}: {ex.reason}")
            out.append(ex)
    return out


def parse_contexts(text):
    """"maximal-ai", "all-ai", or "<base>+A1 C2 Y1;B2 C1" -> (selection, extra sets)."""
    if text is None:
        return "maximal-ai", []
    base, _, rest = text.partition("+")
    base = base.strip() or "maximal-ai"
    extra = [s.strip() for s in rest.split(";") if s.strip()]
    return base, extra
