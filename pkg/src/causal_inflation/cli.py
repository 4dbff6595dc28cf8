"""Command-line entry point.

Exit codes: 0 success (or feasible), 1 internal error, 2 validation failure, 3 incompatibility
witnessed. JSON output uses sorted keys so identical inputs give byte-identical files."""
import argparse
import json
import os
import sys
import time

import numpy as np

from .errors import CapacityError, ValidationError

EXIT_OK, EXIT_INTERNAL, EXIT_INVALID, EXIT_INFEASIBLE = 0, 1, 2, 3
THREADS_ENV = "CAUSAL_INFLATION_THREADS"


def _threads():
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValidationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def _emit(payload, out):
    text = json.dumps(payload, indent=1, sort_keys=True, ensure_ascii=False) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _log(msg):
    print(msg, file=sys.stderr)


def _exact(cfg):
    return cfg.mode == "rational"


def _inflation(cfg):
    from .fixtures import load_graph
    from .inflation import verify_inflation

    if not cfg.graph or not cfg.inflation:
        raise ValidationError("--graph and --inflation are both required")
    return verify_inflation(load_graph(cfg.graph), load_graph(cfg.inflation))


def _distribution(cfg, inf):
    """The original-structure distribution: a file/fixture, a noisy GHZ at --alpha, or uniform."""
    from .distributions import JointTable
    from .exact import to_fraction
    from .fixtures import load_distribution
    from .graph import sorted_nodes
    from .marginal_lp import noisy_ghz

    if cfg.alpha is not None:
        obs = [str(v) for v in sorted_nodes(inf.original.observed)]
        if len(obs) != 3:
            raise ValidationError("--alpha builds a noisy GHZ distribution and needs three observed variables")
        try:
            alpha = to_fraction(cfg.alpha)
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"--alpha must be a number, got {cfg.alpha!r}") from None
        if not 0 <= alpha <= 1:
            raise ValidationError("--alpha must lie in [0, 1]")
        return noisy_ghz(alpha, obs, exact=_exact(cfg))
    if cfg.distribution:
        return load_distribution(cfg.distribution, exact=_exact(cfg))
    obs = sorted_nodes(inf.original.observed)
    return JointTable.uniform(obs, [inf.original.cardinality[v] for v in obs], exact=_exact(cfg))


def _problem(cfg, inf, dist):
    from .distributions import inflation_family
    from .fixtures import parse_contexts, select_contexts
    from .marginal_lp import build_problem

    base, extra = parse_contexts(cfg.contexts)
    contexts = select_contexts(inf, base, extra)
    if not contexts:
        raise ValidationError("no contexts selected")
    return build_problem(inf, inflation_family(inf, dist, contexts),
                         use_copy_isomorphism_equalities=getattr(cfg, "isomorphisms", False))


def _set_json(s):
    return [str(v) for v in s]


# subcommands

def cmd_verify_inflation(cfg):
    from .inflation import ai_expressible_sets, has_inflationary_fanout, injectable_sets

    try:
        inf = _inflation(cfg)
    except ValidationError as exc:
        _emit({"valid": False, "error": str(exc)}, cfg.out)
        return EXIT_INVALID
    fan, witness = has_inflationary_fanout(inf)
    report = {
        "valid": True,
        "injectable_sets": [{"set": _set_json(s.members), "image": _set_json(s.image)} for s in injectable_sets(inf)],
        "ai_expressible_sets": [{"set": _set_json(a.members), "blocks": [_set_json(b.members) for b in a.blocks]}
                                for a in ai_expressible_sets(inf)],
        "inflationary_fanout": {"present": fan,
                                "latent": str(witness[0]) if fan else None,
                                "children": _set_json(witness[1]) if fan else []},
    }
    _emit(report, cfg.out)
    return EXIT_OK


def cmd_witness(cfg):
    from .marginal_lp import certificate_to_inequality, describe, solve

    inf = _inflation(cfg)
    p = _problem(cfg, inf, _distribution(cfg, inf))
    t0 = time.perf_counter()
    verdict = solve(p, mode="exact" if _exact(cfg) else "float")
    _log(f"LP {describe(p)}: {verdict.status} via {verdict.engine} in {time.perf_counter() - t0:.2f}s")
    report = {"problem": {"rows": int(p.M.shape[0]), "columns": int(p.M.shape[1]),
                          "contexts": [_set_json(c) for c in p.contexts]},
              "status": verdict.status, "mode": cfg.mode}
    if verdict.feasible:
        report["support"] = sum(1 for x in verdict.witness if x != 0) if verdict.witness is not None else None
        _emit(report, cfg.out)
        return EXIT_OK
    report["certificate"] = verdict.to_json()["certificate"]
    y = verdict.certificate
    if y is not None and not _exact(cfg):
        y = _rationalize(p, y)
        if y is None:
            _log("float certificate has no small rational form that verifies exactly; no inequality emitted")
    if y is not None:
        q = certificate_to_inequality(p, y)
        if all(c == 2 for c in p.cards):
            q = q.preferred_form()
        report["inequality"] = q.to_json()
    _emit(report, cfg.out)
    return EXIT_INFEASIBLE


def _rationalize(p, y):
    """Exact certificate close to a float one, or None."""
    from fractions import Fraction

    from .marginal_lp import normalize_certificate, verify_certificate

    for bound in (10 ** 3, 10 ** 6):
        cand = normalize_certificate([Fraction(float(v)).limit_denominator(bound) for v in y])
        if any(cand) and verify_certificate(p, cand):
            return cand
    return None


def _maybe_group(inf, enabled):
    from .inequalities import symmetry_group

    return symmetry_group(inf.original) if enabled else None


def cmd_derive_facets(cfg):
    from .facets import enumerate_facets, facets_to_causal_inequalities
    from .inequalities import symmetry_classes

    inf = _inflation(cfg)
    p = _problem(cfg, inf, _distribution(cfg, inf))
    t0 = time.perf_counter()
    poly = enumerate_facets(p, cap=cfg.cap, log=_log if cfg.verbose else None)
    _log(f"{len(poly.facets)} facets (dimension {poly.dimension}) in {time.perf_counter() - t0:.1f}s")
    report = {"facet_count": len(poly.facets), "dimension": poly.dimension,
              "rows": [{"context": _set_json(c), "valuation": list(o)} for c, o in p.row_labels],
              "facets": [list(map(int, f)) for f, _ in poly.facets]}
    if cfg.translate:
        grp = _maybe_group(inf, cfg.symmetry)
        translated = facets_to_causal_inequalities(inf, p, poly)
        if grp is not None:
            out = symmetry_classes(translated, grp)
        else:
            seen, out = set(), []
            for q in translated:
                if q.key() not in seen:
                    seen.add(q.key())
                    out.append(q)
        report["inequalities"] = [q.to_json() for q in out]
        report["inequality_classes" if grp is not None else "distinct_inequalities"] = len(out)
    _emit(report, cfg.out)
    return EXIT_OK


def _parse_antecedent(text):
    from .hardy import vertex

    ctx, sep, vals = text.partition("=")
    if not sep:
        raise ValidationError(f"antecedent must look like 'A2 B2 C2=111', got {text!r}")
    return vertex(ctx, vals.strip())


def cmd_derive_hardy(cfg):
    from .hardy import antecedent_sweep, build_hypergraph, restrict

    inf = _inflation(cfg)
    p = _problem(cfg, inf, _distribution(cfg, inf))
    h = build_hypergraph(p)
    ants = [_parse_antecedent(a) for a in cfg.antecedent] if cfg.antecedent else None
    for a in ants or []:
        if a not in h.vertices:
            raise ValidationError(f"antecedent {a} is not a context valuation of this problem")
    grp = _maybe_group(inf, cfg.symmetry)
    t0 = time.perf_counter()
    imps, ineqs = antecedent_sweep(inf, p, grp, ants, workers=_threads())
    _log(f"{len(imps)} implications, {len(ineqs)} inequalities in {time.perf_counter() - t0:.1f}s")
    report = {"hypergraph": {"vertices": h.n_vertices, "edges": h.n_edges},
              "implications": [i.to_json() for i in imps],
              "inequalities": [q.to_json() for q in ineqs]}
    if ants:
        report["restricted"] = [{"antecedent": f"{' '.join(map(str, a[0]))}={''.join(map(str, a[1]))}",
                                 "vertices": restrict(h, a).n_vertices, "edges": restrict(h, a).n_edges}
                                for a in ants]
    _emit(report, cfg.out)
    return EXIT_OK


def load_inequality_file(name):
    """Coefficient table ({"columns", "rows"}) or derive-* output ({"inequalities"})."""
    from .fixtures import _read_json
    from .inequalities import PolynomialInequality, table_from_json

    data = _read_json("inequalities", name)
    if "columns" in data:
        return table_from_json(data)
    if "inequalities" in data:
        return [PolynomialInequality.from_json(d) for d in data["inequalities"]]
    raise ValidationError(f"{name}: expected 'columns'/'rows' or 'inequalities'")


def cmd_derive(cfg, mode):
    if mode not in ("facets", "hardy"):
        raise ValidationError(f"derive mode must be facets or hardy, got {mode!r}")
    return cmd_derive_facets(cfg) if mode == "facets" else cmd_derive_hardy(cfg)


def cmd_evaluate(cfg):
    from .distributions import random_model, simulate
    from .exact import format_rational
    from .fixtures import load_distribution, load_graph

    ineqs = load_inequality_file(cfg.inequalities)
    if cfg.distribution:
        dists = [load_distribution(cfg.distribution, exact=_exact(cfg))]
    elif cfg.graph:
        g = load_graph(cfg.graph)
        rng = np.random.default_rng(cfg.seed)
        dists = [simulate(random_model(g, rng, exact=_exact(cfg))) for _ in range(cfg.samples)]
    else:
        raise ValidationError("give --distribution, or --graph to sample compatible distributions")
    rows = []
    for i, q in enumerate(ineqs):
        vals = [q.evaluate(d)[0] for d in dists]
        worst = min(vals)
        ok = all(q.evaluate(d)[1] for d in dists)
        rows.append({"index": i + 1, "name": q.name, "min_value": format_rational(worst) if _exact(cfg) else float(worst),
                     "satisfied": ok})
    _emit({"samples": len(dists), "results": rows,
           "violated": [r["index"] for r in rows if not r["satisfied"]]}, cfg.out)
    return EXIT_OK


def cmd_scenario(cfg):
    from .fixtures import scenario

    sc = scenario(cfg.id)
    argv = [sc["command"]] + list(sc.get("args", []))
    if cfg.out:
        argv += ["--out", cfg.out]
    _log(f"scenario {cfg.id}: {sc.get('description', '')}")
    return main(argv)


def cmd_list(cfg):
    from .fixtures import manifest

    m = manifest()
    _emit({k: sorted(m[k]) for k in ("graphs", "distributions", "inequalities", "scenarios")}, cfg.out)
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="causal-inflation",
                                 description="Inflation-based causal compatibility tests and inequality derivation.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, dist=True):
        p.add_argument("--graph", help="original causal structure (bundled name or JSON path)")
        p.add_argument("--inflation", help="inflated structure (bundled name or JSON path)")
        if dist:
            p.add_argument("--distribution", help="observed distribution (bundled name or JSON path)")
            p.add_argument("--alpha", help="use a noisy GHZ distribution with this weight (e.g. 5/8 or 0.635)")
            p.add_argument("--contexts", default="maximal-ai",
                           help="maximal-ai | all-ai, optionally followed by '+SET;SET' expressible sets")
            p.add_argument("--mode", choices=["rational", "float"], default="rational")
        p.add_argument("--out", help="write JSON here instead of stdout")

    p = sub.add_parser("verify-inflation", help="check the inflation and list its injectable/ai-expressible sets")
    common(p, dist=False)
    p.set_defaults(func=cmd_verify_inflation)

    p = sub.add_parser("witness", help="solve the marginal LP; exit 3 with a certificate when infeasible")
    common(p)
    p.add_argument("--isomorphisms", action="store_true", help="add copy-isomorphism equality rows")
    p.set_defaults(func=cmd_witness)

    for name, func in (("derive-facets", cmd_derive_facets), ("derive-hardy", cmd_derive_hardy)):
        p = sub.add_parser(name, help=f"derive inequalities ({name.split('-')[1]})")
        common(p)
        p.add_argument("--no-symmetry", dest="symmetry", action="store_false",
                       help="do not merge inequalities related by symmetries of the original structure")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "derive-facets":
            p.add_argument("--cap", type=int, default=500_000, help="row cap for elimination")
            p.add_argument("--no-translate", dest="translate", action="store_false")
        else:
            p.add_argument("--antecedent", action="append", help="e.g. 'A2 B2 C2=111' (repeatable)")
        p.set_defaults(func=func)

    p = sub.add_parser("evaluate", help="evaluate inequalities on a distribution or on sampled models")
    p.add_argument("--inequalities", required=True, help="inequality table (bundled name or JSON path)")
    p.add_argument("--distribution")
    p.add_argument("--graph", help="sample compatible distributions of this structure")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["rational", "float"], default="float")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("scenario", help="run a named scenario from the data manifest")
    p.add_argument("id")
    p.add_argument("--out")
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("list", help="list bundled fixtures and scenarios")
    p.add_argument("--out")
    p.set_defaults(func=cmd_list)
    return ap


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    # "derive facets ..." is accepted as a spelling of "derive-facets ..."
    if len(argv) >= 2 and argv[0] == "derive" and argv[1] in ("facets", "hardy"):
        argv = [f"derive-{argv[1]}"] + argv[2:]
    cfg = build_parser().parse_args(argv)
    try:
        return cfg.func(cfg)
    except ValidationError as exc:
        _log(f"error: {exc}")
        return EXIT_INVALID
    except CapacityError as exc:
        _log(f"capacity exceeded: {exc}")
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - report, do not dump a traceback on users
        _log(f"internal error: {type(exc).__name__}: {exc}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
