"""Command-line interface: ``dmgwalk <command> ...``.

Every command reads a JSON graph (or system) document and writes JSON to
stdout.  Exit status is 0 on success and 2 on any input error; ``separate``
returns 1 for a connected verdict and ``verify`` returns 1 when a property
fails.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings

import numpy as np

from . import linear, testbench
from .algebra import sorted_walks
from .documents import (
    DocumentError, GraphDocument, SystemDocument, load_document, to_dot, undirected_to_dot,
)
from .graph import GraphError, classify, trim
from .linear import LinearSystemError
from .marginal import marginalize, marginalize_admg
from .separation import CanonicalizationWarning, SeparationError, augment, separated
from .walks import WalkKind, default_budget, districts, paths_only, walk_matrix


class CLIError(Exception):
    pass


def _labels(arg):
    if not arg:
        return []
    return [x.strip() for x in arg.split(",") if x.strip()]


def _graph(path):
    doc = load_document(path)
    return doc.graph.to_graph() if isinstance(doc, SystemDocument) else doc.to_graph()


def _system(path):
    doc = load_document(path)
    if not isinstance(doc, SystemDocument):
        raise CLIError("this command needs a system document with beta/lambda weights")
    return doc.to_system()


def _emit(obj):
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _write_dot(text, dest):
    if dest == "-":
        sys.stdout.write(text)
    else:
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)


# -- commands ------------------------------------------------------------------

def cmd_info(args):
    g = _graph(args.graph)
    flags = classify(g)
    _emit({
        "vertices": g.d,
        "directed_edges": len(g.directed),
        "bidirected_edges": len([e for e in g.bidirected if e[0] != e[1]]),
        "bidirected_loops": len([e for e in g.bidirected if e[0] == e[1]]),
        "flags": {k: getattr(flags, k) for k in flags.__dataclass_fields__},
        "districts": [g.names(sorted(c)) for c in districts(g)],
    })
    return 0


def cmd_separate(args):
    g = _graph(args.graph)
    v = separated(g, args.kind, _labels(args.j), _labels(args.k), _labels(args.given))
    out = {"separated": v.separated, "witness": v.render_witness(g.labels)}
    if v.warnings:
        out["warnings"] = list(v.warnings)
    _emit(out)
    return 0 if v.separated else 1


def cmd_marginalize(args):
    g = _graph(args.graph)
    keep = _labels(args.keep)
    if args.admg:
        m = marginalize_admg(trim(g) if args.trim else g, keep)
    else:
        m = marginalize(g, keep)
        if args.trim:
            m = trim(m)
    _emit(GraphDocument.from_graph(m).to_dict())
    if args.dot:
        _write_dot(to_dot(m), args.dot)
    return 0


def cmd_walks(args):
    g = _graph(args.graph)
    budget = args.max_len if args.max_len is not None else default_budget(g)
    W = walk_matrix(g, args.kind, _labels(args.given), budget)
    if args.paths_only:
        W = paths_only(W)
    rows = [g.index(args.src)] if args.src else range(g.d)
    cols = [g.index(args.dst)] if args.dst else range(g.d)
    if args.src and args.dst:
        walks = [w.render(g.labels) for w in sorted_walks(W[rows[0], cols[0]])]
        out = {"kind": args.kind, "exact": W.exact, "budget": budget, "walks": walks}
    else:
        entries = {}
        for j in rows:
            for k in cols:
                if W[j, k]:
                    entries[f"{g.labels[j]},{g.labels[k]}"] = \
                        [w.render(g.labels) for w in sorted_walks(W[j, k])]
        out = {"kind": args.kind, "exact": W.exact, "budget": budget, "entries": entries}
    if not W.exact:
        print(f"warning: walks longer than {budget} steps were dropped; the list is incomplete",
              file=sys.stderr)
    _emit(out)
    return 0


def cmd_covariance(args):
    s = _system(args.system)
    lab = s.graph.labels
    out = {"method": args.method, "vertices": list(lab)}
    if args.method == "closed":
        S = linear.covariance_closed_form(s)
    elif args.method == "trek":
        cov = linear.trek_rule_covariance(s, args.budget)
        S = cov.values
        out["exact"] = cov.exact
        out["budget"] = args.budget if args.budget is not None else default_budget(s.graph)
        if args.symbolic:
            out["terms"] = {f"{lab[j]},{lab[k]}": cov.terms(j, k, lab)
                            for j in range(s.d) for k in range(j, s.d) if cov.treks[j, k]}
        if not cov.exact:
            print("warning: trek sum truncated; values are partial sums", file=sys.stderr)
    else:
        S = linear.path_analysis_matrix(s)
        if args.symbolic:
            terms = {}
            for j in range(s.d):
                for k in range(j + 1, s.d):
                    tp, roots = linear.path_analysis_terms(s.graph, j, k)
                    terms[f"{lab[j]},{lab[k]}"] = {
                        "trek_paths": [w.render(lab) for w in sorted_walks(tp)],
                        "by_root": {lab[r]: [w.render(lab) for w in sorted_walks(ws)]
                                    for r, ws in sorted(roots.items())},
                    }
            out["terms"] = terms
    out["matrix"] = np.asarray(S).tolist()
    _emit(out)
    return 0


def cmd_adjust(args):
    doc = load_document(args.graph)
    g = doc.graph.to_graph() if isinstance(doc, SystemDocument) else doc.to_graph()
    j, k, L = args.cause, args.effect, _labels(args.given)
    on_marginal = linear.adjustment_criterion_marginal(g, j, k, L)
    direct = linear.adjustment_criterion(g, j, k, L)
    sym = linear.symmetric_no_confounding(g, j, k, L)
    out = {"prop10": list(on_marginal), "thm5": list(direct), "symmetric": sym,
           "criteria_agree": all(on_marginal) == all(direct)}
    if isinstance(doc, SystemDocument):
        s = doc.to_system()
        gamma = linear.regression_coefficient(s, k, j, L)
        out["gamma"] = gamma
        out["total_effect"] = linear.total_causal_effect(s, j, k)
        out["unblocked_path_effect"] = linear.unblocked_path_effect(s, j, k, L)
        if all(direct):
            out["gamma_matches_paths"] = bool(abs(gamma - out["unblocked_path_effect"]) < 1e-8)
        if sym:
            out["gamma_matches_total"] = bool(abs(gamma - out["total_effect"]) < 1e-8)
    _emit(out)
    return 0


def cmd_augment(args):
    g = _graph(args.graph)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", CanonicalizationWarning)
        ug = augment(g)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    _emit(ug.to_dict())
    if args.dot:
        _write_dot(undirected_to_dot(ug), args.dot)
    return 0


def cmd_verify(args):
    cfg = testbench.VerifyConfig(d_max=args.d_max, trials=args.trials, seed=args.seed)
    props = _labels(args.only) or None
    if props:
        unknown = [p for p in props if p not in testbench.PROPERTIES]
        if unknown:
            raise CLIError(f"unknown properties: {', '.join(unknown)}")
    if args.inject_collider_bug:
        with testbench.collider_rule_dropped():
            report = testbench.verify_all(cfg, props, args.workers)
    else:
        report = testbench.verify_all(cfg, props, args.workers)
    if args.json:
        print(report.to_json(indent=2))
    else:
        print(report.summary())
        for r in report.results:
            for f in r.failures[:3]:
                print(f"  counterexample for {r.property}: {json.dumps(f.to_dict())}")
        print(f"seed {cfg.resolved_seed()}, {report.elapsed:.2f}s, "
              f"{'all passed' if report.passed else f'{report.n_failures} failures'}")
    return 0 if report.passed else 1


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dmgwalk", description="Walks, separation and linear "
                                "systems on directed mixed graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("info", help="counts, class flags and districts")
    s.add_argument("graph")
    s.set_defaults(func=cmd_info)

    s = sub.add_parser("separate", help="decide a separation query")
    s.add_argument("graph")
    s.add_argument("--kind", default="m", choices=["m", "t", "d", "am", "ad", "u", "aug"])
    s.add_argument("--j", required=True, help="comma-separated labels")
    s.add_argument("--k", required=True, help="comma-separated labels")
    s.add_argument("--given", default="", help="comma-separated labels")
    s.set_defaults(func=cmd_separate)

    s = sub.add_parser("marginalize", help="latent projection onto a vertex subset")
    s.add_argument("graph")
    s.add_argument("--keep", required=True)
    s.add_argument("--trim", action="store_true", help="drop bidirected loops")
    s.add_argument("--admg", action="store_true", help="use the path-based construction")
    s.add_argument("--dot", metavar="FILE", help="also write DOT ('-' for stdout)")
    s.set_defaults(func=cmd_marginalize)

    s = sub.add_parser("walks", help="enumerate a walk family")
    s.add_argument("graph")
    s.add_argument("--kind", required=True, choices=[k.value for k in WalkKind])
    s.add_argument("--from", dest="src")
    s.add_argument("--to", dest="dst")
    s.add_argument("--given", default="")
    s.add_argument("--max-len", type=int, default=None)
    s.add_argument("--paths-only", action="store_true")
    s.set_defaults(func=cmd_walks)

    s = sub.add_parser("covariance", help="covariance of a linear system")
    s.add_argument("system")
    s.add_argument("--method", default="closed", choices=["closed", "trek", "path"])
    s.add_argument("--budget", type=int, default=None)
    s.add_argument("--symbolic", action="store_true", help="list the walks behind each entry")
    s.set_defaults(func=cmd_covariance)

    s = sub.add_parser("adjust", help="adjustment criteria for a cause/effect pair")
    s.add_argument("graph", help="graph or system document")
    s.add_argument("--cause", required=True)
    s.add_argument("--effect", required=True)
    s.add_argument("--given", default="")
    s.set_defaults(func=cmd_adjust)

    s = sub.add_parser("augment", help="augmented (moral) undirected graph")
    s.add_argument("graph")
    s.add_argument("--dot", metavar="FILE")
    s.set_defaults(func=cmd_augment)

    s = sub.add_parser("verify", help="run the property suites")
    s.add_argument("--d-max", type=int, default=6)
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--seed", type=int, default=None, help="defaults to $DMG_SEED")
    s.add_argument("--json", action="store_true")
    s.add_argument("--only", default="", help="comma-separated property names")
    s.add_argument("--workers", type=int, default=None)
    s.add_argument("--inject-collider-bug", action="store_true",
                   help="debug: disable the collider rule to check that suites catch it")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CLIError, DocumentError, GraphError, SeparationError, LinearSystemError,
            OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
