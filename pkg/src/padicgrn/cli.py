"""Command-line front end: ``padicgrn <command> --network ... [options]``."""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import sys
from typing import Sequence

from . import __version__
from .affine import build_affine_model, verify_level
from .fixed_points import fixed_point_report, periodic_orbits
from .network import (DatasetMissingError, NetworkDefinition, NetworkFormatError, TransitionMap,
                      build_transition_map, builtin_dataset, load_network)
from .padic_core import PadicError, identity_ordering
from .search import (SearchError, SearchResult, format_partial_order, minimize, minimizer_symmetry,
                     partial_order_summary)
from .stability import BallClass, level_stats, stability_scores

EXIT_OK, EXIT_USAGE, EXIT_DATASET, EXIT_VERIFY, EXIT_BUDGET = 0, 1, 2, 3, 4

CLASS_COLOR = {BallClass.CONTRACTING: "lightblue", BallClass.EXPANDING: "salmon",
               BallClass.ISOMETRIC: "lightgray"}
CLASS_NAME = {BallClass.CONTRACTING: "contracting", BallClass.EXPANDING: "expanding",
              BallClass.ISOMETRIC: "isometric"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_spec(spec: str) -> NetworkDefinition:
    if spec.startswith("builtin:"):
        return builtin_dataset(spec[len("builtin:"):])
    return load_network(spec)


def resolve_ordering(spec: str | None, net: NetworkDefinition, f: TransitionMap,
                     args) -> tuple[tuple[int, ...], SearchResult | None]:
    """Gene order from ``--ordering``: names, ``preset:<label>`` or ``optimal:<method>``."""
    if spec is None or spec == "identity":
        return identity_ordering(net.N), None
    if spec.startswith("optimal:"):
        res = minimize(f, spec[len("optimal:"):], seed=args.seed, threads=args.threads)
        return res.representative, res
    if spec.startswith("preset:"):
        label = spec[len("preset:"):]
        if label not in net.orderings:
            known = ", ".join(net.orderings) or "none"
            raise UsageError(f"network has no ordering {label!r} (available: {known})")
        return net.ordering_indices(net.orderings[label]), None
    names = [s.strip() for s in spec.replace(" ", ",").split(",") if s.strip()]
    return net.ordering_indices(names), None


def _timestamp(args, out: list[str]) -> None:
    if args.format == "text" and not args.no_timestamp:
        out.append(f"# generated {_dt.datetime.now(_dt.timezone.utc).isoformat(timespec='seconds')}")


def _names(net, perm) -> list[str]:
    return [net.gene_names[i] for i in perm]


def _pct(part: int, whole: int) -> str:
    return f"{100 * part / whole:.1f}" if whole else "0.0"


# --- commands -----------------------------------------------------------------

def cmd_analyze(args, net, f, perm) -> tuple[str, int]:
    s = stability_scores(f, perm)
    N, p = f.N, f.p
    rows = []
    for n, (E, I, A) in enumerate(s.per_level, start=1):
        contrib = E * p ** (N - n)
        rows.append({"n": n, "E": E, "I": I, "A": A, "muE_contrib": contrib,
                     "pct": _pct(contrib, s.mu_E)})
    total = (N - 1) * p ** N
    identity_ok = s.mu_E + s.mu_A + s.mu_I == total
    if args.format == "json":
        doc = {"network": net.name, "N": N, "p": p, "ordering": _names(net, perm),
               "mu_E": s.mu_E, "mu_A": s.mu_A, "mu_I": s.mu_I, "levels": rows,
               "control_identity": {"sum": s.mu_E + s.mu_A + s.mu_I, "expected": total,
                                    "ok": identity_ok}}
        return json.dumps(doc, indent=2), EXIT_OK
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["n", "E", "I", "A", "muE_contrib", "pct"],
                           lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return buf.getvalue().rstrip("\n"), EXIT_OK
    if args.format != "text":
        raise UsageError(f"analyze does not support --format {args.format}")
    out = []
    _timestamp(args, out)
    out.append(f"network {net.name}: N={N}, p={p}")
    out.append("ordering " + " ".join(_names(net, perm)))
    out.append(f"mu_E = {s.mu_E}  mu_A = {s.mu_A}  mu_I = {s.mu_I}")
    out.append(f"{'n':>3} {'E':>6} {'I':>6} {'A':>6} {'muE_contrib':>12} {'pct':>6}")
    for r in rows:
        out.append(f"{r['n']:>3} {r['E']:>6} {r['I']:>6} {r['A']:>6} {r['muE_contrib']:>12} {r['pct']:>6}")
    out.append(f"control identity: {s.mu_E}+{s.mu_A}+{s.mu_I} = {s.mu_E + s.mu_A + s.mu_I}"
               f"  [(N-1)p^N = {total}: {'ok' if identity_ok else 'FAILED'}]")
    return "\n".join(out), EXIT_OK


def cmd_optimize(args, net, f, perm) -> tuple[str, int]:
    hook = None
    if args.progress:
        def hook(info):
            print(f"[{info['elapsed']:.1f}s] {info['evaluations']} evaluations "
                  f"({info['rate']:.0f}/s), incumbent {info['incumbent']}", file=sys.stderr)
    res = minimize(f, args.method, seed=args.seed, threads=args.threads,
                   node_budget=args.node_budget, time_budget=args.time_budget, progress=hook)
    gens = minimizer_symmetry(res.minimizers, f)
    levels = partial_order_summary(res.minimizers, net.gene_names)
    code = EXIT_BUDGET if res.method == "bnb" and not res.certified else EXIT_OK
    if args.format == "json":
        doc = res.to_dict()
        if args.no_timestamp:
            doc["wall_time"] = 0.0
        doc.update(gene_names=list(net.gene_names),
                   representative=_names(net, res.representative),
                   symmetry=[list(g) for g in gens], partial_order=levels)
        return json.dumps(doc, indent=2, sort_keys=True), code
    if args.format != "text":
        raise UsageError(f"optimize does not support --format {args.format}")
    out = []
    _timestamp(args, out)
    out.append(f"method {res.method}: best mu_E = {res.best_score}")
    out.append("representative " + " ".join(_names(net, res.representative)))
    out.append(f"minimizers {len(res.minimizers)}  certified {'yes' if res.certified else 'no'}"
               f"  evaluations {res.evaluations}")
    out.append("symmetry " + (" ".join(f"({i},{j})" for i, j in gens) if gens else "none"))
    out.append("partial order " + format_partial_order(levels))
    if args.list:
        for m in res.minimizers:
            out.append("  " + " ".join(_names(net, m)))
    if not args.no_timestamp:
        out.append(f"wall time {res.wall_time:.2f}s")
    return "\n".join(out), code


def cmd_fixed_points(args, net, f, perm) -> tuple[str, int]:
    reports = fixed_point_report(f, perm, net.labels)
    k = min(args.prefix, max(f.N - 1, 0))
    orbits = periodic_orbits(f)
    if args.format == "json":
        doc = {"ordering": _names(net, perm),
               "fixed_points": [{"encoded": r.encoded, "config": list(r.config),
                                 "ball_chain": list(r.ball_chain), "sequence": r.sequence,
                                 "label": r.label} for r in reports],
               "periodic_orbits": [list(c) for c in orbits]}
        return json.dumps(doc, indent=2), EXIT_OK
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["encoded", "ball", "sequence", "label"])
        for r in reports:
            w.writerow([r.encoded, r.ball_chain[k - 1] if k else 0, r.prefix(k), r.label or ""])
        return buf.getvalue().rstrip("\n"), EXIT_OK
    if args.format != "text":
        raise UsageError(f"fixed-points does not support --format {args.format}")
    out = []
    _timestamp(args, out)
    out.append("ordering " + " ".join(_names(net, perm)))
    out.append(f"{len(reports)} fixed points")
    radius = f"1/{f.p ** k}"
    out.append(f"{'config':>10}  {'ball':<14} {'seq':<{max(k, 3)}}  label")
    for r in reports:
        ball = f"B_{radius}({r.ball_chain[k - 1] if k else 0})"
        out.append(f"{r.encoded:>10}  {ball:<14} {r.prefix(k):<{max(k, 3)}}  {r.label or ''}")
    if orbits:
        out.append(f"{len(orbits)} periodic orbits of length > 1 (not classified)")
        for c in orbits:
            out.append("  " + " -> ".join(map(str, c)))
    return "\n".join(out), EXIT_OK


def tree_data(f: TransitionMap, perm, depth: int, arrows: bool) -> dict:
    p = f.p
    depth = min(depth, f.N)
    nodes, edges, image_edges = [], [], []
    for n in range(depth + 1):
        for b in level_stats(f, perm, n):
            nodes.append({"id": f"B_{n}_{b.m}", "level": n, "index": b.m, "M": b.M,
                          "t": str(b.t), "class": CLASS_NAME[b.cls]})
            if n < depth:
                for j in range(p):
                    edges.append([f"B_{n}_{b.m}", f"B_{n + 1}_{b.m + j * p ** n}"])
        if arrows and n >= 1:
            for mod in build_affine_model(f, perm, n):
                image_edges.append([f"B_{n}_{mod.m}", f"B_{n}_{mod.beta % p ** n}"])
    return {"depth": depth, "p": p, "N": f.N, "nodes": nodes, "edges": edges,
            "image_edges": image_edges}


def cmd_export_tree(args, net, f, perm) -> tuple[str, int]:
    data = tree_data(f, perm, args.depth, args.image_arrows)
    data["ordering"] = _names(net, perm)
    if args.format == "json":
        text = json.dumps(data, indent=2)
    elif args.format == "dot":
        cls = {v: k for k, v in CLASS_NAME.items()}
        lines = [f'digraph "{net.name}" {{', "  rankdir=TB;",
                 "  node [shape=circle, style=filled, fontsize=10];"]
        for nd in data["nodes"]:
            c = cls[nd["class"]]
            lines.append(f'  {nd["id"]} [label="{nd["index"]}", class="{nd["class"]}", '
                         f'fillcolor="{CLASS_COLOR[c]}", tooltip="n={nd["level"]} t={nd["t"]}"];')
        for a, b in data["edges"]:
            lines.append(f"  {a} -> {b};")
        for a, b in data["image_edges"]:
            lines.append(f"  {a} -> {b} [style=dashed, color=gray40, constraint=false];")
        lines.append("}")
        text = "\n".join(lines)
    else:
        raise UsageError(f"export-tree supports --format dot or json, not {args.format}")
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        return f"wrote {args.output}", EXIT_OK
    return text, EXIT_OK


def cmd_verify(args, net, f, perm) -> tuple[str, int]:
    results = []
    for n in range(1, f.N):
        k = args.samples if n <= args.depth else args.deep_samples
        reps = verify_level(f, perm, n, k, args.seed)
        bad = [r for r in reps if not r.ok]
        results.append({"level": n, "balls": len(reps), "samples_per_ball": k,
                        "violations": sum(len(r.violations) for r in bad),
                        "ok": not bad,
                        "examples": [f"ball {r.ball}: {r.violations[0]}" for r in bad[:3]]})
    ok = all(r["ok"] for r in results)
    code = EXIT_OK if ok else EXIT_VERIFY
    if args.format == "json":
        return json.dumps({"ok": ok, "levels": results}, indent=2), code
    if args.format != "text":
        raise UsageError(f"verify does not support --format {args.format}")
    out = []
    _timestamp(args, out)
    for r in results:
        status = "pass" if r["ok"] else "FAIL"
        out.append(f"level {r['level']:>2}: {status}  ({r['balls']} balls x {r['samples_per_ball']} samples,"
                   f" {r['violations']} violations)")
        out.extend("    " + e for e in r["examples"])
    out.append("all levels pass" if ok else "verification FAILED")
    return "\n".join(out), code


COMMANDS = {"analyze": cmd_analyze, "optimize": cmd_optimize, "fixed-points": cmd_fixed_points,
            "export-tree": cmd_export_tree, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--network", required=True,
                        help="path to a .grn file, or builtin:toy4 / builtin:athaliana13")
    common.add_argument("--ordering", default=None,
                        help="comma-separated gene names, preset:<label>, or optimal:bnb|ga|exhaustive "
                             "(default: declaration order)")
    common.add_argument("--format", default="text", choices=["text", "json", "csv", "dot"])
    common.add_argument("--seed", type=int, default=1)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--no-timestamp", action="store_true")

    ap = _Parser(prog="padicgrn", description="Hierarchical stability analysis of gene regulatory networks.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("analyze", parents=[common], help="stability scores and per-level counts")

    o = sub.add_parser("optimize", parents=[common], help="minimise mu_E over orderings")
    o.add_argument("--method", default="bnb", choices=["exhaustive", "bnb", "ga"])
    o.add_argument("--node-budget", type=int, default=None)
    o.add_argument("--time-budget", type=float, default=None, help="seconds")
    o.add_argument("--progress", action="store_true", help="report progress on stderr")
    o.add_argument("--list", action="store_true", help="print every minimiser")

    fp = sub.add_parser("fixed-points", parents=[common], help="fixed points and classification words")
    fp.add_argument("--prefix", type=int, default=4, help="levels shown in the sequence column")

    t = sub.add_parser("export-tree", parents=[common], help="ball tree as DOT or JSON")
    t.add_argument("--depth", type=int, default=4)
    t.add_argument("--image-arrows", action="store_true")
    t.add_argument("--output", "-o", default=None)

    v = sub.add_parser("verify", parents=[common], help="check the affine ball-mapping property")
    v.add_argument("--samples", type=int, default=1000, help="samples per ball up to --depth")
    v.add_argument("--deep-samples", type=int, default=10, help="samples per ball below --depth")
    v.add_argument("--depth", type=int, default=4)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "export-tree" and args.format == "text":
        args.format = "dot"
    try:
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        net = load_spec(args.network)
        f = build_transition_map(net)
        perm, _ = resolve_ordering(args.ordering, net, f, args)
        text, code = COMMANDS[args.command](args, net, f, perm)
    except DatasetMissingError as e:
        print(f"padicgrn: {e}", file=sys.stderr)
        return EXIT_DATASET
    except (UsageError, NetworkFormatError, PadicError, SearchError, ValueError, OSError) as e:
        print(f"padicgrn: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
