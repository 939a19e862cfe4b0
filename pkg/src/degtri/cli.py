"""Command line entry point: analyze | fit | generate | compare.

Exit codes: 0 success, 1 usage error, 2 input error, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

from . import fitting
from .generators import EdgeBudgetExceeded, SpecError, generate, load_spec, save_spec
from .graph import EdgeListError, GraphInvariantError, load_edge_list, validate, write_edge_list
from .metrics import summarize
from .report import analyze, atomic_write, compare, write_analysis, write_comparison
from .triangles import TriangleLimitExceeded, count_triangles

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger("degtri")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    p.add_argument("--homog-threshold", type=float, default=10.0,
                   help="d_max/d_min bound for a homogeneous triangle (default 10)")
    p.add_argument("--bin-base", type=float, default=2.0, help="exponential bin base (default 2)")
    p.add_argument("--max-triangles", type=int, default=None,
                   help="abort enumeration past this many triangles")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="degtri", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="triangle statistics of one graph")
    p.add_argument("graph", help="SNAP edge list (optionally .gz)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--name", default=None)
    p.add_argument("--dump-triangles", metavar="CSV", default=None,
                   help="write every triangle as u,v,w,d_min,d_mid,d_max (debugging)")
    _common(p)

    p = sub.add_parser("fit", help="fit a model to a graph and write its spec")
    p.add_argument("graph")
    p.add_argument("--model", required=True, choices=sorted(["pa", "cl", "skg", "bter", "ec", "ff"]))
    p.add_argument("--out", required=True, help="spec JSON path")
    p.add_argument("--seed", type=_u64, default=None, help="required for --model ff")
    p.add_argument("--ff-step", type=float, default=0.001)
    p.add_argument("--seeds-per-probe", type=int, default=1)
    p.add_argument("--edge-tolerance", type=float, default=0.05)
    p.add_argument("--initiator", default=None, help="JSON file with a 2x2 SKG initiator")
    p.add_argument("--skg-skew", type=float, default=fitting.DEFAULT_SKG_SKEW)
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("generate", help="sample a graph from a spec")
    p.add_argument("spec")
    p.add_argument("--seed", type=_u64, required=True)
    p.add_argument("--out", required=True, help="edge list path")
    p.add_argument("--max-edges", type=int, default=None,
                   help="abort an FF sample that grows past this many edges")

    p = sub.add_parser("compare", help="original vs. generated graphs")
    p.add_argument("original")
    p.add_argument("specs", nargs="+")
    p.add_argument("--seed", type=_u64, nargs="+", required=True,
                   help="one sample per model per seed")
    p.add_argument("--out", required=True)
    p.add_argument("--max-edges", type=int, default=None,
                   help="fail an FF sample that grows past this many edges")
    _common(p)
    return parser


def _cmd_analyze(args) -> int:
    g = load_edge_list(args.graph)
    name = args.name or Path(args.graph).name.split(".")[0]
    dump_rows = None
    sink = None
    if args.dump_triangles:
        dump_rows = io.StringIO()
        writer = csv.writer(dump_rows, lineterminator="\n")
        writer.writerow(["u", "v", "w", "d_min", "d_mid", "d_max"])
        labels = g.labels

        def sink(nodes, degrees):
            lab = labels[nodes]
            writer.writerows([*a, *b] for a, b in zip(lab.tolist(), degrees.tolist()))

    a = analyze(g, name, workers=args.threads, homog_threshold=args.homog_threshold,
                bin_base=args.bin_base, max_triangles=args.max_triangles, extra_sink=sink)
    write_analysis(a, args.out)
    if dump_rows is not None:
        atomic_write(args.dump_triangles, dump_rows.getvalue())
    for note in a.info.get("notes", []):
        print(f"note: {note}", file=sys.stderr)
    s = a.summary
    print(f"{name}: N={s.N} E={s.E} T={s.T} C={s.C:.4f} Cbar={s.Cbar:.4f}")
    return EXIT_OK


def _read_initiator(path: str):
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(doc, dict):
        doc = doc.get("initiator")
    if (not isinstance(doc, list) or len(doc) != 2
            or any(not isinstance(r, list) or len(r) != 2 for r in doc)):
        raise SpecError(f"{path}: expected a 2x2 list")
    return tuple(tuple(float(x) for x in r) for r in doc)


def _cmd_fit(args) -> int:
    if args.model == "ff" and args.seed is None:
        raise UsageError("--seed is required for --model ff")
    g = load_edge_list(args.graph)
    extra = None
    if args.model == "pa":
        spec = fitting.fit_pa(g)
    elif args.model == "cl":
        spec = fitting.fit_cl(g)
    elif args.model == "bter":
        spec = fitting.fit_bter(g, count_triangles(g, workers=args.threads))
    elif args.model == "ec":
        summary, info = summarize(g, count_triangles(g, workers=args.threads))
        if summary.alpha is None:
            raise SpecError(f"cannot fit EC: {info.get('alpha_error')}")
        spec = fitting.fit_ec(g, summary.alpha)
        extra = {"alpha": summary.alpha, "alpha_xmin": info.get("alpha_xmin")}
    elif args.model == "skg":
        init = _read_initiator(args.initiator) if args.initiator else None
        spec = fitting.fit_skg(g, init, skew=args.skg_skew)
    else:
        config = fitting.FitConfig(ff_p_step=args.ff_step, seeds_per_probe=args.seeds_per_probe,
                                   edge_tolerance=args.edge_tolerance)
        fit = fitting.fit_ff(g, config, args.seed)
        spec = fit.spec
        extra = {"target_edges": fit.target_edges, "achieved_edges": fit.achieved_edges,
                 "edge_error": fit.edge_error, "seed": args.seed,
                 "probes": [[p, e] for p, e in fit.probes.items()],
                 "warning": fit.warning}
        if fit.warning:
            print(f"warning: {fit.warning}", file=sys.stderr)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_spec(spec, args.out, extra)
    return EXIT_OK


def _cmd_generate(args) -> int:
    spec = load_spec(args.spec)
    g = generate(spec, args.seed, args.max_edges)
    validate(g)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    write_edge_list(g, buf)
    atomic_write(args.out, buf.getvalue())
    return EXIT_OK


def _cmd_compare(args) -> int:
    original = load_edge_list(args.original)
    models = []
    labels = set()
    for path in args.specs:
        spec = load_spec(path)
        label = spec.model
        if label in labels:
            label = f"{spec.model}:{Path(path).stem}"
        labels.add(label)
        models.append((label, spec))
    rep = compare(original, models, args.seed, name=Path(args.original).name.split(".")[0],
                  workers=1, threads=args.threads, homog_threshold=args.homog_threshold,
                  bin_base=args.bin_base, max_triangles=args.max_triangles,
                  max_edges=args.max_edges)
    write_comparison(rep, args.out)
    for r in rep.runs:
        if r.error:
            print(f"error: {r.label} seed {r.seed}: {r.error}", file=sys.stderr)
    return EXIT_OK


COMMANDS = {"analyze": _cmd_analyze, "fit": _cmd_fit, "generate": _cmd_generate,
            "compare": _cmd_compare}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"degtri: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (EdgeListError, SpecError, TriangleLimitExceeded, EdgeBudgetExceeded, OSError,
            json.JSONDecodeError) as exc:
        print(f"degtri: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (GraphInvariantError, AssertionError) as exc:
        print(f"degtri: internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
