"""Command-line entry point: ``bnbmis <subcommand> ...``.

Exit status: 0 on success, 1 on usage/domain/parse errors, 2 when a search
hits its resource cap.
"""
import argparse
import math
import sys
from pathlib import Path

from . import bounds
from .errors import DomainError, InsufficientDataError, ParseError, ResourceCapError
from .graph import gen_gnm, gen_gnp, read_dimacs, write_dimacs
from .harness import (
    SOLVERS,
    compare_measured_vs_bounds,
    emit_curve,
    emit_curve_data,
    fit_groups,
    fits_to_text,
    read_records_csv,
    records_to_csv,
    run_grid,
)
from .solvers import (
    DEFAULT_FRONTIER_CAP,
    DEFAULT_NODE_CAP,
    bnb_best_first,
    bnb_census,
    brute_force_alpha,
    count_independent_sets,
    exhaustive_search,
)

MAX_SEED = (1 << 64) - 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _seed(text):
    v = _nonneg_int(text)
    if v > MAX_SEED:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def _real(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
    return v


def _positive_real(text):
    v = _real(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {v}")
    return v


def _probability(text):
    v = _real(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1], got {v}")
    return v


def _list_of(conv):
    def parse(text):
        items = [t for t in text.split(",") if t.strip()]
        if not items:
            raise argparse.ArgumentTypeError("empty list")
        return [conv(t.strip()) for t in items]
    return parse


def _solver_list(text):
    names = [t.strip() for t in text.split(",") if t.strip()]
    for name in names:
        if name not in SOLVERS:
            raise argparse.ArgumentTypeError(f"unknown solver {name!r}; choose from {', '.join(SOLVERS)}")
    if not names:
        raise argparse.ArgumentTypeError("empty solver list")
    return names


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _read_graph(path):
    return read_dimacs(Path(path).read_text())


def build_parser():
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="bnbmis", description="Branch-and-bound for max independent set on random graphs.",
                     formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a seeded G(n,p) or G(n,m) graph", formatter_class=fmt)
    p.add_argument("--n", type=_nonneg_int, required=True, help="vertex count")
    model = p.add_mutually_exclusive_group(required=True)
    model.add_argument("--p", type=_probability, help="edge probability (G(n,p))")
    model.add_argument("--m", type=_nonneg_int, help="edge count (G(n,m))")
    p.add_argument("--seed", type=_seed, default=0, help="64-bit seed")
    p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("solve", help="solve a DIMACS graph", formatter_class=fmt)
    p.add_argument("--algo", choices=["exhaustive", "bnb", "census", "bruteforce"], default="bnb",
                   help="search procedure")
    p.add_argument("--graph", required=True, help="DIMACS graph file")
    p.add_argument("--cap", type=_positive_int, default=None,
                   help=f"node cap (frontier cap for bnb); defaults {DEFAULT_NODE_CAP} / {DEFAULT_FRONTIER_CAP}")
    p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("count-is", help="count independent sets exactly", formatter_class=fmt)
    p.add_argument("--graph", required=True, help="DIMACS graph file")
    p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("bounds", help="evaluate analytic bounds", formatter_class=fmt)
    bsub = p.add_subparsers(dest="bound", required=True, parser_class=_Parser)
    for name in ("gamma", "lambda", "g", "lower"):
        b = bsub.add_parser(name, help=f"{name} value or curve", formatter_class=fmt)
        b.add_argument("--k", type=_positive_real, default=None, help="single k value")
        b.add_argument("--k-min", type=_positive_real, default=None, help="curve start")
        b.add_argument("--k-max", type=_positive_real, default=None, help="curve end")
        b.add_argument("--steps", type=_positive_int, default=100, help="curve points")
        b.add_argument("--log", action="store_true", help="log-spaced k grid")
        b.add_argument("--data", action="store_true", help="two-column whitespace output")
        b.add_argument("--out", default=None, help="output path (default stdout)")
    b = bsub.add_parser("expected-is", help="expected number of independent sets", formatter_class=fmt)
    b.add_argument("--n", type=_nonneg_int, required=True, help="vertex count")
    b.add_argument("--p", type=_probability, required=True, help="edge probability")
    b.add_argument("--out", default=None, help="output path (default stdout)")
    b = bsub.add_parser("wnu", help="bound on nodes of potential u", formatter_class=fmt)
    b.add_argument("--n", type=_positive_int, required=True, help="vertex count")
    b.add_argument("--p", type=_probability, required=True, help="edge probability")
    b.add_argument("--u", type=_positive_int, required=True, help="potential (1..n)")
    b.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("experiment", help="run a solver grid and write records CSV", formatter_class=fmt)
    p.add_argument("--n-list", type=_list_of(_positive_int), required=True, help="comma-separated n values")
    regime = p.add_mutually_exclusive_group(required=True)
    regime.add_argument("--k-list", type=_list_of(_positive_real), help="comma-separated k (p = k/n)")
    regime.add_argument("--p-list", type=_list_of(_probability), help="comma-separated fixed p")
    p.add_argument("--seeds", type=_positive_int, default=100, help="seeds per cell")
    p.add_argument("--seed", type=_seed, default=0, help="first seed")
    p.add_argument("--solvers", type=_solver_list, default=["exhaustive", "bnb_census"],
                   help="comma-separated solvers")
    p.add_argument("--method", choices=["count", "traverse"], default="count",
                   help="obtain tree sizes by counting or by walking the tree")
    p.add_argument("--cap", type=_positive_int, default=None, help="node cap for traversals")
    p.add_argument("--threads", type=_positive_int, default=1, help="worker processes")
    p.add_argument("--out", default=None, help="output CSV path (default stdout)")

    p = sub.add_parser("fit", help="fit growth bases from records CSV", formatter_class=fmt)
    p.add_argument("--in", dest="inp", required=True, help="records CSV")
    p.add_argument("--group-by", choices=["k", "p"], default="k", help="grouping column")
    p.add_argument("--min-n", type=_nonneg_int, default=0, help="ignore smaller n")
    p.add_argument("--min-samples", type=_positive_int, default=30, help="samples needed per n")
    p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("compare", help="compare fitted bases with analytic bounds", formatter_class=fmt)
    p.add_argument("--records", required=True, help="records CSV")
    p.add_argument("--tol", type=_real, default=0.05, help="relative slack")
    p.add_argument("--min-n", type=_nonneg_int, default=0, help="ignore smaller n")
    p.add_argument("--min-samples", type=_positive_int, default=30, help="samples needed per n")
    p.add_argument("--csv", default=None, help="also write the machine-readable report here")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    return parser


def _cmd_gen(args):
    if args.p is not None:
        g = gen_gnp(args.n, args.p, args.seed)
    else:
        g = gen_gnm(args.n, args.m, args.seed)
    _emit(write_dimacs(g), args.out)


def _cmd_solve(args):
    g = _read_graph(args.graph)
    if args.algo == "exhaustive":
        res = exhaustive_search(g, cap=args.cap or DEFAULT_NODE_CAP)
        alpha, nodes = res.alpha, res.nodes_expanded
    elif args.algo == "bnb":
        res = bnb_best_first(g, frontier_cap=args.cap or DEFAULT_FRONTIER_CAP)
        alpha, nodes = res.alpha, res.nodes_expanded
    elif args.algo == "census":
        alpha = bnb_best_first(g).alpha
        nodes = bnb_census(g, alpha, cap=args.cap or DEFAULT_NODE_CAP)
    else:
        res = brute_force_alpha(g)
        alpha, nodes = res.alpha, res.nodes_expanded
    _emit(f"alpha={alpha} nodes={nodes}\n", args.out)


def _cmd_count(args):
    _emit(f"{count_independent_sets(_read_graph(args.graph))}\n", args.out)


def _cmd_bounds(args):
    kind = args.bound
    if kind == "expected-is":
        _emit(f"{bounds.expected_is_count(args.n, args.p)!r}\n", args.out)
        return
    if kind == "wnu":
        if args.u > args.n:
            raise DomainError(f"--u must be <= --n, got {args.u} > {args.n}")
        d = bounds.w_n_u_detail(args.n, args.p, args.u)
        flag = "exact" if d.exact_tail else "chernoff"
        _emit(f"w={d.value!r} tail={d.tail!r} tail_method={flag}\n", args.out)
        return
    curve_kind = {"gamma": "gamma", "lambda": "lambda", "g": "g_upper", "lower": "lower"}[kind]
    if args.k is not None:
        if args.k_min is not None or args.k_max is not None:
            raise UsageError("use either --k or --k-min/--k-max")
        k = args.k
        if kind == "gamma":
            pt = bounds.gamma_of_k(k)
            text = f"gamma={pt.gamma:.6f} x_star={pt.x_star:.6f} lambda={pt.lam:.6f}\n"
        elif kind == "lambda":
            text = f"lambda={bounds.lambda_of_k(k):.6f} approx={bounds.lambda_caption_approx(k):.6f}\n"
        elif kind == "g":
            g = bounds.g_of_k(k)
            text = f"g={g:.6f} base={math.exp(g):.6f}\n"
        else:
            e = bounds.exhaustive_lower_exponent(k)
            text = f"exponent={e:.6f} base={math.exp(e):.6f}\n"
        _emit(text, args.out)
        return
    if args.k_min is None or args.k_max is None:
        raise UsageError("give --k or both --k-min and --k-max")
    scale = "log" if args.log else "linear"
    emit = emit_curve_data if args.data else emit_curve
    _emit(emit(curve_kind, args.k_min, args.k_max, args.steps, scale), args.out)


def _cmd_experiment(args):
    caps = {}
    if args.cap is not None:
        caps = {name: args.cap for name in SOLVERS}
    records = run_grid(args.n_list, k_list=args.k_list, p_list=args.p_list, seeds_per_cell=args.seeds,
                       solvers=args.solvers, caps=caps, base_seed=args.seed, threads=args.threads,
                       method=args.method)
    _emit(records_to_csv(records), args.out)


def _cmd_fit(args):
    records = read_records_csv(Path(args.inp).read_text())
    fits = fit_groups(records, by=args.group_by, min_n=args.min_n, min_samples=args.min_samples)
    if not fits:
        raise InsufficientDataError("no group has enough data to fit")
    _emit(fits_to_text(fits, by=args.group_by), args.out)


def _cmd_compare(args):
    records = read_records_csv(Path(args.records).read_text())
    report = compare_measured_vs_bounds(records, tol=args.tol, min_n=args.min_n,
                                        min_samples=args.min_samples)
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    _emit(report.to_text(), args.out)


COMMANDS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "count-is": _cmd_count,
    "bounds": _cmd_bounds,
    "experiment": _cmd_experiment,
    "fit": _cmd_fit,
    "compare": _cmd_compare,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args)
    except ResourceCapError as exc:
        print(f"bnbmis: resource cap: {exc}", file=sys.stderr)
        return 2
    except (UsageError, DomainError, ParseError, InsufficientDataError, OSError) as exc:
        print(f"bnbmis: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
