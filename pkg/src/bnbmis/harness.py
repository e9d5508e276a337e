"""Experiment grids, growth-base fitting, curve emission and bound comparison."""
import csv
import io
import math
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bounds
from .errors import DomainError, InsufficientDataError, ParseError, ResourceCapError
from .graph import gen_gnp
from .solvers import (
    DEFAULT_FRONTIER_CAP,
    DEFAULT_NODE_CAP,
    bnb_best_first,
    bnb_census,
    exhaustive_search,
    tree_counts,
)

SOLVERS = ("exhaustive", "bnb_census", "bnb_best_first")
RECORD_FIELDS = ("n", "p", "k", "seed", "solver", "nodes", "alpha", "elapsed_ms", "truncated")


@dataclass
class ExperimentRecord:
    n: int
    p: float
    k: float
    seed: int
    solver: str
    nodes: int
    alpha: int
    elapsed_ms: float = 0.0
    truncated: bool = False


@dataclass
class FitResult:
    base: float
    log_intercept: float
    r_squared: float
    n_range: tuple
    sample_count: int
    base_of_mean: float = math.nan


def _fmt_real(x):
    return f"{x:.10g}"


# ---------------------------------------------------------------- grid runs

@dataclass(frozen=True)
class Cell:
    index: int
    n: int
    p: float
    k: float
    seed: int


def _cells(n_list, k_list, p_list, seeds_per_cell, base_seed):
    if not n_list:
        raise DomainError("n_list must be nonempty")
    if (k_list is None) == (p_list is None):
        raise DomainError("give exactly one of k_list or p_list")
    values = list(k_list if k_list is not None else p_list)
    if not values:
        raise DomainError("k_list / p_list must be nonempty")
    if seeds_per_cell < 1:
        raise DomainError(f"seeds_per_cell must be >= 1, got {seeds_per_cell}")
    cells = []
    for n in n_list:
        if n < 1:
            raise DomainError(f"n must be >= 1, got {n}")
        for v in values:
            if k_list is not None:
                if not 0 < v <= n:
                    raise DomainError(f"k={v} needs 0 < k <= n (n={n})")
                p, k = v / n, v
            else:
                if not 0.0 <= v <= 1.0:
                    raise DomainError(f"p={v} outside [0, 1]")
                p, k = v, n * v
            for s in range(seeds_per_cell):
                cells.append(Cell(len(cells), n, p, k, base_seed + s))
    return cells


def _run_cell(cell, solvers, caps, method):
    g = gen_gnp(cell.n, cell.p, cell.seed)
    out = []
    counted = None
    if method == "count" and ("exhaustive" in solvers or "bnb_census" in solvers):
        t0 = time.perf_counter()
        counted = tree_counts(g)
        count_ms = (time.perf_counter() - t0) * 1000.0
    alpha_known = counted.alpha if counted is not None else None
    for solver in solvers:
        t0 = time.perf_counter()
        truncated = False
        try:
            if solver == "exhaustive":
                if counted is not None:
                    nodes, alpha = counted.exhaustive_nodes, counted.alpha
                else:
                    res = exhaustive_search(g, cap=caps.get("exhaustive", DEFAULT_NODE_CAP))
                    nodes, alpha = res.nodes_expanded, res.alpha
                    alpha_known = alpha
            elif solver == "bnb_census":
                if counted is not None:
                    nodes, alpha = counted.census_nodes, counted.alpha
                else:
                    if alpha_known is None:
                        alpha_known = bnb_best_first(
                            g, frontier_cap=caps.get("bnb_best_first", DEFAULT_FRONTIER_CAP)).alpha
                    alpha = alpha_known
                    nodes = bnb_census(g, alpha, cap=caps.get("bnb_census", DEFAULT_NODE_CAP))
            elif solver == "bnb_best_first":
                res = bnb_best_first(g, frontier_cap=caps.get("bnb_best_first", DEFAULT_FRONTIER_CAP))
                nodes, alpha = res.nodes_expanded, res.alpha
            else:
                raise DomainError(f"unknown solver {solver!r}")
        except ResourceCapError as exc:
            # alpha is unknown for a truncated run; 0 keeps the record in range
            nodes, alpha, truncated = exc.nodes, 0, True
        elapsed = (time.perf_counter() - t0) * 1000.0
        if counted is not None and solver != "bnb_best_first":
            elapsed += count_ms
        out.append(ExperimentRecord(cell.n, cell.p, cell.k, cell.seed, solver,
                                    int(nodes), int(alpha), elapsed, truncated))
    return cell.index, out


def _run_cell_star(args):
    return _run_cell(*args)


def run_grid(n_list, k_list=None, p_list=None, seeds_per_cell=100, solvers=("exhaustive",),
             caps=None, base_seed=0, threads=1, method="count"):
    """One record per (n, p, seed, solver).

    Graphs come from ``gen_gnp(n, p, base_seed + s)``. With ``method="count"``
    the exhaustive and census sizes are obtained exactly from prefix
    independence polynomials; ``method="traverse"`` walks the trees and marks
    capped cells as truncated. The best-first solver always traverses.
    """
    solvers = tuple(solvers)
    if not solvers:
        raise DomainError("solvers must be nonempty")
    for s in solvers:
        if s not in SOLVERS:
            raise DomainError(f"unknown solver {s!r}; choose from {', '.join(SOLVERS)}")
    if method not in ("count", "traverse"):
        raise DomainError(f"method must be 'count' or 'traverse', got {method!r}")
    caps = dict(caps or {})
    for name, cap in caps.items():
        if cap <= 0:
            raise DomainError(f"cap for {name} must be positive")
    if threads < 1:
        raise DomainError(f"threads must be >= 1, got {threads}")
    cells = _cells(n_list, k_list, p_list, seeds_per_cell, base_seed)
    jobs = [(c, solvers, caps, method) for c in cells]
    if threads == 1:
        results = [_run_cell_star(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_cell_star, jobs, chunksize=max(1, len(jobs) // (threads * 8))))
    results.sort(key=lambda r: r[0])
    return [rec for _, recs in results for rec in recs]


# ---------------------------------------------------------------- CSV

def records_to_csv(records, include_elapsed=True):
    header = [f for f in RECORD_FIELDS if include_elapsed or f != "elapsed_ms"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for r in records:
        row = {
            "n": str(r.n), "p": _fmt_real(r.p), "k": _fmt_real(r.k), "seed": str(r.seed),
            "solver": r.solver, "nodes": str(r.nodes), "alpha": str(r.alpha),
            "elapsed_ms": f"{r.elapsed_ms:.3f}", "truncated": "1" if r.truncated else "0",
        }
        writer.writerow([row[h] for h in header])
    return buf.getvalue()


def read_records_csv(text):
    reader = csv.DictReader(io.StringIO(text))
    missing = set(RECORD_FIELDS) - {"elapsed_ms"} - set(reader.fieldnames or ())
    if missing:
        raise ParseError(f"records CSV lacks columns: {', '.join(sorted(missing))}", 1)
    out = []
    for lineno, row in enumerate(reader, start=2):
        try:
            rec = ExperimentRecord(
                n=int(row["n"]), p=float(row["p"]), k=float(row["k"]), seed=int(row["seed"]),
                solver=row["solver"], nodes=int(row["nodes"]), alpha=int(row["alpha"]),
                elapsed_ms=float(row.get("elapsed_ms") or 0.0),
                truncated=row["truncated"] == "1",
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(str(exc), lineno) from None
        if rec.solver not in SOLVERS:
            raise ParseError(f"unknown solver {rec.solver!r}", lineno)
        out.append(rec)
    return out


# ---------------------------------------------------------------- fitting

def group_records(records, by="k"):
    """Map (regime value, solver) -> records; values keyed by their CSV text."""
    if by not in ("k", "p"):
        raise DomainError(f"group_by must be 'k' or 'p', got {by!r}")
    groups = defaultdict(list)
    for r in records:
        groups[(_fmt_real(getattr(r, by)), r.solver)].append(r)
    return dict(groups)


def fit_base(records, min_n=0, min_levels=4, min_samples=30):
    """Least-squares line through (n, mean ln nodes); base = exp(slope).

    Truncated records and n < min_n are dropped. ``base_of_mean`` repeats the
    fit on ln(mean nodes) for the expectation reading.
    """
    by_n = defaultdict(list)
    for r in records:
        if r.truncated or r.n < min_n:
            continue
        if r.nodes < 1:
            raise DomainError(f"record with nodes={r.nodes} cannot be log-fitted")
        by_n[r.n].append(r.nodes)
    usable = {n: v for n, v in by_n.items() if len(v) >= min_samples}
    if len(usable) < min_levels:
        raise InsufficientDataError(
            f"need >= {min_levels} sizes with >= {min_samples} samples, have "
            + ", ".join(f"n={n}:{len(v)}" for n, v in sorted(by_n.items())))
    ns = np.array(sorted(usable), dtype=float)
    mean_log = np.array([np.mean(np.log(np.array(usable[n], dtype=float))) for n in sorted(usable)])
    log_mean = np.array([math.log(np.mean(np.array(usable[n], dtype=float))) for n in sorted(usable)])
    slope, intercept = np.polyfit(ns, mean_log, 1)
    resid = mean_log - (slope * ns + intercept)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((mean_log - mean_log.mean()) ** 2))
    if ss_tot == 0.0:
        r2 = 1.0
    else:
        r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    slope_mean = np.polyfit(ns, log_mean, 1)[0]
    return FitResult(
        base=math.exp(slope),
        log_intercept=float(intercept),
        r_squared=r2,
        n_range=(int(ns[0]), int(ns[-1])),
        sample_count=sum(len(v) for v in usable.values()),
        base_of_mean=math.exp(slope_mean),
    )


def fit_groups(records, by="k", min_n=0, min_samples=30):
    """Fit every (value, solver) group that has enough data."""
    fits = {}
    for key, recs in sorted(group_records(records, by).items()):
        try:
            fits[key] = fit_base(recs, min_n=min_n, min_samples=min_samples)
        except InsufficientDataError:
            continue
    return fits


def fits_to_text(fits, by="k"):
    lines = [f"{by:>12} {'solver':>15} {'base':>9} {'base_mean':>9} {'r2':>7} {'n_range':>9} {'samples':>7}"]
    for (value, solver), f in sorted(fits.items()):
        lines.append(f"{value:>12} {solver:>15} {f.base:9.5f} {f.base_of_mean:9.5f} "
                     f"{f.r_squared:7.4f} {f.n_range[0]:>4}-{f.n_range[1]:<4} {f.sample_count:>7}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- curves

CURVE_COLUMNS = {
    "lambda": ("k", "lambda"),
    "gamma": ("k", "gamma", "x_star"),
    "g_upper": ("k", "g", "base"),
    "lower": ("k", "exponent", "base"),
}


def k_grid(k_min, k_max, steps, scale="linear"):
    if not (0 < k_min < k_max):
        raise DomainError(f"need 0 < k_min < k_max, got {k_min}, {k_max}")
    if steps < 2:
        raise DomainError(f"steps must be >= 2, got {steps}")
    if scale == "log":
        return [float(v) for v in np.geomspace(k_min, k_max, steps)]
    if scale == "linear":
        return [float(v) for v in np.linspace(k_min, k_max, steps)]
    raise DomainError(f"scale must be 'linear' or 'log', got {scale!r}")


def curve_rows(kind, k_min, k_max, steps, scale="linear"):
    if kind not in CURVE_COLUMNS:
        raise DomainError(f"unknown curve kind {kind!r}")
    rows = []
    for k in k_grid(k_min, k_max, steps, scale):
        if kind == "lambda":
            rows.append((k, bounds.lambda_of_k(k)))
        elif kind == "gamma":
            pt = bounds.gamma_of_k(k)
            rows.append((k, pt.gamma, pt.x_star))
        elif kind == "g_upper":
            g = bounds.g_of_k(k)
            rows.append((k, g, math.exp(g)))
        else:
            e = bounds.exhaustive_lower_exponent(k)
            rows.append((k, e, math.exp(e)))
    return rows


def emit_curve(kind, k_min, k_max, steps, scale="linear"):
    """Curve as CSV text; reals written with repr so parsing is lossless."""
    header = CURVE_COLUMNS.get(kind)
    rows = curve_rows(kind, k_min, k_max, steps, scale)
    lines = [",".join(header)]
    lines.extend(",".join(repr(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def emit_curve_data(kind, k_min, k_max, steps, scale="linear"):
    """Two-column whitespace variant: ``k value`` per line, no header."""
    rows = curve_rows(kind, k_min, k_max, steps, scale)
    col = 2 if kind in ("g_upper", "lower") else 1
    return "".join(f"{row[0]!r} {row[col]!r}\n" for row in rows)


def parse_curve(text):
    """Inverse of :func:`emit_curve`: returns (kind, rows)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty curve file")
    header = tuple(lines[0].split(","))
    kind = next((k for k, cols in CURVE_COLUMNS.items() if cols == header), None)
    if kind is None:
        raise ParseError(f"unrecognised curve header {lines[0]!r}", 1)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(header):
            raise ParseError(f"expected {len(header)} columns", lineno)
        try:
            rows.append(tuple(float(v) for v in parts))
        except ValueError:
            raise ParseError(f"non-numeric value in {line!r}", lineno) from None
    return kind, rows


# ---------------------------------------------------------------- comparison

@dataclass
class ComparisonRow:
    regime: str
    value: float
    measured_exhaustive: float
    measured_census: float
    upper_exhaustive: float
    lower_exhaustive: float
    gamma: float
    exhaustive_upper_ok: bool
    exhaustive_lower_ok: bool
    census_ok: bool

    @property
    def passed(self):
        return self.exhaustive_upper_ok and self.exhaustive_lower_ok and self.census_ok


@dataclass
class ComparisonReport:
    rows: list
    tol: float

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    def to_text(self):
        head = (f"{'regime':>6} {'value':>10} {'meas_exh':>9} {'meas_cen':>9} {'e^g':>9} "
                f"{'e^lower':>9} {'gamma':>9}  result")
        lines = [head]
        for r in self.rows:
            lines.append(
                f"{r.regime:>6} {r.value:>10.6g} {r.measured_exhaustive:9.5f} {r.measured_census:9.5f} "
                f"{r.upper_exhaustive:9.5f} {r.lower_exhaustive:9.5f} {r.gamma:9.5f}  "
                + ("PASS" if r.passed else "FAIL"))
        return "\n".join(lines) + "\n"

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["regime", "value", "measured_base_exhaustive", "measured_base_census",
                    "upper_base", "lower_base", "gamma", "pass"])
        for r in self.rows:
            w.writerow([r.regime, _fmt_real(r.value), _fmt_real(r.measured_exhaustive),
                        _fmt_real(r.measured_census), _fmt_real(r.upper_exhaustive),
                        _fmt_real(r.lower_exhaustive), _fmt_real(r.gamma), int(r.passed)])
        return buf.getvalue()


def compare_measured_vs_bounds(records, analytic=None, tol=0.05, min_n=0, min_samples=30):
    """Check fitted bases against the analytic envelopes.

    k-regime groups (p = k/n): exhaustive base <= e^g(k) (1 + tol), exhaustive
    base >= e^lower(k) (1 - tol) and census base <= gamma(k) (1 + tol).
    Fixed-p groups: exhaustive base <= 1 + tol (subexponential regime).
    ``analytic`` optionally supplies BoundCurvePoint values per k; every
    measured k must be covered.
    """
    if tol < 0:
        raise DomainError(f"tol must be >= 0, got {tol}")
    table = None
    if analytic is not None:
        table = {_fmt_real(pt.k): pt for pt in analytic}
    # p = k/n keeps k fixed while n varies; a fixed p gives one n per k value
    by_k = defaultdict(list)
    for r in records:
        by_k[_fmt_real(r.k)].append(r)
    k_groups = {}
    p_groups = defaultdict(list)
    for key, recs in by_k.items():
        if float(key) > 0 and len({r.n for r in recs}) > 1:
            k_groups[key] = recs
        else:
            for r in recs:
                p_groups[_fmt_real(r.p)].append(r)
    rows = []
    missing = []
    for key in sorted(k_groups, key=float):
        recs = k_groups[key]
        k = float(key)
        exh = [r for r in recs if r.solver == "exhaustive"]
        cen = [r for r in recs if r.solver == "bnb_census"]
        try:
            f_exh = fit_base(exh, min_n=min_n, min_samples=min_samples)
        except InsufficientDataError:
            missing.append(f"k={key} (exhaustive)")
            continue
        f_cen = None
        if cen:
            try:
                f_cen = fit_base(cen, min_n=min_n, min_samples=min_samples)
            except InsufficientDataError:
                missing.append(f"k={key} (bnb_census)")
                continue
        if table is not None:
            if key not in table:
                missing.append(f"k={key} (analytic)")
                continue
            gamma = table[key].gamma
        else:
            gamma = bounds.gamma_of_k(k).gamma
        up = math.exp(bounds.g_of_k(k))
        lo = math.exp(bounds.exhaustive_lower_exponent(k))
        cen_base = f_cen.base if f_cen else math.nan
        rows.append(ComparisonRow(
            "k", k, f_exh.base, cen_base, up, lo, gamma,
            exhaustive_upper_ok=f_exh.base <= up * (1 + tol),
            exhaustive_lower_ok=f_exh.base >= lo * (1 - tol),
            census_ok=(f_cen is None) or cen_base <= gamma * (1 + tol),
        ))
    for key in sorted(p_groups, key=float):
        recs = p_groups[key]
        exh = [r for r in recs if r.solver == "exhaustive"]
        cen = [r for r in recs if r.solver == "bnb_census"]
        try:
            f_exh = fit_base(exh, min_n=min_n, min_samples=min_samples)
        except InsufficientDataError:
            missing.append(f"p={key} (exhaustive)")
            continue
        cen_base = math.nan
        if cen:
            try:
                cen_base = fit_base(cen, min_n=min_n, min_samples=min_samples).base
            except InsufficientDataError:
                pass
        rows.append(ComparisonRow(
            "p", float(key), f_exh.base, cen_base, 1.0, 1.0, 1.0,
            exhaustive_upper_ok=f_exh.base <= 1.0 + tol,
            exhaustive_lower_ok=True,
            census_ok=True,
        ))
    if missing:
        raise InsufficientDataError("missing data for " + ", ".join(missing))
    return ComparisonReport(rows, tol)

