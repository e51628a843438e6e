"""Command-line interface.

Subcommands:
    predict     log predictive probabilities or a table of the most
                probable future count vectors
    risk-curve  risk or risk-difference values over a grid of total rates
    figures     the standard figures, each as a CSV data file plus an SVG
                rendering (risk-reduction curves and the integrand scan)
    verify      the inequality verification suite, as text or JSON

Exit codes: 0 success, 1 usage error, 2 numerical failure (truncation or
quadrature budget exceeded, undefined estimator under --strict), 3
verification suite failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import EstimatorUndefinedError, QuadratureError, TruncationError
from .hyper import MLE, URE, Moment
from .model import Counts, ModelConfig
from .predictive import (
    EmpiricalBayes,
    FixedGamma,
    Jeffreys,
    Shrinkage,
    log_pred,
    pred_pmf_table,
)
from .quadrature import QuadraturePolicy
from .risk import (
    f_shrink_with_err,
    risk_diff_eb,
    risk_diff_shrinkage,
    risk_eb,
    risk_jeffreys_direct,
)
from .special import SeriesPolicy
from .svg import Series, line_chart
from .verify import run_all

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we want exit 1
        raise _UsageError(message)


def _parse_counts(text: str, what: str) -> List[int]:
    try:
        values = [int(p) for p in text.split(",") if p.strip() != ""]
    except ValueError:
        raise _UsageError(f"{what} must be a comma-separated list of integers")
    if not values or any(v < 0 for v in values):
        raise _UsageError(f"{what} must be non-empty, non-negative integers")
    return values


def _parse_float_list(text: str, what: str) -> List[float]:
    try:
        values = [float(p) for p in text.split(",") if p.strip() != ""]
    except ValueError:
        raise _UsageError(f"{what} must be a comma-separated list of numbers")
    if not values:
        raise _UsageError(f"{what} must be non-empty")
    return values


def _b_value(text: str):
    # --b accepts a positive number or the word "auto" (= d/2 - 1)
    if text.strip().lower() == "auto":
        return None
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("--b takes a number or 'auto'")


_CONFIG_KEYS = {
    "r": float,
    "s": float,
    "d": int,
    "threads": int,
    "tol": float,
    "seed": int,
    "out_dir": str,
    "format": str,
}


def _load_config(path: str) -> dict:
    """key = value lines; '#' starts a comment; dashes and underscores equal."""
    loaded = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for ln, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise _UsageError(f"{path}:{ln}: expected 'key = value'")
                key, _, value = line.partition("=")
                key = key.strip().replace("-", "_")
                if key not in _CONFIG_KEYS:
                    raise _UsageError(f"{path}:{ln}: unknown key {key!r}")
                try:
                    loaded[key] = _CONFIG_KEYS[key](value.strip())
                except ValueError:
                    raise _UsageError(f"{path}:{ln}: bad value for {key!r}")
    except OSError as exc:
        raise _UsageError(f"cannot read config file: {exc}")
    return loaded


def _add_globals(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # the same options live on the root parser and (with suppressed
    # defaults) on every subparser, so they work on either side of the
    # subcommand without the subparser default clobbering the root value
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=d, help="file of key = value defaults")
    parser.add_argument("--r", type=float, default=d, help="observed exposure (default 1)")
    parser.add_argument("--s", type=float, default=d, help="future exposure (default 1)")
    parser.add_argument("--d", type=int, default=d, help="number of coordinates")
    parser.add_argument("--threads", type=int, default=d,
                        help="worker threads for grid evaluation (default: all cores)")
    parser.add_argument("--tol", type=float, default=d,
                        help="series tail / quadrature tolerance override")
    parser.add_argument("--seed", type=int, default=d,
                        help="seed for sampled verification grids (default 42)")
    parser.add_argument("--out-dir", default=d,
                        help="base directory for output files (default .)")
    parser.add_argument("--format", choices=("text", "table", "csv", "json"), default=d,
                        help="output format where applicable (default text; "
                             "'table' is an alias for text)")


def _build_parser() -> _Parser:
    parser = _Parser(prog="poispred", description=__doc__.splitlines()[0])
    _add_globals(parser, suppress=False)
    shared = _Parser(add_help=False)
    _add_globals(shared, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", parents=[shared],
                       help="predictive probabilities for future counts")
    p.add_argument("--x", required=True, help="observed counts, e.g. 1,0,2")
    p.add_argument("--family", choices=("jeffreys", "gamma", "eb", "shrinkage"),
                   default="jeffreys")
    p.add_argument("--alpha", type=float, default=None, help="gamma family: prior rate")
    p.add_argument("--rule", choices=("moment", "mle", "ure"), default="moment",
                   help="eb family: hyperparameter rule")
    p.add_argument("--b", type=_b_value, default=None,
                   help="moment rule numerator: a number or 'auto' (= d/2 - 1)")
    p.add_argument("--y", default=None, help="future counts to score, e.g. 0,1,0")
    p.add_argument("--table", action="store_true",
                   help="emit most-probable future vectors instead of one score")
    p.add_argument("--mass", type=float, default=None,
                   help="grow the table until it covers at least this much mass")
    p.add_argument("--mass-tol", type=float, default=None,
                   help="stop the table once this much mass is left uncovered "
                        "(default 1e-6)")
    p.add_argument("--strict", action="store_true",
                   help="fail (exit 2) instead of falling back when a rule is undefined")
    p.add_argument("--out", default=None, help="write to this file instead of stdout")

    p = sub.add_parser("risk-curve", parents=[shared], help="risk quantities over a total-rate grid")
    p.add_argument("--quantity", required=True,
                   choices=("jeffreys", "eb-diff", "shrinkage-diff", "both", "eb"),
                   help="'both' emits eb-diff and shrinkage-diff side by side")
    p.add_argument("--mu", default=None, help="explicit grid, e.g. 0.5,1,2")
    p.add_argument("--mu-min", type=float, default=0.05)
    p.add_argument("--mu-max", type=float, default=50.0)
    p.add_argument("--mu-points", type=int, default=60)
    p.add_argument("--b", type=_b_value, default=None,
                   help="moment rule numerator: a number or 'auto' (= d/2 - 1)")
    p.add_argument("--log-values", action="store_true",
                   help="emit log10 of each value with a log-scale error "
                        "half-width (nan when positivity is not certified)")
    p.add_argument("--out", default=None, help="write to this file instead of stdout")

    p = sub.add_parser("figures", parents=[shared],
                       help="write the standard figures (CSV always, SVG unless --no-plot)")
    p.add_argument("--which", default="fig1,fig2a,fig2b,fig3",
                   help="comma subset of fig1,fig2a,fig2b,fig3")
    p.add_argument("--no-plot", action="store_true",
                   help="write only the CSV data files, skip the SVG renderings")

    p = sub.add_parser("verify", parents=[shared], help="run the inequality verification suite")
    p.add_argument("--only", default=None, help="comma subset of check names")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--out", default=None, help="write the report to this file")
    return parser


def _merge_globals(args) -> dict:
    merged = {"r": 1.0, "s": 1.0, "d": None, "threads": os.cpu_count() or 1,
              "tol": None, "seed": 42, "out_dir": ".", "format": "text"}
    if args.config:
        merged.update(_load_config(args.config))
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    if merged["format"] == "table":
        merged["format"] = "text"
    if merged["format"] not in ("text", "csv", "json"):
        raise _UsageError(f"unknown format {merged['format']!r}")
    if merged["r"] <= 0 or merged["s"] <= 0:
        raise _UsageError("--r and --s must be positive")
    if merged["threads"] < 1:
        raise _UsageError("--threads must be at least 1")
    if merged["tol"] is not None and not (0.0 < merged["tol"] < 0.1):
        raise _UsageError("--tol must be in (0, 0.1)")
    return merged


def _policies(g: dict):
    if g["tol"] is None:
        return SeriesPolicy(), QuadraturePolicy()
    return (SeriesPolicy(tail_tol=g["tol"]),
            QuadraturePolicy(abs_tol=max(g["tol"], 1e-13)))


def _open_out(g: dict, out: Optional[str]):
    if out is None:
        return sys.stdout, False
    path = out if os.path.isabs(out) else os.path.join(g["out_dir"], out)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    return open(path, "w", encoding="utf-8", newline=""), True


def _g17(v: float) -> str:
    return format(float(v), ".17g")


def _auto_b(d: int) -> float:
    b = 0.5 * d - 1.0
    if b <= 0.0:
        raise _UsageError(
            f"the default b = d/2 - 1 is not positive at d={d}; pass --b explicitly")
    return b


def _resolve_family(args, cfg: ModelConfig):
    if args.family == "jeffreys":
        return Jeffreys()
    if args.family == "gamma":
        if args.alpha is None:
            raise _UsageError("--family gamma requires --alpha")
        return FixedGamma(alpha=args.alpha)
    if args.family == "shrinkage":
        return Shrinkage()
    if args.rule == "moment":
        b = args.b if args.b is not None else _auto_b(cfg.d)
        return EmpiricalBayes(rule=Moment(b=b))
    rule = MLE() if args.rule == "mle" else URE()
    return EmpiricalBayes(rule=rule)


def _cmd_predict(args, g: dict) -> int:
    x = Counts.of(_parse_counts(args.x, "--x"))
    if g["d"] is not None and g["d"] != len(x):
        raise _UsageError(f"--d {g['d']} does not match the length of --x ({len(x)})")
    cfg = ModelConfig(d=len(x), r=g["r"], s=g["s"])
    if args.family == "shrinkage" and cfg.d < 2:
        raise _UsageError("--family shrinkage requires at least two coordinates")
    family = _resolve_family(args, cfg)

    try:
        return _predict_emit(args, g, x, cfg, family)
    except EstimatorUndefinedError as exc:
        if args.strict:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        if cfg.d >= 3:
            print(f"warning: {exc}; falling back to the moment rule", file=sys.stderr)
            fam = EmpiricalBayes(rule=Moment(b=0.5 * cfg.d - 1.0))
        else:
            # no positive default b exists below d=3; b -> 0 is the reference
            print(f"warning: {exc}; falling back to the reference predictive",
                  file=sys.stderr)
            fam = Jeffreys()
        return _predict_emit(args, g, x, cfg, fam)


def _table_mass_tol(args) -> float:
    if args.mass is not None and args.mass_tol is not None:
        raise _UsageError("give either --mass or --mass-tol, not both")
    if args.mass is not None:
        if not 0.0 < args.mass < 1.0:
            raise _UsageError("--mass must lie in (0, 1)")
        return 1.0 - args.mass
    if args.mass_tol is not None:
        if not 0.0 < args.mass_tol < 1.0:
            raise _UsageError("--mass-tol must lie in (0, 1)")
        return args.mass_tol
    return 1e-6


def _predict_emit(args, g: dict, x: Counts, cfg: ModelConfig, family) -> int:
    out, close = _open_out(g, args.out)
    try:
        # a mass target without --table still means "give me the table"
        if args.table or args.mass is not None or args.mass_tol is not None:
            rows = pred_pmf_table(x, family, cfg, mass_tol=_table_mass_tol(args))
            if g["format"] == "csv":
                writer = csv.writer(out, lineterminator="\n")
                writer.writerow([f"y{i+1}" for i in range(cfg.d)] + ["prob", "log_prob"])
                for y, p in rows:
                    writer.writerow([*map(str, y), _g17(p), _g17(math.log(p))])
            elif g["format"] == "json":
                doc = {
                    "x": list(x.values),
                    "rows": [{"y": list(y), "prob": p, "log_prob": math.log(p)}
                             for y, p in rows],
                    "covered_mass": math.fsum(p for _, p in rows),
                }
                out.write(json.dumps(doc) + "\n")
            else:
                total = 0.0
                out.write(f"{'y':<{4 * cfg.d + 2}}  {'prob':<22}  cumulative\n")
                for y, p in rows:
                    total += p
                    ys = ",".join(map(str, y))
                    out.write(f"({ys}){'':<{max(0, 4 * cfg.d - len(ys))}}  "
                              f"{p:<22.15g}  {total:.15g}\n")
                out.write(f"rows: {len(rows)}  covered mass: {total:.15g}\n")
            return 0
        if args.y is None:
            raise _UsageError("predict needs either --y or --table")
        y = Counts.of(_parse_counts(args.y, "--y"))
        if len(y) != len(x):
            raise _UsageError("--y must have the same length as --x")
        lp = log_pred(x, y, family, cfg)
        if g["format"] == "csv":
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(["log_prob", "prob"])
            writer.writerow([_g17(lp), _g17(math.exp(lp))])
        elif g["format"] == "json":
            out.write(json.dumps({"log_prob": lp, "prob": math.exp(lp)}) + "\n")
        else:
            out.write(f"log_prob = {lp:.15g}\n")
            out.write(f"prob     = {math.exp(lp):.15g}\n")
        return 0
    finally:
        if close:
            out.close()


def _risk_quantity_fn(quantity: str, b: Optional[float], cfg: ModelConfig,
                      series: SeriesPolicy):
    if quantity == "jeffreys":
        def fn(mu: float):
            pt = risk_jeffreys_direct([mu / cfg.d] * cfg.d, cfg, series)
            return pt.value, pt.err_bound
        return fn
    if quantity == "shrinkage-diff":
        if cfg.d < 2:
            raise _UsageError("shrinkage-diff requires at least two coordinates")
        def fn(mu: float):
            pt = risk_diff_shrinkage(mu, cfg, series)
            return pt.value, pt.err_bound
        return fn
    bb = b if b is not None else _auto_b(cfg.d)
    if quantity == "eb-diff":
        def fn(mu: float):
            pt = risk_diff_eb(mu, bb, cfg, series)
            return pt.value, pt.err_bound
        return fn

    def fn(mu: float):
        pt = risk_eb(mu, bb, cfg, series)
        return pt.value, pt.err_bound
    return fn


def _log10_pair(v: float, e: float) -> Tuple[float, float]:
    # certified half-width on the log10 scale; by concavity the lower side
    # log10(v) - log10(v-e) dominates the upper one
    if v - e > 0.0:
        return math.log10(v), math.log10(v) - math.log10(v - e)
    return float("nan"), float("inf")


def _parallel_map(fn, items, threads: int) -> list:
    results = [None] * len(items)
    if threads > 1 and len(items) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = {pool.submit(fn, item): i for i, item in enumerate(items)}
            for fut, i in futures.items():
                results[i] = fut.result()
    else:
        for i, item in enumerate(items):
            results[i] = fn(item)
    return results


def _cmd_risk_curve(args, g: dict) -> int:
    d = g["d"] if g["d"] is not None else 3
    cfg = ModelConfig(d=d, r=g["r"], s=g["s"])
    series, _ = _policies(g)
    if args.mu is not None:
        grid = _parse_float_list(args.mu, "--mu")
        if any(n <= p for p, n in zip(grid, grid[1:])):
            raise _UsageError("--mu values must be strictly increasing")
    else:
        if args.mu_min <= 0 or args.mu_max <= args.mu_min or args.mu_points < 2:
            raise _UsageError("need 0 < --mu-min < --mu-max and --mu-points >= 2")
        grid = list(np.geomspace(args.mu_min, args.mu_max, args.mu_points))
    if any(m <= 0 for m in grid):
        raise _UsageError("--mu values must be positive")

    quantities = ["eb-diff", "shrinkage-diff"] if args.quantity == "both" \
        else [args.quantity]
    fns = [_risk_quantity_fn(q, args.b, cfg, series) for q in quantities]
    tasks = [(qi, m) for qi in range(len(fns)) for m in grid]
    flat = _parallel_map(lambda t: fns[t[0]](float(t[1])), tasks, g["threads"])
    per_q = [flat[qi * len(grid):(qi + 1) * len(grid)] for qi in range(len(fns))]

    header = ["mu"]
    if len(quantities) == 1:
        header += (["log10_value", "log10_err_bound"] if args.log_values
                   else ["value", "err_bound"])
    else:
        for q in quantities:
            name = q.replace("-", "_") + ("_log10" if args.log_values else "")
            header += [name, f"{name}_err"]
    rows = []
    for i, m in enumerate(grid):
        row = [float(m)]
        for res in per_q:
            v, e = res[i]
            if args.log_values:
                v, e = _log10_pair(v, e)
            row += [v, e]
        rows.append(row)

    out, close = _open_out(g, args.out)
    try:
        if g["format"] == "csv":
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_g17(v) for v in row])
        elif g["format"] == "json":
            doc = {"quantity": args.quantity,
                   "cfg": {"d": cfg.d, "r": cfg.r, "s": cfg.s},
                   "columns": header, "rows": rows}
            out.write(json.dumps(doc) + "\n")
        else:
            widths = [12] + [22] * (len(header) - 1)
            out.write("  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip() + "\n")
            for row in rows:
                cells = [f"{row[0]:<12.6g}"] + [f"{v:<22.15g}" for v in row[1:]]
                out.write("  ".join(cells).rstrip() + "\n")
    finally:
        if close:
            out.close()
    return 0


def _cmd_figures(args, g: dict) -> int:
    wanted = [w.strip() for w in args.which.split(",") if w.strip()]
    known = {"fig1", "fig2a", "fig2b", "fig3"}
    unknown = set(wanted) - known
    if unknown:
        raise _UsageError(f"unknown figures: {sorted(unknown)}")
    series_pol, _ = _policies(g)
    r, s = g["r"], g["s"]
    os.makedirs(g["out_dir"], exist_ok=True)
    mus = list(np.geomspace(0.05, 50.0, 60))

    def emit(name: str, xlabel: str, columns, curves, chart: str) -> None:
        # columns: (header, [(value, err), ...]) per curve; CSV always,
        # SVG unless --no-plot
        path = os.path.join(g["out_dir"], f"{name}.csv")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            header = [xlabel]
            for label, _ in columns:
                header += [label, f"{label}_err"]
            writer.writerow(header)
            xs = curves[0].xs
            for i, xv in enumerate(xs):
                row = [_g17(xv)]
                for _, pts in columns:
                    row += [_g17(pts[i][0]), _g17(pts[i][1])]
                writer.writerow(row)
        print(path)
        if not args.no_plot:
            path = os.path.join(g["out_dir"], f"{name}.svg")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(chart)
            print(path)

    if "fig1" in wanted:
        cols = []
        curves = []
        for d in (3, 4, 6, 8):
            cfg = ModelConfig(d=d, r=r, s=s)
            b = 0.5 * d - 1.0
            pts = [risk_diff_eb(m, b, cfg, series_pol) for m in mus]
            cols.append((f"d{d}", [(p.value, p.err_bound) for p in pts]))
            curves.append(Series(mus, [p.value for p in pts], f"d={d}, b={b:g}"))
        emit("fig1", "mu", cols, curves, line_chart(
            curves, title="Risk improvement of the moment plug-in rule",
            xlabel="total rate", ylabel="risk difference", x_log=True))
    for name, d in (("fig2a", 3), ("fig2b", 8)):
        if name not in wanted:
            continue
        cfg = ModelConfig(d=d, r=r, s=s)
        panels = [
            (f"eb_b{0.5 * d - 1.0:g}", f"moment b={0.5 * d - 1.0:g}",
             lambda m, c=cfg: risk_diff_eb(m, 0.5 * c.d - 1.0, c, series_pol)),
            (f"eb_b{d - 2:g}", f"moment b={d - 2:g}",
             lambda m, c=cfg: risk_diff_eb(m, float(c.d - 2), c, series_pol)),
            ("shrinkage", "coupled prior",
             lambda m, c=cfg: risk_diff_shrinkage(m, c, series_pol)),
        ]
        cols = []
        curves = []
        for key, label, fn in panels:
            pts = [fn(m) for m in mus]
            cols.append((key, [(p.value, p.err_bound) for p in pts]))
            curves.append(Series(mus, [p.value for p in pts], label))
        emit(name, "mu", cols, curves, line_chart(
            curves, title=f"Risk improvement over the baseline, d={d}",
            xlabel="total rate", ylabel="risk difference", x_log=True, y_log=True))
    if "fig3" in wanted:
        lams = [0.01 * k for k in range(1, 2001)]
        pts = [f_shrink_with_err(l, series_pol) for l in lams]
        curves = [Series(lams, [v for v, _ in pts], "f")]
        emit("fig3", "lambda", [("f", pts)], curves, line_chart(
            curves, title="Scaled log-shift of the baseline integrand",
            xlabel="rate", ylabel="f"))
    return 0


def _cmd_verify(args, g: dict) -> int:
    only = None
    if args.only:
        only = [w.strip() for w in args.only.split(",") if w.strip()]
    try:
        report = run_all(samples=args.samples, seed=g["seed"], only=only)
    except ValueError as exc:
        raise _UsageError(str(exc))
    out, close = _open_out(g, args.out)
    try:
        if g["format"] == "json":
            out.write(report.to_json() + "\n")
        else:
            out.write(report.to_text() + "\n")
    finally:
        if close:
            out.close()
    return 0 if report.passed else 3


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        g = _merge_globals(args)
        if args.command == "predict":
            return _cmd_predict(args, g)
        if args.command == "risk-curve":
            return _cmd_risk_curve(args, g)
        if args.command == "figures":
            return _cmd_figures(args, g)
        return _cmd_verify(args, g)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (TruncationError, QuadratureError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except EstimatorUndefinedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse --help
        code = exc.code
        return int(code) if isinstance(code, int) else 0
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    raise SystemExit(main())
