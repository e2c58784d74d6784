"""Command-line front end.

Every subcommand streams one or more tables to stdout in a delimited
format (csv, tsv, or json).  Runs are reproducible: all randomness is
driven by --seed, which defaults to DEFAULT_SEED, and identical argv
produce byte-identical output.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from importlib import resources

import numpy as np

from . import __version__, bounds, dists, evtfit, montecarlo, returns

DEFAULT_SEED = 1729
DEFAULT_REPLICATES = 100_000
DEFAULT_PRECISION = 4
FIXTURE_NAME = "dji_daily_close_2015_2022.csv"


class CliDataError(Exception):
    """Raised for input or convergence problems (exit status 1)."""


def _fmt(value, precision: int):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return f"{v:.{precision}g}"
    return str(value)


def _json_value(value, precision: int):
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isinf(v) or math.isnan(v):
            return _fmt(v, precision)
        return float(f"{v:.{precision}g}")
    return str(value)


class Emitter:
    """Collects named tables and writes them in the requested format."""

    def __init__(self, fmt: str, precision: int, seed: int, stream):
        self.fmt = fmt
        self.precision = precision
        self.seed = seed
        self.stream = stream
        self.tables = []  # (name, columns, rows)

    def add(self, name: str, columns, rows) -> None:
        self.tables.append((name, list(columns), [list(r) for r in rows]))

    def flush(self) -> None:
        if self.fmt == "json":
            doc = {"tool": "tailbound", "version": __version__,
                   "seed": self.seed, "tables": {}}
            for name, cols, rows in self.tables:
                doc["tables"][name] = [
                    {c: _json_value(v, self.precision) for c, v in zip(cols, row)}
                    for row in rows]
            self.stream.write(json.dumps(doc, indent=2) + "\n")
            return
        sep = "\t" if self.fmt == "tsv" else ","
        self.stream.write(f"# tailbound {__version__} seed={self.seed}\n")
        for i, (name, cols, rows) in enumerate(self.tables):
            if i:
                self.stream.write("\n")
            self.stream.write(f"# table: {name}\n")
            self.stream.write(sep.join(cols) + "\n")
            for row in rows:
                self.stream.write(
                    sep.join(_fmt(v, self.precision) for v in row) + "\n")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliDataError(str(exc)) from exc


def _load_sample(path: str) -> bounds.SortedSample:
    """Accepts either a date,close price CSV or one value per line."""
    text = _read_text(path)
    first = text.lstrip().splitlines()[0] if text.strip() else ""
    if first.lower().replace(" ", "").startswith("date,close"):
        prices = returns.load_prices(text)
        return returns.negative_losses(returns.log_returns(prices))
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(float(line))
        except ValueError as exc:
            raise CliDataError(f"line {lineno}: not a number: {line!r}") from exc
    if not values:
        raise CliDataError("input contains no values")
    return bounds.SortedSample.from_unsorted(np.array(values))


def _load_returns(path: str) -> returns.ReturnsSeries:
    if path == "@fixture":
        ref = resources.files("tailbound").joinpath("data", FIXTURE_NAME)
        text = ref.read_text(encoding="utf-8")
    else:
        text = _read_text(path)
    prices = returns.load_prices(text)
    return returns.log_returns(prices)


def _build_dist(args) -> dists.Distribution:
    kind = args.kind
    if kind == "exponential":
        return dists.Exponential(rate=args.rate)
    if kind == "halfnormal":
        sigma = args.sigma if args.sigma is not None else math.sqrt(math.pi / 2.0)
        return dists.HalfNormal(sigma=sigma)
    if kind == "pareto":
        if args.alpha is None:
            raise CliDataError("--alpha is required for pareto")
        return dists.ParetoI(alpha=args.alpha, mu=args.mu if args.mu is not None else 1.0)
    if kind == "location-pareto":
        if args.alpha is None:
            raise CliDataError("--alpha is required for location-pareto")
        return dists.LocationPareto(alpha=args.alpha,
                                    mu=args.mu if args.mu is not None else 0.0,
                                    delta=args.delta)
    raise CliDataError(f"unknown distribution kind {kind!r}")


def _add_dist_flags(parser) -> None:
    parser.add_argument("--kind", required=True,
                        choices=["exponential", "halfnormal", "pareto",
                                 "location-pareto"])
    parser.add_argument("--rate", type=float, default=1.0)
    parser.add_argument("--sigma", type=float, default=None)
    parser.add_argument("--alpha", type=float, default=None)
    parser.add_argument("--mu", type=float, default=None)
    parser.add_argument("--delta", type=float, default=1.0)


def cmd_dist(args, emit: Emitter) -> None:
    dist = _build_dist(args)
    rows = [("mean", dist.mean())]
    if args.at is not None:
        nu = args.at
        rows += [
            ("pdf", dist.pdf(nu)),
            ("cdf", dist.cdf(nu)),
            ("tail", dists.tail(dist, nu)),
            ("partial_expectation", dist.partial_expectation(nu)),
            ("improved_bound", dists.improved_markov_bound(dist, nu)),
            ("traditional_bound", dists.traditional_markov_bound(dist, nu)),
            ("markov_error", dists.markov_error(dist, nu)),
        ]
        try:
            rows.append((f"moment_bound_k{args.k:g}",
                         dists.moment_markov_bound(dist, nu, args.k)))
        except dists.InfiniteMomentError:
            rows.append((f"moment_bound_k{args.k:g}", math.inf))
    if args.p is not None:
        rows.append((f"quantile_{args.p:g}", dist.quantile(args.p)))
    emit.add("dist", ["quantity", "value"], rows)


def cmd_bound(args, emit: Emitter) -> None:
    sample_data = _load_sample(args.input)
    reports = [
        bounds.empirical_bound(sample_data, args.nu),
        bounds.scaled_bound(sample_data, args.nu, args.a),
    ]
    rows = [(r.method, args.nu, args.a, r.bound, r.advisory or "")
            for r in reports]
    if args.nu <= sample_data.maximum():
        r = bounds.partial_mean_bound(sample_data, args.nu)
        rows.append((r.method, args.nu, args.a, r.bound, r.advisory or ""))
    else:
        rows.append(("partial-mean", args.nu, args.a, math.nan,
                     "undefined for nu above the sample maximum"))
    emit.add("bounds", ["method", "nu", "a", "bound", "advisory"], rows)


def cmd_simulate(args, emit: Emitter) -> None:
    dist = _build_dist(args)
    config = montecarlo.SimulationConfig(dist=dist, n=args.n,
                                         replicates=args.replicates,
                                         base_seed=args.seed)
    if args.table == "table1":
        row = run = montecarlo.run_table1(config)
        cols = ["kind", "n", "replicates", "q1", "min", "q0.01", "median",
                "q0.99", "max", "mean"]
        values = [args.kind, run.n, run.replicates, run.q1,
                  run.summary["min"], run.summary["q0.01"],
                  run.summary["median"], run.summary["q0.99"],
                  run.summary["max"], run.summary["mean"]]
        for a, p in sorted(row.exceed_prob.items()):
            cols.append(f"exceed_a{a:g}")
            values.append(p)
        emit.add("table1", cols, [values])
    else:
        cells = montecarlo.run_table2(config)
        rows = [(args.kind, c.n, c.multiplier, c.probability, c.quantile,
                 c.median, c.exceed_prob) for c in cells]
        emit.add("table2",
                 ["kind", "n", "multiplier", "probability", "quantile",
                  "median", "exceed_prob"], rows)


def cmd_fit(args, emit: Emitter) -> None:
    sample_data = _load_sample(args.input)
    if args.method == "clauset":
        scan = evtfit.select_threshold_clauset(sample_data)
        rows = [(c.mu, c.n_exceed, c.fit, c.statistic, i == scan.selected)
                for i, c in enumerate(scan.candidates)]
        emit.add("threshold_scan",
                 ["mu", "n_exceed", "alpha", "ks", "selected"], rows)
    else:
        policy = "lowest-pass" if args.method == "cv-lowest" else "best-pass"
        scan = evtfit.select_threshold_cv(sample_data, policy=policy,
                                          base_seed=args.seed)
        rows = [(c.mu, c.n_exceed, c.fit.xi, c.fit.beta, c.statistic,
                 c.p_value, i == scan.selected)
                for i, c in enumerate(scan.candidates)]
        emit.add("threshold_scan",
                 ["mu", "n_exceed", "xi", "beta", "cv", "p_value", "selected"],
                 rows)
    sel = scan.selected_candidate
    if sel is None:
        raise CliDataError("no threshold candidate was selected")
    fit = (evtfit.fit_gpd_above(sample_data, sel.mu)
           if args.method == "clauset" else sel.fit)
    hill = evtfit.fit_hill(sample_data, sel.mu) if sel.mu > 0 else math.inf
    emit.add("selected_fit",
             ["method", "mu", "n_exceed", "xi", "beta", "alpha", "hill_alpha"],
             [(args.method, fit.mu, fit.n_exceed, fit.xi, fit.beta,
               fit.alpha, hill)])


def cmd_analyze(args, emit: Emitter) -> None:
    rets = _load_returns(args.prices)
    thresholds = [float(t) for t in args.thresholds.split(",")]
    fit_thresholds = [float(t) for t in args.fit_thresholds.split(",")]
    report = returns.full_analysis(rets, thresholds,
                                   fit_thresholds=fit_thresholds)
    g = report.gaussian
    emit.add("summary",
             ["n_total", "n_positive", "n_negative", "n_zero", "max_loss",
              "gaussian_mu", "gaussian_sigma", "gaussian_threshold",
              "gaussian_prob", "gaussian_period_years"],
             [(report.n_total, report.n_positive, report.n_negative,
               report.n_zero, report.max_loss, g.mu_hat, g.sigma_hat,
               g.loss_threshold, g.prob, g.return_period_years)])
    bound_rows = []
    for nu in report.thresholds:
        bound_rows.append(("eB", nu, report.eb_bounds[nu], "",
                           report.eb_return_periods[nu]))
        bound_rows.append(("empirical", nu, report.empirical_probs[nu],
                           report.empirical_counts[nu],
                           report.empirical_periods[nu]))
        for model in report.models:
            if nu in model.probs:
                bound_rows.append((model.label, nu, model.probs[nu],
                                   model.expected_counts[nu],
                                   model.return_periods[nu]))
    emit.add("tail_probabilities",
             ["source", "nu", "probability", "expected_count",
              "return_period_years"], bound_rows)
    model_rows = [(m.label, m.fit.mu, m.fit.alpha, m.fit.beta, m.fit.xi,
                   m.fit.delta, m.fit.n_exceed, m.q1, m.q1_below_max)
                  for m in report.models]
    emit.add("fitted_models",
             ["label", "mu", "alpha", "beta", "xi", "delta", "n_exceed",
              "q1", "q1_below_max"], model_rows)
    if args.emit_plot_data or args.plot:
        fits = [m.fit for m in report.models]
        data = returns.emit_tail_plot_data(rets, fits)
        if args.emit_plot_data:
            cols = list(data.keys())
            rows = list(zip(*[data[c] for c in cols]))
            with open(args.emit_plot_data, "w", encoding="utf-8") as fh:
                sub = Emitter(emit.fmt if emit.fmt != "json" else "csv",
                              emit.precision, emit.seed, fh)
                sub.add("tail_plot_data", cols, rows)
                sub.flush()
        if args.plot:
            from . import plots
            plots.render_tail_plot(data, args.plot)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailbound",
        description="Tail probability bounds from the sample maximum.")
    parser.add_argument("--version", action="version",
                        version=f"tailbound {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED,
                        help=f"base seed for all randomness (default {DEFAULT_SEED})")
    common.add_argument("--format", choices=["csv", "tsv", "json"],
                        default="csv")
    common.add_argument("--replicates", type=int, default=DEFAULT_REPLICATES)
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION,
                        help="significant digits for printed numbers")

    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("dist", parents=[common],
                       help="evaluate a named distribution and its bounds")
    _add_dist_flags(p)
    p.add_argument("--at", type=float, default=None, help="threshold nu")
    p.add_argument("--p", type=float, default=None, help="quantile level")
    p.add_argument("--k", type=float, default=2.0, help="moment order")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("bound", parents=[common],
                       help="empirical bounds on a sample file")
    p.add_argument("--input", required=True, help="sample file or - for stdin")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("simulate", parents=[common],
                       help="Monte Carlo validation tables")
    p.add_argument("table", choices=["table1", "table2"])
    _add_dist_flags(p)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", parents=[common],
                       help="threshold selection and Pareto tail fit")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=["clauset", "cv-lowest", "cv-best"],
                   default="clauset")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("analyze", parents=[common],
                       help="full returns pipeline on a price CSV")
    p.add_argument("--prices", default="@fixture",
                   help="price CSV, - for stdin, or @fixture for the bundled data")
    p.add_argument("--thresholds", default="13.842,15,20")
    p.add_argument("--fit-thresholds", default="0,1.4,1.75")
    p.add_argument("--emit-plot-data", default=None, metavar="PATH",
                   help="write tail curve grid to PATH")
    p.add_argument("--plot", default=None, metavar="PATH",
                   help="render the tail comparison figure to PATH")
    p.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    emit = Emitter(args.format, args.precision, args.seed, sys.stdout)
    try:
        args.func(args, emit)
    except (CliDataError, returns.PriceParseError, evtfit.DegenerateDataError,
            dists.InvalidParameterError, ValueError) as exc:
        print(f"tailbound: error: {exc}", file=sys.stderr)
        return 1
    emit.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
