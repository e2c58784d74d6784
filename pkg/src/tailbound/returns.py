"""Financial-returns pipeline: price ingestion, daily log-returns,
loss extraction, model-free unconditional tail bounds, loss rankings,
the Gaussian sanity check, and the combined per-threshold report that
compares the empirical bound with fitted peak-over-threshold models.
"""
from __future__ import annotations

import csv
import datetime as dt
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from . import evtfit
from .bounds import SortedSample, TailBoundReport

TRADING_DAYS_PER_YEAR = 250.0


class PriceParseError(ValueError):
    """Malformed price input (bad header, row, value or date order)."""


@dataclass(frozen=True)
class PriceSeries:
    dates: list           # ascending, unique calendar dates
    closes: np.ndarray    # positive floats, same length

    def __post_init__(self):
        if len(self.dates) < 2:
            raise PriceParseError("need at least 2 price rows")
        if np.any(np.asarray(self.closes) <= 0):
            raise PriceParseError("closes must be positive")
        for a, b in zip(self.dates, self.dates[1:]):
            if not a < b:
                raise PriceParseError(f"dates not strictly increasing at {b}")

    def __len__(self) -> int:
        return len(self.dates)


@dataclass(frozen=True)
class ReturnsSeries:
    """Dated daily log-returns in percent: R_t = 100 ln(S_t/S_{t-1})."""

    dates: list
    values: np.ndarray

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def n_positive(self) -> int:
        return int(np.sum(self.values > 0))

    @property
    def n_negative(self) -> int:
        return int(np.sum(self.values < 0))

    @property
    def n_zero(self) -> int:
        return int(np.sum(self.values == 0))


def load_prices(source) -> PriceSeries:
    """Parse a `date,close` CSV (ISO dates) from a path, stream or text."""
    if isinstance(source, str) and "\n" not in source:
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return _parse_price_rows(fh)
    if isinstance(source, str):
        return _parse_price_rows(io.StringIO(source))
    return _parse_price_rows(source)


def _parse_price_rows(fh) -> PriceSeries:
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise PriceParseError("empty input; expected header 'date,close'")
    if [h.strip().lower() for h in header] != ["date", "close"]:
        raise PriceParseError(
            f"expected header 'date,close', got {','.join(header)!r}")
    dates, closes, seen = [], [], set()
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise PriceParseError(f"line {lineno}: expected 2 fields, got {len(row)}")
        try:
            d = dt.date.fromisoformat(row[0].strip())
            c = float(row[1])
        except ValueError as exc:
            raise PriceParseError(f"line {lineno}: {exc}") from exc
        if c <= 0:
            raise PriceParseError(f"line {lineno}: non-positive close {c}")
        if d in seen:
            raise PriceParseError(f"line {lineno}: duplicate date {d}")
        seen.add(d)
        dates.append(d)
        closes.append(c)
    order = sorted(range(len(dates)), key=lambda i: dates[i])
    return PriceSeries(dates=[dates[i] for i in order],
                       closes=np.array([closes[i] for i in order]))


def log_returns(prices: PriceSeries) -> ReturnsSeries:
    """Daily percent log-returns; one fewer entry than prices."""
    r = 100.0 * np.diff(np.log(prices.closes))
    return ReturnsSeries(dates=prices.dates[1:], values=r)


def negative_losses(returns: ReturnsSeries) -> SortedSample:
    """Losses: the negative returns with sign flipped, ascending."""
    losses = -returns.values[returns.values < 0]
    if losses.size == 0:
        raise ValueError("no negative returns in the series")
    return SortedSample.from_unsorted(losses)


def unconditional_bound(returns: ReturnsSeries, nu: float) -> TailBoundReport:
    """eB on losses times the negative-return fraction: max_loss/(n_total*nu)."""
    if nu <= 0:
        raise ValueError(f"nu must be > 0, got {nu}")
    losses = negative_losses(returns)
    return TailBoundReport(
        threshold=nu,
        bound=losses.maximum() / (returns.n * nu),
        method="empirical-eB",
        inputs={"n": returns.n, "n_negative": losses.n, "max": losses.maximum()},
    )


@dataclass(frozen=True)
class LossTable:
    granularity: str       # daily | monthly | yearly
    rows: list             # (rank, label date, loss), loss descending


def largest_losses(returns: ReturnsSeries, granularity: str, k: int) -> LossTable:
    """Top-k losses; monthly/yearly take each calendar period's worst day.

    Period rows are labeled with the period's last trading date; ties
    break toward the earlier period.
    """
    if granularity not in ("daily", "monthly", "yearly"):
        raise ValueError(f"unknown granularity {granularity!r}")
    losses = [(-v, d) for d, v in zip(returns.dates, returns.values) if v < 0]
    if granularity == "daily":
        ranked = sorted(losses, key=lambda t: (-t[0], t[1]))
        rows = [(i + 1, d, loss) for i, (loss, d) in enumerate(ranked[:k])]
        return LossTable(granularity="daily", rows=rows)
    keyfn = (lambda d: (d.year, d.month)) if granularity == "monthly" else (lambda d: d.year)
    per_period: dict = {}
    last_date: dict = {}
    for d in returns.dates:
        key = keyfn(d)
        if key not in last_date or d > last_date[key]:
            last_date[key] = d
    for loss, d in losses:
        key = keyfn(d)
        if key not in per_period or loss > per_period[key][0]:
            per_period[key] = (loss, d)
    ranked = sorted(((loss, key) for key, (loss, _) in per_period.items()),
                    key=lambda t: (-t[0], t[1]))
    rows = [(i + 1, last_date[key], loss) for i, (loss, key) in enumerate(ranked[:k])]
    return LossTable(granularity=granularity, rows=rows)


@dataclass(frozen=True)
class GaussianRefutation:
    mu_hat: float
    sigma_hat: float
    loss_threshold: float
    prob: float
    return_period_years: float


def gaussian_refutation(returns: ReturnsSeries, loss_threshold: float) -> GaussianRefutation:
    """Moment-fit Gaussian tail probability of a loss beyond the threshold."""
    mu_hat = float(returns.values.mean())
    sigma_hat = float(returns.values.std(ddof=1))
    prob = float(ndtr((-loss_threshold - mu_hat) / sigma_hat))
    period = math.inf if prob == 0 else 1.0 / (prob * TRADING_DAYS_PER_YEAR)
    return GaussianRefutation(mu_hat=mu_hat, sigma_hat=sigma_hat,
                              loss_threshold=loss_threshold, prob=prob,
                              return_period_years=period)


@dataclass(frozen=True)
class ModelRow:
    label: str
    fit: evtfit.GpdFit
    exceed_fraction: float      # exceedances of mu over total return count
    probs: dict                 # threshold -> unconditional probability
    expected_counts: dict       # threshold -> prob * total return count
    return_periods: dict        # threshold -> years
    q1: float                   # fitted q1 of the exceedance subsample
    q1_below_max: bool
    q1_flags: tuple             # the three equivalent coverage booleans


@dataclass(frozen=True)
class AnalysisReport:
    n_total: int
    n_positive: int
    n_negative: int
    n_zero: int
    max_loss: float
    thresholds: list
    eb_bounds: dict             # threshold -> unconditional eB bound
    eb_return_periods: dict
    empirical_counts: dict      # threshold -> observed losses above it
    empirical_probs: dict
    empirical_periods: dict
    models: list                # ModelRow per fitted model
    gaussian: GaussianRefutation


def fit_loss_models(returns: ReturnsSeries, fit_thresholds) -> list:
    """GPD fits of the loss exceedances above each requested threshold."""
    losses = negative_losses(returns)
    fits = []
    for mu in fit_thresholds:
        fits.append(evtfit.fit_gpd_above(losses, float(mu)))
    return fits


def full_analysis(returns: ReturnsSeries, thresholds,
                  fit_thresholds=(0.0, 1.4, 1.75),
                  gaussian_threshold: float = 10.0) -> AnalysisReport:
    """Per-threshold comparison of the empirical bound and fitted models."""
    losses = negative_losses(returns)
    n_total = returns.n
    thresholds = [float(t) for t in thresholds]
    eb_bounds, eb_periods = {}, {}
    emp_counts, emp_probs, emp_periods = {}, {}, {}
    for nu in thresholds:
        b = unconditional_bound(returns, nu).bound
        eb_bounds[nu] = b
        eb_periods[nu] = evtfit.return_period(b, TRADING_DAYS_PER_YEAR)
        c = int(np.sum(losses.values > nu))
        emp_counts[nu] = c
        emp_probs[nu] = c / n_total
        emp_periods[nu] = (math.inf if c == 0
                           else evtfit.return_period(c / n_total, TRADING_DAYS_PER_YEAR))
    models = []
    for i, fit in enumerate(fit_loss_models(returns, fit_thresholds)):
        frac = fit.n_exceed / n_total
        probs, counts, periods = {}, {}, {}
        for nu in thresholds:
            if nu < fit.mu:
                continue
            p = evtfit.lpd_tail_prob(fit, nu, exceed_fraction=frac)
            probs[nu] = p
            counts[nu] = p * n_total
            periods[nu] = evtfit.return_period(p, TRADING_DAYS_PER_YEAR)
        q1 = evtfit.fitted_q1(fit)
        flags = _q1_flags(losses, fit, q1)
        models.append(ModelRow(label=f"LPD-{i + 1}", fit=fit,
                               exceed_fraction=frac, probs=probs,
                               expected_counts=counts, return_periods=periods,
                               q1=q1, q1_below_max=q1 < losses.maximum(),
                               q1_flags=flags))
    return AnalysisReport(
        n_total=n_total, n_positive=returns.n_positive,
        n_negative=returns.n_negative, n_zero=returns.n_zero,
        max_loss=losses.maximum(), thresholds=thresholds,
        eb_bounds=eb_bounds, eb_return_periods=eb_periods,
        empirical_counts=emp_counts, empirical_probs=emp_probs,
        empirical_periods=emp_periods, models=models,
        gaussian=gaussian_refutation(returns, gaussian_threshold),
    )


def _q1_flags(losses: SortedSample, fit: evtfit.GpdFit, q1: float) -> tuple:
    """Three equivalent coverage claims for the exceedance subsample."""
    exceed = losses.values[losses.values > fit.mu]
    k = exceed.size
    xmax = float(exceed.max())
    tail_at_max = fit.conditional_tail(xmax)
    tail_at_q1 = fit.conditional_tail(max(q1, fit.mu))
    return (
        xmax >= q1,
        tail_at_max <= 1.0 / k,
        tail_at_q1 <= xmax / (k * q1) if q1 > 0 else True,
    )


def emit_tail_plot_data(returns: ReturnsSeries, fits, nu_min: float = 4.5,
                        nu_max: float = 20.0, points: int = 400) -> dict:
    """Plot-ready tail curves: empirical step, each fitted model, and eB.

    The eB curve starts at the second-largest loss (the sample's own q1
    anchor); below it the column is NaN.  Returns a dict of equal-length
    arrays keyed nu, empirical, lpd1..lpdK, eb.
    """
    losses = negative_losses(returns)
    n_total = returns.n
    grid = np.linspace(nu_min, nu_max, points)
    jumps = np.sort(losses.values[(losses.values >= nu_min)
                                  & (losses.values <= nu_max)])
    grid = np.unique(np.concatenate([grid, jumps, jumps - 1e-9]))
    empirical = np.array([np.sum(losses.values > nu) / n_total for nu in grid])
    out = {"nu": grid, "empirical": empirical}
    for i, fit in enumerate(fits):
        frac = fit.n_exceed / n_total
        col = np.full(grid.size, np.nan)
        mask = grid >= fit.mu
        col[mask] = [evtfit.lpd_tail_prob(fit, float(nu), frac)
                     for nu in grid[mask]]
        out[f"lpd{i + 1}"] = col
    anchor = float(losses.values[-2]) if losses.n >= 2 else losses.maximum()
    eb = np.where(grid >= anchor, losses.maximum() / (n_total * grid), np.nan)
    out["eb"] = eb
    return out
