"""Peaks-over-threshold fitting: GPD maximum likelihood, Hill/power-law
estimation, KS distance, and two automatic threshold selectors
(KS minimization over power-law fits; residual-CV with a parametric
bootstrap p-value).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .bounds import SortedSample

XI_LOW, XI_HIGH = -0.99, 10.0


class DegenerateDataError(ValueError):
    """The exceedance sample carries no usable information for a fit."""


@dataclass(frozen=True)
class GpdFit:
    """Fitted generalized Pareto tail above threshold ``mu``.

    ``xi`` is the extreme value index, ``beta`` the scale of the
    exceedances y = x - mu; ``alpha`` = 1/xi (inf when xi <= 0).
    """

    mu: float
    xi: float
    beta: float
    n_exceed: int
    loglik: float
    converged: bool = True

    @property
    def alpha(self) -> float:
        return 1.0 / self.xi if self.xi > 0 else math.inf

    @property
    def delta(self) -> float:
        """Origin shift of the equivalent location-Pareto model."""
        if self.xi <= 0:
            return math.inf
        return self.alpha * self.beta - self.mu

    def exceedance_cdf(self, y) -> np.ndarray:
        """CDF of the exceedance y = x - mu under the fitted GPD."""
        y = np.asarray(y, dtype=float)
        if abs(self.xi) < 1e-12:
            return -np.expm1(-y / self.beta)
        z = 1.0 + self.xi * y / self.beta
        z = np.maximum(z, 1e-300)
        out = 1.0 - z ** (-1.0 / self.xi)
        if self.xi < 0:
            out = np.where(y >= -self.beta / self.xi, 1.0, out)
        return np.where(y <= 0, 0.0, out)

    def exceedance_quantile(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if abs(self.xi) < 1e-12:
            return -self.beta * np.log1p(-p)
        return self.beta / self.xi * ((1.0 - p) ** -self.xi - 1.0)

    def conditional_tail(self, nu: float) -> float:
        """Pr{X > nu | X > mu} under the fitted model, nu >= mu."""
        if nu < self.mu:
            raise ValueError("nu must be >= the fit threshold")
        return float(1.0 - self.exceedance_cdf(nu - self.mu))


@dataclass(frozen=True)
class ThresholdCandidate:
    mu: float
    fit: "GpdFit | float"      # GpdFit for CV scans, Hill alpha for Clauset
    n_exceed: int
    statistic: float           # KS distance or residual CV
    p_value: float | None = None


@dataclass(frozen=True)
class ThresholdScan:
    candidates: list
    selected: int | None
    method: str

    @property
    def selected_candidate(self) -> ThresholdCandidate | None:
        if self.selected is None:
            return None
        return self.candidates[self.selected]


def _gpd_loglik(y: np.ndarray, xi: float, beta: float) -> float:
    k = y.size
    if beta <= 0:
        return -math.inf
    if abs(xi) < 1e-12:
        return -k * math.log(beta) - float(np.sum(y)) / beta
    z = 1.0 + xi * y / beta
    if np.any(z <= 0):
        return -math.inf
    return -k * math.log(beta) - (1.0 + 1.0 / xi) * float(np.sum(np.log(z)))


def _profile_beta(y: np.ndarray, xi: float) -> float:
    """Beta maximizing the GPD likelihood at fixed xi."""
    k = y.size
    ybar = float(y.mean())
    if abs(xi) < 1e-12:
        return ybar
    ymax = float(y.max())

    def score(beta):
        # Stationarity: (1+xi) * sum(y/(beta+xi*y)) - k = 0
        return (1.0 + xi) * float(np.sum(y / (beta + xi * y))) - k

    if xi > 0:
        lo = ybar * 1e-8
        hi = ybar * (1.0 + xi) * 10.0
        while score(hi) > 0:
            hi *= 4.0
            if hi > 1e12 * ybar:
                return hi
    else:
        lo = -xi * ymax * (1.0 + 1e-10)
        if score(lo) < 0:
            return lo * (1.0 + 1e-9)
        hi = max(ybar, -xi * ymax) * 10.0
        while score(hi) > 0:
            hi *= 4.0
            if hi > 1e12 * ybar:
                return hi
    return brentq(score, lo, hi, xtol=1e-12 * ybar, rtol=1e-12)


def fit_gpd_mle(exceedances) -> GpdFit:
    """Maximum-likelihood GPD fit to positive exceedances.

    Profile likelihood: for each xi the scale is solved in closed root
    form, then xi is optimized by a bracketed 1-D search over
    (-0.99, 10).  The exponential limit xi = 0 is kept when it wins.
    """
    y = np.asarray(exceedances, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise DegenerateDataError("need at least 2 exceedances")
    if np.any(y <= 0):
        raise ValueError("exceedances must be strictly positive")
    if float(y.max()) == float(y.min()):
        raise DegenerateDataError("all exceedances are equal")

    def neg_profile(xi):
        beta = _profile_beta(y, xi)
        return -_gpd_loglik(y, xi, beta)

    # Coarse grid to locate the basin, then Brent refinement around it.
    grid = np.concatenate([
        np.linspace(XI_LOW + 1e-3, 0.0, 21),
        np.linspace(0.0, 2.0, 41)[1:],
        np.linspace(2.0, XI_HIGH - 1e-3, 17)[1:],
    ])
    vals = np.array([neg_profile(x) for x in grid])
    i = int(np.argmin(vals))
    lo = grid[max(0, i - 1)]
    hi = grid[min(grid.size - 1, i + 1)]
    if lo == hi:
        xi_hat = float(lo)
    else:
        res = minimize_scalar(neg_profile, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-8})
        xi_hat = float(res.x)
        if neg_profile(xi_hat) > vals[i]:
            xi_hat = float(grid[i])
    # Snap to the exponential limit when it is at least as good.
    ll_exp = _gpd_loglik(y, 0.0, float(y.mean()))
    beta_hat = _profile_beta(y, xi_hat)
    ll_hat = _gpd_loglik(y, xi_hat, beta_hat)
    if ll_exp >= ll_hat:
        xi_hat, beta_hat, ll_hat = 0.0, float(y.mean()), ll_exp
    converged = XI_LOW + 1e-2 < xi_hat < XI_HIGH - 1e-2
    return GpdFit(mu=0.0, xi=xi_hat, beta=beta_hat, n_exceed=y.size,
                  loglik=ll_hat, converged=converged)


def fit_gpd_above(sample: SortedSample, mu: float) -> GpdFit:
    """GPD fit to the exceedances of ``mu`` within a sorted sample."""
    y = sample.values[sample.values > mu] - mu
    fit = fit_gpd_mle(y)
    return GpdFit(mu=mu, xi=fit.xi, beta=fit.beta, n_exceed=fit.n_exceed,
                  loglik=fit.loglik, converged=fit.converged)


def fit_hill(sample: SortedSample, mu: float) -> float:
    """Conditional power-law MLE: alpha = k / sum(log(x_i/mu)), x_i > mu."""
    if mu <= 0:
        raise ValueError(f"mu must be > 0, got {mu}")
    x = sample.values[sample.values > mu]
    if x.size < 2:
        raise DegenerateDataError("need at least 2 exceedances above mu")
    return float(x.size / np.sum(np.log(x / mu)))


def ks_distance(values, cdf) -> float:
    """Kolmogorov-Smirnov sup distance of sorted values against a CDF.

    ``cdf`` is a callable evaluated vectorized; both step endpoints of the
    empirical CDF are used.
    """
    x = np.sort(np.asarray(values, dtype=float))
    k = x.size
    if k == 0:
        raise DegenerateDataError("empty sample")
    f = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, k + 1) / k
    lower = np.arange(0, k) / k
    return float(max(np.max(np.abs(upper - f)), np.max(np.abs(f - lower))))


def power_law_cdf(mu: float, alpha: float):
    def cdf(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= mu, 0.0, 1.0 - (mu / np.maximum(x, mu)) ** alpha)
    return cdf


def select_threshold_clauset(sample: SortedSample, candidates=None,
                             min_exceed: int = 5) -> ThresholdScan:
    """Pick the threshold whose power-law fit has minimal KS distance.

    Candidates default to the distinct sample values below the top
    ``min_exceed`` order statistics; ties break toward the smaller mu.
    """
    if sample.n < 10:
        raise DegenerateDataError("need at least 10 observations")
    if candidates is None:
        cutoff = sample.values[-min_exceed]
        candidates = np.unique(sample.values[sample.values < cutoff])
    candidates = [float(c) for c in candidates if c > 0]
    if not candidates:
        raise DegenerateDataError("no positive candidate thresholds")
    rows = []
    for mu in candidates:
        x = sample.values[sample.values > mu]
        if x.size < 2:
            continue
        alpha = fit_hill(sample, mu)
        stat = ks_distance(x, power_law_cdf(mu, alpha))
        rows.append(ThresholdCandidate(mu=mu, fit=alpha, n_exceed=x.size,
                                       statistic=stat))
    if not rows:
        raise DegenerateDataError("no candidate produced a fit")
    best = min(range(len(rows)), key=lambda i: (rows[i].statistic, rows[i].mu))
    return ThresholdScan(candidates=rows, selected=best, method="clauset-ks")


def residual_cv(values) -> float:
    """Sample coefficient of variation (sd with n-1 denominator over mean)."""
    y = np.asarray(values, dtype=float)
    if y.size < 2:
        raise DegenerateDataError("need at least 2 values")
    m = float(y.mean())
    if m == 0:
        raise DegenerateDataError("zero mean")
    return float(y.std(ddof=1) / m)


def _cv_bootstrap_pvalue(fit: GpdFit, cv_obs: float, n: int, B: int,
                         seed_key) -> float:
    """Two-sided parametric bootstrap p-value of the CV under the fit."""
    stats = np.empty(B)
    for b in range(B):
        rng = np.random.default_rng(list(seed_key) + [b])
        y = fit.exceedance_quantile(rng.random(n))
        stats[b] = y.std(ddof=1) / y.mean()
    lo = float(np.mean(stats <= cv_obs))
    hi = float(np.mean(stats >= cv_obs))
    return min(1.0, 2.0 * min(lo, hi) + 1.0 / B)


DEFAULT_CV_GRID = tuple(np.round(np.arange(0.0, 0.901, 0.05), 2))


def select_threshold_cv(sample: SortedSample, policy: str = "lowest-pass",
                        p_threshold: float = 0.10, grid=DEFAULT_CV_GRID,
                        bootstrap: int = 500, base_seed: int = 0) -> ThresholdScan:
    """Residual-CV threshold scan over a grid of sample quantiles.

    Each candidate threshold gets a GPD fit and a seeded parametric
    bootstrap p-value for its residual coefficient of variation.  Policy
    ``lowest-pass`` keeps the smallest mu with p > p_threshold (the first
    grid point maps to mu = 0, i.e. the whole sample); ``best-pass``
    keeps the argmax p.
    """
    if sample.n < 20:
        raise DegenerateDataError("need at least 20 observations")
    if policy not in ("lowest-pass", "best-pass"):
        raise ValueError(f"unknown policy {policy!r}")
    rows = []
    seen = set()
    for j, prob in enumerate(grid):
        mu = 0.0 if prob == 0.0 else float(np.quantile(sample.values, prob))
        if mu in seen:
            continue
        seen.add(mu)
        y = sample.values[sample.values > mu] - mu
        if y.size < 10:
            continue
        fit = fit_gpd_above(sample, mu)
        cv = residual_cv(y)
        p = _cv_bootstrap_pvalue(fit, cv, y.size, bootstrap, (base_seed, j))
        rows.append(ThresholdCandidate(mu=mu, fit=fit, n_exceed=y.size,
                                       statistic=cv, p_value=p))
    if not rows:
        raise DegenerateDataError("no usable candidate thresholds")
    if policy == "lowest-pass":
        selected = next((i for i, r in enumerate(rows)
                         if r.p_value > p_threshold), None)
        method = "cv-lowest"
    else:
        selected = max(range(len(rows)), key=lambda i: rows[i].p_value)
        method = "cv-best"
    return ThresholdScan(candidates=rows, selected=selected, method=method)


def lpd_tail_prob(fit: GpdFit, nu: float, exceed_fraction: float = 1.0) -> float:
    """Tail probability at nu from a fitted exceedance model.

    ``exceed_fraction`` converts the conditional tail Pr{X > nu | X > mu}
    into an unconditional probability; pass the empirical fraction of
    observations above the fit threshold.
    """
    if nu < fit.mu:
        raise ValueError("nu must be >= the fit threshold")
    if not (0.0 < exceed_fraction <= 1.0):
        raise ValueError("exceed_fraction must be in (0, 1]")
    return exceed_fraction * fit.conditional_tail(nu)


def return_period(prob: float, trading_days_per_year: float = 250.0) -> float:
    """Expected waiting time in years for a daily event of probability prob."""
    if prob <= 0:
        raise ValueError(f"probability must be > 0, got {prob}")
    return 1.0 / (prob * trading_days_per_year)


def fitted_q1(fit: GpdFit) -> float:
    """Level whose conditional exceedance probability is 1/n_exceed.

    This is the fitted analogue of the sample quantile q1 = Q(1 - 1/n) for
    the exceedance subsample the model was estimated on.
    """
    return fit.mu + float(fit.exceedance_quantile(1.0 - 1.0 / fit.n_exceed))
