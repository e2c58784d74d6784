"""GPD maximum likelihood, Hill estimation, and threshold selection."""
import math

import numpy as np
import pytest

from tailbound import bounds, dists, evtfit


def gpd_sample(xi, beta, n, seed):
    u = np.random.default_rng(seed).random(n)
    if xi == 0.0:
        return -beta * np.log1p(-u)
    return beta / xi * ((1 - u) ** -xi - 1)


def test_mle_recovers_gpd_parameters():
    y = gpd_sample(xi=0.25, beta=1.0, n=20000, seed=1)
    fit = evtfit.fit_gpd_mle(y)
    assert fit.converged
    assert fit.xi == pytest.approx(0.25, abs=0.02)
    assert fit.beta == pytest.approx(1.0, rel=0.03)


def test_mle_handles_exponential_limit():
    y = gpd_sample(xi=0.0, beta=2.0, n=20000, seed=2)
    fit = evtfit.fit_gpd_mle(y)
    assert abs(fit.xi) < 0.03
    assert fit.beta == pytest.approx(2.0, rel=0.05)


def test_fit_above_threshold_counts_exceedances():
    x = np.concatenate([np.linspace(0.1, 1.0, 50),
                        gpd_sample(0.3, 1.0, 200, seed=3) + 1.0])
    s = bounds.SortedSample.from_unsorted(x)
    fit = evtfit.fit_gpd_above(s, mu=1.0)
    assert fit.mu == 1.0
    assert fit.n_exceed == int(np.sum(x > 1.0))


def test_gpd_fit_derived_parameters():
    fit = evtfit.GpdFit(mu=1.0, xi=0.25, beta=0.5, n_exceed=100, loglik=0.0)
    assert fit.alpha == pytest.approx(4.0)
    # beta = (mu + delta)/alpha so delta = alpha*beta - mu
    assert fit.delta == pytest.approx(4.0 * 0.5 - 1.0)


def test_hill_estimator_on_pareto():
    x = dists.sample(dists.ParetoI(alpha=3.0, mu=1.0), 50000, seed=4)
    s = bounds.SortedSample.from_unsorted(x)
    assert evtfit.fit_hill(s, mu=1.0) == pytest.approx(3.0, abs=0.05)


def test_ks_distance_uniform():
    x = np.linspace(0.01, 0.99, 99)
    d = evtfit.ks_distance(x, lambda v: v)
    assert d < 0.02


def test_power_law_cdf():
    cdf = evtfit.power_law_cdf(mu=1.0, alpha=2.0)
    assert cdf(2.0) == pytest.approx(0.75)
    assert cdf(1.0) == 0.0


def test_residual_cv_exponential_is_one():
    y = gpd_sample(0.0, 1.0, 100000, seed=5)
    assert evtfit.residual_cv(y) == pytest.approx(1.0, abs=0.02)


def test_gpd_cv_relation():
    # for a GPD the coefficient of variation is 1/sqrt(1-2 xi)
    y = gpd_sample(0.2, 1.0, 200000, seed=6)
    assert evtfit.residual_cv(y) == pytest.approx(1 / math.sqrt(1 - 0.4),
                                                  rel=0.05)


def test_lpd_tail_prob_consistency():
    fit = evtfit.GpdFit(mu=1.0, xi=0.25, beta=0.5, n_exceed=100, loglik=0.0)
    nu = 3.0
    cond = 1.0 - fit.exceedance_cdf(nu - fit.mu)
    assert evtfit.lpd_tail_prob(fit, nu, exceed_fraction=0.1) == pytest.approx(
        0.1 * cond)
    assert evtfit.lpd_tail_prob(fit, fit.mu, exceed_fraction=0.1) == pytest.approx(0.1)


def test_fitted_q1_quantile_convention():
    fit = evtfit.GpdFit(mu=1.0, xi=0.25, beta=0.5, n_exceed=100, loglik=0.0)
    q1 = evtfit.fitted_q1(fit)
    assert q1 == pytest.approx(1.0 + fit.exceedance_quantile(1 - 1 / 100))
    # a fraction 1/n_exceed of the conditional tail lies above q1
    assert 1 - fit.exceedance_cdf(q1 - 1.0) == pytest.approx(0.01)


def test_return_period():
    assert evtfit.return_period(0.001, 250) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        evtfit.return_period(0.0, 250)


def test_clauset_selects_true_threshold_region():
    rng = np.random.default_rng(7)
    body = rng.random(400) * 2.0
    tail = dists.sample(dists.ParetoI(alpha=2.5, mu=2.0), 300, seed=8)
    s = bounds.SortedSample.from_unsorted(np.concatenate([body, tail]))
    scan = evtfit.select_threshold_clauset(s)
    sel = scan.selected_candidate
    assert sel is not None
    assert 1.0 <= sel.mu <= 3.0


def test_cv_scan_deterministic_and_scale_invariant():
    x = gpd_sample(0.2, 1.0, 400, seed=9)
    s = bounds.SortedSample.from_unsorted(x)
    scan1 = evtfit.select_threshold_cv(s, bootstrap=100, base_seed=11)
    scan2 = evtfit.select_threshold_cv(s, bootstrap=100, base_seed=11)
    assert scan1.selected == scan2.selected
    assert [c.p_value for c in scan1.candidates] == [
        c.p_value for c in scan2.candidates]
    scaled = bounds.SortedSample.from_unsorted(x * 37.5)
    scan3 = evtfit.select_threshold_cv(scaled, bootstrap=100, base_seed=11)
    assert scan3.selected == scan1.selected


def test_cv_scan_policies():
    x = gpd_sample(0.2, 1.0, 300, seed=10)
    s = bounds.SortedSample.from_unsorted(x)
    low = evtfit.select_threshold_cv(s, policy="lowest-pass", bootstrap=100,
                                     base_seed=1)
    best = evtfit.select_threshold_cv(s, policy="best-pass", bootstrap=100,
                                      base_seed=1)
    sel_low, sel_best = low.selected_candidate, best.selected_candidate
    assert sel_low.p_value > 0.10
    assert sel_best.p_value == max(c.p_value for c in best.candidates)
    assert sel_low.mu <= sel_best.mu or sel_low.p_value >= 0.10


def test_degenerate_inputs_raise():
    tiny = bounds.SortedSample.from_unsorted(np.array([1.0, 2.0, 3.0]))
    with pytest.raises(evtfit.DegenerateDataError):
        evtfit.select_threshold_clauset(tiny)
    with pytest.raises(evtfit.DegenerateDataError):
        evtfit.select_threshold_cv(tiny)
