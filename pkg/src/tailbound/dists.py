"""Closed-form distribution kernel: densities, quantiles, moments,
partial expectations and the Markov-type analytic tail bounds.

Four families are supported: exponential, half-normal, Pareto type I
(power law) and location Pareto (Pareto type II / shifted GPD with
positive extreme value index).  All operations are pure functions of the
distribution object; sampling takes an explicit seed or generator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.special import gammaln, ndtr, ndtri


class InvalidParameterError(ValueError):
    """A distribution was built with parameters outside its domain."""


class InfiniteMomentError(ValueError):
    """An operation that requires a finite moment got an infinite one."""


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class Exponential:
    """Exponential distribution with rate ``rate`` (support [0, inf))."""

    rate: float = 1.0

    def __post_init__(self):
        if not (self.rate > 0):
            raise InvalidParameterError(f"rate must be > 0, got {self.rate}")

    @property
    def support_min(self) -> float:
        return 0.0

    def pdf(self, x: float) -> float:
        if x < 0:
            return 0.0
        return self.rate * math.exp(-self.rate * x)

    def cdf(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return -math.expm1(-self.rate * x)

    def quantile(self, p: float) -> float:
        _check_prob(p)
        return -math.log1p(-p) / self.rate

    def mean(self) -> float:
        return 1.0 / self.rate

    def moment(self, k: int) -> float:
        _check_order(k)
        return math.exp(gammaln(k + 1)) / self.rate**k

    def partial_expectation(self, nu: float) -> float:
        if nu <= 0:
            return self.mean()
        return math.exp(-self.rate * nu) * (nu + 1.0 / self.rate)

    def markov_error(self, nu: float) -> float:
        # (1/nu) * int_nu^inf exp(-rate*x) dx
        return math.exp(-self.rate * nu) / (self.rate * nu)

    def x_tail_decreasing_from(self) -> float:
        return 1.0 / self.rate


@dataclass(frozen=True)
class HalfNormal:
    """Half-normal distribution with scale ``sigma`` (|N(0, sigma^2)|)."""

    sigma: float = 1.0

    def __post_init__(self):
        if not (self.sigma > 0):
            raise InvalidParameterError(f"sigma must be > 0, got {self.sigma}")

    @property
    def support_min(self) -> float:
        return 0.0

    def pdf(self, x: float) -> float:
        if x < 0:
            return 0.0
        z = x / self.sigma
        return math.sqrt(2.0 / math.pi) / self.sigma * math.exp(-0.5 * z * z)

    def cdf(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return 2.0 * ndtr(x / self.sigma) - 1.0

    def quantile(self, p: float) -> float:
        _check_prob(p)
        return self.sigma * ndtri(0.5 * (1.0 + p))

    def mean(self) -> float:
        return self.sigma * math.sqrt(2.0 / math.pi)

    def moment(self, k: int) -> float:
        _check_order(k)
        # E|N(0,s^2)|^k = s^k 2^(k/2) Gamma((k+1)/2) / sqrt(pi)
        return self.sigma**k * 2.0 ** (k / 2.0) * math.exp(
            gammaln((k + 1) / 2.0) - 0.5 * math.log(math.pi)
        )

    def partial_expectation(self, nu: float) -> float:
        if nu <= 0:
            return self.mean()
        return self.mean() * math.exp(-nu * nu / (2.0 * self.sigma**2))

    def markov_error(self, nu: float) -> float:
        # 2*sigma/nu * (phi(t) - t*(1 - Phi(t))) at t = nu/sigma
        t = nu / self.sigma
        phi = math.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)
        return 2.0 * self.sigma / nu * (phi - t * (1.0 - ndtr(t)))

    def x_tail_decreasing_from(self) -> float:
        # Smallest root of d/dx [x*(1-F(x))] = (1-F) - x*f = 0, by bisection.
        def deriv(x):
            return (1.0 - self.cdf(x)) - x * self.pdf(x)

        lo, hi = 1e-12, 10.0 * self.sigma
        while hi - lo > 1e-8:
            mid = 0.5 * (lo + hi)
            if deriv(mid) > 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ParetoI:
    """Pareto type I (power law) with tail index ``alpha`` and minimum ``mu``."""

    alpha: float
    mu: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0):
            raise InvalidParameterError(f"alpha must be > 0, got {self.alpha}")
        if not (self.mu > 0):
            raise InvalidParameterError(f"mu must be > 0, got {self.mu}")

    @property
    def support_min(self) -> float:
        return self.mu

    def pdf(self, x: float) -> float:
        if x < self.mu:
            return 0.0
        return self.alpha / self.mu * (self.mu / x) ** (self.alpha + 1)

    def cdf(self, x: float) -> float:
        if x <= self.mu:
            return 0.0
        return 1.0 - (self.mu / x) ** self.alpha

    def quantile(self, p: float) -> float:
        _check_prob(p)
        return self.mu * (1.0 - p) ** (-1.0 / self.alpha)

    def mean(self) -> float:
        if self.alpha <= 1:
            return math.inf
        return self.alpha * self.mu / (self.alpha - 1.0)

    def moment(self, k: int) -> float:
        _check_order(k)
        if k >= self.alpha:
            return math.inf
        return self.alpha * self.mu**k / (self.alpha - k)

    def partial_expectation(self, nu: float) -> float:
        if self.alpha <= 1:
            raise InfiniteMomentError("partial expectation requires alpha > 1")
        if nu <= self.mu:
            return self.mean()
        return self.alpha / (self.alpha - 1.0) * self.mu**self.alpha * nu ** (
            1.0 - self.alpha
        )

    def markov_error(self, nu: float) -> float:
        if self.alpha <= 1:
            raise InfiniteMomentError("markov error requires alpha > 1")
        if nu <= 0:
            raise ValueError(f"nu must be > 0, got {nu}")
        if nu < self.mu:
            # the tail is 1 below the support minimum
            return (self.mu - nu + self.mu / (self.alpha - 1.0)) / nu
        return self.mu**self.alpha * nu ** (1.0 - self.alpha) / (
            self.alpha - 1.0) / nu

    def x_tail_decreasing_from(self) -> float:
        if self.alpha <= 1:
            raise InfiniteMomentError("requires alpha > 1")
        return self.mu


@dataclass(frozen=True)
class LocationPareto:
    """Pareto type II with minimum ``mu`` >= 0 and origin shift ``delta``.

    Tail: Pr{X > x} = ((mu + delta) / (x + delta))**alpha for x >= mu.
    For mu = 0 this is the GPD with xi = 1/alpha and beta = delta/alpha.
    """

    alpha: float
    mu: float = 0.0
    delta: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0):
            raise InvalidParameterError(f"alpha must be > 0, got {self.alpha}")
        if self.mu < 0:
            raise InvalidParameterError(f"mu must be >= 0, got {self.mu}")
        if not (self.delta > -self.mu):
            raise InvalidParameterError("delta must exceed -mu")
        if self.mu + self.delta <= 0:
            raise InvalidParameterError("mu + delta must be > 0")

    @classmethod
    def from_gpd(cls, xi: float, beta: float, mu: float = 0.0) -> "LocationPareto":
        """Build from GPD (xi, beta) exceedance parameters above ``mu``."""
        if xi <= 0 or beta <= 0:
            raise InvalidParameterError("requires xi > 0 and beta > 0")
        alpha = 1.0 / xi
        return cls(alpha=alpha, mu=mu, delta=alpha * beta - mu)

    @property
    def xi(self) -> float:
        return 1.0 / self.alpha

    @property
    def beta(self) -> float:
        """GPD scale of the exceedances above the support minimum."""
        return (self.mu + self.delta) / self.alpha

    @property
    def support_min(self) -> float:
        return self.mu

    def pdf(self, x: float) -> float:
        if x < self.mu:
            return 0.0
        s = self.mu + self.delta
        return self.alpha / s * (s / (x + self.delta)) ** (self.alpha + 1)

    def cdf(self, x: float) -> float:
        if x <= self.mu:
            return 0.0
        return 1.0 - ((self.mu + self.delta) / (x + self.delta)) ** self.alpha

    def quantile(self, p: float) -> float:
        _check_prob(p)
        return (self.mu + self.delta) * (1.0 - p) ** (-1.0 / self.alpha) - self.delta

    def mean(self) -> float:
        if self.alpha <= 1:
            return math.inf
        return self.mu + (self.mu + self.delta) / (self.alpha - 1.0)

    def moment(self, k: int) -> float:
        _check_order(k)
        if k >= self.alpha:
            return math.inf
        # Binomial expansion of (Y - delta)^k with Y = X + delta ~ ParetoI.
        s = self.mu + self.delta
        total = 0.0
        for j in range(k + 1):
            ey_j = self.alpha * s**j / (self.alpha - j)  # E[Y^j]
            total += math.comb(k, j) * (-self.delta) ** (k - j) * ey_j
        return total

    def partial_expectation(self, nu: float) -> float:
        if self.alpha <= 1:
            raise InfiniteMomentError("partial expectation requires alpha > 1")
        if nu <= self.mu:
            return self.mean()
        tail = 1.0 - self.cdf(nu)
        s = self.mu + self.delta
        integral = s**self.alpha * (nu + self.delta) ** (1.0 - self.alpha) / (
            self.alpha - 1.0
        )
        return nu * tail + integral

    def markov_error(self, nu: float) -> float:
        if self.alpha <= 1:
            raise InfiniteMomentError("markov error requires alpha > 1")
        if nu <= 0:
            raise ValueError(f"nu must be > 0, got {nu}")
        s = self.mu + self.delta
        integral = s**self.alpha * (max(nu, self.mu) + self.delta) ** (
            1.0 - self.alpha) / (self.alpha - 1.0)
        if nu < self.mu:
            integral += self.mu - nu  # the tail equals 1 below the support
        return integral / nu

    def x_tail_decreasing_from(self) -> float:
        if self.alpha <= 1:
            raise InfiniteMomentError("requires alpha > 1")
        # x*(1-F) has derivative sign given by 1 - alpha*x/(x+delta).
        return max(self.mu, self.delta / (self.alpha - 1.0))


Distribution = Exponential | HalfNormal | ParetoI | LocationPareto


def _check_prob(p: float) -> None:
    if not (0.0 < p < 1.0):
        raise ValueError(f"probability must be in (0, 1), got {p}")


def _check_order(k: int) -> None:
    if k < 1 or int(k) != k:
        raise ValueError(f"moment order must be a positive integer, got {k}")


def _markov_error_quadrature(dist: Distribution, nu: float) -> float:
    """(1/nu) * int_nu^inf (1 - F(x)) dx, truncated at an extreme quantile."""
    hi = dist.quantile(1.0 - 1e-14)
    if hi <= nu:
        return 0.0
    val, _ = quad(lambda x: 1.0 - dist.cdf(x), nu, hi,
                  epsabs=1e-10, epsrel=1e-10, limit=200)
    return val / nu


def tail(dist: Distribution, x: float) -> float:
    """Pr{X > x}, the complementary cumulative distribution."""
    return 1.0 - dist.cdf(x)


def sample(dist: Distribution, n: int, seed) -> np.ndarray:
    """Draw ``n`` i.i.d. values by inverse transform of one uniform stream.

    ``seed`` may be an int or a numpy Generator; the same seed reproduces
    the same sample for every distribution family.
    """
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    rng = _as_rng(seed)
    u = rng.random(n)
    return quantile_vec(dist, u)


def quantile_vec(dist: Distribution, p: np.ndarray) -> np.ndarray:
    """Vectorized quantile function (p strictly inside (0, 1))."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0.0) | (p >= 1.0)):
        raise ValueError("probabilities must be in (0, 1)")
    if isinstance(dist, Exponential):
        return -np.log1p(-p) / dist.rate
    if isinstance(dist, HalfNormal):
        return dist.sigma * ndtri(0.5 * (1.0 + p))
    if isinstance(dist, ParetoI):
        return dist.mu * (1.0 - p) ** (-1.0 / dist.alpha)
    if isinstance(dist, LocationPareto):
        s = dist.mu + dist.delta
        return s * (1.0 - p) ** (-1.0 / dist.alpha) - dist.delta
    raise TypeError(f"unsupported distribution {dist!r}")


def improved_markov_bound(dist: Distribution, nu: float) -> float:
    """Partial expectation above nu divided by nu; tightest of the chain."""
    if nu <= 0:
        raise ValueError(f"nu must be > 0, got {nu}")
    if not math.isfinite(dist.mean()):
        raise InfiniteMomentError("improved Markov bound requires a finite mean")
    return dist.partial_expectation(nu) / nu


def traditional_markov_bound(dist: Distribution, nu: float) -> float:
    """Mean divided by nu."""
    if nu <= 0:
        raise ValueError(f"nu must be > 0, got {nu}")
    m = dist.mean()
    if not math.isfinite(m):
        raise InfiniteMomentError("traditional Markov bound requires a finite mean")
    return m / nu


def moment_markov_bound(dist: Distribution, nu: float, k: int) -> float:
    """k-th moment divided by nu**k."""
    if nu <= 0:
        raise ValueError(f"nu must be > 0, got {nu}")
    mk = dist.moment(k)
    if not math.isfinite(mk):
        raise InfiniteMomentError(f"moment of order {k} is infinite")
    return mk / nu**k


def markov_error(dist: Distribution, nu: float) -> float:
    """Gap between the improved Markov bound and the true tail at nu."""
    if nu <= 0:
        raise ValueError(f"nu must be > 0, got {nu}")
    if not math.isfinite(dist.mean()):
        raise InfiniteMomentError("markov error requires a finite mean")
    return dist.markov_error(nu)
