"""Model-free empirical tail bounds built from a sorted sample.

The central object is the empirical upper bound eB(nu) = max/(n*nu),
together with its scaled variant, the partial-mean bound, and the
order-statistics coverage probabilities that justify using them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dists import Distribution


@dataclass(frozen=True)
class SortedSample:
    """An ascending-ordered sample of nonnegative reals."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("sample must be a nonempty 1-D array")
        if np.any(arr < 0):
            raise ValueError("sample values must be >= 0")
        if np.any(np.diff(arr) < 0):
            raise ValueError("sample values must be nondecreasing")
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_unsorted(cls, values) -> "SortedSample":
        return cls(np.sort(np.asarray(values, dtype=float)))

    @property
    def n(self) -> int:
        return self.values.size

    def maximum(self) -> float:
        return float(self.values[-1])


@dataclass(frozen=True)
class TailBoundReport:
    """A tail-probability bound at a threshold, with its method tag."""

    threshold: float
    bound: float
    method: str
    inputs: dict = field(default_factory=dict)
    advisory: str | None = None


def partial_mean(sample: SortedSample, k: int) -> float:
    """Average of the top-k order statistics over the full sample size n."""
    if not (1 <= k <= sample.n):
        raise ValueError(f"k must be in [1, {sample.n}], got {k}")
    return float(np.sum(sample.values[sample.n - k :]) / sample.n)


def count_exceedances(sample: SortedSample, nu: float) -> int:
    """Number of observations strictly larger than nu."""
    return int(sample.n - np.searchsorted(sample.values, nu, side="right"))


def empirical_bound(sample: SortedSample, nu: float) -> TailBoundReport:
    """eB(nu) = max/(n*nu); derived for nu >= max, flagged below it."""
    if nu <= 0:
        raise ValueError(f"nu must be > 0, got {nu}")
    xmax = sample.maximum()
    advisory = None
    if nu < xmax:
        advisory = "nu below the sample maximum; the bound is derived for nu >= max"
    return TailBoundReport(
        threshold=nu,
        bound=xmax / (sample.n * nu),
        method="empirical-eB",
        inputs={"n": sample.n, "max": xmax},
        advisory=advisory,
    )


def scaled_bound(sample: SortedSample, nu: float, a: float) -> TailBoundReport:
    """a * eB(nu), the less demanding variant with higher coverage."""
    if nu <= 0:
        raise ValueError(f"nu must be > 0, got {nu}")
    if a < 1:
        raise ValueError(f"a must be >= 1, got {a}")
    base = empirical_bound(sample, nu)
    return TailBoundReport(
        threshold=nu,
        bound=a * base.bound,
        method="scaled-eB",
        inputs={"n": sample.n, "max": sample.maximum(), "a": a},
        advisory=base.advisory,
    )


def partial_mean_bound(sample: SortedSample, nu: float) -> TailBoundReport:
    """Partial mean of the exceedances of nu, divided by nu."""
    if nu <= 0:
        raise ValueError(f"nu must be > 0, got {nu}")
    if nu > sample.maximum():
        raise ValueError(
            "nu exceeds the sample maximum; use empirical_bound instead"
        )
    k = count_exceedances(sample, nu)
    pm = partial_mean(sample, k) if k >= 1 else 0.0
    return TailBoundReport(
        threshold=nu,
        bound=pm / nu,
        method="partial-mean",
        inputs={"n": sample.n, "k": k},
    )


def coverage_probability(n, a: float) -> float:
    """Probability 1-(1-a/n)^n that eB at the maximum covers the true tail.

    ``n`` may be math.inf, giving the limit 1 - exp(-a).
    """
    if a <= 0:
        raise ValueError(f"a must be > 0, got {a}")
    if n == math.inf:
        return -math.expm1(-a)
    if a >= n:
        raise ValueError(f"a must be < n, got a={a}, n={n}")
    return 1.0 - (1.0 - a / n) ** n


def max_cdf_value_distribution(n: int, x: float) -> float:
    """Pr{F(X_max) <= x} = x^n, distribution-free."""
    if not (0.0 < x < 1.0):
        raise ValueError(f"x must be in (0, 1), got {x}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return x**n


def np_max_probability(n: int) -> float:
    """Classical nonparametric estimate Pr{X > X_max} ~ 1/(n+1)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return 1.0 / (n + 1)


@dataclass(frozen=True)
class Q1Equivalence:
    """The three equivalent events around the quantile q1 = Q(1 - 1/n)."""

    q1: float
    max_exceeds_q1: bool
    ineq_at_max: bool
    ineq_at_q1: bool

    def all_agree(self) -> bool:
        return self.max_exceeds_q1 == self.ineq_at_max == self.ineq_at_q1


def q1_equivalence_check(sample: SortedSample, dist: Distribution) -> Q1Equivalence:
    """Evaluate the three equivalent coverage claims for a known model."""
    n = sample.n
    if n < 2:
        raise ValueError("needs a sample of size >= 2")
    q1 = dist.quantile(1.0 - 1.0 / n)
    xmax = sample.maximum()
    tail_at_max = 1.0 - dist.cdf(xmax)
    tail_at_q1 = 1.0 - dist.cdf(q1)
    return Q1Equivalence(
        q1=q1,
        max_exceeds_q1=xmax >= q1,
        ineq_at_max=tail_at_max <= 1.0 / n,
        ineq_at_q1=tail_at_q1 <= xmax / (n * q1),
    )
