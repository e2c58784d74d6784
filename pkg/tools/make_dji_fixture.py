"""Deterministically regenerate the bundled daily-close fixture CSV.

The fixture is a synthetic 2015-2022 index price series calibrated so that
the derived log-return sample reproduces the reference DJI summary
statistics used throughout the test suite: sign counts, ranked losses,
moment estimates, and the peaks-over-threshold fits at thresholds
0 / 1.4 / 1.75.  Losses are generated in three GPD segments whose
parameters were solved numerically against the package's own MLE;
positive returns are solved in closed form to pin the overall mean and
standard deviation.

Usage: python tools/make_dji_fixture.py [output.csv]
"""
from __future__ import annotations

import datetime as dt
import sys

import numpy as np

S0 = 17832.99  # anchor close for the first trading day

# Ranked daily losses (percent) and their dates.
PINNED_LOSSES = {
    dt.date(2020, 3, 16): 13.842,
    dt.date(2020, 3, 12): 10.523,
    dt.date(2020, 3, 9): 8.106,
    dt.date(2020, 6, 11): 7.148,
    dt.date(2020, 3, 18): 6.510,
    dt.date(2020, 3, 11): 6.034,
    dt.date(2018, 2, 5): 4.714,
    dt.date(2020, 3, 20): 4.653,
    dt.date(2020, 4, 1): 4.544,
    dt.date(2020, 2, 27): 4.518,
    # Per-year maxima outside 2020/2018, plus two month maxima.
    dt.date(2015, 8, 24): 3.640,
    dt.date(2016, 6, 24): 3.447,
    dt.date(2017, 5, 17): 1.793,
    dt.date(2019, 8, 14): 3.093,
    dt.date(2021, 11, 26): 2.560,
    dt.date(2022, 9, 13): 4.021,
    dt.date(2022, 5, 18): 3.631,
}

# A few large rebound days for realism (values are percent gains).
PINNED_GAINS = {
    dt.date(2020, 3, 24): 10.764,
    dt.date(2020, 3, 13): 9.387,
    dt.date(2020, 4, 6): 7.327,
    dt.date(2020, 3, 26): 6.161,
    dt.date(2020, 3, 17): 5.828,
    dt.date(2020, 3, 10): 4.777,
    dt.date(2020, 3, 4): 4.453,
    dt.date(2018, 12, 26): 4.864,
}

ZERO_DATES = (dt.date(2015, 4, 29), dt.date(2017, 8, 8))

# Loss-segment generators: (seed, count, xi, beta, y-range, base).
SEG_TAIL = (20240517, 87, 0.56544533, 0.75583162, (0.0, 2.70), 1.75)
SEG_MID = (998877, 50, 6.14203326, 1.08370677, (0.0, 0.35), 1.40)
SEG_LOW = (31337, 776, 1.38352279, 0.72193801, (0.002, 1.40), 0.0)

MEAN_TARGET = 0.031
STD_TARGET = 1.187
N_RETURNS = 2013


def easter(year: int) -> dt.date:
    """Gregorian Easter Sunday (anonymous algorithm)."""
    a = year % 19
    b, c = divmod(year, 100)
    d, e = divmod(b, 4)
    g = (8 * b + 13) // 25
    h = (19 * a + b - d - g + 15) % 30
    i, k = divmod(c, 4)
    l = (32 + 2 * e + 2 * i - h - k) % 7
    m = (a + 11 * h + 22 * l) // 451
    month, day = divmod(h + l - 7 * m + 114, 31)
    return dt.date(year, month, day + 1)


def _nth_weekday(year, month, weekday, n):
    d = dt.date(year, month, 1)
    offset = (weekday - d.weekday()) % 7
    return d + dt.timedelta(days=offset + 7 * (n - 1))


def _last_weekday(year, month, weekday):
    d = dt.date(year, month + 1, 1) - dt.timedelta(days=1) if month < 12 \
        else dt.date(year, 12, 31)
    return d - dt.timedelta(days=(d.weekday() - weekday) % 7)


def _observed(d: dt.date) -> dt.date:
    if d.weekday() == 5:
        return d - dt.timedelta(days=1)
    if d.weekday() == 6:
        return d + dt.timedelta(days=1)
    return d


def market_holidays(year: int) -> set:
    new_year = dt.date(year, 1, 1)
    hol = {
        # New Year's Day is not observed when it falls on a Saturday.
        _observed(new_year) if new_year.weekday() != 5 else new_year,
        _nth_weekday(year, 1, 0, 3),          # MLK day
        _nth_weekday(year, 2, 0, 3),          # Washington's birthday
        easter(year) - dt.timedelta(days=2),  # Good Friday
        _last_weekday(year, 5, 0),            # Memorial day
        _observed(dt.date(year, 7, 4)),
        _nth_weekday(year, 9, 0, 1),          # Labor day
        _nth_weekday(year, 11, 3, 4),         # Thanksgiving
        _observed(dt.date(year, 12, 25)),
    }
    if year >= 2022:
        hol.add(_observed(dt.date(year, 6, 19)))  # Juneteenth
    if year == 2018:
        hol.add(dt.date(2018, 12, 5))  # national day of mourning
    return hol


def trading_days(start: dt.date, end: dt.date) -> list:
    hol = set()
    for y in range(start.year, end.year + 1):
        hol |= market_holidays(y)
    days = []
    d = start
    while d <= end:
        if d.weekday() < 5 and d not in hol:
            days.append(d)
        d += dt.timedelta(days=1)
    return days


def gpd_conditional(seed, count, xi, beta, y_range, base) -> np.ndarray:
    """Draws from a GPD restricted to a y-interval, shifted by ``base``."""
    u = np.random.default_rng(seed).random(count)
    lo, hi = y_range
    F = lambda y: 1.0 - (1.0 + xi * y / beta) ** (-1.0 / xi)
    p = F(lo) + u * (F(hi) - F(lo))
    return base + beta / xi * ((1.0 - p) ** -xi - 1.0)


def build_losses() -> np.ndarray:
    segs = [gpd_conditional(*seg) for seg in (SEG_TAIL, SEG_MID, SEG_LOW)]
    return np.concatenate(segs)


def build_positives(n_free: int, sum_target: float, sumsq_target: float) -> np.ndarray:
    """Affine-calibrated lognormal draws hitting exact sum and sum of squares."""
    g = np.random.default_rng(777).lognormal(mean=-0.5, sigma=0.8, size=n_free)
    mean_t = sum_target / n_free
    var_t = sumsq_target / n_free - mean_t**2
    if var_t <= 0:
        raise RuntimeError("infeasible positive-return variance target")
    b = np.sqrt(var_t / g.var())
    a = mean_t - b * g.mean()
    out = a + b * g
    if out.min() < 0.002:
        raise RuntimeError(f"positive returns too small: min {out.min()}")
    return out


def assign_returns(days: list) -> dict:
    """Map every return date to its percent log-return."""
    return_dates = days[1:]
    ret = {}
    for d, v in PINNED_LOSSES.items():
        ret[d] = -v
    for d, v in PINNED_GAINS.items():
        ret[d] = v
    for d in ZERO_DATES:
        ret[d] = 0.0
    for d in ret:
        if d not in set(return_dates):
            raise RuntimeError(f"pinned date {d} is not a trading day")
    free = [d for d in return_dates if d not in ret]
    rng = np.random.default_rng(4242)
    rng.shuffle(free)

    losses = np.sort(build_losses())[::-1]
    pool_2020_big = [d for d in free
                     if d.year == 2020 and d.month in (2, 3, 4, 6)]
    pool_2020 = [d for d in free if d.year == 2020]
    used = set()

    def take(pool):
        for d in pool:
            if d not in used:
                used.add(d)
                return d
        raise RuntimeError("date pool exhausted")

    for v in losses:
        if v > 3.631:
            d = take(pool_2020_big)
        elif v > 1.793:
            d = take(pool_2020)
        else:
            d = take(free)
        ret[d] = -v

    remaining = [d for d in free if d not in used]
    pinned_sum = sum(PINNED_GAINS.values())
    pinned_sumsq = sum(v * v for v in PINNED_GAINS.values())
    all_losses = np.concatenate([losses, list(PINNED_LOSSES.values())])
    sum_losses = float(all_losses.sum())
    sumsq_losses = float((all_losses**2).sum())
    sum_all = N_RETURNS * MEAN_TARGET
    sumsq_all = (N_RETURNS - 1) * STD_TARGET**2 + N_RETURNS * MEAN_TARGET**2
    pos = build_positives(len(remaining),
                          sum_all + sum_losses - pinned_sum,
                          sumsq_all - sumsq_losses - pinned_sumsq)
    for d, v in zip(remaining, pos):
        ret[d] = v
    assert len(ret) == len(return_dates)
    return ret


def main(out_path: str = "src/tailbound/data/dji_daily_close_2015_2022.csv") -> None:
    days = trading_days(dt.date(2015, 1, 2), dt.date(2022, 12, 30))
    if len(days) != N_RETURNS + 1:
        raise RuntimeError(f"calendar produced {len(days)} days, expected {N_RETURNS + 1}")
    ret = assign_returns(days)
    rows = [(days[0], S0)]
    price = S0
    for d in days[1:]:
        price *= float(np.exp(ret[d] / 100.0))
        rows.append((d, price))
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("date,close\n")
        for d, p in rows:
            fh.write(f"{d.isoformat()},{p:.2f}\n")
    print(f"wrote {len(rows)} rows to {out_path}")


if __name__ == "__main__":
    main(*sys.argv[1:])
