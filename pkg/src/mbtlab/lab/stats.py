"""Correlation, confidence intervals and resampled suite coverage."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from dataclasses import dataclass

from scipy import stats as _st

from ..errors import DegenerateVariance, PoolTooSmall


@dataclass(frozen=True)
class Correlation:
    r: float
    t: float
    p: float  # two-sided
    n: int


def pearson(xs, ys):
    """Product-moment correlation with a two-sided t-test (n - 2 degrees of freedom)."""
    xs, ys = [float(x) for x in xs], [float(y) for y in ys]
    n = len(xs)
    if n != len(ys):
        raise ValueError("samples differ in length")
    if n < 3:
        raise ValueError("need at least 3 pairs")
    # floats are exact rationals; exact sums make |r| = 1 and 1 - r^2 exact
    fx, fy = [Fraction(x) for x in xs], [Fraction(y) for y in ys]
    mx, my = sum(fx) / n, sum(fy) / n
    dx = [x - mx for x in fx]
    dy = [y - my for y in fy]
    sxx = sum(d * d for d in dx)
    syy = sum(d * d for d in dy)
    if sxx == 0 or syy == 0:
        raise DegenerateVariance("a sample has zero variance")
    sxy = sum(a * b for a, b in zip(dx, dy))
    r2 = sxy * sxy / (sxx * syy)
    r = math.copysign(math.sqrt(float(r2)), sxy)
    df = n - 2
    if r2 == 1:
        return Correlation(r, math.copysign(math.inf, r), 0.0, n)
    t = r * math.sqrt(df / float(1 - r2))
    p = float(min(1.0, 2.0 * _st.t.sf(abs(t), df)))
    return Correlation(r, t, p, n)


def normal_quantile(level):
    return float(_st.norm.ppf((1.0 + level) / 2.0))


def mean_ci(values, level=0.98):
    """(mean, half width) of a normal-quantile confidence interval for the mean."""
    values = [float(v) for v in values]
    n = len(values)
    if n < 2:
        raise ValueError("need at least 2 values")
    if not 0 < level < 1:
        raise ValueError("level must lie in (0, 1)")
    if all(v == values[0] for v in values):
        return values[0], 0.0
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, normal_quantile(level) * math.sqrt(var) / math.sqrt(n)


@dataclass(frozen=True)
class Resampled:
    n: int
    mean: float
    half_width: float
    values: tuple

    @property
    def low(self):
        return self.mean - self.half_width

    @property
    def high(self):
        return self.mean + self.half_width


def draws(pool_size, n, reps, seed):
    """``reps`` seeded index samples of size ``n`` drawn without replacement."""
    if n > pool_size:
        raise PoolTooSmall(f"cannot draw {n} cases from a pool of {pool_size}")
    rng = random.Random(f"draws/{seed}/{pool_size}/{n}")
    return [sorted(rng.sample(range(pool_size), n)) for _ in range(reps)]


def subsample_coverage(pool, n, reps=25, seed=0, level=0.98, *, rt, universe, cache=None):
    """Mean model coverage (and CI) of ``reps`` random ``n``-case picks from a suite."""
    from ..coverage import cd_ratio, suite_coverage

    cases = list(pool.cases)
    cache = {} if cache is None else cache
    vals = []
    for idx in draws(len(cases), n, reps, seed):
        cmap = suite_coverage(rt, universe, [cases[i] for i in idx], cache)
        vals.append(float(cd_ratio(cmap)))
    mean, hw = mean_ci(vals, level)
    return Resampled(n, mean, hw, tuple(vals))
