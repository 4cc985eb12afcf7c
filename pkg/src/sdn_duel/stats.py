"""Student t-tests without an external stats dependency.

The t CDF goes through the regularized incomplete beta function (Lentz
continued fraction); critical values come from bisection on the CDF.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

_EPS = 1e-16
_TINY = 1e-300


class StatsError(ValueError):
    pass


def _betacf(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, 10_000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def betainc(a: float, b: float, x: float, xc: float | None = None) -> float:
    """Regularized incomplete beta I_x(a, b).

    ``xc`` optionally supplies 1 - x exactly, for x close to 1.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if xc is None:
        xc = 1.0 - x
    if x == 0.0 or xc == 0.0:
        return 0.0 if x == 0.0 else 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log(xc))
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, xc) / b


def t_sf_abs(t: float, df: float) -> float:
    """P(T > |t|)."""
    if t == 0.0:
        return 0.5
    denom = df + t * t
    return 0.5 * betainc(0.5 * df, 0.5, df / denom, t * t / denom)


def t_cdf(t: float, df: float) -> float:
    if t == 0.0:
        return 0.5
    tail = t_sf_abs(t, df)
    return 1.0 - tail if t > 0 else tail


def t_ppf(p: float, df: float, tol: float = 1e-12) -> float:
    """Inverse t CDF by bisection."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if p == 0.5:
        return 0.0
    lo, hi = -1.0, 1.0
    while t_cdf(lo, df) > p:
        lo *= 2.0
    while t_cdf(hi, df) < p:
        hi *= 2.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if t_cdf(mid, df) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def mean(xs) -> float:
    return math.fsum(xs) / len(xs)


def variance(xs) -> float:
    m = mean(xs)
    return math.fsum((x - m) ** 2 for x in xs) / (len(xs) - 1)


def pearson(xs, ys) -> float:
    mx, my = mean(xs), mean(ys)
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    syy = math.fsum((y - my) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        return float("nan")
    return sxy / math.sqrt(sxx * syy)


@dataclass(frozen=True)
class TTestReport:
    mode: str
    mean_x: float
    mean_y: float
    var_x: float
    var_y: float
    n_x: int
    n_y: int
    pearson: float
    hypothesized_mean_difference: float
    df: float
    t_stat: float
    p_one_tail: float
    t_critical_one_tail: float
    p_two_tail: float
    t_critical_two_tail: float
    alpha: float

    @property
    def significant(self) -> bool:
        return self.p_two_tail < self.alpha

    def rows(self) -> list[tuple[str, str, str]]:
        def f(v):
            return repr(float(v)) if isinstance(v, float) else str(v)
        return [
            ("Mean", f(self.mean_x), f(self.mean_y)),
            ("Variance", f(self.var_x), f(self.var_y)),
            ("Observations", f(self.n_x), f(self.n_y)),
            ("Pearson Correlation", f(self.pearson), ""),
            ("Hypothesized Mean Difference", f(self.hypothesized_mean_difference), ""),
            ("df", f(self.df), ""),
            ("t Stat", f(self.t_stat), ""),
            ("P(T<=t) one-tail", f(self.p_one_tail), ""),
            ("t Critical one-tail", f(self.t_critical_one_tail), ""),
            ("P(T<=t) two-tail", f(self.p_two_tail), ""),
            ("t Critical two-tail", f(self.t_critical_two_tail), ""),
            ("alpha", f(self.alpha), ""),
        ]

    def as_dict(self) -> dict:
        return asdict(self)


def _finish(mode, xs, ys, t, df, alpha) -> TTestReport:
    one = t_sf_abs(t, df)
    return TTestReport(
        mode=mode,
        mean_x=mean(xs), mean_y=mean(ys),
        var_x=variance(xs), var_y=variance(ys),
        n_x=len(xs), n_y=len(ys),
        pearson=pearson(xs, ys) if len(xs) == len(ys) else float("nan"),
        hypothesized_mean_difference=0.0,
        df=df,
        t_stat=t,
        p_one_tail=one,
        t_critical_one_tail=t_ppf(1.0 - alpha, df),
        p_two_tail=min(1.0, 2.0 * one),
        t_critical_two_tail=t_ppf(1.0 - alpha / 2.0, df),
        alpha=alpha,
    )


def paired_ttest(xs, ys, alpha: float = 0.05) -> TTestReport:
    xs, ys = [float(x) for x in xs], [float(y) for y in ys]
    if len(xs) != len(ys):
        raise StatsError(f"paired test needs equal lengths, got {len(xs)} and {len(ys)}")
    if len(xs) < 2:
        raise StatsError("need at least two pairs")
    diffs = [x - y for x, y in zip(xs, ys)]
    n = len(diffs)
    sd2 = variance(diffs)
    md = mean(diffs)
    if sd2 == 0.0:
        if md == 0.0:
            t = 0.0
        else:
            raise StatsError("differences have zero variance; t is undefined")
    else:
        t = md / math.sqrt(sd2 / n)
    return _finish("paired", xs, ys, t, float(n - 1), alpha)


def unpaired_ttest(xs, ys, alpha: float = 0.05) -> TTestReport:
    """Two-sample test with pooled (equal) variances."""
    xs, ys = [float(x) for x in xs], [float(y) for y in ys]
    nx, ny = len(xs), len(ys)
    if nx < 2 or ny < 2:
        raise StatsError("each sample needs at least two observations")
    df = nx + ny - 2
    pooled = ((nx - 1) * variance(xs) + (ny - 1) * variance(ys)) / df
    diff = mean(xs) - mean(ys)
    if pooled == 0.0:
        if diff == 0.0:
            t = 0.0
        else:
            raise StatsError("both samples have zero variance; t is undefined")
    else:
        t = diff / math.sqrt(pooled * (1.0 / nx + 1.0 / ny))
    return _finish("unpaired", xs, ys, t, float(df), alpha)


def ttest(xs, ys, alpha: float = 0.05, mode: str = "paired") -> TTestReport:
    if mode == "paired":
        return paired_ttest(xs, ys, alpha)
    if mode == "unpaired":
        return unpaired_ttest(xs, ys, alpha)
    raise ValueError(f"unknown mode {mode!r}")
