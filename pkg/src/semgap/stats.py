"""Self-contained statistical kernel.

Exactly the four procedures the analysis needs: Pearson and Spearman
correlation with two-sided p-values from the t transform, ordinary least
squares, and the D'Agostino-Pearson K-squared omnibus normality test. Tail
probabilities come from regularized incomplete beta / gamma functions
evaluated by continued fractions to 1e-12; tests validate them against
brute-force quadrature.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

_CF_EPS = 1e-12
_CF_TINY = 1e-300
_CF_MAX_ITER = 500


@dataclass
class StatResult:
    name: str
    statistic: float
    n: int
    p_value: float


@dataclass
class OlsFit:
    intercept: float
    slope: float
    residuals: np.ndarray
    r_squared: float


# ---------------------------------------------------------------------------
# Tail probability machinery


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (Lentz's method)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise RuntimeError("incomplete beta continued fraction did not converge")


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def _gamma_p_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by series (x < a + 1)."""
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_CF_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _CF_EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise RuntimeError("incomplete gamma series did not converge")


def _gamma_q_cf(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) by continued fraction."""
    b = x + 1.0 - a
    c = 1.0 / _CF_TINY
    d = 1.0 / b
    h = d
    for i in range(1, _CF_MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = b + an / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise RuntimeError("incomplete gamma continued fraction did not converge")


def gammainc_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a)."""
    if a <= 0.0:
        raise ValueError("a must be positive")
    if x < 0.0:
        raise ValueError("x must be nonnegative")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_p_series(a, x)
    return _gamma_q_cf(a, x)


def student_t_sf(t: float, df: float) -> float:
    """One-sided survival P(T > t) for Student's t with df degrees."""
    if df <= 0:
        raise ValueError("df must be positive")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    x = df / (df + t * t)
    tail = 0.5 * betainc_reg(0.5 * df, 0.5, x)
    return tail if t >= 0 else 1.0 - tail


def student_t_two_sided(t: float, df: float) -> float:
    """Two-sided p-value P(|T| >= |t|)."""
    if df <= 0:
        raise ValueError("df must be positive")
    if math.isinf(t):
        return 0.0
    return betainc_reg(0.5 * df, 0.5, df / (df + t * t))


def chi2_sf(x: float, df: float) -> float:
    """Survival function of the chi-square distribution."""
    if df <= 0:
        raise ValueError("df must be positive")
    if x <= 0.0:
        return 1.0
    return gammainc_q(0.5 * df, 0.5 * x)


# ---------------------------------------------------------------------------
# Correlation and regression


def _as_float_vector(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def _check_pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    xv = _as_float_vector(x, "x")
    yv = _as_float_vector(y, "y")
    if xv.size != yv.size:
        raise ValueError("x and y must have equal length")
    if xv.size < 3:
        raise ValueError("need at least 3 observations")
    return xv, yv


def _pearson_r(x: np.ndarray, y: np.ndarray) -> float:
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("correlation undefined for zero-variance input")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def _r_to_p(r: float, n: int) -> float:
    if abs(r) >= 1.0:
        return 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return student_t_two_sided(t, n - 2)


def pearson(x, y) -> StatResult:
    """Product-moment correlation with a two-sided t-based p-value."""
    xv, yv = _check_pair(x, y)
    r = _pearson_r(xv, yv)
    return StatResult("pearson", r, xv.size, _r_to_p(r, xv.size))


def rankdata_average(x) -> np.ndarray:
    """Fractional ranks, 1-based, ties get the average of their positions."""
    arr = _as_float_vector(x, "x")
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(arr.size, dtype=np.float64)
    i = 0
    while i < arr.size:
        j = i
        while j + 1 < arr.size and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> StatResult:
    """Rank correlation: Pearson on average-tie fractional ranks."""
    xv, yv = _check_pair(x, y)
    rx = rankdata_average(xv)
    ry = rankdata_average(yv)
    rho = _pearson_r(rx, ry)
    return StatResult("spearman", rho, xv.size, _r_to_p(rho, xv.size))


def ols(x, y) -> OlsFit:
    """Least-squares line fit of y on x with residuals and R-squared."""
    xv, yv = _check_pair(x, y)
    dx = xv - xv.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise ValueError("degenerate fit: x is constant")
    slope = float(dx @ (yv - yv.mean())) / sxx
    intercept = float(yv.mean() - slope * xv.mean())
    residuals = yv - (intercept + slope * xv)
    ss_res = float(residuals @ residuals)
    dy = yv - yv.mean()
    ss_tot = float(dy @ dy)
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return OlsFit(intercept, slope, residuals, r_squared)


# ---------------------------------------------------------------------------
# D'Agostino-Pearson omnibus normality test


def _skew_z(x: np.ndarray) -> float:
    n = x.size
    m = x.mean()
    m2 = float(np.mean((x - m) ** 2))
    m3 = float(np.mean((x - m) ** 3))
    if m2 == 0.0:
        raise ValueError("zero variance")
    b1 = m3 / m2**1.5
    y = b1 * math.sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)))
    beta2 = (
        3.0
        * (n * n + 27.0 * n - 70.0)
        * (n + 1.0)
        * (n + 3.0)
        / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0))
    )
    w2 = -1.0 + math.sqrt(2.0 * (beta2 - 1.0))
    delta = 1.0 / math.sqrt(0.5 * math.log(w2))
    alpha = math.sqrt(2.0 / (w2 - 1.0))
    if y == 0.0:
        return 0.0
    return delta * math.log(y / alpha + math.sqrt((y / alpha) ** 2 + 1.0))


def _kurtosis_z(x: np.ndarray) -> float:
    n = x.size
    m = x.mean()
    m2 = float(np.mean((x - m) ** 2))
    m4 = float(np.mean((x - m) ** 4))
    if m2 == 0.0:
        raise ValueError("zero variance")
    b2 = m4 / (m2 * m2)
    expected = 3.0 * (n - 1.0) / (n + 1.0)
    var_b2 = (
        24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) ** 2 * (n + 3.0) * (n + 5.0))
    )
    xx = (b2 - expected) / math.sqrt(var_b2)
    sqrt_beta1 = (
        6.0
        * (n * n - 5.0 * n + 2.0)
        / ((n + 7.0) * (n + 9.0))
        * math.sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)))
    )
    a = 6.0 + 8.0 / sqrt_beta1 * (
        2.0 / sqrt_beta1 + math.sqrt(1.0 + 4.0 / sqrt_beta1**2)
    )
    denom = 1.0 + xx * math.sqrt(2.0 / (a - 4.0))
    term = math.copysign(abs((1.0 - 2.0 / a) / denom) ** (1.0 / 3.0), denom)
    return (1.0 - 2.0 / (9.0 * a) - term) / math.sqrt(2.0 / (9.0 * a))


def dagostino_k2(x) -> StatResult:
    """Omnibus normality test: squared skewness and kurtosis z-scores
    against chi-square with 2 degrees of freedom."""
    arr = _as_float_vector(x, "x")
    n = arr.size
    if n < 8:
        raise ValueError("K-squared test needs at least 8 observations")
    if n < 20:
        warnings.warn(
            f"K-squared test is unreliable for n={n} < 20", stacklevel=2
        )
    z1 = _skew_z(arr)
    z2 = _kurtosis_z(arr)
    k2 = z1 * z1 + z2 * z2
    return StatResult("dagostino_k2", k2, n, chi2_sf(k2, 2.0))
