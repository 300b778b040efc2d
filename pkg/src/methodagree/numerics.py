"""Deterministic statistics kernel.

Sample moments, Pearson correlation inference, ordinary least squares with
slope confidence intervals, Student-t special functions, and exact sample
whitening. Everything here is a pure function of its inputs; no module
state, no randomness.

The Student-t CDF is evaluated through the regularized incomplete beta
function (continued fraction), so the module has no runtime dependency
beyond numpy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegenerateDataError",
    "RegressionFit",
    "mean",
    "variance",
    "covariance",
    "pearson_r",
    "correlation_p_value",
    "student_t_cdf",
    "student_t_quantile",
    "linear_fit",
    "orthonormalize",
]


class DegenerateDataError(ValueError):
    """Raised when data carries no usable signal (zero variance, rank loss)."""


def _as_vector(x, min_len: int = 1, name: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_len:
        raise ValueError(f"{name} needs at least {min_len} values, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def _as_pair(x, y, min_len: int) -> tuple[np.ndarray, np.ndarray]:
    xv = _as_vector(x, min_len, "x")
    yv = _as_vector(y, min_len, "y")
    if xv.size != yv.size:
        raise ValueError(f"length mismatch: x has {xv.size} values, y has {yv.size}")
    return xv, yv


def mean(x) -> float:
    """Arithmetic mean of a nonempty vector."""
    return float(np.mean(_as_vector(x, 1)))


def variance(x) -> float:
    """Sample variance with divisor n-1."""
    return float(np.var(_as_vector(x, 2), ddof=1))


def covariance(x, y) -> float:
    """Sample covariance with divisor n-1.

    Both inputs must have the same length, at least 2.
    """
    xv, yv = _as_pair(x, y, 2)
    return float(np.dot(xv - xv.mean(), yv - yv.mean()) / (xv.size - 1))


def pearson_r(x, y) -> float:
    """Pearson correlation coefficient of two nonconstant vectors (n >= 3)."""
    xv, yv = _as_pair(x, y, 3)
    vx = variance(xv)
    vy = variance(yv)
    if vx <= 0.0 or vy <= 0.0:
        raise DegenerateDataError(
            "zero-variance input: correlation is undefined for constant signals"
        )
    r = covariance(xv, yv) / math.sqrt(vx * vy)
    return float(min(1.0, max(-1.0, r)))


def correlation_p_value(r: float, n: int) -> float:
    """Two-sided p-value for H0: no correlation, given sample r and size n.

    Uses the exact Student-t transform t = r*sqrt(n-2)/sqrt(1-r^2) with
    n-2 degrees of freedom. r = +-1 maps to p = 0, r = 0 to p = 1.
    """
    if n < 3:
        raise ValueError(f"need n >= 3 for a correlation test, got {n}")
    if not -1.0 <= r <= 1.0:
        if abs(r) <= 1.0 + 1e-12:  # tolerate float excursions from callers
            r = min(1.0, max(-1.0, r))
        else:
            raise ValueError(f"correlation must lie in [-1, 1], got {r}")
    if r == 0.0:
        return 1.0
    if abs(r) == 1.0:
        return 0.0
    df = n - 2
    t = r * math.sqrt(df) / math.sqrt(1.0 - r * r)
    return min(1.0, 2.0 * student_t_cdf(-abs(t), df))


# --- Student-t distribution -------------------------------------------------
#
# CDF via the regularized incomplete beta function I_x(df/2, 1/2) with
# x = df/(df + t^2); the continued fraction is evaluated by the modified
# Lentz scheme with the usual symmetry split for convergence.

_BETACF_MAX_ITER = 300
_BETACF_EPS = 1e-12
_BETACF_FPMIN = 1e-300


def _beta_cont_frac(a: float, b: float, x: float) -> float:
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _BETACF_FPMIN:
        d = _BETACF_FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETACF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_FPMIN:
            d = _BETACF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETACF_FPMIN:
            c = _BETACF_FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _BETACF_FPMIN:
            d = _BETACF_FPMIN
        c = 1.0 + aa / c
        if abs(c) < _BETACF_FPMIN:
            c = _BETACF_FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETACF_EPS:
            return h
    raise ArithmeticError(
        f"incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}"
    )


def _reg_incomplete_beta(a: float, b: float, x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
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
        return front * _beta_cont_frac(a, b, x) / a
    return 1.0 - front * _beta_cont_frac(b, a, 1.0 - x) / b


def _check_df(df: int) -> int:
    if not float(df).is_integer() or df < 1:
        raise ValueError(f"degrees of freedom must be a positive integer, got {df}")
    return int(df)


def _student_t_pdf(t: float, df: int) -> float:
    ln = (
        math.lgamma((df + 1) / 2.0)
        - math.lgamma(df / 2.0)
        - 0.5 * math.log(df * math.pi)
        - ((df + 1) / 2.0) * math.log1p(t * t / df)
    )
    return math.exp(ln)


def student_t_cdf(t: float, df: int) -> float:
    """CDF of the Student-t distribution with ``df`` degrees of freedom."""
    df = _check_df(df)
    if math.isnan(t):
        raise ValueError("t must not be NaN")
    if t == 0.0:
        return 0.5
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    x = df / (df + t * t)
    half_tail = 0.5 * _reg_incomplete_beta(df / 2.0, 0.5, x)
    return 1.0 - half_tail if t > 0 else half_tail


def student_t_quantile(q: float, df: int) -> float:
    """Inverse of :func:`student_t_cdf`.

    Bracketed bisection refined with safeguarded Newton steps. The initial
    bracket [-50, 50] covers every workload in this package; it is widened
    geometrically when ``q`` falls outside it (heavy tails at small ``df``).
    """
    df = _check_df(df)
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level must lie strictly in (0, 1), got {q}")
    if q == 0.5:
        return 0.0

    lo, hi = -50.0, 50.0
    while student_t_cdf(lo, df) > q:
        lo *= 2.0
    while student_t_cdf(hi, df) < q:
        hi *= 2.0

    x = 0.0
    for _ in range(200):
        fx = student_t_cdf(x, df) - q
        if fx == 0.0:
            return x
        if fx > 0.0:
            hi = min(hi, x)
        else:
            lo = max(lo, x)
        pdf = _student_t_pdf(x, df)
        if pdf > 0.0:
            step = fx / pdf
            x_new = x - step
        else:
            x_new = 0.5 * (lo + hi)
        if not lo < x_new < hi:  # Newton left the bracket; bisect instead
            x_new = 0.5 * (lo + hi)
        if abs(fx) < 1e-14 and abs(x_new - x) <= 1e-12 * max(1.0, abs(x)):
            return x_new
        x = x_new
        if hi - lo <= 1e-13 * max(1.0, abs(x)):
            return x
    return x


# --- Regression -------------------------------------------------------------


@dataclass(frozen=True)
class RegressionFit:
    """Ordinary least squares fit of y on x with a slope confidence interval."""

    slope: float
    intercept: float
    slope_se: float
    ci_low: float
    ci_high: float
    r: float
    p_value: float
    df: int


def linear_fit(x, y, confidence: float = 0.95) -> RegressionFit:
    """Fit y = intercept + slope * x by least squares.

    The slope confidence interval uses the Student-t quantile at ``df = n - 2``
    with SE^2 = (var(y)/var(x)) * (1 - r^2) / (n - 2); the variance-divisor
    choice cancels in that ratio. ``x`` must be nonconstant and both vectors
    must have equal length n >= 3.
    """
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must lie in (0, 1), got {confidence}")
    xv, yv = _as_pair(x, y, 3)
    n = xv.size
    vx = variance(xv)
    if vx <= 0.0:
        raise DegenerateDataError("cannot fit a line on a constant x")
    vy = variance(yv)
    cxy = covariance(xv, yv)
    slope = cxy / vx
    intercept = mean(yv) - slope * mean(xv)
    if vy > 0.0:
        r = min(1.0, max(-1.0, cxy / math.sqrt(vx * vy)))
    else:
        r = 0.0  # constant y: slope 0, no association to test
    df = n - 2
    se = math.sqrt((vy / vx) * max(0.0, 1.0 - r * r) / df)
    tq = student_t_quantile(1.0 - (1.0 - confidence) / 2.0, df)
    return RegressionFit(
        slope=slope,
        intercept=intercept,
        slope_se=se,
        ci_low=slope - tq * se,
        ci_high=slope + tq * se,
        r=r,
        p_value=correlation_p_value(r, n),
        df=df,
    )


# --- Whitening --------------------------------------------------------------


def orthonormalize(columns) -> np.ndarray:
    """Center and whiten the columns of an (n, k) matrix.

    Returns an (n, k) matrix whose columns have sample mean 0, sample
    variance exactly 1 and pairwise sample covariance 0, spanning the same
    space as the centered input. Symmetric (eigenvector-based) whitening is
    used, followed by a per-column rescale that pins the unit variances
    down to float precision.

    Raises :class:`DegenerateDataError` when the centered columns are not
    linearly independent; if the input came from a random draw, retry with
    a different seed.
    """
    x = np.asarray(columns, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"expected an (n, k) matrix of columns, got shape {x.shape}")
    n, k = x.shape
    if n < k + 1:
        raise ValueError(f"need at least {k + 1} rows to whiten {k} columns, got {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input contains non-finite values")

    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    if eigvals[-1] <= 0.0 or eigvals[0] <= 1e-10 * eigvals[-1]:
        raise DegenerateDataError(
            "columns are rank deficient after centering; "
            "if they came from a random draw, retry with a different seed"
        )
    whitener = eigvecs @ np.diag(1.0 / np.sqrt(eigvals)) @ eigvecs.T
    out = centered @ whitener
    out -= out.mean(axis=0)
    out /= out.std(axis=0, ddof=1)
    return out
