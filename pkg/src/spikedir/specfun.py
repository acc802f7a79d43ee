"""Scalar special-function kernels.

Everything here is a pure function of its arguments and stays in the log
domain wherever the raw quantity could overflow (concentrations up to p^2
with p in the hundreds put Bessel arguments well past 1e5).

The workhorses are the ratio ``I_{nu+1}(z)/I_nu(z)`` of modified Bessel
functions of the first kind, the normalized kernel

    H_nu(x) = Gamma(nu+1) I_nu(x) / (x/2)^nu,

its two-sided algebraic bounds, and the normal / chi-square distribution
functions used by the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import gammainc, gammaincc, ive

__all__ = [
    "BoundPair",
    "amos_bounds",
    "bessel_ratio",
    "chi2_quantile",
    "chi2_survival",
    "log_H",
    "log_c",
    "s_bound",
    "std_normal_cdf",
    "std_normal_quantile",
]

_CF_TOL = 1e-14
_CF_MAX_TERMS = 100_000
# log H above this would overflow exp(); switch away from the plain series.
_SERIES_LOG_CAP = 690.0


@dataclass(frozen=True)
class BoundPair:
    """Two-sided bracket [low, high] for a positive scalar quantity."""

    low: float
    high: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.low) and math.isfinite(self.high)):
            raise ValueError("bounds must be finite")
        if self.low > self.high:
            raise ValueError(f"invalid bracket: low={self.low} > high={self.high}")

    def contains(self, value: float, rtol: float = 0.0) -> bool:
        slack_lo = rtol * abs(self.low)
        slack_hi = rtol * abs(self.high)
        return self.low - slack_lo <= value <= self.high + slack_hi


def _check_nu_z(nu: float, z: float) -> None:
    if not (math.isfinite(nu) and nu >= 0.0):
        raise ValueError(f"order nu must be finite and >= 0, got {nu}")
    if not (math.isfinite(z) and z > 0.0):
        raise ValueError(f"argument z must be finite and > 0, got {z}")


def amos_bounds(nu: float, z: float) -> BoundPair:
    """Algebraic bracket for the Bessel ratio I_{nu+1}(z)/I_nu(z).

    low  = max( z/(nu+1+sqrt((nu+1)^2+z^2)), z/(nu+1/2+sqrt((nu+3/2)^2+z^2)) )
    high = z/(nu+sqrt((nu+2)^2+z^2))

    The second lower bound is sharper for large z, the first for small z;
    both are valid everywhere, so the max is taken.
    """
    _check_nu_z(nu, z)
    low_a = z / (nu + 1.0 + math.hypot(nu + 1.0, z))
    low_b = z / (nu + 0.5 + math.hypot(nu + 1.5, z))
    high = z / (nu + math.hypot(nu + 2.0, z))
    return BoundPair(low=max(low_a, low_b), high=high)


def _bessel_ratio_cf(nu: float, z: float) -> tuple[float, bool]:
    """Continued fraction r = 1/(b1 + 1/(b2 + ...)), b_k = 2(nu+k)/z.

    Modified Lentz evaluation. Returns (value, converged).
    """
    tiny = 1e-300
    f = tiny
    c = f
    d = 0.0
    for k in range(1, _CF_MAX_TERMS + 1):
        b = 2.0 * (nu + k) / z
        d = b + d
        if d == 0.0:
            d = tiny
        c = b + 1.0 / c
        if c == 0.0:
            c = tiny
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < _CF_TOL:
            return f, True
    return f, False


def bessel_ratio(nu: float, z: float) -> float:
    """Ratio I_{nu+1}(z)/I_nu(z) of modified Bessel functions.

    Evaluated by a continued fraction (relative tolerance 1e-14, at most
    1e5 terms). In the far tail z >> nu the fraction converges too slowly
    to hit the cap, but there the exponentially scaled Bessel functions
    are safe, so the computation falls through to their ratio.
    """
    _check_nu_z(nu, z)
    r, converged = _bessel_ratio_cf(nu, z)
    if not converged:
        num = ive(nu + 1.0, z)
        den = ive(nu, z)
        if den > 0.0 and math.isfinite(num) and num > 0.0:
            r = num / den
        else:
            raise ArithmeticError(f"bessel_ratio failed to converge at nu={nu}, z={z}")
    return r


def s_bound(alpha: float, beta: float, x: float) -> float:
    """S_{alpha,beta}(x) = sqrt(x^2+beta^2) - beta - alpha*log((alpha+sqrt(x^2+beta^2))/(alpha+beta)).

    Increasing in x with S(0) = 0. For suitable (alpha, beta) these
    functions sandwich log H_nu.
    """
    if not (alpha >= 0.0 and beta > 0.0):
        raise ValueError(f"need alpha >= 0 and beta > 0, got alpha={alpha}, beta={beta}")
    if not (math.isfinite(x) and x >= 0.0):
        raise ValueError(f"argument x must be finite and >= 0, got {x}")
    root = math.hypot(x, beta)
    # root - beta = x^2/(root+beta) avoids cancellation for small x
    excess = x * x / (root + beta)
    return excess - alpha * math.log1p(excess / (alpha + beta))


def _log_h_series(nu: float, x: float) -> float:
    """0F1(nu+1; x^2/4) summed directly; all terms are positive."""
    q = 0.25 * x * x
    total = 1.0
    comp = 0.0  # Kahan compensation
    term = 1.0
    m = 0
    while True:
        m += 1
        term *= q / (m * (nu + m))
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if term <= 1e-18 * total:
            break
        if m > 100_000:
            raise ArithmeticError(f"log_H series did not converge at nu={nu}, x={x}")
    return math.log(total)


def log_H(nu: float, x: float) -> float:
    """log H_nu(x) with H_nu(x) = Gamma(nu+1) I_nu(x) / (x/2)^nu.

    H_nu(0) = 1, and for x > 0 the value is sandwiched between
    s_bound(nu+1/2, nu+3/2, x) and s_bound(nu, nu+2, x).

    The hypergeometric series is exact and fast whenever its sum fits in a
    double (it is bounded by e^x and by e^{x^2/(4 nu)}-type quantities);
    past that the scaled Bessel route takes over, with an order-raising
    ratio recursion as a last resort if the scaled function underflows.
    """
    if not nu > -0.5:
        raise ValueError(f"order nu must exceed -1/2, got {nu}")
    if not (math.isfinite(x) and x >= 0.0):
        raise ValueError(f"argument x must be finite and >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if s_bound(nu, nu + 2.0, x) <= _SERIES_LOG_CAP:
        return _log_h_series(nu, x)
    # log H = lgamma(nu+1) + log I_nu(x) - nu log(x/2), log I via ive
    scaled = ive(nu, x)
    if scaled > 0.0 and math.isfinite(scaled):
        return math.lgamma(nu + 1.0) + math.log(scaled) + x - nu * math.log(0.5 * x)
    # ive underflowed: raise the order until the series is usable again and
    # walk back down with ratio steps log I_nu = log I_{nu+k} - sum log r
    k = int(math.ceil(x * x / (4.0 * _SERIES_LOG_CAP) - nu)) + 1
    if k > 2_000_000:
        raise ArithmeticError(f"log_H out of supported range at nu={nu}, x={x}")
    high = _log_h_series(nu + k, x)
    ratios = 0.0
    for j in range(k):
        ratios += math.log(bessel_ratio(nu + j, x))
    return (
        high
        + math.lgamma(nu + 1.0)
        - math.lgamma(nu + k + 1.0)
        + k * math.log(0.5 * x)
        - ratios
    )


def log_c(p: int, kappa: float) -> float:
    """Log normalizing constant of the spiked density exp(kappa * x'theta).

    log c_{p,kappa} = log c_p - log H_{p/2-1}(kappa), where
    c_p = Gamma(p/2) / (sqrt(pi) Gamma((p-1)/2)) is the kappa = 0 value.
    """
    if p < 2:
        raise ValueError(f"dimension p must be >= 2, got {p}")
    if not (math.isfinite(kappa) and kappa >= 0.0):
        raise ValueError(f"concentration kappa must be finite and >= 0, got {kappa}")
    log_cp = math.lgamma(0.5 * p) - 0.5 * math.log(math.pi) - math.lgamma(0.5 * (p - 1))
    if kappa == 0.0:
        return log_cp
    return log_cp - log_H(0.5 * p - 1.0, kappa)


def std_normal_cdf(x: float) -> float:
    """Standard normal distribution function Phi."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


# Rational approximation coefficients for the central and tail branches of
# the normal quantile (absolute error ~1e-9 before refinement).
_Q_A = (
    -3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
    1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00,
)
_Q_B = (
    -5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
    6.680131188771972e01, -1.328068155288572e01,
)
_Q_C = (
    -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
    -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00,
)
_Q_D = (
    7.784695709041462e-03, 3.224671290700398e-01,
    2.445134137142996e00, 3.754408661907416e00,
)


def std_normal_quantile(q: float) -> float:
    """Inverse of Phi on (0, 1); rational approximation plus one Newton step."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile argument must lie in (0,1), got {q}")
    a, b, c, d = _Q_A, _Q_B, _Q_C, _Q_D
    p_low = 0.02425
    if q < p_low:
        u = math.sqrt(-2.0 * math.log(q))
        x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) / (
            (((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0
        )
    elif q > 1.0 - p_low:
        u = math.sqrt(-2.0 * math.log(1.0 - q))
        x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) / (
            (((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0
        )
    else:
        u = q - 0.5
        r = u * u
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u / (
            ((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0
        )
    pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    if pdf > 0.0:
        x -= (std_normal_cdf(x) - q) / pdf
    return x


def _chi2_cdf(df: int, x: float) -> float:
    if x <= 0.0:
        return 0.0
    return float(gammainc(0.5 * df, 0.5 * x))


def chi2_survival(df: int, x: float) -> float:
    """Upper tail P(chi2_df > x); complements chi2_quantile."""
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if x <= 0.0:
        return 1.0
    return float(gammaincc(0.5 * df, 0.5 * x))


def _chi2_logpdf(df: int, x: float) -> float:
    h = 0.5 * df
    return (h - 1.0) * math.log(x) - 0.5 * x - h * math.log(2.0) - math.lgamma(h)


def chi2_quantile(df: int, q: float) -> float:
    """Chi-square quantile: Newton on the regularized incomplete gamma,
    seeded by the Wilson-Hilferty cube approximation, with a bisection
    fallback if Newton leaves the bracket or stalls.
    """
    if df < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got {df}")
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile argument must lie in (0,1), got {q}")
    z = std_normal_quantile(q)
    w = 2.0 / (9.0 * df)
    x = df * (1.0 - w + z * math.sqrt(w)) ** 3
    if x <= 0.0:
        x = df * 1e-8
    converged = False
    for _ in range(60):
        err = _chi2_cdf(df, x) - q
        if abs(err) < 1e-14:
            converged = True
            break
        step = err / math.exp(_chi2_logpdf(df, x))
        x_new = x - step
        if x_new <= 0.0:
            x_new = 0.5 * x
        if abs(x_new - x) <= 1e-12 * x:
            x = x_new
            converged = True
            break
        x = x_new
    if not converged and abs(_chi2_cdf(df, x) - q) > 1e-10:
        lo, hi = 0.0, max(2.0 * x, float(df))
        while _chi2_cdf(df, hi) < q:
            hi *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if _chi2_cdf(df, mid) < q:
                lo = mid
            else:
                hi = mid
        x = 0.5 * (lo + hi)
    return x
