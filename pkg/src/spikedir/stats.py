"""Test statistics for the spherical location problem.

All statistics are computed from the tangent-normal decomposition with
respect to the null direction theta0: U_i = X_i'theta0, V_i = sqrt(1-U_i^2),
and the projection of the sample mean off theta0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fvml import as_direction, moments
from .specfun import chi2_quantile, log_H, std_normal_quantile

__all__ = [
    "DegenerateSampleError",
    "TangentDecomp",
    "TestResult",
    "hybrid",
    "invariant_llr",
    "laq_expansion",
    "projector_trace_form",
    "q_stat",
    "tangent_normal",
    "w_star",
    "watson",
    "watson_standardized",
    "z_stat",
    "z_test",
]


class DegenerateSampleError(ValueError):
    """Raised when all sample mass sits on +-theta0 and the Watson
    denominator vanishes."""


@dataclass(frozen=True)
class TangentDecomp:
    """x = u*theta0 + v*s with s a unit vector orthogonal to theta0.

    ``degenerate`` flags x = +-theta0, where s is not identified; a fixed
    orthonormal completion is returned so downstream code stays total.
    """

    u: float
    v: float
    s: np.ndarray
    degenerate: bool = False


@dataclass(frozen=True)
class TestResult:
    """Decision of a fixed-level test.

    ``reject`` is true iff the statistic falls past the threshold in the
    test's own rejection direction (upper tail for Watson and the hybrid
    statistic, lower tail for the Z statistic).
    """

    statistic: float
    threshold: float
    reject: bool
    alpha: float


def _check_sample(sample: np.ndarray, theta0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2:
        raise ValueError(f"sample must be an n x p matrix, got shape {x.shape}")
    t0 = as_direction(theta0)
    if x.shape[1] != t0.size:
        raise ValueError(f"dimension mismatch: sample has p={x.shape[1]}, theta0 has p={t0.size}")
    return x, t0


def _fixed_completion(theta0: np.ndarray) -> np.ndarray:
    """First standard basis vector orthogonalized against theta0 (falls back
    to the second one when theta0 is +-e1)."""
    p = theta0.size
    for k in range(2):
        e = np.zeros(p)
        e[k] = 1.0
        w = e - (e @ theta0) * theta0
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            return w / nrm
    raise AssertionError("unreachable: two basis vectors cannot both align with theta0")


def tangent_normal(x: np.ndarray, theta0: np.ndarray) -> TangentDecomp:
    """Decompose a point on the sphere as u*theta0 + v*s."""
    xv = np.asarray(x, dtype=np.float64)
    t0 = as_direction(theta0)
    if xv.shape != t0.shape:
        raise ValueError(f"dimension mismatch: {xv.shape} vs {t0.shape}")
    u = float(xv @ t0)
    resid = xv - u * t0
    nrm = float(np.linalg.norm(resid))
    if nrm < 1e-12:
        return TangentDecomp(
            u=1.0 if u >= 0.0 else -1.0, v=0.0, s=_fixed_completion(t0), degenerate=True
        )
    return TangentDecomp(u=u, v=nrm, s=resid / nrm)


def _suff_stats(sample: np.ndarray, theta0: np.ndarray) -> tuple[int, int, float, float, float]:
    """(n, p, sum U, sum V^2, ||proj of mean off theta0||^2)."""
    x, t0 = _check_sample(sample, theta0)
    n, p = x.shape
    u = x @ t0
    sum_u = float(np.sum(u))
    sum_v2 = float(np.sum(1.0 - u * u))
    xbar = x.mean(axis=0)
    proj_sq = float(xbar @ xbar) - (sum_u / n) ** 2
    return n, p, sum_u, max(sum_v2, 0.0), max(proj_sq, 0.0)


def watson(sample: np.ndarray, theta0: np.ndarray, alpha: float) -> TestResult:
    """Watson location test against the chi-square(p-1) upper quantile.

    W = n (p-1) ||proj of mean off theta0||^2 / ((1/n) sum V_i^2).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    n, p, _, sum_v2, proj_sq = _suff_stats(sample, theta0)
    if sum_v2 <= 0.0:
        raise DegenerateSampleError("all observations are +-theta0; Watson statistic undefined")
    stat = n * n * (p - 1.0) * proj_sq / sum_v2
    thr = chi2_quantile(p - 1, 1.0 - alpha)
    return TestResult(statistic=stat, threshold=thr, reject=stat > thr, alpha=alpha)


def watson_standardized(sample: np.ndarray, theta0: np.ndarray) -> float:
    """(W - (p-1)) / sqrt(2(p-1)); asymptotically standard normal under the null."""
    n, p, _, sum_v2, proj_sq = _suff_stats(sample, theta0)
    if sum_v2 <= 0.0:
        raise DegenerateSampleError("all observations are +-theta0; Watson statistic undefined")
    w = n * n * (p - 1.0) * proj_sq / sum_v2
    return (w - (p - 1.0)) / math.sqrt(2.0 * (p - 1.0))


def w_star(sample: np.ndarray, theta0: np.ndarray, f2: float) -> float:
    """Pairwise-sum statistic with the random normalizer sum V_i^2 replaced
    by its expectation n*f2.

    The pairwise sum over i<j of V_i V_j S_i'S_j collapses to
    (n^2 ||proj mean||^2 - sum V^2)/2 because V_i S_i is exactly the
    projection of X_i off theta0.
    """
    if not f2 > 0.0:
        raise ValueError(f"f2 must be > 0, got {f2}")
    n, p, _, sum_v2, proj_sq = _suff_stats(sample, theta0)
    pair_sum = 0.5 * (n * n * proj_sq - sum_v2)
    return math.sqrt(2.0 * (p - 1.0)) * pair_sum / (n * f2)


def z_stat(sample: np.ndarray, theta0: np.ndarray, e1: float, e2_tilde: float) -> float:
    """sqrt(n) (mean(U) - e1) / sqrt(Var U); asymptotically standard normal
    under the null when (e1, Var U) match the sampling law."""
    if not e2_tilde > 0.0:
        raise ValueError(f"e2_tilde must be > 0, got {e2_tilde}")
    n, _, sum_u, _, _ = _suff_stats(sample, theta0)
    return math.sqrt(n) * (sum_u / n - e1) / math.sqrt(e2_tilde)


def z_test(
    sample: np.ndarray, theta0: np.ndarray, e1: float, e2_tilde: float, alpha: float
) -> TestResult:
    """Lower-tail test based on the Z statistic: reject when Z < Phi^{-1}(alpha)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    z = z_stat(sample, theta0, e1, e2_tilde)
    thr = std_normal_quantile(alpha)
    return TestResult(statistic=z, threshold=thr, reject=z < thr, alpha=alpha)


def hybrid(
    sample: np.ndarray, theta0: np.ndarray, kappa: float, alpha: float
) -> TestResult:
    """Hybrid test mixing the standardized Watson and Z statistics.

    H = (W~/sqrt(2) - Z/(2 xi)) / sqrt(1/2 + 1/(4 xi^2)) with
    xi = sqrt(n) kappa / p, rejected in the upper tail. The Z part uses the
    exact moments for (p, kappa).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    if not kappa > 0.0:
        raise ValueError(f"kappa must be > 0, got {kappa}")
    x, t0 = _check_sample(sample, theta0)
    n, p = x.shape
    mom = moments(p, kappa)
    w_t = watson_standardized(x, t0)
    z = z_stat(x, t0, mom.e1, mom.e2_tilde)
    xi = math.sqrt(n) * kappa / p
    stat = (w_t / math.sqrt(2.0) - z / (2.0 * xi)) / math.sqrt(0.5 + 0.25 / (xi * xi))
    thr = std_normal_quantile(1.0 - alpha)
    return TestResult(statistic=stat, threshold=thr, reject=stat > thr, alpha=alpha)


def q_stat(mu: float, lam: float, w_tilde: float, z: float) -> float:
    """Non-negative mixture mu*W~ + lam*(-Z) of the two rejection directions."""
    if mu < 0.0 or lam < 0.0:
        raise ValueError(f"weights must be non-negative, got mu={mu}, lam={lam}")
    return mu * w_tilde + lam * (-z)


def invariant_llr(
    sample: np.ndarray, theta0: np.ndarray, theta: np.ndarray, kappa: float
) -> float:
    """Exact log-likelihood ratio of the rotation-invariant reduction.

    Lambda = n kappa (theta'theta0 - 1) (Xbar'theta0)
             + log H_{(p-3)/2}( n kappa ||proj theta|| ||proj Xbar|| ),

    projections taken off theta0. Zero at theta = theta0 by construction.
    Requires p >= 3 (for p = 2 the equator degenerates to two points).
    """
    x, t0 = _check_sample(sample, theta0)
    th = as_direction(theta)
    if th.size != t0.size:
        raise ValueError(f"dimension mismatch: {th.size} vs {t0.size}")
    if not kappa > 0.0:
        raise ValueError(f"kappa must be > 0, got {kappa}")
    n, p = x.shape
    if p < 3:
        raise ValueError("invariant likelihood requires p >= 3")
    xbar = x.mean(axis=0)
    ubar = float(xbar @ t0)
    cos_tt0 = float(th @ t0)
    proj_theta = math.sqrt(max(1.0 - cos_tt0 * cos_tt0, 0.0))
    proj_xbar = math.sqrt(max(float(xbar @ xbar) - ubar * ubar, 0.0))
    linear = n * kappa * (cos_tt0 - 1.0) * ubar
    arg = n * kappa * proj_theta * proj_xbar
    return linear + log_H(0.5 * (p - 3.0), arg)


def laq_expansion(
    w_tilde: float,
    z: float,
    n: int,
    p: int,
    kappa: float,
    nu: float,
    tau_norm: float,
    e1: float,
    e2_tilde: float,
) -> float:
    """Four-term quadratic expansion of the invariant log-likelihood ratio.

    -1/2 sqrt(n) k nu^2 sqrt(Var U) t^2 Z
    + n k nu^2 e1 / (sqrt(2) sqrt(p)) * t^2 (1 - nu^2 t^2/4) W~
    - 1/8 n k nu^4 e1 t^4
    - n^2 k^2 nu^4 e1^2 / (4p) * t^4 (1 - nu^2 t^2/4)^2

    with t = tau_norm. The expansion is exact arithmetic on its inputs; its
    quality as an approximation to the invariant likelihood is a property
    of the (n, p, kappa, nu) regime, not of this function.
    """
    if nu * nu * tau_norm * tau_norm > 4.0 + 1e-12:
        raise ValueError("nu^2 ||tau||^2 cannot exceed 4 on the sphere")
    t2 = tau_norm * tau_norm
    shrink = 1.0 - 0.25 * nu * nu * t2
    term_z = -0.5 * math.sqrt(n) * kappa * nu * nu * math.sqrt(e2_tilde) * t2 * z
    term_w = n * kappa * nu * nu * e1 / (math.sqrt(2.0) * math.sqrt(p)) * t2 * shrink * w_tilde
    term_c1 = -0.125 * n * kappa * nu**4 * e1 * t2 * t2
    term_c2 = -(n * n * kappa * kappa * nu**4 * e1 * e1) / (4.0 * p) * t2 * t2 * shrink * shrink
    return term_z + term_w + term_c1 + term_c2


def projector_trace_form(
    theta: np.ndarray,
    theta0: np.ndarray,
    a: float,
    b: float,
    c: float,
    d: float,
    ell: int,
) -> float:
    """Closed form of tr[M^ell A M^ell C] for M = theta theta' - theta0 theta0',
    A = a theta theta' + b (I - theta theta'), C likewise with (c, d).

    With w = 1 - (theta0'theta)^2:
      ell = 1:  (ad + bc) w + (a - b)(c - d) w^2
      ell = 2:  (ac + bd) w^2
    """
    th = as_direction(theta)
    t0 = as_direction(theta0)
    if th.size != t0.size:
        raise ValueError(f"dimension mismatch: {th.size} vs {t0.size}")
    if ell not in (1, 2):
        raise ValueError(f"ell must be 1 or 2, got {ell}")
    u = float(t0 @ th)
    w = 1.0 - u * u
    if ell == 1:
        return (a * d + b * c) * w + (a - b) * (c - d) * w * w
    return (a * c + b * d) * w * w
