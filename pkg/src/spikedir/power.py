"""Asymptotic power formulas and Fisher information for the location problem.

Every power below is of the gaussian-shift form 1 - Phi(Phi^{-1}(1-alpha) - shift)
with a regime-dependent shift; shift = sqrt(Gamma) t^2 for the locally optimal
test with information Gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .regimes import Regime
from .specfun import std_normal_cdf, std_normal_quantile

__all__ = [
    "NO_CONSISTENT_TEST",
    "FisherInfo2",
    "NoConsistentTest",
    "efficient_central_sequence",
    "fisher_info_unspec",
    "gamma_for_regime",
    "hybrid_power",
    "optimal_power",
    "optimal_power_regime_iv",
    "optimal_test",
    "watson_power",
    "z_power",
]


class NoConsistentTest:
    """Marker for taxonomy rows where no test detects even the most severe
    alternatives; serialized as the literal string 'none'."""

    def __repr__(self) -> str:  # pragma: no cover
        return "NO_CONSISTENT_TEST"


NO_CONSISTENT_TEST = NoConsistentTest()


@dataclass(frozen=True)
class FisherInfo2:
    """Symmetric 2x2 information matrix for (location, concentration)."""

    g11: float
    g12: float
    g22: float

    def __post_init__(self) -> None:
        if self.g11 < 0.0 or self.g22 < 0.0:
            raise ValueError("diagonal information entries must be non-negative")
        if self.g11 * self.g22 - self.g12 * self.g12 < -1e-12:
            raise ValueError("information matrix must be positive semidefinite")


def _require_xi(label: Regime, xi: float | None) -> float:
    if xi is None or not xi > 0.0:
        raise ValueError(f"regime {label.value!r} needs a limit constant xi > 0, got {xi}")
    return xi


def gamma_for_regime(label: Regime, xi: float | None = None) -> float:
    """Fisher information of the limiting one-parameter experiment."""
    label = Regime(label)
    if label in (Regime.I, Regime.II, Regime.III):
        return 0.5
    if label is Regime.IV:
        xi = _require_xi(label, xi)
        return 0.5 + 0.25 / (xi * xi)
    if label in (Regime.VA, Regime.VB, Regime.VC):
        return 0.25
    if label is Regime.VI:
        xi = _require_xi(label, xi)
        return 0.25 * xi * xi
    return 0.0  # VII: degenerate limit, only the trivial test remains


def _shift_power(shift: float, alpha: float) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0,1), got {alpha}")
    return 1.0 - std_normal_cdf(std_normal_quantile(1.0 - alpha) - shift)


def optimal_power(gamma: float, t: float, alpha: float) -> float:
    """Limiting power 1 - Phi(Phi^{-1}(1-alpha) - sqrt(Gamma) t^2) of the
    locally optimal test; equals alpha identically when Gamma = 0."""
    if gamma < 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    return _shift_power(math.sqrt(gamma) * t * t, alpha)


def optimal_power_regime_iv(t: float, alpha: float, xi: float) -> float:
    """Power of the oracle test in the boundary regime iv, information
    1/2 + 1/(4 xi^2); strictly above the Watson power for t > 0."""
    xi = _require_xi(Regime.IV, xi)
    return optimal_power(0.5 + 0.25 / (xi * xi), t, alpha)


def watson_power(
    label: Regime,
    t: float,
    alpha: float,
    xi: float | None = None,
    severe: bool = False,
) -> float:
    """Limiting power of the Watson test under the regime's alternatives.

    Contiguous alternatives: 1 - Phi(Phi^{-1}(1-alpha) - t^2/sqrt(2)) in
    regimes i-iv, and exactly alpha in regimes va, vb, vc, vi, vii (where
    Watson is not even rate-consistent). Severe alternatives: regime va
    recovers the t^2/sqrt(2) curve; regime vb has the non-monotonic
    1 - Phi(Phi^{-1}(1-alpha) - xi^2 t^2/sqrt(2) (1 - t^2/4)).
    """
    label = Regime(label)
    if not 0.0 <= t <= 2.0:
        raise ValueError(f"t must lie in [0, 2] (sphere diameter), got {t}")
    if severe:
        if label is Regime.VA:
            return _shift_power(t * t / math.sqrt(2.0), alpha)
        if label is Regime.VB:
            xi = _require_xi(label, xi)
            return _shift_power(xi * xi * t * t / math.sqrt(2.0) * (1.0 - 0.25 * t * t), alpha)
        raise ValueError(f"regime {label.value!r} has no severe-alternative power formula")
    if label in (Regime.I, Regime.II, Regime.III, Regime.IV):
        return _shift_power(t * t / math.sqrt(2.0), alpha)
    return _shift_power(0.0, alpha)


def z_power(
    label: Regime, t: float, alpha: float, xi: float | None = None
) -> float:
    """Limiting power of the lower-tail Z test under contiguous alternatives.

    The Z statistic picks up a mean shift equal to the Z coefficient of the
    regime's central sequence: zero in regimes i-iii and vii (power alpha),
    t^2/(2 xi) in regime iv, t^2/2 in regime v, and xi t^2/2 in regime vi.
    """
    label = Regime(label)
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    if label in (Regime.I, Regime.II, Regime.III, Regime.VII):
        shift = 0.0
    elif label is Regime.IV:
        xi = _require_xi(label, xi)
        shift = t * t / (2.0 * xi)
    elif label in (Regime.VA, Regime.VB, Regime.VC):
        shift = 0.5 * t * t
    else:  # VI
        xi = _require_xi(label, xi)
        shift = 0.5 * xi * t * t
    return _shift_power(shift, alpha)


def hybrid_power(
    label: Regime, t: float, alpha: float, xi: float | None = None
) -> float:
    """Limiting power of the hybrid test under contiguous alternatives: it
    tracks the optimal specified-concentration test in every regime."""
    return optimal_power(gamma_for_regime(label, xi), t, alpha)


def optimal_test(label: Regime, kappa_specified: bool):
    """Which statistic carries the locally optimal test in each regime.

    Returns 'watson', 'z' or 'hybrid', or the NO_CONSISTENT_TEST marker for
    rows where no test detects even the most severe alternatives. With
    unspecified concentration the answer in regime vb holds only locally in
    the perturbation.
    """
    label = Regime(label)
    if kappa_specified:
        table = {
            Regime.I: "watson", Regime.II: "watson", Regime.III: "watson",
            Regime.IV: "hybrid",
            Regime.VA: "z", Regime.VB: "z", Regime.VC: "z", Regime.VI: "z",
            Regime.VII: NO_CONSISTENT_TEST,
        }
    else:
        table = {
            Regime.I: "watson", Regime.II: "watson", Regime.III: "watson",
            Regime.IV: "watson", Regime.VA: "watson", Regime.VB: "watson",
            Regime.VC: NO_CONSISTENT_TEST, Regime.VI: NO_CONSISTENT_TEST,
            Regime.VII: NO_CONSISTENT_TEST,
        }
    return table[label]


def fisher_info_unspec(label: Regime, xi: float | None = None) -> FisherInfo2:
    """Joint (location, concentration) information matrix where the
    unspecified-concentration theory provides one: regimes iv, va, vb, vc, vi."""
    label = Regime(label)
    if label is Regime.IV:
        xi = _require_xi(label, xi)
        return FisherInfo2(g11=0.5 + 0.25 / (xi * xi), g12=-0.5 / xi, g22=1.0)
    if label in (Regime.VA, Regime.VB):
        return FisherInfo2(g11=0.5, g12=0.0, g22=1.0)
    if label is Regime.VC:
        return FisherInfo2(g11=0.0, g12=0.0, g22=1.0)
    if label is Regime.VI:
        return FisherInfo2(g11=0.25, g12=-0.5, g22=1.0)
    raise ValueError(f"no joint information matrix for regime {label.value!r}")


def efficient_central_sequence(
    delta1: float, delta2: float, info: FisherInfo2
) -> tuple[float, float]:
    """Residual of the location score regressed on the concentration score.

    Returns (delta_star, gamma_star) with delta_star = d1 - (g12/g22) d2 and
    gamma_star = g11 - g12^2/g22, the variance of delta_star.
    """
    if not info.g22 > 0.0:
        raise ValueError("concentration information g22 must be > 0")
    delta_star = delta1 - (info.g12 / info.g22) * delta2
    gamma_star = info.g11 - info.g12 * info.g12 / info.g22
    return delta_star, gamma_star
