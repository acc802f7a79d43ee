"""Concentration regimes, their kappa recipes, and local-alternative geometry.

A triple (n, p, kappa) is classified asymptotically by where the ratios
kappa/p, sqrt(n)kappa/p, sqrt(n)kappa/p^(3/4) and sqrt(n)kappa/sqrt(p)
converge. The nine regime labels index rows of that taxonomy; finite
triples cannot be classified exactly, so the simulation harness always
takes the regime as input and ``diagnose`` is advisory only.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .fvml import as_direction

__all__ = [
    "LocalAlternative",
    "Regime",
    "RegimeDiagnosis",
    "check_constraint",
    "contiguity_rate",
    "diagnose",
    "kappa_for_regime",
    "local_alternative",
    "realized_xi",
]


class Regime(str, enum.Enum):
    I = "i"
    II = "ii"
    III = "iii"
    IV = "iv"
    VA = "va"
    VB = "vb"
    VC = "vc"
    VI = "vi"
    VII = "vii"

    @classmethod
    def parse(cls, text: str) -> "Regime":
        try:
            return cls(text.strip().lower())
        except ValueError:
            valid = ", ".join(r.value for r in cls)
            raise ValueError(f"unknown regime {text!r}; expected one of: {valid}") from None


#: Regimes whose defining ratio converges to a finite positive constant xi.
BOUNDARY_REGIMES = frozenset({Regime.II, Regime.IV, Regime.VB, Regime.VI})

#: Regimes with a severe (beyond-contiguity) alternative recipe.
SEVERE_REGIMES = frozenset({Regime.VA, Regime.VB})


def _check_np(n: int, p: int) -> None:
    if n < 2 or p < 2:
        raise ValueError(f"need n >= 2 and p >= 2, got n={n}, p={p}")


def kappa_for_regime(label: Regime, n: int, p: int) -> float:
    """Concentration recipe placing (n, p, kappa) in the requested regime."""
    _check_np(n, p)
    label = Regime(label)
    sqrt_n = math.sqrt(n)
    recipes = {
        Regime.I: float(p) ** 2,
        Regime.II: float(p),
        Regime.III: p / n**0.25,
        Regime.IV: p / sqrt_n,
        Regime.VA: p**0.875 / sqrt_n,
        Regime.VB: p**0.75 / sqrt_n,
        Regime.VI: math.sqrt(p) / sqrt_n,
        Regime.VII: p**0.25 / sqrt_n,
    }
    if label not in recipes:
        raise ValueError(f"regime {label.value!r} has no concentration recipe")
    return recipes[label]


def realized_xi(label: Regime, n: int, p: int, kappa: float) -> float | None:
    """Finite-sample value of the regime's limit constant xi, when it has one."""
    _check_np(n, p)
    label = Regime(label)
    sqrt_n = math.sqrt(n)
    if label is Regime.II:
        return kappa / p
    if label is Regime.IV:
        return sqrt_n * kappa / p
    if label is Regime.VB:
        return sqrt_n * kappa / p**0.75
    if label is Regime.VI:
        return sqrt_n * kappa / math.sqrt(p)
    return None


def contiguity_rate(
    label: Regime, n: int, p: int, kappa: float, severe: bool = False
) -> float:
    """Scale nu of the least severe detectable alternatives theta0 + nu*tau.

    severe=True selects the beyond-contiguity recipes that exist for
    regimes va (Watson-rate alternatives) and vb (fixed alternatives).
    """
    _check_np(n, p)
    if not kappa > 0.0:
        raise ValueError(f"kappa must be > 0, got {kappa}")
    label = Regime(label)
    sqrt_n = math.sqrt(n)
    if severe:
        if label is Regime.VA:
            return p**0.75 / (sqrt_n * kappa)
        if label is Regime.VB:
            return 1.0
        raise ValueError(f"regime {label.value!r} has no severe-alternative recipe")
    if label is Regime.I:
        return p**0.25 / math.sqrt(n * kappa)
    if label is Regime.II:
        xi = kappa / p
        c_xi = 0.5 + math.hypot(0.5, xi)
        return math.sqrt(c_xi) * p**0.75 / (sqrt_n * kappa)
    if label in (Regime.III, Regime.IV):
        return p**0.75 / (sqrt_n * kappa)
    if label in (Regime.VA, Regime.VB, Regime.VC):
        return p**0.25 / (n**0.25 * math.sqrt(kappa))
    return 1.0  # VI, VII


@dataclass(frozen=True)
class LocalAlternative:
    """theta = theta0 + nu*tau on the sphere, with t = ||tau||.

    The sphere constraint forces theta0'tau = -nu ||tau||^2 / 2.
    """

    theta: np.ndarray
    nu: float
    tau: np.ndarray
    t: float


def local_alternative(
    theta0: np.ndarray, nu: float, ell: int, big_l: int
) -> LocalAlternative:
    """Perturbed location on the grid ell = 0..L, giving ||tau|| = 2*ell/L.

    In the frame where theta0 is the first basis vector,
    tau = (-2 nu ell^2/L^2, (2 ell/L) sqrt(1 - nu^2 ell^2/L^2), 0, ...);
    a Householder reflection mapping e1 to theta0 transports the
    construction to arbitrary theta0.
    """
    t0 = as_direction(theta0)
    if big_l < 1:
        raise ValueError(f"grid size L must be >= 1, got {big_l}")
    if not 0 <= ell <= big_l:
        raise ValueError(f"grid index ell must lie in 0..{big_l}, got {ell}")
    if not nu > 0.0:
        raise ValueError(f"nu must be > 0, got {nu}")
    p = t0.size
    frac = ell / big_l
    if nu * nu * frac * frac > 1.0 + 1e-12:
        raise ValueError(
            f"nu^2 ell^2/L^2 = {nu * nu * frac * frac:.6g} > 1: the perturbed point leaves the sphere"
        )
    tau = np.zeros(p)
    tau[0] = -2.0 * nu * frac * frac
    tau[1] = 2.0 * frac * math.sqrt(max(1.0 - nu * nu * frac * frac, 0.0))
    # reflect e1 onto theta0 (identity when theta0 is already e1)
    e1 = np.zeros(p)
    e1[0] = 1.0
    v = e1 - t0
    vnorm_sq = float(v @ v)
    if vnorm_sq > 1e-24:
        tau = tau - (2.0 * float(v @ tau) / vnorm_sq) * v
    theta = t0 + nu * tau
    nrm = float(np.linalg.norm(theta))
    theta = theta / nrm  # renormalize away accumulated rounding
    return LocalAlternative(theta=theta, nu=nu, tau=tau, t=2.0 * frac)


def check_constraint(theta0: np.ndarray, nu: float, tau: np.ndarray) -> bool:
    """Whether theta0'tau = -nu ||tau||^2 / 2 holds within 1e-10."""
    t0 = as_direction(theta0)
    tau = np.asarray(tau, dtype=np.float64)
    if tau.shape != t0.shape:
        raise ValueError(f"dimension mismatch: {tau.shape} vs {t0.shape}")
    return abs(float(t0 @ tau) + 0.5 * nu * float(tau @ tau)) < 1e-10


@dataclass(frozen=True)
class RegimeDiagnosis:
    """The four discriminating ratios and the taxonomy row nearest to them."""

    kappa_over_p: float
    sqrtn_kappa_over_p: float
    sqrtn_kappa_over_p34: float
    sqrtn_kappa_over_sqrtp: float
    nearest: Regime


def diagnose(n: int, p: int, kappa: float) -> RegimeDiagnosis:
    """Advisory nearest-row classification of a finite (n, p, kappa) triple.

    Boundary rows are scored by |log| of their defining ratio. Open rows
    are scored by how far the point is from sitting inside their band with
    a factor-of-2 margin, so triples essentially on a boundary report the
    boundary row and triples deep inside a band report the band.
    """
    _check_np(n, p)
    if not kappa > 0.0:
        raise ValueError(f"kappa must be > 0, got {kappa}")
    sqrt_n = math.sqrt(n)
    d1 = kappa / p
    d2 = sqrt_n * kappa / p
    d3 = sqrt_n * kappa / p**0.75
    d4 = sqrt_n * kappa / math.sqrt(p)
    l1, l2, l3, l4 = (math.log(d) for d in (d1, d2, d3, d4))
    margin = math.log(2.0)

    def band(depth: float) -> float:
        return max(0.0, margin - depth)

    scores = {
        Regime.I: band(l1),
        Regime.II: abs(l1),
        Regime.III: band(min(-l1, l2)),
        Regime.IV: abs(l2),
        Regime.VA: band(min(-l2, l3)),
        Regime.VB: abs(l3),
        Regime.VC: band(min(-l3, l4)),
        Regime.VI: abs(l4),
        Regime.VII: band(-l4),
    }
    nearest = min(scores, key=lambda r: (scores[r], r not in BOUNDARY_REGIMES))
    return RegimeDiagnosis(
        kappa_over_p=d1,
        sqrtn_kappa_over_p=d2,
        sqrtn_kappa_over_p34=d3,
        sqrtn_kappa_over_sqrtp=d4,
        nearest=nearest,
    )
