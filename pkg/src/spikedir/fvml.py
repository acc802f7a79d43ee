"""Spiked (FvML) and rotationally symmetric laws on the unit sphere.

A sample point decomposes as X = U*theta + sqrt(1-U^2)*S with U = X'theta
and S uniform on the equator orthogonal to theta. The distribution is
pinned down by theta and the law of U; the FvML family has U-density
proportional to (1-u^2)^((p-3)/2) exp(kappa*u) on [-1, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .specfun import bessel_ratio

__all__ = [
    "FvmlParams",
    "MomentSet",
    "RadialLaw",
    "as_direction",
    "misspecified_projection_moments",
    "moment_asymptotics",
    "moments",
    "sample_equator",
    "sample_fvml",
    "sample_rotsym",
    "sample_u",
    "sample_uniform_sphere",
    "standard_normal",
]

# Below this the density is numerically indistinguishable from uniform.
_KAPPA_UNIFORM_CUTOFF = 1e-300


def as_direction(coords: np.ndarray) -> np.ndarray:
    """Validate a unit vector (norm 1 within 1e-12) and return it as float64."""
    v = np.ascontiguousarray(coords, dtype=np.float64)
    if v.ndim != 1 or v.size < 2:
        raise ValueError(f"a direction must be a vector of length >= 2, got shape {v.shape}")
    nrm = float(np.linalg.norm(v))
    if abs(nrm - 1.0) > 1e-12:
        raise ValueError(f"direction must have unit norm, got ||v|| = {nrm!r}")
    return v


@dataclass(frozen=True)
class FvmlParams:
    """Location theta on the sphere and concentration kappa > 0."""

    theta: np.ndarray
    kappa: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "theta", as_direction(self.theta))
        if not (math.isfinite(self.kappa) and self.kappa > 0.0):
            raise ValueError(f"kappa must be finite and > 0, got {self.kappa}")

    @property
    def p(self) -> int:
        return self.theta.size


@dataclass(frozen=True)
class MomentSet:
    """Moments of the projection U = X'theta and of V = sqrt(1-U^2).

    e1 = E[U], e2 = E[U^2], e2_tilde = Var[U], f2 = E[V^2] = 1 - e2,
    f4_over_f2_sq = E[V^4]/E[V^2]^2.
    """

    e1: float
    e2: float
    e2_tilde: float
    f2: float
    f4_over_f2_sq: float

    @property
    def f4(self) -> float:
        return self.f4_over_f2_sq * self.f2 * self.f2

    @property
    def e4(self) -> float:
        # E[U^4] = E[(1 - V^2)^2] = 1 - 2 f2 + f4
        return 1.0 - 2.0 * self.f2 + self.f4


def moments(p: int, kappa: float) -> MomentSet:
    """Exact FvML projection moments for dimension p and concentration kappa.

    e1 is the Bessel ratio at order p/2-1, f2 = (p-1) e1 / kappa,
    e2 = 1 - f2, Var[U] = e2 - e1^2, and
    f4/f2^2 = (p+1)/(p-1) * ratio(p/2)/ratio(p/2-1).
    """
    if p < 2:
        raise ValueError(f"dimension p must be >= 2, got {p}")
    if not (math.isfinite(kappa) and kappa > 0.0):
        raise ValueError(f"kappa must be finite and > 0, got {kappa}")
    r_lo = bessel_ratio(0.5 * p - 1.0, kappa)
    r_hi = bessel_ratio(0.5 * p, kappa)
    e1 = r_lo
    f2 = (p - 1.0) * e1 / kappa
    e2 = 1.0 - f2
    e2_tilde = 1.0 - f2 - e1 * e1
    if e2_tilde <= 0.0:
        raise ArithmeticError(
            f"Var[U] underflowed to {e2_tilde} at p={p}, kappa={kappa}; "
            "the (p, kappa) pair is outside the numerically supported range"
        )
    f4_over_f2_sq = (p + 1.0) / (p - 1.0) * (r_hi / r_lo)
    return MomentSet(e1=e1, e2=e2, e2_tilde=e2_tilde, f2=f2, f4_over_f2_sq=f4_over_f2_sq)


def moment_asymptotics(p: int, kappa: float) -> MomentSet:
    """Leading-order moments from the concentration regime xi = kappa/p.

    With c = 1/2 + sqrt(1/4 + xi^2): e1 ~ xi/c, f2 ~ 1/c and
    Var[U] ~ 1/(2 p c (c - 1/2)). The three xi regimes (xi -> infinity,
    xi -> constant, xi -> 0) are all covered by these expressions.
    """
    if p < 2:
        raise ValueError(f"dimension p must be >= 2, got {p}")
    if not (math.isfinite(kappa) and kappa > 0.0):
        raise ValueError(f"kappa must be finite and > 0, got {kappa}")
    xi = kappa / p
    c = 0.5 + math.hypot(0.5, xi)
    e1 = xi / c
    f2 = 1.0 / c
    e2 = 1.0 - f2
    e2_tilde = 1.0 / (2.0 * p * c * (c - 0.5))
    xi_hi = kappa / (p + 2.0)
    c_hi = 0.5 + math.hypot(0.5, xi_hi)
    f4_over_f2_sq = (p + 1.0) / (p - 1.0) * (xi_hi / c_hi) / e1
    return MomentSet(e1=e1, e2=e2, e2_tilde=e2_tilde, f2=f2, f4_over_f2_sq=f4_over_f2_sq)


def standard_normal(rng: np.random.Generator, size: int) -> np.ndarray:
    """Standard normal variates via the Box-Muller transform.

    Pairs are formed deterministically from consecutive uniforms and no
    leftover variate is cached, so the draw sequence is a pure function of
    the generator state and the requested size.
    """
    if size == 0:
        return np.empty(0)
    half = (size + 1) // 2
    u1 = rng.random(half)
    u2 = rng.random(half)
    radius = np.sqrt(-2.0 * np.log1p(-u1))  # 1-u1 in (0,1] avoids log(0)
    angle = 2.0 * np.pi * u2
    out = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])
    return out[:size]


def sample_u(p: int, kappa: float, rng: np.random.Generator, size: int = 1) -> np.ndarray:
    """Draw the projection U with density prop. to (1-u^2)^((p-3)/2) exp(kappa*u).

    Rejection sampler with a symmetric-Beta envelope; the acceptance test
    runs in the log domain so arbitrarily large kappa is safe.
    """
    if p < 2:
        raise ValueError(f"dimension p must be >= 2, got {p}")
    if not (math.isfinite(kappa) and kappa > 0.0):
        raise ValueError(f"kappa must be finite and > 0, got {kappa}")
    if size < 0:
        raise ValueError("size must be >= 0")
    m = p - 1.0
    if kappa < _KAPPA_UNIFORM_CUTOFF:
        return 2.0 * rng.beta(0.5 * m, 0.5 * m, size=size) - 1.0
    b = m / (math.hypot(2.0 * kappa, m) + 2.0 * kappa)
    x0 = (1.0 - b) / (1.0 + b)
    c = kappa * x0 + m * math.log1p(-x0 * x0)
    out = np.empty(size)
    filled = 0
    while filled < size:
        todo = size - filled
        # envelope acceptance is >= 2/3; 30% headroom keeps passes rare
        batch = max(16, int(1.3 * todo) + 1)
        z = rng.beta(0.5 * m, 0.5 * m, size=batch)
        w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z)
        u = rng.random(batch)
        accept = kappa * w + m * np.log1p(-x0 * w) - c >= np.log1p(-u)
        got = w[accept]
        take = min(todo, got.size)
        out[filled : filled + take] = got[:take]
        filled += take
    return out


def sample_equator(
    theta0: np.ndarray, rng: np.random.Generator, size: int = 1
) -> np.ndarray:
    """Uniform draws from the equator {x on the sphere : x'theta0 = 0}.

    Gaussian vectors are projected off theta0 and normalized; rows whose
    projection collapses numerically (probability-zero event) are redrawn.
    """
    theta0 = as_direction(theta0)
    p = theta0.size
    out = np.empty((size, p))
    rows = np.arange(size)
    while rows.size:
        g = standard_normal(rng, rows.size * p).reshape(rows.size, p)
        g -= np.outer(g @ theta0, theta0)
        nrm = np.linalg.norm(g, axis=1)
        ok = nrm >= 1e-30
        out[rows[ok]] = g[ok] / nrm[ok, None]
        rows = rows[~ok]
    return out[0] if size == 1 and out.shape[0] == 1 else out


def _compose_tangent_normal(
    theta: np.ndarray, u: np.ndarray, s: np.ndarray
) -> np.ndarray:
    v = np.sqrt(np.clip(1.0 - u * u, 0.0, None))
    return u[:, None] * theta + v[:, None] * s


def sample_fvml(
    params: FvmlParams, n: int, rng: np.random.Generator
) -> np.ndarray:
    """n x p sample from the FvML law: X = U*theta + sqrt(1-U^2)*S."""
    if n < 1:
        raise ValueError(f"sample size n must be >= 1, got {n}")
    if params.kappa < _KAPPA_UNIFORM_CUTOFF:
        return sample_uniform_sphere(params.p, n, rng)
    u = sample_u(params.p, params.kappa, rng, size=n)
    s = sample_equator(params.theta, rng, size=n).reshape(n, params.p)
    return _compose_tangent_normal(params.theta, u, s)


@dataclass
class RadialLaw:
    """Law of the projection U in [-1, 1] for a rotationally symmetric model.

    ``sampler(rng, size)`` must return draws in [-1, 1]. Analytic moments
    may be declared; otherwise they are estimated from 1e6 draws when first
    needed and flagged as such.
    """

    sampler: Callable[[np.random.Generator, int], np.ndarray]
    e1: Optional[float] = None
    e2: Optional[float] = None
    e4: Optional[float] = None
    f2: Optional[float] = None
    f4: Optional[float] = None
    moments_estimated: bool = field(default=False, init=False)

    _ESTIMATION_DRAWS = 1_000_000
    _ESTIMATION_SEED = 0x5EED_0F_0D

    def ensure_moments(self) -> "RadialLaw":
        declared = (self.e1, self.e2, self.e4, self.f2, self.f4)
        if all(v is not None for v in declared):
            return self
        rng = np.random.Generator(np.random.Philox(key=self._ESTIMATION_SEED))
        u = np.asarray(self.sampler(rng, self._ESTIMATION_DRAWS), dtype=np.float64)
        if u.size and (u.min() < -1.0 or u.max() > 1.0):
            raise ValueError("radial law sampler produced values outside [-1, 1]")
        u2 = u * u
        self.e1 = float(u.mean()) if self.e1 is None else self.e1
        self.e2 = float(u2.mean()) if self.e2 is None else self.e2
        self.e4 = float((u2 * u2).mean()) if self.e4 is None else self.e4
        self.f2 = float((1.0 - u2).mean()) if self.f2 is None else self.f2
        self.f4 = float(((1.0 - u2) ** 2).mean()) if self.f4 is None else self.f4
        self.moments_estimated = True
        return self


def sample_rotsym(
    theta: np.ndarray, law: RadialLaw, n: int, rng: np.random.Generator
) -> np.ndarray:
    """n x p sample from the rotationally symmetric law with given radial part."""
    theta = as_direction(theta)
    if n < 1:
        raise ValueError(f"sample size n must be >= 1, got {n}")
    u = np.asarray(law.sampler(rng, n), dtype=np.float64)
    if u.shape != (n,):
        raise ValueError(f"radial sampler returned shape {u.shape}, expected ({n},)")
    if u.size and (u.min() < -1.0 or u.max() > 1.0):
        raise ValueError("radial law sampler produced values outside [-1, 1]")
    s = sample_equator(theta, rng, size=n).reshape(n, theta.size)
    return _compose_tangent_normal(theta, u, s)


def sample_uniform_sphere(p: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n x p sample from the uniform law on the unit sphere."""
    if p < 2:
        raise ValueError(f"dimension p must be >= 2, got {p}")
    if n < 1:
        raise ValueError(f"sample size n must be >= 1, got {n}")
    out = np.empty((n, p))
    rows = np.arange(n)
    while rows.size:
        g = standard_normal(rng, rows.size * p).reshape(rows.size, p)
        nrm = np.linalg.norm(g, axis=1)
        ok = nrm >= 1e-30
        out[rows[ok]] = g[ok] / nrm[ok, None]
        rows = rows[~ok]
    return out


def misspecified_projection_moments(
    theta: np.ndarray,
    theta0: np.ndarray,
    e2: float,
    e4: float,
    f2: float,
    f4: float,
) -> tuple[float, float]:
    """Closed-form E[(X'theta0)^2] and E[(X'theta0)^4] when X is rotationally
    symmetric about theta but projected on a reference direction theta0.

    With u = theta0'theta and p the dimension:
      m2 = e2 u^2 + f2/(p-1) (1-u^2)
      m4 = e4 u^4 + 6 (e2-e4)/(p-1) u^2 (1-u^2) + 3 f4/(p^2-1) (1-u^2)^2
    """
    theta = as_direction(theta)
    theta0 = as_direction(theta0)
    if theta.size != theta0.size:
        raise ValueError(f"dimension mismatch: {theta.size} vs {theta0.size}")
    p = theta.size
    u = float(theta0 @ theta)
    w = 1.0 - u * u
    m2 = e2 * u * u + f2 / (p - 1.0) * w
    m4 = (
        e4 * u**4
        + 6.0 * (e2 - e4) / (p - 1.0) * u * u * w
        + 3.0 * f4 / (p * p - 1.0) * w * w
    )
    return m2, m4
