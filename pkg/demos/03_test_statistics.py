"""The three location tests on one sample, and the exact invariant
log-likelihood ratio against its quadratic expansion."""

import numpy as np

from spikedir.fvml import FvmlParams, moments, sample_fvml
from spikedir.mc import make_rng
from spikedir.regimes import Regime, contiguity_rate, kappa_for_regime, local_alternative
from spikedir.stats import (
    hybrid,
    invariant_llr,
    laq_expansion,
    watson,
    watson_standardized,
    z_stat,
    z_test,
)

n = p = 400
regime = Regime.IV
kappa = kappa_for_regime(regime, n, p)
nu = contiguity_rate(regime, n, p, kappa)
theta0 = np.zeros(p)
theta0[0] = 1.0
alt = local_alternative(theta0, nu, 3, 5)
mom = moments(p, kappa)

rng = make_rng(7, 0, 0, 0)
x = sample_fvml(FvmlParams(theta=alt.theta, kappa=kappa), n, rng)

print(f"sample away from the null: t=||tau||={alt.t}, theta'theta0={float(alt.theta @ theta0):.6f}")
res_w = watson(x, theta0, 0.05)
print(f"  watson:  W={res_w.statistic:9.3f}  threshold={res_w.threshold:9.3f}  reject={res_w.reject}")
res_z = z_test(x, theta0, mom.e1, mom.e2_tilde, 0.05)
print(f"  z:       Z={res_z.statistic:9.3f}  threshold={res_z.threshold:9.3f}  reject={res_z.reject}")
res_h = hybrid(x, theta0, kappa, 0.05)
print(f"  hybrid:  H={res_h.statistic:9.3f}  threshold={res_h.threshold:9.3f}  reject={res_h.reject}")

print("\ninvariant likelihood ratio vs quadratic expansion (under the null law):")
x0 = sample_fvml(FvmlParams(theta=theta0, kappa=kappa), n, rng)
lam = invariant_llr(x0, theta0, alt.theta, kappa)
approx = laq_expansion(
    watson_standardized(x0, theta0),
    z_stat(x0, theta0, mom.e1, mom.e2_tilde),
    n, p, kappa, nu, alt.t, mom.e1, mom.e2_tilde,
)
print(f"  exact={lam:+.4f}  expansion={approx:+.4f}  |diff|={abs(lam-approx):.4f}")
