"""Stable special-function kernels: Bessel ratios, their algebraic bounds,
and the log-normalizer, all safe deep into the high-dimensional range."""

from spikedir.specfun import (
    amos_bounds,
    bessel_ratio,
    chi2_quantile,
    log_H,
    log_c,
    s_bound,
    std_normal_quantile,
)

print("Bessel ratio I_{nu+1}/I_nu and its two-sided bracket")
for nu, z in [(0.0, 0.5), (0.5, 2.0), (100.0, 50.0), (399.0, 640000.0)]:
    r = bessel_ratio(nu, z)
    b = amos_bounds(nu, z)
    print(f"  nu={nu:>8.1f} z={z:>10.1f}  low={b.low:.12f}  ratio={r:.12f}  high={b.high:.12f}")

print("\nlog H_nu(x) sits between two elementary S-bounds")
for nu, x in [(1.0, 4.0), (98.5, 200.0), (398.5, 3000.0)]:
    print(
        f"  nu={nu:>6.1f} x={x:>7.1f}  "
        f"S_low={s_bound(nu + 0.5, nu + 1.5, x):.6f}  "
        f"logH={log_H(nu, x):.6f}  "
        f"S_high={s_bound(nu, nu + 2.0, x):.6f}"
    )

print("\nlog normalizing constant of the spiked density, log domain throughout")
for p, kappa in [(3, 2.0), (200, 200.0), (800, 640000.0)]:
    print(f"  p={p:>4d} kappa={kappa:>10.1f}  log c = {log_c(p, kappa):+.4f}")

print("\nreference quantiles")
print(f"  Phi^-1(0.95)          = {std_normal_quantile(0.95):.10f}")
print(f"  chi2(p-1=199, 0.95)   = {chi2_quantile(199, 0.95):.10f}")
print(f"  chi2(p-1=399, 0.95)   = {chi2_quantile(399, 0.95):.10f}")
