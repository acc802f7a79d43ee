"""The concentration-regime taxonomy and the limiting power curves it
implies for the three tests."""

import numpy as np

from spikedir.power import (
    gamma_for_regime,
    hybrid_power,
    optimal_power_regime_iv,
    watson_power,
    z_power,
)
from spikedir.regimes import Regime, contiguity_rate, diagnose, kappa_for_regime, realized_xi

n = p = 400
print(f"concentration recipes and detectable-alternative scales at (n,p)=({n},{p}):")
for label in (Regime.I, Regime.II, Regime.III, Regime.IV,
              Regime.VA, Regime.VB, Regime.VI, Regime.VII):
    kappa = kappa_for_regime(label, n, p)
    nu = contiguity_rate(label, n, p, kappa)
    xi = realized_xi(label, n, p, kappa)
    xi_txt = f"xi={xi:.3f}" if xi is not None else "       "
    print(f"  {label.value:>4}: kappa={kappa:12.3f}  nu={nu:.5f}  {xi_txt}  "
          f"Gamma={gamma_for_regime(label, xi):.3f}")

print("\nnearest taxonomy row for a few raw triples:")
for n_, p_, k_ in [(400, 400, 400.0), (400, 400, 20.0), (200, 800, 10.64), (1000, 50, 0.01)]:
    print(f"  (n={n_}, p={p_}, kappa={k_}) -> {diagnose(n_, p_, k_).nearest.value}")

print("\nlimiting powers at t in {0.4, 0.8, ..., 2.0}, alpha=5%:")
ts = [0.4 * k for k in range(1, 6)]
for label in (Regime.II, Regime.IV, Regime.VI):
    xi = realized_xi(label, n, p, kappa_for_regime(label, n, p))
    w = [watson_power(label, t, 0.05, xi=xi) for t in ts]
    z = [z_power(label, t, 0.05, xi=xi) for t in ts]
    h = [hybrid_power(label, t, 0.05, xi=xi) for t in ts]
    print(f"  regime {label.value}:")
    print(f"    watson {['%.3f' % v for v in w]}")
    print(f"    z      {['%.3f' % v for v in z]}")
    print(f"    hybrid {['%.3f' % v for v in h]}")

print("\nthe oracle test's edge over the Watson test in regime iv (xi=1):")
for t in (0.5, 1.0, 1.5):
    print(f"  t={t}: optimal={optimal_power_regime_iv(t, 0.05, 1.0):.4f}  "
          f"watson={watson_power(Regime.IV, t, 0.05):.4f}")

print("\nnon-monotonic Watson curve under severe alternatives in regime vb (xi=1):")
grid = np.linspace(0.0, 2.0, 11)
curve = [watson_power(Regime.VB, t, 0.05, xi=1.0, severe=True) for t in grid]
print("  t:     " + "  ".join(f"{t:.1f}" for t in grid))
print("  power: " + "  ".join(f"{v:.3f}" for v in curve))
