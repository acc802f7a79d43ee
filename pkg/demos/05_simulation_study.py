"""A scaled-down rejection-frequency study, written to CSV exactly like the
command line's `simulate`, then summarized. Render the CSV with the
companion plotting package:

    spikedir-plots demo_study.csv --out demo_study.png
"""

import time

from spikedir.mc import SimConfig, run_study
from spikedir.regimes import Regime

config = SimConfig(
    n=200,
    p=200,
    M=200,
    alpha=0.05,
    regimes=[Regime.I, Regime.IV, Regime.VI],
    seed=2024,
    threads=2,
)

start = time.time()
rows = run_study(config, out="demo_study.csv")
print(f"ran {len(rows)} cells in {time.time() - start:.1f}s -> demo_study.csv")

print(f"{'regime':>7} {'ell':>3} {'test':>7} {'freq':>7} {'limit':>7}")
for r in rows:
    limit = "none" if r.asym_power is None else f"{r.asym_power:.3f}"
    print(f"{r.regime.value:>7} {r.ell:>3} {r.test:>7} {r.freq:>7.3f} {limit:>7}")
