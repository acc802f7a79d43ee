"""Tests for the spike direction of high-dimensional spherical distributions.

Modules:
    specfun  -- stable Bessel-ratio / log-H / quantile kernels
    fvml     -- spiked and rotationally symmetric laws: moments and samplers
    stats    -- test statistics and the invariant likelihood ratio
    regimes  -- concentration-regime taxonomy and local alternatives
    power    -- limiting power formulas and Fisher information
    mc       -- deterministic Monte Carlo study harness
    cli      -- command-line front end
"""

from . import cli, fvml, mc, power, regimes, specfun, stats

__all__ = ["cli", "fvml", "mc", "power", "regimes", "specfun", "stats"]

__version__ = "0.1.0"
