"""Command-line surface.

Exit codes: 0 on success, 2 on flag validation problems, 1 on runtime
failures. All data interchange is plain CSV.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

import numpy as np

from . import mc
from . import power as power_mod
from .fvml import FvmlParams, moments, sample_fvml
from .regimes import Regime, diagnose
from .specfun import chi2_survival, std_normal_cdf
from .stats import DegenerateSampleError, hybrid, watson, z_test

__all__ = ["build_parser", "main"]


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in (0,1), got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spikedir",
        description="Location tests for the spike direction of spherical distributions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the rejection-frequency study and write CSV")
    sim.add_argument("--n", type=_positive_int, required=True, help="sample size per replication")
    sim.add_argument("--p", type=_positive_int, required=True, help="dimension")
    sim.add_argument("--m", type=_positive_int, required=True, help="replications per cell")
    sim.add_argument("--alpha", type=_probability, default=0.05, help="test level (default 0.05)")
    sim.add_argument("--big-l", type=_positive_int, default=5, dest="big_l",
                     help="alternative grid runs ell = 0..L (default 5)")
    sim.add_argument("--seed", type=int, default=0, help="base seed of the replication schedule")
    sim.add_argument("--regimes", nargs="+", default=None,
                     help="regime labels (default: the eight study regimes)")
    sim.add_argument("--tests", nargs="+", default=list(mc.TEST_NAMES),
                     choices=list(mc.TEST_NAMES), help="tests to run")
    sim.add_argument("--severe", action="store_true",
                     help="use the beyond-contiguity alternatives (regimes va/vb only)")
    sim.add_argument("--threads", type=_positive_int, default=1,
                     help="worker processes (default 1; results identical either way)")
    sim.add_argument("--out", required=True, help="output CSV path")

    tst = sub.add_parser("test", help="run one location test on a data file")
    tst.add_argument("--data", required=True, help="CSV of n rows x p columns, unit-norm rows")
    tst.add_argument("--theta0", default=None,
                     help="CSV with the null direction (default: first basis vector)")
    tst.add_argument("--test", default="watson", choices=list(mc.TEST_NAMES))
    tst.add_argument("--alpha", type=_probability, default=0.05)
    tst.add_argument("--kappa", type=float, default=None,
                     help="concentration (required by the z and hybrid tests)")

    pwr = sub.add_parser("power", help="print limiting powers for a regime")
    pwr.add_argument("--regime", required=True)
    pwr.add_argument("--t", type=float, required=True, help="limit of ||tau||")
    pwr.add_argument("--alpha", type=_probability, default=0.05)
    pwr.add_argument("--xi", type=float, default=None, help="regime limit constant")
    pwr.add_argument("--severe", action="store_true")

    mom = sub.add_parser("moments", help="print exact projection moments")
    mom.add_argument("--p", type=_positive_int, required=True)
    mom.add_argument("--kappa", type=float, required=True)

    smp = sub.add_parser("sample", help="draw a spiked sample and write CSV")
    smp.add_argument("--p", type=_positive_int, required=True)
    smp.add_argument("--kappa", type=float, required=True)
    smp.add_argument("--n", type=_positive_int, required=True)
    smp.add_argument("--seed", type=int, default=0)
    smp.add_argument("--out", required=True)

    dia = sub.add_parser("diagnose", help="report concentration-regime ratios")
    dia.add_argument("--n", type=_positive_int, required=True)
    dia.add_argument("--p", type=_positive_int, required=True)
    dia.add_argument("--kappa", type=float, required=True)

    return parser


def _cmd_simulate(args: argparse.Namespace) -> int:
    regimes = (
        [Regime.parse(r) for r in args.regimes]
        if args.regimes is not None
        else list(mc.SimConfig.__dataclass_fields__["regimes"].default)
    )
    config = mc.SimConfig(
        n=args.n,
        p=args.p,
        M=args.m,
        alpha=args.alpha,
        L=args.big_l,
        regimes=regimes,
        tests=tuple(args.tests),
        severe=args.severe,
        seed=args.seed,
        threads=args.threads,
    )
    mc.run_study(config, out=args.out)
    print(f"wrote {args.out}")
    return 0


def _load_matrix(path: str) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    return data


def _cmd_test(args: argparse.Namespace) -> int:
    x = _load_matrix(args.data)
    n, p = x.shape
    if args.theta0 is not None:
        theta0 = _load_matrix(args.theta0).reshape(-1)
    else:
        theta0 = np.zeros(p)
        theta0[0] = 1.0
    if theta0.size != p:
        raise ValueError(f"theta0 has length {theta0.size}, data has p={p}")
    norms = np.linalg.norm(x, axis=1)
    bad = np.nonzero(np.abs(norms - 1.0) > 1e-6)[0]
    if bad.size:
        raise ValueError(f"rows {bad[:5].tolist()} of {args.data} are not unit vectors")
    if args.test == "watson":
        result = watson(x, theta0, args.alpha)
        pvalue = chi2_survival(p - 1, result.statistic)
    else:
        if args.kappa is None:
            print(f"error: --kappa is required for the {args.test} test", file=sys.stderr)
            return 2
        if args.test == "z":
            mom = moments(p, args.kappa)
            result = z_test(x, theta0, mom.e1, mom.e2_tilde, args.alpha)
            pvalue = std_normal_cdf(result.statistic)  # lower-tail test
        else:
            result = hybrid(x, theta0, args.kappa, args.alpha)
            pvalue = 1.0 - std_normal_cdf(result.statistic)
    print(f"test {args.test}")
    print(f"n {n}")
    print(f"p {p}")
    print(f"statistic {result.statistic:.10g}")
    print(f"threshold {result.threshold:.10g}")
    print(f"pvalue {pvalue:.10g}")
    print(f"reject {str(result.reject).lower()}")
    return 0


def _cmd_power(args: argparse.Namespace) -> int:
    regime = Regime.parse(args.regime)
    wp = power_mod.watson_power(regime, args.t, args.alpha, xi=args.xi, severe=args.severe)
    print(f"watson {wp:.6g}")
    if args.severe:
        print("optimal none (no limiting formula under severe alternatives)")
        return 0
    if power_mod.optimal_test(regime, kappa_specified=True) is power_mod.NO_CONSISTENT_TEST:
        print("optimal none (no consistent test; the trivial test is optimal)")
        return 0
    try:
        gamma = power_mod.gamma_for_regime(regime, args.xi)
    except ValueError:
        print("optimal unavailable (--xi required for this regime)")
        return 0
    print(f"optimal {power_mod.optimal_power(gamma, args.t, args.alpha):.6g}")
    return 0


def _cmd_moments(args: argparse.Namespace) -> int:
    mom = moments(args.p, args.kappa)
    print(f"e1 {mom.e1:.10g}")
    print(f"e2 {mom.e2:.10g}")
    print(f"e2_tilde {mom.e2_tilde:.10g}")
    print(f"f2 {mom.f2:.10g}")
    print(f"f4_over_f2_sq {mom.f4_over_f2_sq:.10g}")
    return 0


def _cmd_sample(args: argparse.Namespace) -> int:
    theta = np.zeros(args.p)
    theta[0] = 1.0
    rng = mc.make_rng(args.seed, 0, 0, 0)
    x = sample_fvml(FvmlParams(theta=theta, kappa=args.kappa), args.n, rng)
    lines = [",".join(format(v, ".17g") for v in row) for row in x]
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {args.out}")
    return 0


def _cmd_diagnose(args: argparse.Namespace) -> int:
    report = diagnose(args.n, args.p, args.kappa)
    print(f"kappa/p {report.kappa_over_p:.6g}")
    print(f"sqrt(n)kappa/p {report.sqrtn_kappa_over_p:.6g}")
    print(f"sqrt(n)kappa/p^(3/4) {report.sqrtn_kappa_over_p34:.6g}")
    print(f"sqrt(n)kappa/sqrt(p) {report.sqrtn_kappa_over_sqrtp:.6g}")
    print(f"nearest {report.nearest.value}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "test": _cmd_test,
    "power": _cmd_power,
    "moments": _cmd_moments,
    "sample": _cmd_sample,
    "diagnose": _cmd_diagnose,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, DegenerateSampleError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ValueError) and not isinstance(exc, DegenerateSampleError) else 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
