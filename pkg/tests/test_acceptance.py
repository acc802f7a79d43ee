"""Acceptance suite: one test per acceptance criterion, each printing a
PASS/FAIL line (run pytest with -rA to see them for passing tests too).

The heavy rejection-frequency studies are computed once per session and
shared across criteria. Expected total runtime: minutes.
"""

import math

import numpy as np
import pytest

from spikedir.cli import main as cli_main
from spikedir.fvml import FvmlParams, misspecified_projection_moments, moments, sample_fvml, standard_normal
from spikedir.mc import SimConfig, make_rng, run_study
from spikedir.power import (
    efficient_central_sequence,
    fisher_info_unspec,
    watson_power,
)
from spikedir.regimes import Regime, contiguity_rate, kappa_for_regime, local_alternative
from spikedir.specfun import amos_bounds, bessel_ratio, log_H, s_bound
from spikedir.stats import (
    invariant_llr,
    laq_expansion,
    projector_trace_form,
    w_star,
    watson_standardized,
    z_stat,
)

from oracles import dense_trace_oracle

SEED = 7
ALPHA = 0.05
M_STUDY = 1000
STUDY_REGIMES = [Regime.I, Regime.II, Regime.III, Regime.IV,
                 Regime.VA, Regime.VB, Regime.VI, Regime.VII]


def report(name: str, ok: bool, detail: str = "") -> None:
    print(f"{'PASS' if ok else 'FAIL'} {name}" + (f"  [{detail}]" if detail else ""))
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def study_400():
    cfg = SimConfig(n=400, p=400, M=M_STUDY, alpha=ALPHA, seed=SEED,
                    regimes=STUDY_REGIMES, threads=2)
    rows = run_study(cfg)
    return {(r.regime, r.ell, r.test): r for r in rows}


@pytest.fixture(scope="module")
def severe_vb_200_800():
    cfg = SimConfig(n=200, p=800, M=M_STUDY, alpha=ALPHA, seed=SEED,
                    regimes=[Regime.VB], severe=True, tests=("watson",), threads=2)
    rows = run_study(cfg)
    return {r.ell: r for r in rows}


def test_level_calibration(study_400):
    # each test's rejection frequency at ell = 0 within 0.05 +- 0.021
    devs = {
        (reg.value, t): abs(study_400[(reg, 0, t)].freq - ALPHA)
        for reg in STUDY_REGIMES
        for t in ("watson", "z", "hybrid")
    }
    worst = max(devs, key=devs.get)
    report(
        "level-calibration (8 regimes x 3 tests, ell=0, +-0.021)",
        all(d <= 0.021 for d in devs.values()),
        f"worst {worst} dev {devs[worst]:.4f}",
    )


def test_figure2_power_agreement(study_400):
    # watson within 0.07 of the t^2/sqrt(2) curve; hybrid within 0.07 of the
    # optimal-power curve with the regime's information, regimes i-iv
    bad = []
    worst = 0.0
    for reg in (Regime.I, Regime.II, Regime.III, Regime.IV):
        for ell in range(1, 6):
            t = 2.0 * ell / 5.0
            rw = study_400[(reg, ell, "watson")]
            dev_w = abs(rw.freq - watson_power(reg, t, ALPHA))
            rh = study_400[(reg, ell, "hybrid")]
            dev_h = abs(rh.freq - rh.asym_power)
            worst = max(worst, dev_w, dev_h)
            if dev_w > 0.07:
                bad.append((reg.value, ell, "watson", round(dev_w, 3)))
            if dev_h > 0.07:
                bad.append((reg.value, ell, "hybrid", round(dev_h, 3)))
    report(
        "figure2-power-agreement (regimes i-iv, tol 0.07)",
        not bad,
        f"worst dev {worst:.4f}; violations {bad} "
        "(the Watson finite-sample power at (400,400) sits systematically "
        "below the limiting curve on its steep part in regimes iii/iv, "
        "about 0.78 vs 0.88 at ell=5 in regime iii; confirmed by an "
        "independent sampler+statistic implementation, see the decisions "
        "ledger)",
    )


def test_triviality_low_concentration_regimes(study_400):
    # criterion as stated: watson frequency within 0.05 +- 0.03 at every ell
    # under contiguous alternatives in regimes va, vb, vi, vii
    out_of_band = []
    for reg in (Regime.VA, Regime.VB, Regime.VI, Regime.VII):
        for ell in range(6):
            f = study_400[(reg, ell, "watson")].freq
            if abs(f - ALPHA) > 0.03:
                out_of_band.append((reg.value, ell, round(f, 3)))
    report(
        "triviality-regimes-va-vb-vi-vii (tol 0.05 +- 0.03)",
        not out_of_band,
        f"out-of-band cells {out_of_band} "
        "(the finite-sample Watson shift at (n,p)=(400,400) is not negligible "
        "in regimes va/vb: the standardized-statistic drift "
        "(n-1)sqrt(p-1) e1^2/(sqrt(2) f2) nu^2 t^2 (1 - nu^2 t^2/4) reaches "
        "~1.19 in regime va at ell=5, so the true rejection probability there "
        "is ~0.32; see the decisions ledger)",
    )


def test_watson_power_monotone_in_ell(study_400):
    # harness invariant: empirical watson power grows with ell in regimes
    # i-iv, up to two binomial standard errors of slack
    for reg in (Regime.I, Regime.II, Regime.III, Regime.IV):
        freqs = [study_400[(reg, ell, "watson")].freq for ell in range(6)]
        for a, b in zip(freqs, freqs[1:]):
            slack = 2.0 * math.sqrt((a * (1 - a) + b * (1 - b)) / M_STUDY)
            assert b >= a - slack, (reg.value, freqs)


def test_z_test_tracks_limiting_curve_in_regime_vi(study_400):
    # the z test is the optimal test in regime vi; its frequencies follow
    # the limiting curve across the whole grid
    for ell in range(6):
        row = study_400[(Regime.VI, ell, "z")]
        assert abs(row.freq - row.asym_power) <= 0.07, (ell, row.freq, row.asym_power)


def test_nonmonotonic_severe_vb(severe_vb_200_800):
    freqs = [severe_vb_200_800[ell].freq for ell in range(6)]
    powers = [severe_vb_200_800[ell].asym_power for ell in range(6)]
    # the asymptotic curve attains its grid maximum at both ell=3 and ell=4
    # (xi = 1 makes t^2 (1 - t^2/4) equal at t = 1.2 and t = 1.6)
    argmax_set = {ell for ell in range(6) if powers[ell] == max(powers)}
    empirical_argmax = int(np.argmax(freqs))
    pointwise = max(abs(f - a) for f, a in zip(freqs, powers))
    ok = (
        empirical_argmax in argmax_set
        and abs(freqs[5] - ALPHA) <= 0.04
        and pointwise <= 0.08
    )
    report(
        "nonmonotonic-curve-severe-vb (200,800)",
        ok,
        f"freqs {[round(f, 3) for f in freqs]}, argmax ell={empirical_argmax} "
        f"(asymptotic maximizers {sorted(argmax_set)}), |f(L)-alpha|={abs(freqs[5]-ALPHA):.3f}, "
        f"max pointwise dev {pointwise:.3f}",
    )


def test_special_function_certificates():
    # 1e4-point grids; zero violations at double-precision resolution
    nu_grid = np.concatenate([[0.0], np.logspace(-3, 4, 99)])
    z_grid = np.logspace(-6, 5, 100)
    violations = 0
    for nu in nu_grid:
        for z in z_grid:
            if not amos_bounds(nu, z).contains(bessel_ratio(nu, z), rtol=5e-15):
                violations += 1
    p_grid = np.unique(np.round(np.logspace(math.log10(3), math.log10(2000), 40)).astype(int))
    x_grid = np.logspace(-6, 5, 40)
    for p in p_grid:
        nu = (p - 3) / 2.0
        if nu <= -0.5:
            continue
        for x in x_grid:
            val = log_H(nu, x)
            lo = s_bound(nu + 0.5, nu + 1.5, x)
            hi = s_bound(nu, nu + 2.0, x)
            tol = 1e-13 * max(1.0, abs(lo), abs(hi))
            if not (lo - tol <= val <= hi + tol):
                violations += 1
    report("special-function-certificates (amos + log-H sandwiches)",
           violations == 0, f"{violations} violations")


def _laq_mean_residual(n: int, p: int, m_reps: int, stream: int) -> float:
    kappa = kappa_for_regime(Regime.IV, n, p)
    nu = contiguity_rate(Regime.IV, n, p, kappa)
    alt = local_alternative(np.eye(p)[0], nu, 1, 2)  # t = 1
    mom = moments(p, kappa)
    theta0 = np.eye(p)[0]
    params = FvmlParams(theta=theta0, kappa=kappa)
    total = 0.0
    for m in range(m_reps):
        x = sample_fvml(params, n, make_rng(SEED, stream, 0, m))
        lam = invariant_llr(x, theta0, alt.theta, kappa)
        approx = laq_expansion(
            watson_standardized(x, theta0),
            z_stat(x, theta0, mom.e1, mom.e2_tilde),
            n, p, kappa, nu, alt.t, mom.e1, mom.e2_tilde,
        )
        total += abs(lam - approx)
    return total / m_reps


def test_laq_residual():
    res_400 = _laq_mean_residual(400, 400, 500, stream=101)
    res_800 = _laq_mean_residual(800, 800, 500, stream=102)
    report(
        "laq-residual (regime iv, t=1, M=500; < 0.1 and shrinking)",
        res_400 < 0.1 and res_800 < res_400,
        f"mean|residual| 400: {res_400:.4f}, 800: {res_800:.4f}",
    )


def test_w_tilde_w_star_equivalence():
    n = p = 400
    kappa = kappa_for_regime(Regime.IV, n, p)
    f2 = moments(p, kappa).f2
    theta0 = np.eye(p)[0]
    params = FvmlParams(theta=theta0, kappa=kappa)
    total = 0.0
    reps = 500
    for m in range(reps):
        x = sample_fvml(params, n, make_rng(SEED, 103, 0, m))
        total += abs(watson_standardized(x, theta0) - w_star(x, theta0, f2))
    mean_gap = total / reps
    report("watson-standardized-vs-w-star (mean gap < 0.05)",
           mean_gap < 0.05, f"mean |gap| {mean_gap:.5f}")


def test_algebraic_oracles():
    rng = make_rng(SEED, 104, 0, 0)
    # closed-form traces vs dense matrices
    trace_ok = True
    worst_trace = 0.0
    for _ in range(1000):
        v = standard_normal(rng, 20)
        theta, theta0 = v[:10], v[10:]
        theta = theta / np.linalg.norm(theta)
        theta0 = theta0 / np.linalg.norm(theta0)
        a, b, c, d = standard_normal(rng, 4)
        for ell in (1, 2):
            got = projector_trace_form(theta, theta0, a, b, c, d, ell)
            want = dense_trace_oracle(theta, theta0, a, b, c, d, ell)
            worst_trace = max(worst_trace, abs(got - want))
            trace_ok &= abs(got - want) <= 1e-10

    # misspecified projection moments vs Monte Carlo (4 SE)
    p, kappa, draws = 20, 5.0, 100_000
    mom = moments(p, kappa)
    theta = np.ones(p) / math.sqrt(p)
    raw = standard_normal(rng, p)
    theta0 = raw - 0.5 * (raw @ theta) * theta
    theta0 /= np.linalg.norm(theta0)
    m2, m4 = misspecified_projection_moments(theta, theta0, mom.e2, mom.e4, mom.f2, mom.f4)
    x = sample_fvml(FvmlParams(theta=theta, kappa=kappa), draws, rng)
    proj2 = (x @ theta0) ** 2
    mc_ok = abs(proj2.mean() - m2) <= 4.0 * proj2.std() / math.sqrt(draws)
    proj4 = proj2 * proj2
    mc_ok &= abs(proj4.mean() - m4) <= 4.0 * proj4.std() / math.sqrt(draws)

    # efficient-central-sequence identity
    ecs_ok = True
    for w_t in (-3.0, -0.4, 0.0, 1.7, 4.0):
        for z in (-2.5, 0.0, 1.1):
            for xi in (0.05, 0.7, 1.0, 12.0):
                d1 = w_t / math.sqrt(2.0) - z / (2.0 * xi)
                ds, gs = efficient_central_sequence(d1, z, fisher_info_unspec(Regime.IV, xi))
                ecs_ok &= abs(ds / math.sqrt(gs) - w_t) <= 1e-12

    report(
        "algebraic-oracles (traces 1e-10, projections 4SE, central-sequence 1e-12)",
        trace_ok and mc_ok and ecs_ok,
        f"trace worst {worst_trace:.2e}, projection-MC ok={mc_ok}, identity ok={ecs_ok}",
    )


def test_simulate_determinism(tmp_path):
    flags = ["simulate", "--n", "30", "--p", "25", "--m", "10", "--seed", "21",
             "--regimes", "iv", "vb", "--big-l", "3"]
    outputs = []
    for threads in ("1", "8", "1", "8"):
        path = tmp_path / f"d{len(outputs)}.csv"
        assert cli_main(flags + ["--threads", threads, "--out", str(path)]) == 0
        outputs.append(path.read_bytes())
    report("simulate-determinism (threads 1 vs 8, repeated)",
           len(set(outputs)) == 1)
