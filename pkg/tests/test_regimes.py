import math

import numpy as np
import pytest

from spikedir.fvml import standard_normal
from spikedir.mc import make_rng
from spikedir.regimes import (
    Regime,
    check_constraint,
    contiguity_rate,
    diagnose,
    kappa_for_regime,
    local_alternative,
    realized_xi,
)

ALL_STUDY_REGIMES = [
    Regime.I, Regime.II, Regime.III, Regime.IV,
    Regime.VA, Regime.VB, Regime.VI, Regime.VII,
]


class TestKappaRecipes:
    def test_values(self):
        n, p = 400, 400
        assert kappa_for_regime(Regime.I, n, p) == 160000.0
        assert kappa_for_regime(Regime.II, n, p) == 400.0
        assert kappa_for_regime(Regime.III, n, p) == pytest.approx(400 / 400**0.25)
        assert kappa_for_regime(Regime.IV, n, p) == pytest.approx(20.0)
        assert kappa_for_regime(Regime.VA, n, p) == pytest.approx(400**0.875 / 20)
        assert kappa_for_regime(Regime.VB, n, p) == pytest.approx(400**0.75 / 20)
        assert kappa_for_regime(Regime.VI, 100, 100) == pytest.approx(1.0)
        assert kappa_for_regime(Regime.VII, n, p) == pytest.approx(400**0.25 / 20)

    def test_vc_has_no_recipe(self):
        with pytest.raises(ValueError):
            kappa_for_regime(Regime.VC, 100, 100)

    def test_parse(self):
        assert Regime.parse(" Vb ") is Regime.VB
        with pytest.raises(ValueError):
            Regime.parse("viii")


class TestContiguityRates:
    def test_table(self):
        n, p = 400, 400
        c1 = 0.5 + math.sqrt(1.25)
        cases = {
            Regime.I: 400**0.25 / math.sqrt(400 * 160000.0),
            Regime.II: math.sqrt(c1) * 400**0.75 / (20 * 400.0),
            Regime.III: 400**0.75 / (20 * kappa_for_regime(Regime.III, n, p)),
            Regime.IV: 400**0.75 / (20 * 20.0),
            Regime.VA: 400**0.25 / (400**0.25 * math.sqrt(kappa_for_regime(Regime.VA, n, p))),
            Regime.VB: 400**0.25 / (400**0.25 * math.sqrt(kappa_for_regime(Regime.VB, n, p))),
            Regime.VI: 1.0,
            Regime.VII: 1.0,
        }
        for label, expected in cases.items():
            kappa = kappa_for_regime(label, n, p)
            assert contiguity_rate(label, n, p, kappa) == pytest.approx(expected, rel=1e-12)

    def test_vc_uses_low_concentration_rate(self):
        nu = contiguity_rate(Regime.VC, 400, 400, 2.0)
        assert nu == pytest.approx(400**0.25 / (400**0.25 * math.sqrt(2.0)))

    def test_severe_variants(self):
        n, p = 200, 800
        kva = kappa_for_regime(Regime.VA, n, p)
        assert contiguity_rate(Regime.VA, n, p, kva, severe=True) == pytest.approx(
            800**0.75 / (math.sqrt(200) * kva)
        )
        kvb = kappa_for_regime(Regime.VB, n, p)
        assert contiguity_rate(Regime.VB, n, p, kvb, severe=True) == 1.0
        with pytest.raises(ValueError):
            contiguity_rate(Regime.IV, n, p, 1.0, severe=True)

    def test_monotone_across_regimes(self):
        # larger concentration -> finer detectable alternatives
        n, p = 400, 400
        rates = [
            contiguity_rate(r, n, p, kappa_for_regime(r, n, p)) for r in ALL_STUDY_REGIMES
        ]
        assert all(a <= b + 1e-15 for a, b in zip(rates, rates[1:]))

    def test_realized_xi(self):
        n, p = 400, 400
        assert realized_xi(Regime.II, n, p, 400.0) == pytest.approx(1.0)
        assert realized_xi(Regime.IV, n, p, 20.0) == pytest.approx(1.0)
        assert realized_xi(Regime.VB, n, p, 400**0.75 / 20) == pytest.approx(1.0)
        assert realized_xi(Regime.VI, n, p, 1.0) == pytest.approx(1.0)
        assert realized_xi(Regime.I, n, p, 1.0) is None


class TestLocalAlternative:
    def test_null_point(self):
        theta0 = np.eye(6)[0]
        alt = local_alternative(theta0, 0.3, 0, 5)
        assert alt.t == 0.0
        assert np.allclose(alt.theta, theta0)
        assert np.allclose(alt.tau, 0.0)

    def test_antipode(self):
        theta0 = np.eye(4)[0]
        alt = local_alternative(theta0, 1.0, 5, 5)
        assert alt.t == 2.0
        assert np.allclose(alt.theta, -theta0, atol=1e-12)

    def test_arithmetic_example(self):
        theta0 = np.eye(8)[0]
        alt = local_alternative(theta0, 0.1, 3, 5)
        assert alt.t == pytest.approx(1.2)
        assert float(alt.theta @ theta0) == pytest.approx(0.9928, abs=1e-12)
        assert check_constraint(theta0, 0.1, alt.tau)

    def test_grid_satisfies_constraint_and_norms(self):
        theta0 = np.eye(10)[0]
        for nu in (0.01, 0.2, 1.0):
            for ell in range(6):
                alt = local_alternative(theta0, nu, ell, 5)
                assert abs(np.linalg.norm(alt.theta) - 1.0) < 1e-12
                assert check_constraint(theta0, nu, alt.tau)
                assert np.linalg.norm(alt.tau) == pytest.approx(2.0 * ell / 5.0, abs=1e-12)
                assert float(alt.theta @ theta0) == pytest.approx(
                    1.0 - nu * nu * alt.t * alt.t / 2.0, abs=1e-10
                )

    def test_rotation_to_generic_theta0(self):
        rng = make_rng(9, 9, 9, 9)
        for k in range(100):
            v = standard_normal(rng, 7)
            theta0 = v / np.linalg.norm(v)
            alt = local_alternative(theta0, 0.25, 2, 5)
            ref = local_alternative(np.eye(7)[0], 0.25, 2, 5)
            assert float(alt.theta @ theta0) == pytest.approx(
                float(ref.theta @ np.eye(7)[0]), abs=1e-10
            )
            assert check_constraint(theta0, 0.25, alt.tau)

    def test_leaving_sphere_raises(self):
        with pytest.raises(ValueError):
            local_alternative(np.eye(3)[0], 1.2, 5, 5)


class TestCheckConstraint:
    def test_zero_tau(self):
        assert check_constraint(np.eye(3)[0], 0.5, np.zeros(3))

    def test_violating_perturbation(self):
        theta0 = np.eye(3)[0]
        tau = np.array([0.3, 0.1, 0.0])  # aligned component with wrong sign
        assert not check_constraint(theta0, 0.5, tau)


class TestDiagnose:
    def test_boundary_rows(self):
        assert diagnose(400, 400, 400.0).nearest is Regime.II
        assert diagnose(400, 400, 20.0).nearest is Regime.IV
        assert diagnose(200, 800, 800**0.75 / math.sqrt(200)).nearest is Regime.VB

    def test_open_rows(self):
        assert diagnose(400, 400, 160000.0).nearest is Regime.I
        assert diagnose(400, 400, 0.001).nearest is Regime.VII

    def test_recipes_map_to_their_rows(self):
        n, p = 300, 500
        for label in ALL_STUDY_REGIMES:
            kappa = kappa_for_regime(label, n, p)
            got = diagnose(n, p, kappa).nearest
            assert got is label, (label, got)

    def test_reports_ratios(self):
        rep = diagnose(100, 400, 40.0)
        assert rep.kappa_over_p == pytest.approx(0.1)
        assert rep.sqrtn_kappa_over_p == pytest.approx(1.0)
        assert rep.sqrtn_kappa_over_p34 == pytest.approx(400 / 400**0.75)
        assert rep.sqrtn_kappa_over_sqrtp == pytest.approx(20.0)
