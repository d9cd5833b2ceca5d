import math

import numpy as np
import pytest

from fso_noma import analysis, noma
from fso_noma.channel import TurbulenceSpec, h_cdf

from oracles import ratio_tail_mc, success_rank1_two_users, success_weakest_two_users

PHI_CLEAR = 0.06354729422

WEAK = TurbulenceSpec.from_rytov(0.1)
STRONG = TurbulenceSpec.from_rytov(1.0)


def make_cfg(rytov=0.1, zeta_db=5.0, rho=1e3, targets=(0.5, 0.5), mu=0.5,
             distances=(1.0, 3.0), **kw):
    users = tuple(noma.UserLink(d, r, mu) for d, r in zip(distances, targets))
    plan = noma.make_power_plan(users, PHI_CLEAR, 1.0, zeta_db)
    turb = WEAK if rytov == 0.1 else TurbulenceSpec.from_rytov(rytov)
    return noma.SystemConfig(users=users, plan=plan, rho=rho, turbulence=turb, **kw)


class TestThresholds:
    def test_phi_values(self):
        cfg = make_cfg(targets=(0.5, 0.5))
        th = analysis.outage_thresholds(cfg)
        expected = math.expm1(2 * (0.5 + 0.016))
        assert th.phis == pytest.approx((expected, expected), rel=1e-12)

    def test_phi_zero_rate(self):
        cfg = make_cfg(targets=(0.0, 0.0))
        th = analysis.outage_thresholds(cfg)
        assert th.phis[0] == pytest.approx(math.expm1(2 * 0.016), rel=1e-12)

    def test_psi_simplification(self):
        # psi = A*phi*10^(2(K-1)zeta/10)/(rho*mu^2): path loss fully cancels
        cfg = make_cfg(zeta_db=5.0, rho=1e4)
        th = analysis.outage_thresholds(cfg)
        phi = math.expm1(2 * 0.516)
        expected = cfg.a_const * phi * 10.0 ** (2 * 5.0 / 10.0) / (1e4 * 0.25)
        assert th.psi_weakest == pytest.approx(expected, rel=1e-12)

    def test_nu_monotone_in_interference(self):
        cfg = make_cfg()
        th = analysis.outage_thresholds(cfg)
        lows = np.array([[0.1], [1.0], [5.0]])
        nus = th.nu(1, lows)
        assert np.all(np.diff(nus) > 0)


class TestWeakestEvent:
    def test_zero_threshold_success_one(self):
        cfg = make_cfg(targets=(0.0, 0.0), eps_phi=0.0)
        assert analysis.success_prob_weakest(cfg) == 1.0

    def test_vanishing_snr_success_zero(self):
        cfg = make_cfg(rho=1e-9)
        assert analysis.success_prob_weakest(cfg) == pytest.approx(0.0, abs=1e-9)

    def test_matches_cdf_composition(self):
        # [1 - F(psi)]^2 assembled from the fixture-validated CDF
        cfg = make_cfg(rytov=0.1, zeta_db=5.0, rho=1e4)
        th = analysis.outage_thresholds(cfg)
        expected = (1.0 - h_cdf(cfg.turbulence.dist, th.psi_weakest)) ** 2
        assert analysis.success_prob_weakest(cfg) == pytest.approx(expected, abs=1e-9)

    def test_matches_dense_tail_oracle(self):
        cfg = make_cfg(rytov=1.0, zeta_db=5.0, rho=1e4)
        oracle = success_weakest_two_users(cfg)
        assert analysis.success_prob_weakest(cfg) == pytest.approx(oracle, abs=1e-7)


class TestRank1Event:
    def test_zero_rate_zero_eps_always_succeeds(self):
        cfg = make_cfg(targets=(0.0, 0.0), eps_phi=0.0)
        assert analysis.success_prob_rank_k(cfg, 1) == 1.0

    def test_rank_bounds(self):
        cfg = make_cfg()
        for bad in (0, 2, 3):
            with pytest.raises(ValueError):
                analysis.success_prob_rank_k(cfg, bad)

    @pytest.mark.parametrize("rytov", [0.1, 1.0])
    @pytest.mark.parametrize("rho_db", [10.0, 25.0, 40.0])
    def test_against_dense_2d_oracle(self, rytov, rho_db):
        cfg = make_cfg(rytov=rytov, zeta_db=5.0, rho=10 ** (rho_db / 10))
        got = analysis.success_prob_rank_k(cfg, 1)
        oracle = success_rank1_two_users(cfg)
        assert got == pytest.approx(oracle, abs=1e-4)

    def test_high_snr_interference_floor(self):
        # large target: the limit is P(h1/h2 > phi * w2), checked against
        # a direct sampling estimate of the ratio tail
        cfg = make_cfg(rytov=1.0, zeta_db=5.0, rho=1e12, targets=(2.0, 0.5))
        phi = math.expm1(2 * (2.0 + 0.016))
        ratio = phi * 10.0 ** (-2 * 5.0 / 10.0)
        assert ratio > 1.0
        p_mc, se = ratio_tail_mc(cfg.turbulence.dist, ratio)
        got = analysis.success_prob_rank_k(cfg, 1)
        assert abs(got - p_mc) < max(3 * se, 1e-3)

    def test_high_snr_approaches_one_for_moderate_target(self):
        cfg = make_cfg(rytov=0.1, zeta_db=5.0, rho=1e12)
        assert analysis.success_prob_rank_k(cfg, 1) == pytest.approx(1.0, abs=1e-9)


class TestOutagePerUser:
    def test_single_user_reduction(self):
        users = (noma.UserLink(1.0, 0.5),)
        plan = noma.make_power_plan(users, PHI_CLEAR, 1.0, 0.0)
        cfg = noma.SystemConfig(users=users, plan=plan, rho=1e3, turbulence=WEAK)
        res = analysis.outage_per_user(cfg)
        th = analysis.outage_thresholds(cfg)
        expected = h_cdf(WEAK.dist, th.psi_weakest)
        assert res.per_user_outage[0] == pytest.approx(expected, rel=1e-6)
        assert res.coverage == pytest.approx(1.0 - expected, rel=1e-6)

    def test_all_success_zero_outage(self):
        cfg = make_cfg(targets=(0.0, 0.0), eps_phi=0.0)
        res = analysis.outage_per_user(cfg)
        assert res.per_user_outage == (0.0, 0.0)
        assert res.coverage == 1.0
        assert res.per_event_success == (1.0, 1.0)

    def test_outage_nonincreasing_in_rank_product_form(self):
        res = analysis.outage_per_user(make_cfg(rho=300.0))
        assert res.per_user_outage[1] >= res.per_user_outage[0]

    def test_monotone_in_rho(self):
        rhos = 10 ** (np.linspace(1.0, 4.0, 13))
        outs = np.array([analysis.outage_per_user(make_cfg(rho=r)).per_user_outage
                         for r in rhos])
        assert np.all(np.diff(outs[:, 0]) <= 1e-12)
        assert np.all(np.diff(outs[:, 1]) <= 1e-12)

    def test_monotone_in_target_rate(self):
        outs = [analysis.outage_per_user(make_cfg(targets=(r, r), rho=316.0)).per_user_outage
                for r in (0.3, 0.5, 0.8)]
        arr = np.array(outs)
        assert np.all(np.diff(arr[:, 0]) >= -1e-12)
        assert np.all(np.diff(arr[:, 1]) >= -1e-12)

    def test_coverage_is_product(self):
        res = analysis.outage_per_user(make_cfg(rho=500.0))
        prod = (1 - res.per_user_outage[0]) * (1 - res.per_user_outage[1])
        assert res.coverage == pytest.approx(prod, rel=1e-12)

    def test_probabilities_in_unit_interval(self):
        for rho in (1e1, 1e2, 1e4):
            res = analysis.outage_per_user(make_cfg(rho=rho))
            for p in (*res.per_user_outage, *res.per_event_success, res.coverage):
                assert 0.0 <= p <= 1.0


class TestErgodicRates:
    def test_zero_mu_exposes_clamp_gap(self):
        cfg = make_cfg(mu=0.0)
        res = analysis.ergodic_sum_rate_noma(cfg, method="quadrature")
        assert res.telescoped == pytest.approx(-2 * 0.016, abs=1e-8)
        assert res.clamped == pytest.approx(0.0, abs=1e-9)

    def test_zero_mu_oma(self):
        cfg = make_cfg(mu=0.0)
        res = analysis.ergodic_sum_rate_oma(cfg, method="quadrature")
        assert res.telescoped == pytest.approx(0.0, abs=1e-9)

    def test_single_user_noma_equals_oma(self):
        users = (noma.UserLink(1.0, 0.5),)
        plan = noma.make_power_plan(users, PHI_CLEAR, 1.0, 0.0)
        cfg = noma.SystemConfig(users=users, plan=plan, rho=1e3, turbulence=STRONG)
        r_noma = analysis.ergodic_sum_rate_noma(cfg, method="quadrature")
        r_oma = analysis.ergodic_sum_rate_oma(cfg, method="quadrature")
        assert r_noma.clamped == pytest.approx(r_oma.telescoped, rel=1e-6)

    @pytest.mark.parametrize("rytov", [0.1, 1.0])
    def test_quadrature_vs_mc(self, rytov):
        cfg = make_cfg(rytov=rytov, zeta_db=5.0, rho=1e3)
        quad = analysis.ergodic_sum_rate_noma(cfg, method="quadrature")
        mc = analysis.ergodic_sum_rate_noma(cfg, method="mc", n_trials=200_000)
        assert abs(quad.telescoped - mc.telescoped) < 3 * mc.std_error
        oq = analysis.ergodic_sum_rate_oma(cfg, method="quadrature")
        om = analysis.ergodic_sum_rate_oma(cfg, method="mc", n_trials=200_000)
        assert abs(oq.telescoped - om.telescoped) < 3 * om.std_error

    def test_noma_beats_oma(self):
        for rho in (10.0, 1e3):
            cfg = make_cfg(rytov=1.0, zeta_db=5.0, rho=rho)
            r_n = analysis.ergodic_sum_rate_noma(cfg, method="quadrature")
            r_o = analysis.ergodic_sum_rate_oma(cfg, method="quadrature")
            assert r_n.telescoped > r_o.telescoped

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError):
            analysis.ergodic_sum_rate_noma(make_cfg(), method="magic")

    def test_three_users_requires_mc(self):
        users = tuple(noma.UserLink(d, 0.5) for d in (1.0, 2.0, 3.0))
        plan = noma.make_power_plan(users, PHI_CLEAR, 1.0, 5.0)
        cfg = noma.SystemConfig(users=users, plan=plan, rho=1e3, turbulence=STRONG)
        with pytest.raises(ValueError):
            analysis.ergodic_sum_rate_noma(cfg, method="quadrature")
        res = analysis.ergodic_sum_rate_noma(cfg, method="auto", n_trials=50_000)
        assert res.method == "mc" and res.std_error is not None


class TestGeneralK:
    def test_three_user_rank2_against_qmc_shape(self):
        # dim-1 adaptive path for K=3, rank 2; compared against plain MC
        users = tuple(noma.UserLink(d, 0.4) for d in (1.0, 2.0, 3.0))
        plan = noma.make_power_plan(users, PHI_CLEAR, 1.0, 3.0)
        cfg = noma.SystemConfig(users=users, plan=plan, rho=10 ** 2.5,
                                turbulence=STRONG)
        got = analysis.success_prob_rank_k(cfg, 2)
        th = analysis.outage_thresholds(cfg)
        rng = np.random.default_rng(9)
        from fso_noma.channel import sample_intensity
        i = sample_intensity(STRONG.dist, rng, (400_000, 3))
        h = np.sort(i * i, axis=1)[:, ::-1]
        nu = th.nu(2, h[:, 2:])
        p_mc = np.mean(h[:, 1] >= nu)
        se = math.sqrt(p_mc * (1 - p_mc) / len(h))
        assert abs(got - (p_mc)) < 4 * se

    def test_three_user_rank1_dim2_against_mc(self):
        users = tuple(noma.UserLink(d, 0.4) for d in (1.0, 2.0, 3.0))
        plan = noma.make_power_plan(users, PHI_CLEAR, 1.0, 3.0)
        cfg = noma.SystemConfig(users=users, plan=plan, rho=10 ** 2.5,
                                turbulence=STRONG)
        got = analysis.success_prob_rank_k(cfg, 1)
        th = analysis.outage_thresholds(cfg)
        rng = np.random.default_rng(10)
        from fso_noma.channel import sample_intensity
        i = sample_intensity(STRONG.dist, rng, (400_000, 3))
        h = np.sort(i * i, axis=1)[:, ::-1]
        nu = th.nu(1, h[:, 1:])
        p_mc = np.mean(h[:, 0] >= nu)
        se = math.sqrt(p_mc * (1 - p_mc) / len(h))
        assert abs(got - p_mc) < 4 * se

    def test_five_user_qmc_fallback(self):
        users = tuple(noma.UserLink(d, 0.3) for d in (1.0, 1.5, 2.0, 2.5, 3.0))
        plan = noma.make_power_plan(users, PHI_CLEAR, 1.0, 2.0)
        cfg = noma.SystemConfig(users=users, plan=plan, rho=1e3, turbulence=STRONG)
        got = analysis.success_prob_rank_k(cfg, 1)  # dim 4: QMC path
        assert 0.0 <= got <= 1.0
        th = analysis.outage_thresholds(cfg)
        rng = np.random.default_rng(11)
        from fso_noma.channel import sample_intensity
        i = sample_intensity(STRONG.dist, rng, (400_000, 5))
        h = np.sort(i * i, axis=1)[:, ::-1]
        nu = th.nu(1, h[:, 1:])
        p_mc = np.mean(h[:, 0] >= nu)
        se = math.sqrt(p_mc * (1 - p_mc) / len(h))
        assert abs(got - p_mc) < max(4 * se, 2e-3)
