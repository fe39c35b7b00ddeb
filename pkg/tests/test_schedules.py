import math

import numpy as np
import pytest

from agp.objective import Regime, SmoothnessData, make_bilinear, random_quadratic
from agp.schedules import (CNcConfig, InfeasibleConfigError, NcCConfig,
                           NcScConfig, ScNcConfig, UnsupportedRegimeError,
                           auto_configure, params_at, validate)


def data(L_x=1.0, L_y=1.0, L_12=1.0, L_21=1.0, mu=0.0, theta=0.0):
    return SmoothnessData(L_x=L_x, L_y=L_y, L_12=L_12, L_21=L_21, mu=mu, theta=theta)


class TestParamsAt:
    def test_nc_sc_constants(self):
        d = data(mu=1.0)
        cfg = NcScConfig(eta=2.0, rho=0.1)
        for k in (1, 5, 1000):
            p = params_at(cfg, d, k)
            assert (p.beta, p.gamma, p.b, p.c) == (2.0, 10.0, 0.0, 0.0)

    def test_nc_c_hand_substitution_k1(self):
        # independent recomputation: c1 = 1/(2*1*1) = 0.5,
        # alpha1 = 4*1/(1*0.25) = 16, beta~1 = 1 + 64 + 32 - 0.2 = 96.8
        d = data()
        cfg = NcCConfig(eta_bar=0.1, rho_bar=1.0, tau=3.0)
        p = params_at(cfg, d, 1)
        assert p.c == pytest.approx(0.5)
        assert p.beta == pytest.approx(96.9)
        assert p.gamma == pytest.approx(1.0)
        assert p.b == 0.0

    def test_sc_nc_constants(self):
        d = data(theta=1.0)
        p = params_at(ScNcConfig(zeta=0.25, nu=3.0), d, 7)
        assert (p.beta, p.gamma, p.b, p.c) == (4.0, 3.0, 0.0, 0.0)

    def test_c_nc_hand_substitution_k16(self):
        # q16 = 1/(2*0.5*2) = 0.5; gamma~16 = 0.5 + 24/(0.5*0.25) - 0.2 = 192.3
        d = data()
        cfg = CNcConfig(nu_bar=0.1, zeta_bar=0.5, tau=3.0)
        p = params_at(cfg, d, 16)
        assert p.b == pytest.approx(0.5)
        assert p.gamma == pytest.approx(0.1 + 192.3)
        assert p.beta == pytest.approx(2.0)
        assert p.c == 0.0

    def test_pure_function_bit_identical(self):
        d = data(mu=0.5)
        cfg = NcCConfig(eta_bar=0.3, rho_bar=0.7, tau=2.5)
        for k in (1, 3, 47):
            a = params_at(cfg, d, k)
            b = params_at(cfg, d, k)
            assert (a.beta, a.gamma, a.b, a.c) == (b.beta, b.gamma, b.b, b.c)

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            params_at(NcScConfig(eta=2.0, rho=0.1), data(mu=1.0), 0)

    def test_decoupled_floor(self):
        # L_12 = 0 collapses beta~_k to -2 eta_bar; the floor keeps beta positive
        d = data(L_x=2.0, L_12=0.0)
        cfg = NcCConfig(eta_bar=0.1, rho_bar=1.0, tau=3.0)
        p = params_at(cfg, d, 1)
        assert p.floored
        assert p.beta == pytest.approx(1.01 * 2.0)

    def test_decoupled_floor_degenerate_raises(self):
        d = data(L_x=0.0, L_12=0.0)
        cfg = NcCConfig(eta_bar=0.1, rho_bar=1.0, tau=3.0)
        with pytest.raises(InfeasibleConfigError):
            params_at(cfg, d, 1)


class TestScheduleShape:
    def test_nc_c_beta_grows_like_sqrt_k(self):
        d = data()
        cfg = NcCConfig(eta_bar=0.5, rho_bar=1.0, tau=3.0)
        betas = {k: params_at(cfg, d, k).beta for k in (1, 4, 16, 64, 256)}
        for k in (16, 64):
            ratio = betas[4 * k] / betas[k]
            assert 1.9 <= ratio <= 2.1
        ks = [1, 4, 16, 64, 256]
        assert all(betas[a] < betas[b] for a, b in zip(ks, ks[1:]))

    def test_c_k_halves_when_k_times_16(self):
        cfg = NcCConfig(eta_bar=0.5, rho_bar=0.8, tau=3.0)
        for k in (1, 2, 7, 40):
            assert cfg.c(16 * k) == pytest.approx(cfg.c(k) / 2, abs=1e-12)

    def test_q_k_halves_when_k_times_16(self):
        cfg = CNcConfig(nu_bar=0.5, zeta_bar=1.2, tau=3.0)
        for k in (1, 3, 11):
            assert cfg.q(16 * k) == pytest.approx(cfg.q(k) / 2, abs=1e-12)

    def test_sequences_strictly_decreasing(self):
        cfg = NcCConfig(eta_bar=0.5, rho_bar=1.0, tau=3.0)
        cs = [cfg.c(k) for k in range(1, 100)]
        assert all(a > b for a, b in zip(cs, cs[1:]))


class TestAutoConfigure:
    def test_nc_sc_hand_values(self):
        d = data(mu=1.0)
        cfg = auto_configure(d, Regime.NC_SC)
        assert cfg.rho == pytest.approx(0.25)
        assert cfg.eta == pytest.approx(1.01 * max(1.0, 1.0, 0.25 + 16.0))
        assert cfg.eta == pytest.approx(16.4125)

    def test_nc_c_rule(self):
        d = data(L_y=2.0)
        cfg = auto_configure(d, Regime.NC_C)
        assert cfg.rho_bar == pytest.approx(0.5)
        assert cfg.tau == 3.0

    def test_sc_nc_rule(self):
        d = data(theta=1.0)
        cfg = auto_configure(d, Regime.SC_NC)
        assert cfg.zeta == pytest.approx(min(0.25, 6.0))

    def test_structural_requirements(self):
        with pytest.raises(UnsupportedRegimeError):
            auto_configure(data(mu=0.0), Regime.NC_SC)
        with pytest.raises(UnsupportedRegimeError):
            auto_configure(data(theta=0.0), Regime.SC_NC)
        with pytest.raises(UnsupportedRegimeError):
            auto_configure(data(L_y=0.0), Regime.NC_C)
        with pytest.raises(UnsupportedRegimeError):
            auto_configure(data(L_x=0.0), Regime.C_NC)


class TestValidate:
    def test_nc_sc_all_pass(self):
        d = data(mu=1.0)
        rep = validate(NcScConfig(eta=16.4125, rho=0.25), d)
        assert rep.passed
        assert len(rep.checks) == 4

    def test_nc_c_equality_margin(self):
        # rho~ = 1/L_y makes rho~ <= 2/(L_y' + c1) hold with equality
        for L_y in (0.5, 1.0, 3.7):
            d = data(L_y=L_y)
            cfg = NcCConfig(eta_bar=0.5, rho_bar=1.0 / L_y, tau=3.0)
            rep = validate(cfg, d)
            chk = rep.checks[0]
            assert chk.passed
            assert chk.lhs == pytest.approx(chk.rhs)

    def test_decay_condition_first_holds_at_9(self):
        # 2*(10^(1/4) - 9^(1/4)) ~ 0.0924 <= 0.1 but
        # 2*(9^(1/4) - 8^(1/4)) ~ 0.1006 > 0.1
        assert 2 * (10**0.25 - 9**0.25) == pytest.approx(0.0924, abs=1e-3)
        assert 2 * (9**0.25 - 8**0.25) == pytest.approx(0.1006, abs=1e-3)
        d = data()
        rep = validate(NcCConfig(eta_bar=0.5, rho_bar=1.0, tau=3.0), d)
        assert rep.k0 == 9
        rep = validate(CNcConfig(nu_bar=0.5, zeta_bar=1.0, tau=3.0), d)
        assert rep.k0 == 9

    def test_never_throws_on_bad_config(self):
        d = data(mu=1.0)
        rep = validate(NcScConfig(eta=0.5, rho=10.0), d)
        assert not rep.passed

    def test_report_formats(self):
        d = data(mu=1.0)
        rep = validate(NcScConfig(eta=16.4125, rho=0.25), d)
        text = str(rep)
        assert "L_x < eta" in text
        import json
        parsed = json.loads(rep.to_json())
        assert parsed["passed"] is True

    def test_auto_config_validates_for_tagged_instances(self):
        for regime in Regime:
            for seed in range(3):
                p = random_quadratic(seed, 3, 2, regime)
                cfg = auto_configure(p.constants, regime)
                assert validate(cfg, p.constants).passed, (regime, seed)

    def test_auto_config_validates_across_zoo(self):
        from conftest import zoo_instances
        for p in zoo_instances():
            for regime in p.tags:
                try:
                    cfg = auto_configure(p.constants, regime)
                except UnsupportedRegimeError:
                    continue  # degenerate coupling: explicit configs only
                assert validate(cfg, p.constants).passed, (p.name, regime)

    def test_bilinear_explicit_config_validates(self):
        p = make_bilinear([[1.0]])
        cfg = NcCConfig(eta_bar=0.5, rho_bar=1.0, tau=3.0)
        assert validate(cfg, p.constants).passed
        cfg = CNcConfig(nu_bar=0.5, zeta_bar=1.0, tau=3.0)
        assert validate(cfg, p.constants).passed


class TestStepParams:
    def test_exactly_one_regularizer(self):
        from agp.schedules import StepParams
        with pytest.raises(ValueError):
            StepParams(beta=1.0, gamma=1.0, b=0.1, c=0.1, k=1)

    def test_tau_bound(self):
        with pytest.raises(ValueError):
            NcCConfig(eta_bar=0.5, rho_bar=1.0, tau=2.0)
