"""Monte-Carlo engine: determinism, oracles, prior-exponent recovery."""

import json
import math

import numpy as np
import pytest

from mdpcal import (DomainError, McConfig, PriorSpec, SampleBatch,
                    estimate_prior_exponent, fit_power_law, ks_statistic,
                    load_exponent_config, load_mc_config, mc_bayes_risk,
                    plugin_threshold, regularized_gamma_p, substream,
                    write_mc_csv)
from mdpcal.mc_engine import _ks_rows, _laplace_cdf

GRID = tuple(0.5 + 0.05 * i for i in range(111))  # 0.5 .. 6.0


def small_config(seed: int = 42, **overrides) -> McConfig:
    kwargs = dict(m_alternatives=200, m_null=200, n=100, seed=seed,
                  threshold_grid=GRID)
    kwargs.update(overrides)
    return McConfig(**kwargs)


class TestDeterminism:
    def test_same_seed_bitwise_identical(self):
        prior = PriorSpec(lambda_=2.0, gamma_rate=1.0, truncation=8.0)
        cfg = small_config()
        first = mc_bayes_risk(prior, cfg, "sign")
        second = mc_bayes_risk(prior, cfg, "sign")
        assert first.alpha_hat == second.alpha_hat
        assert first.beta_hat == second.beta_hat
        assert first.risk_hat == second.risk_hat
        assert first.argmin_threshold == second.argmin_threshold

    def test_different_seeds_differ(self):
        prior = PriorSpec(lambda_=2.0, gamma_rate=1.0, truncation=8.0)
        a = mc_bayes_risk(prior, small_config(seed=1), "sign")
        b = mc_bayes_risk(prior, small_config(seed=2), "sign")
        assert a.beta_hat != b.beta_hat

    def test_substreams_are_distinct(self):
        draws = {substream(7, kind, idx).random() for kind in range(3) for idx in range(4)}
        assert len(draws) == 12


class TestRiskCurve:
    def test_always_reject_limit(self):
        # thresholds below every realised KS statistic: alpha = 1, beta = 0
        prior = PriorSpec(lambda_=2.0, gamma_rate=1.0, truncation=8.0)
        cfg = McConfig(m_alternatives=50, m_null=50, n=50, seed=3,
                       threshold_grid=(1e-9, 1e-6))
        result = mc_bayes_risk(prior, cfg, "ks")
        assert result.alpha_hat == (1.0, 1.0)
        assert result.beta_hat == (0.0, 0.0)

    def test_alpha_nonincreasing_beta_nondecreasing(self):
        prior = PriorSpec(lambda_=2.0, gamma_rate=1.0, truncation=8.0)
        for statistic in ("sign", "ks"):
            result = mc_bayes_risk(prior, small_config(), statistic)
            for a, b in zip(result.alpha_hat, result.alpha_hat[1:]):
                assert b <= a
            for a, b in zip(result.beta_hat, result.beta_hat[1:]):
                assert b >= a

    def test_risk_combines_weights(self):
        prior = PriorSpec(lambda_=2.0, gamma_rate=1.0, truncation=8.0)
        result = mc_bayes_risk(prior, small_config(), "sign", w0=2.0, w1=0.5)
        for alpha, beta, risk in zip(result.alpha_hat, result.beta_hat, result.risk_hat):
            assert risk == pytest.approx(2.0 * alpha + 0.5 * beta, rel=1e-12)

    def test_concentrated_prior_beats_binomial_tail_oracle(self):
        # Prior concentrated near theta = 10 (Gamma(100, 10)); at the MDP
        # threshold the exact binomial tail at p(10) is negligible, so the
        # Type-II estimate must be < 0.01.
        n, lam_prior = 200, 2.0
        prior = PriorSpec(lambda_=100.0, gamma_rate=10.0, truncation=20.0)
        t_mdp = math.sqrt(lam_prior * math.log(n))
        cfg = McConfig(m_alternatives=400, m_null=1, n=n, seed=11,
                       threshold_grid=(t_mdp,))
        result = mc_bayes_risk(prior, cfg, "sign")

        p10 = 1.0 - 0.5 * math.exp(-10.0)
        cutoff = int(n / 2 + t_mdp * math.sqrt(n) / 2)
        log_terms = [
            math.lgamma(n + 1) - math.lgamma(v + 1) - math.lgamma(n - v + 1)
            + v * math.log(p10) + (n - v) * math.log(1.0 - p10)
            for v in range(cutoff + 1)
        ]
        oracle_tail = sum(math.exp(t) for t in log_terms)
        assert oracle_tail < 1e-50
        assert result.beta_hat[0] < 0.01

    def test_vectorised_ks_matches_scalar(self):
        rng = np.random.default_rng(8)
        data = rng.laplace(0.3, 1.0, (5, 40))
        rows = _ks_rows(data)
        for i in range(5):
            batch = SampleBatch(tuple(data[i]))
            scalar = ks_statistic(batch, lambda x: float(_laplace_cdf(np.asarray(x))))
            assert rows[i] == pytest.approx(math.sqrt(40) * scalar, rel=1e-12)

    def test_ks_basin_location(self):
        # lambda = 2 with the KS statistic (rho = 1): the MC argmin lies
        # within 20% of t* = sqrt((lambda/4) ln n)
        prior = PriorSpec(lambda_=2.0, gamma_rate=1.0, truncation=8.0)
        grid = tuple(0.2 + 0.02 * i for i in range(191))
        cfg = McConfig(m_alternatives=2000, m_null=2000, n=500, seed=42,
                       threshold_grid=grid)
        result = mc_bayes_risk(prior, cfg, "ks")
        t_star = math.sqrt(0.5 * math.log(500))
        assert abs(result.argmin_threshold - t_star) <= 0.2 * t_star

    def test_validation(self):
        prior = PriorSpec(lambda_=2.0, gamma_rate=1.0, truncation=8.0)
        with pytest.raises(DomainError):
            mc_bayes_risk(prior, small_config(), "pearson")
        with pytest.raises(DomainError):
            McConfig(m_alternatives=0, m_null=10, n=10, seed=1, threshold_grid=(1.0,))
        with pytest.raises(DomainError):
            McConfig(m_alternatives=10, m_null=10, n=10, seed=1, threshold_grid=())
        with pytest.raises(DomainError):
            McConfig(m_alternatives=10, m_null=10, n=10, seed=1, threshold_grid=(2.0, 1.0))
        with pytest.raises(DomainError):
            PriorSpec(family="cauchy-location")


class TestPriorExponent:
    def test_exact_power_law_recovered_to_machine_precision(self):
        radii = (0.2, 0.1, 0.05, 0.02)
        fit = fit_power_law(radii, tuple(r * r for r in radii))
        assert fit.kappa_hat == pytest.approx(2.0, abs=1e-12)
        assert fit.r2 == pytest.approx(1.0, abs=1e-12)

    @staticmethod
    def exact_slope(lam: float, gamma: float, trunc: float, radii) -> float:
        # oracle: regression on exact truncated-Gamma CDF values
        total = regularized_gamma_p(lam, gamma * trunc)
        ps = [regularized_gamma_p(lam, gamma * r) / total for r in radii]
        return fit_power_law(radii, ps).kappa_hat

    @pytest.mark.parametrize("lam", [1.0, 2.0])
    def test_sampled_exponent_matches_exact_oracle(self, lam):
        radii = (0.2, 0.1, 0.05, 0.02)
        prior = PriorSpec(lambda_=lam, gamma_rate=1.0, truncation=8.0)
        fit = estimate_prior_exponent(prior, radii, 10**6, seed=1)
        reference = self.exact_slope(lam, 1.0, 8.0, radii)
        assert fit.kappa_hat == pytest.approx(reference, abs=0.1)
        assert fit.kappa_hat == pytest.approx(lam, abs=0.1)
        assert fit.r2 > 0.999

    def test_plugin_propagation_from_regression(self):
        prior = PriorSpec(lambda_=2.0, gamma_rate=1.0, truncation=8.0)
        fit = estimate_prior_exponent(prior, (0.2, 0.1, 0.05, 0.02), 10**6, seed=1)
        threshold = plugin_threshold(fit.kappa_hat, 0.25, 10**4)
        assert threshold == pytest.approx(math.sqrt(2.0 * math.log(10**4)), abs=0.25)

    def test_all_zero_cell_raises(self):
        prior = PriorSpec(lambda_=2.0, gamma_rate=1.0, truncation=8.0)
        with pytest.raises(DomainError):
            estimate_prior_exponent(prior, (1e-4, 1e-5), 100, seed=5)

    def test_radii_validation(self):
        prior = PriorSpec(lambda_=2.0, gamma_rate=1.0, truncation=8.0)
        with pytest.raises(DomainError):
            estimate_prior_exponent(prior, (0.1, 0.2), 100, seed=5)
        with pytest.raises(DomainError):
            estimate_prior_exponent(prior, (9.0, 0.1), 100, seed=5)


class TestPluginThreshold:
    def test_table_value(self):
        assert plugin_threshold(2.0, 1.0, 10**4) == pytest.approx(2.146, abs=1e-3)

    def test_unit_constant(self):
        for rho in (0.25, 1.0, 2.0):
            assert plugin_threshold(4.0 * rho, rho, 1000) == pytest.approx(
                math.sqrt(math.log(1000)), rel=1e-12)

    def test_validation(self):
        with pytest.raises(DomainError):
            plugin_threshold(-1.0, 1.0, 100)
        with pytest.raises(DomainError):
            plugin_threshold(1.0, 1.0, 1)


class TestConfigIO:
    def test_mc_roundtrip(self, tmp_path):
        payload = {
            "prior": {"family": "laplace-location", "lambda": 2.0,
                      "gamma_rate": 0.5, "truncation": 8.0},
            "mc": {"m_alternatives": 50, "m_null": 60, "n": 40, "seed": 9,
                   "threshold_grid": [1.0, 2.0, 3.0]},
            "statistic": "sign",
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(payload))
        run = load_mc_config(path)
        assert run.prior.lambda_ == 2.0
        assert run.config.m_null == 60
        assert run.statistic == "sign"
        result = mc_bayes_risk(run.prior, run.config, run.statistic)
        assert len(result.thresholds) == 3

    def test_exponent_config(self, tmp_path):
        payload = {"prior": {"lambda": 1.0, "gamma_rate": 1.0, "truncation": 8.0},
                   "radii": [0.2, 0.1], "m": 1000, "seed": 4}
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(payload))
        run = load_exponent_config(path)
        assert run.radii == (0.2, 0.1)
        assert run.m == 1000

    def test_missing_field_raises(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"prior": {"lambda": 1.0}}))
        with pytest.raises(DomainError):
            load_mc_config(path)

    def test_csv_writer(self, tmp_path):
        prior = PriorSpec(lambda_=2.0, gamma_rate=1.0, truncation=8.0)
        result = mc_bayes_risk(prior, small_config(), "sign")
        path = tmp_path / "out.csv"
        with open(path, "w", newline="") as fh:
            write_mc_csv(result, fh)
        lines = path.read_text().splitlines()
        assert lines[0] == "threshold,alpha_hat,se_alpha,beta_hat,se_beta,risk_hat"
        assert len(lines) == 1 + len(GRID)
