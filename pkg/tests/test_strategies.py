import numpy as np
import pytest
from scipy import integrate, stats

from alqsim import (BetaParams, ConfigError, QueryStrategy, ScoredCandidate,
                    beta_from_mode, beta_pdf, beta_sample, select_random,
                    select_shifted_normal, select_uncertainty)
from alqsim import strategies as strategies_module


def candidates_from(probs, ids=None):
    ids = range(len(probs)) if ids is None else ids
    return [ScoredCandidate(i, p) for i, p in zip(ids, probs)]


class TestBetaFromMode:
    def test_reference_parameterization(self):
        params = beta_from_mode(0.45, 12.0)
        assert params.alpha == pytest.approx(5.5, abs=1e-12)
        assert params.beta == pytest.approx(6.5, abs=1e-12)
        assert params.mode == pytest.approx(0.45, abs=1e-12)

    def test_symmetric_case(self):
        params = beta_from_mode(0.5, 4.0)
        assert (params.alpha, params.beta) == (2.0, 2.0)

    def test_concentration_limit_is_nearly_uniform(self):
        params = beta_from_mode(0.45, 2.0001)
        assert params.alpha == pytest.approx(1.000045, abs=1e-9)
        assert params.beta == pytest.approx(1.000055, abs=1e-9)
        xs = np.linspace(0.01, 0.99, 50)
        assert np.abs(beta_pdf(params, xs) - 1.0).max() < 1e-3

    def test_mode_roundtrip_exact(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            mode = float(rng.uniform(0.05, 0.95))
            concentration = float(rng.uniform(2.1, 300.0))
            assert beta_from_mode(mode, concentration).mode == pytest.approx(
                mode, abs=1e-12)

    @pytest.mark.parametrize("mode,conc", [(0.0, 12), (1.0, 12), (-0.1, 12),
                                           (0.45, 2.0), (0.45, 1.0)])
    def test_out_of_range_rejected(self, mode, conc):
        with pytest.raises(ConfigError):
            beta_from_mode(mode, conc)

    def test_interior_mode_required_on_params(self):
        with pytest.raises(ConfigError):
            BetaParams(1.0, 1.0)
        with pytest.raises(ConfigError):
            BetaParams(0.5, 3.0)


class TestBetaPdf:
    def test_beta22_at_half(self):
        assert beta_pdf(BetaParams(2, 2), 0.5) == pytest.approx(1.5, abs=1e-12)

    def test_domain_errors(self):
        params = BetaParams(2, 2)
        for x in (0.0, 1.0, -0.5, 1.5):
            with pytest.raises(ValueError):
                beta_pdf(params, x)

    @pytest.mark.parametrize("alpha,beta", [(5.5, 6.5), (2, 2), (67.6, 83.4)])
    def test_integrates_to_one(self, alpha, beta):
        params = BetaParams(alpha, beta)
        total, _ = integrate.quad(lambda x: beta_pdf(params, x), 0.0, 1.0)
        assert abs(total - 1.0) <= 1e-6

    def test_matches_scipy_density(self):
        params = BetaParams(5.5, 6.5)
        xs = np.linspace(0.01, 0.99, 99)
        np.testing.assert_allclose(beta_pdf(params, xs),
                                   stats.beta.pdf(xs, 5.5, 6.5), rtol=1e-12)


class TestBetaSample:
    def test_mean_of_100k_draws(self):
        params = BetaParams(5.5, 6.5)
        rng = np.random.default_rng(2024)
        draws = np.array([beta_sample(params, rng) for _ in range(100_000)])
        assert abs(draws.mean() - 5.5 / 12.0) < 0.003

    def test_kolmogorov_smirnov_against_cdf(self):
        params = BetaParams(5.5, 6.5)
        rng = np.random.default_rng(7)
        draws = [beta_sample(params, rng) for _ in range(100_000)]
        result = stats.kstest(draws, stats.beta(5.5, 6.5).cdf)
        assert result.pvalue > 0.01

    def test_near_uniform_limit_against_uniform(self):
        params = beta_from_mode(0.45, 2.0001)
        rng = np.random.default_rng(11)
        draws = [beta_sample(params, rng) for _ in range(100_000)]
        assert stats.kstest(draws, stats.uniform.cdf).statistic < 0.01

    def test_support_is_open_interval(self):
        params = BetaParams(2, 2)
        rng = np.random.default_rng(3)
        draws = np.array([beta_sample(params, rng) for _ in range(5_000)])
        assert draws.min() > 0.0 and draws.max() < 1.0


class TestSelectRandom:
    def test_exhaustive_when_k_equals_pool(self):
        rng = np.random.default_rng(0)
        assert sorted(select_random([10, 20], 2, rng)) == [10, 20]

    def test_deterministic_given_seed(self):
        ids = list(range(1000))
        first = select_random(ids, 2, np.random.default_rng(5))
        second = select_random(ids, 2, np.random.default_rng(5))
        assert first == second

    def test_oversized_k_rejected(self):
        with pytest.raises(ValueError):
            select_random([1, 2, 3], 4, np.random.default_rng(0))

    def test_single_draw_frequencies_uniform(self):
        """100k single selections from 10 ids: each lands near 1/10."""
        ids = list(range(10))
        rng = np.random.default_rng(99)
        counts = np.zeros(10)
        for _ in range(100_000):
            counts[select_random(ids, 1, rng)[0]] += 1
        assert np.abs(counts / 100_000 - 0.1).max() < 0.01


class TestSelectUncertainty:
    def test_closest_to_half_wins(self):
        picked = select_uncertainty(
            candidates_from([0.9, 0.51, 0.2], ids=[7, 8, 9]), 1)
        assert picked == [8]

    def test_tie_broken_by_lower_id(self):
        picked = select_uncertainty(
            candidates_from([0.4, 0.6], ids=[3, 5]), 1)
        assert picked == [3]

    def test_matches_full_sort_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            cands = candidates_from(rng.uniform(0.01, 0.99, size=50),
                                    ids=rng.permutation(500)[:50])
            expected = [c.instance_id for c in
                        sorted(cands, key=lambda c: (abs(c.prob - 0.5),
                                                     c.instance_id))][:5]
            assert select_uncertainty(cands, 5) == expected

    def test_candidate_order_irrelevant(self):
        rng = np.random.default_rng(4)
        cands = candidates_from(rng.uniform(0.01, 0.99, size=30))
        shuffled = [cands[i] for i in rng.permutation(30)]
        assert select_uncertainty(cands, 4) == select_uncertainty(shuffled, 4)

    def test_oversized_k_rejected(self):
        with pytest.raises(ValueError):
            select_uncertainty(candidates_from([0.5]), 2)


class TestSelectShiftedNormal:
    PARAMS = BetaParams(5.5, 6.5)

    def test_single_candidate_forced(self):
        cands = candidates_from([0.9], ids=[42])
        assert select_shifted_normal(cands, 1, self.PARAMS,
                                     np.random.default_rng(0)) == [42]

    def test_mode_candidate_selected_most_often(self):
        """Over 10k single draws the 0.45 candidate dominates 0.1 and 0.9."""
        cands = candidates_from([0.1, 0.45, 0.9])
        rng = np.random.default_rng(123)
        counts = np.zeros(3)
        for _ in range(10_000):
            counts[select_shifted_normal(cands, 1, self.PARAMS, rng)[0]] += 1
        assert counts[1] == counts.max()

    def test_degenerate_targets_pick_nearest(self, monkeypatch):
        monkeypatch.setattr(strategies_module, "beta_sample",
                            lambda params, rng: 0.45)
        cands = candidates_from([0.2, 0.5, 0.8], ids=[1, 2, 3])
        for _ in range(5):
            picked = strategies_module.select_shifted_normal(
                cands, 1, self.PARAMS, np.random.default_rng(0))
            assert picked == [2]

    def test_returns_distinct_ids_without_replacement(self):
        rng = np.random.default_rng(8)
        cands = candidates_from(rng.uniform(0.01, 0.99, size=40))
        picked = select_shifted_normal(cands, 10, self.PARAMS, rng)
        assert len(set(picked)) == 10
        assert set(picked) <= {c.instance_id for c in cands}

    def test_selection_histogram_peaks_at_mode(self):
        """10k selections over a uniform grid of probs: modal bin holds 0.45."""
        grid = (np.arange(100) + 0.5) / 100
        cands = candidates_from(grid)
        rng = np.random.default_rng(31)
        chosen_probs = [grid[select_shifted_normal(cands, 1, self.PARAMS, rng)[0]]
                        for _ in range(10_000)]
        counts, edges = np.histogram(chosen_probs, bins=10, range=(0.0, 1.0))
        modal_bin = counts.argmax()
        assert edges[modal_bin] <= 0.45 < edges[modal_bin + 1]

    def test_oversized_k_rejected(self):
        with pytest.raises(ValueError):
            select_shifted_normal(candidates_from([0.5]), 2, self.PARAMS,
                                  np.random.default_rng(0))


class TestQueryStrategy:
    def test_valid_kinds(self):
        for kind in ("random", "uncertainty", "shifted-normal"):
            assert QueryStrategy(kind=kind).kind == kind

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigError, match="random, uncertainty, shifted-normal"):
            QueryStrategy(kind="bogus")

    def test_shifted_normal_parameter_validation(self):
        with pytest.raises(ConfigError):
            QueryStrategy(kind="shifted-normal", mode=1.5)
        with pytest.raises(ConfigError):
            QueryStrategy(kind="shifted-normal", concentration=2.0)

    def test_beta_params_only_for_shifted_normal(self):
        strategy = QueryStrategy(kind="shifted-normal", mode=0.45, concentration=12.0)
        params = strategy.beta_params()
        assert (params.alpha, params.beta) == (5.5, 6.5)
        with pytest.raises(ValueError):
            QueryStrategy(kind="random").beta_params()

    def test_scored_candidate_requires_open_interval(self):
        with pytest.raises(ValueError):
            ScoredCandidate(1, 0.0)
        with pytest.raises(ValueError):
            ScoredCandidate(1, 1.0)
