import numpy as np
import pytest
from scipy.stats import spearmanr

from cimkit import (
    LagSet,
    NoValidLagError,
    best_lag,
    cim_pair,
    gen_ar_driven,
    gen_linear_flow,
    ksg_mutual_information,
    progressive_embed,
)


class TestCimPair:
    def test_identical_series_is_one_dimensional(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal(1000)
        res = cim_pair(x, x, 0)
        assert res.dimension == pytest.approx(1.0, abs=0.1)
        assert res.cim == pytest.approx(1.0, abs=0.1)

    def test_independent_noise_fills_the_plane(self):
        # Monte Carlo across seeds: mean dimension of an independent pair
        dims = []
        for seed in range(50):
            rng = np.random.default_rng(1000 + seed)
            x, y = rng.standard_normal((2, 5000))
            dims.append(cim_pair(x, y, 0).dimension)
        assert np.mean(dims) == pytest.approx(2.0, abs=0.1)

    def test_reciprocal_identity(self):
        rng = np.random.default_rng(3)
        x, y = rng.standard_normal((2, 400))
        res = cim_pair(x, y, 2)
        assert res.cim == 1.0 / res.dimension
        assert res.cim * res.dimension == pytest.approx(1.0, abs=1e-12)

    def test_direction_labels(self):
        rng = np.random.default_rng(4)
        x, y = rng.standard_normal((2, 300))
        res = cim_pair(x, y, 1, target_id="tgt", source_id="src")
        assert res.target == "tgt"
        assert res.source == "src"
        assert res.lag == 1


class TestBestLag:
    def test_exact_shift_recovers_lag(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal(600)
        lags = LagSet(tuple(range(1, 11)))
        for k in range(1, 11):
            y = np.roll(x, -k)  # y[n] = x[n + k], so x[n] = y[n - k]
            res = best_lag(x[: 500], y[: 500], lags)
            assert res.lag == k
            assert res.dimension == pytest.approx(1.0, abs=0.1)

    def test_singleton_equals_cim_pair(self):
        rng = np.random.default_rng(8)
        x, y = rng.standard_normal((2, 300))
        single = best_lag(x, y, LagSet((3,)))
        direct = cim_pair(x, y, 3)
        assert single.dimension == direct.dimension
        assert single.lag == direct.lag

    def test_all_lags_degenerate(self):
        flat = np.zeros(100)
        with pytest.raises(NoValidLagError):
            best_lag(flat, flat, LagSet((1, 2)))

    def test_lag_set_validation(self):
        with pytest.raises(ValueError):
            LagSet(())
        with pytest.raises(ValueError):
            LagSet((2, 1))
        with pytest.raises(ValueError):
            LagSet((-1, 2))
        assert LagSet.upto(3).lags == (1, 2, 3)
        assert LagSet.upto(2, include_zero=True).lags == (0, 1, 2)


class TestTheoremOrdering:
    def test_driven_direction_has_lower_dimension(self):
        # paired one-sided comparison across seeded realizations
        from scipy.stats import wilcoxon

        fwd, rev = [], []
        for seed in range(60):
            x, y = gen_linear_flow(180, a=0.5, seed=seed)
            fwd.append(cim_pair(x, y, 1).dimension)  # (x_n, y_{n-1})
            rev.append(cim_pair(y, x, 1).dimension)  # (y_n, x_{n-1})
        assert np.mean(rev) < np.mean(fwd)
        stat = wilcoxon(np.array(rev) - np.array(fwd), alternative="less")
        assert stat.pvalue < 1e-3

    def test_cim_ranking_matches_mutual_information(self):
        # per-instance rank agreement between the dimension-based measure
        # and an independent k-NN mutual-information estimate, across a
        # strongly coupled, a weakly coupled, and an independent pair
        rhos = []
        for seed in range(30):
            x1, y1 = gen_linear_flow(2000, a=0.5, seed=seed)
            x2, y2 = gen_ar_driven(2000, seed=seed)
            rng = np.random.default_rng(10_000 + seed)
            x3, y3 = rng.standard_normal((2, 2000))
            cims, mis = [], []
            for x, y in ((x1, y1), (x2, y2), (x3, y3)):
                cims.append(cim_pair(y, x, 1).cim)
                mis.append(ksg_mutual_information(y[1:], x[:-1]).value)
            rhos.append(spearmanr(cims, mis).statistic)
        assert np.mean(rhos) >= 0.9


class TestProgressiveEmbed:
    def test_recovers_generative_parent(self):
        x, y = gen_linear_flow(600, a=0.5, seed=11)
        sel = progressive_embed(
            {"x": x, "y": y}, {"x": 3, "y": 3}, target_id="y", horizons=1
        )
        assert ("x", 1) in sel.selected
        assert sel.steps[0].accepted  # pool order starts at (x, 1)

    def test_pure_noise_selects_nothing(self):
        rng = np.random.default_rng(12)
        a, b = rng.standard_normal((2, 2000))
        sel = progressive_embed(
            {"a": a, "b": b}, {"a": 2, "b": 2}, target_id="b", horizons=1
        )
        assert sel.selected == ()
        assert all(not s.accepted for s in sel.steps)

    def test_single_candidate_reduces_to_cim_pair(self):
        rng = np.random.default_rng(13)
        x, y = rng.standard_normal((2, 400))
        sel = progressive_embed(
            {"x": x, "y": y}, {"y": 1}, target_id="x", horizons=1
        )
        direct = cim_pair(x, y, 1)
        assert sel.steps[0].dimension == direct.dimension

    def test_threshold_validation(self):
        x = np.arange(100.0)
        with pytest.raises(ValueError):
            progressive_embed({"x": x}, {"x": 2}, "x", dim_threshold_ratio=1.5)

    def test_records_every_step(self):
        rng = np.random.default_rng(14)
        a, b = rng.standard_normal((2, 500))
        sel = progressive_embed({"a": a, "b": b}, {"a": 2, "b": 2}, target_id="b")
        assert len(sel.steps) == len(sel.pool) == 4
        assert sel.pool == (("a", 1), ("a", 2), ("b", 1), ("b", 2))

    def test_multi_step_horizon_concatenates_future(self):
        x, y = gen_linear_flow(800, a=0.5, seed=15)
        sel = progressive_embed(
            {"x": x, "y": y}, {"x": 2}, target_id="y", horizons=2
        )
        assert sel.horizons == (1, 2)
        # ambient = 2 future coordinates + 1 candidate
        assert sel.steps[0].ambient_dim == 3
        # y_{t} and y_{t+1} are both driven by x, so x lags 1 and 2 carry it
        assert ("x", 1) in sel.selected

    def test_too_short_for_horizon(self):
        from cimkit import InsufficientLengthError

        x = np.arange(8.0)
        with pytest.raises(InsufficientLengthError):
            progressive_embed({"x": x}, {"x": 3}, target_id="x", horizons=3)
