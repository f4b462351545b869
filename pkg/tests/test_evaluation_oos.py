"""Time-split out-of-sample scoring and restricted cross-sectional fits."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import month_dates, noisy_priced_panel, returns_panel
from fsfmb import ReturnsPanel, ols, sample_covariances, time_series_betas
from fsfmb.errors import SplitTooShort
from fsfmb.evaluation import SplitSpec, restricted_fit, time_split_oos


def subpanel_rows(r, rows):
    return ReturnsPanel(
        r.values[rows], tuple(r.dates[i] for i in rows), r.asset_ids
    )


class TestTimeSplitOos:
    def test_chronological_matches_manual_recompute(self):
        rng = np.random.default_rng(71)
        r, f, _ = noisy_priced_panel(rng, n_assets=30, n_periods=200, n_factors=4)
        idx = (0, 1, 2)
        rep = time_split_oos(
            r, f, [("m", idx)], SplitSpec(kind="chronological", fraction=0.5)
        )
        res = rep.models[0]

        from fsfmb import FactorPanel

        tr = np.arange(100)
        te = np.arange(100, 200)
        r_tr, r_te = subpanel_rows(r, tr), subpanel_rows(r, te)
        f_tr = FactorPanel(
            f.values[tr], tuple(f.dates[i] for i in tr), f.names
        )
        f_te = FactorPanel(
            f.values[te], tuple(f.dates[i] for i in te), f.names
        )
        cov_tr = sample_covariances(r_tr, f_tr, idx).values
        cov_te = sample_covariances(r_te, f_te, idx).values
        y_tr, y_te = r_tr.mean_returns(), r_te.mean_returns()
        fit = ols(cov_tr, y_tr, intercept=True)
        pred = fit.intercept + cov_te @ fit.coef
        pred = pred + (y_te.mean() - pred.mean())
        r2_oos = 1.0 - ((y_te - pred) ** 2).sum() / ((y_te - y_te.mean()) ** 2).sum()
        assert_allclose(res.r2_train, fit.r2, rtol=1e-12)
        assert_allclose(res.r2_oos, r2_oos, rtol=1e-12)
        assert rep.n_train == 100 and rep.n_test == 100

    def test_training_fit_never_sees_test_rows(self):
        rng = np.random.default_rng(72)
        r, f, _ = noisy_priced_panel(rng, n_assets=25, n_periods=160, n_factors=3)
        idx = (0, 1)
        spec = SplitSpec(kind="chronological", fraction=0.5)
        before = time_split_oos(r, f, [("m", idx)], spec)
        vals = r.values.copy()
        vals[80:] += 5.0 * np.random.default_rng(1).standard_normal(vals[80:].shape)
        corrupted = ReturnsPanel(vals, r.dates, r.asset_ids)
        after = time_split_oos(corrupted, f, [("m", idx)], spec)
        assert before.models[0].r2_train == after.models[0].r2_train
        assert before.models[0].r2_oos != after.models[0].r2_oos

    def test_recentering_absorbs_level_shifts(self):
        rng = np.random.default_rng(73)
        r, f, _ = noisy_priced_panel(rng, n_assets=25, n_periods=160, n_factors=3)
        idx = (0, 1, 2)
        spec = SplitSpec(kind="chronological", fraction=0.5)
        plain = time_split_oos(r, f, [("m", idx)], spec, recenter=False)
        # shift every test-half return by a constant: recentered scoring is
        # unaffected, raw scoring degrades
        vals = r.values.copy()
        vals[80:] += 0.5
        shifted = ReturnsPanel(vals, r.dates, r.asset_ids)
        rec = time_split_oos(shifted, f, [("m", idx)], spec, recenter=True)
        raw = time_split_oos(shifted, f, [("m", idx)], spec, recenter=False)
        base_rec = time_split_oos(r, f, [("m", idx)], spec, recenter=True)
        assert_allclose(rec.models[0].r2_oos, base_rec.models[0].r2_oos, atol=1e-10)
        assert raw.models[0].r2_oos < plain.models[0].r2_oos

    def test_random_splits_shape_and_determinism(self):
        rng = np.random.default_rng(74)
        r, f, _ = noisy_priced_panel(rng, n_assets=20, n_periods=120, n_factors=3)
        spec = SplitSpec(kind="random", fraction=0.5, n_reps=7, seed=11)
        rep = time_split_oos(r, f, [("m", (0, 1))], spec)
        res = rep.models[0]
        assert len(res.r2_oos_reps) == 7
        assert res.r2_oos == pytest.approx(np.mean(res.r2_oos_reps))
        assert len(set(res.r2_oos_reps)) > 1  # reps use different splits
        again = time_split_oos(r, f, [("m", (0, 1))], spec)
        assert res.r2_oos_reps == again.models[0].r2_oos_reps

    def test_multiple_models_scored_side_by_side(self):
        rng = np.random.default_rng(75)
        r, f, _ = noisy_priced_panel(rng, n_assets=30, n_periods=150, n_factors=5)
        rep = time_split_oos(
            r,
            f,
            [("narrow", (0,)), ("wide", (0, 1, 2, 3, 4))],
            SplitSpec(kind="chronological", fraction=0.6),
        )
        names = [m.name for m in rep.models]
        assert names == ["narrow", "wide"]
        assert rep.models[1].r2_train >= rep.models[0].r2_train - 1e-12

    def test_split_too_short(self):
        r = returns_panel(np.random.default_rng(0).standard_normal((3, 4)))
        from conftest import factor_panel

        f = factor_panel(np.random.default_rng(1).standard_normal((3, 2)))
        with pytest.raises(SplitTooShort):
            time_split_oos(r, f, [("m", (0,))], SplitSpec(fraction=0.5))

    def test_split_spec_validation(self):
        with pytest.raises(ValueError):
            SplitSpec(kind="sideways")
        with pytest.raises(ValueError):
            SplitSpec(fraction=0.0)
        with pytest.raises(ValueError):
            SplitSpec(kind="random", n_reps=0)


class TestRestrictedFit:
    def test_tradable_premia_are_factor_means(self):
        rng = np.random.default_rng(76)
        r, f, _ = noisy_priced_panel(rng, n_assets=30, n_periods=200, n_factors=4)
        out = restricted_fit(r, f, tradable=(0, 2), nontradable=(1,))
        assert_allclose(
            out.lambda_tradable,
            [f.values[:, 0].mean(), f.values[:, 2].mean()],
            rtol=1e-12,
        )
        assert out.tradable == (0, 2) and out.nontradable == (1,)

    def test_matches_manual_two_block_fit(self):
        rng = np.random.default_rng(77)
        r, f, _ = noisy_priced_panel(rng, n_assets=35, n_periods=250, n_factors=4)
        out = restricted_fit(r, f, tradable=(0, 1), nontradable=(2, 3))
        betas = time_series_betas(r, f, (0, 1, 2, 3))
        lam = np.array([f.values[:, 0].mean(), f.values[:, 1].mean()])
        y_star = r.mean_returns() - betas[:, :2] @ lam
        fit = ols(betas[:, 2:], y_star, intercept=True)
        assert_allclose(out.nontradable_premia, fit.coef, rtol=1e-10)
        assert_allclose(out.alpha, fit.intercept, rtol=1e-10)

    def test_restriction_cannot_beat_free_fit(self):
        rng = np.random.default_rng(78)
        r, f, _ = noisy_priced_panel(rng, n_assets=30, n_periods=200, n_factors=4)
        restr = restricted_fit(r, f, tradable=(0, 1), nontradable=(2, 3))
        betas = time_series_betas(r, f, (0, 1, 2, 3))
        free = ols(betas, r.mean_returns(), intercept=True)
        assert restr.r2 <= free.r2 + 1e-12

    def test_all_tradable_no_nontradable(self):
        rng = np.random.default_rng(79)
        r, f, _ = noisy_priced_panel(rng, n_assets=20, n_periods=150, n_factors=3)
        out = restricted_fit(r, f, tradable=(0, 1, 2))
        assert out.nontradable == ()
        assert np.isfinite(out.r2)
