"""Macro correlation and exposure diagnostics."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import factor_panel
from fsfmb import HacSpec, hac_tstats, ols
from fsfmb.errors import DimensionMismatch, EmptyRegime
from fsfmb.evaluation import macro_diagnostics


def panels(rng, t=240, n_targets=2, n_macro=3):
    targets = factor_panel(
        rng.standard_normal((t, n_targets)), tuple(f"x{i}" for i in range(n_targets))
    )
    macro = factor_panel(
        rng.standard_normal((t, n_macro)), tuple(f"m{i}" for i in range(n_macro))
    )
    return targets, macro


class TestCorrelations:
    def test_full_sample_matches_corrcoef(self):
        rng = np.random.default_rng(91)
        targets, macro = panels(rng)
        rep = macro_diagnostics(targets, macro)
        for row in rep.correlations:
            if row.regime != "full":
                continue
            a = targets.column(row.factor)
            b = macro.column(row.series)
            assert_allclose(row.corr, np.corrcoef(a, b)[0, 1], rtol=1e-12)
            assert row.n_obs == 240

    def test_band_regimes_partition_the_sample(self):
        rng = np.random.default_rng(92)
        targets, macro = panels(rng, t=200)
        rep = macro_diagnostics(targets, macro, band=0.25)
        for factor in ("x0", "x1"):
            rows = [
                r
                for r in rep.correlations
                if r.factor == factor and r.regime.startswith("own_")
            ]
            by_regime = {}
            for r in rows:
                by_regime.setdefault(r.regime, r.n_obs)
            assert (
                by_regime["own_bottom"]
                + by_regime["own_middle"]
                + by_regime["own_top"]
                == 200
            )

    def test_self_correlation_is_one(self):
        rng = np.random.default_rng(93)
        series = rng.standard_normal(150)
        targets = factor_panel(series[:, None], ("x",))
        macro = factor_panel(series[:, None], ("same",))
        rep = macro_diagnostics(targets, macro)
        full = [r for r in rep.correlations if r.regime == "full"][0]
        assert_allclose(full.corr, 1.0, rtol=1e-12)

    def test_supplied_binary_regimes(self):
        rng = np.random.default_rng(94)
        targets, macro = panels(rng, t=100)
        mask = (np.arange(100) < 40).astype(float)
        regimes = factor_panel(mask[:, None], ("early",))
        rep = macro_diagnostics(targets, macro, regimes=regimes)
        early = [r for r in rep.correlations if r.regime == "early"]
        assert early and all(r.n_obs == 40 for r in early)
        a = targets.values[:40, 0]
        b = macro.values[:40, 0]
        got = [r for r in early if r.factor == "x0" and r.series == "m0"][0]
        assert_allclose(got.corr, np.corrcoef(a, b)[0, 1], rtol=1e-12)

    def test_non_binary_regime_rejected(self):
        rng = np.random.default_rng(95)
        targets, macro = panels(rng, t=60)
        regimes = factor_panel(rng.standard_normal((60, 1)), ("r",))
        with pytest.raises(DimensionMismatch):
            macro_diagnostics(targets, macro, regimes=regimes)

    def test_empty_regime_raises(self):
        rng = np.random.default_rng(96)
        targets, macro = panels(rng, t=5)
        with pytest.raises(EmptyRegime):
            macro_diagnostics(targets, macro, band=0.10)

    def test_band_bounds(self):
        rng = np.random.default_rng(97)
        targets, macro = panels(rng, t=60)
        with pytest.raises(ValueError):
            macro_diagnostics(targets, macro, band=0.6)


class TestExposures:
    def test_matches_manual_multivariate_regression(self):
        rng = np.random.default_rng(98)
        targets, macro = panels(rng, t=300)
        rep = macro_diagnostics(targets, macro, hac=HacSpec(lag=3))
        for row in rep.exposures:
            y = targets.column(row.factor)
            fit = ols(macro.values, y, intercept=True)
            ts = hac_tstats(fit, macro.values, y, HacSpec(lag=3))
            assert_allclose(row.coef, fit.coef, rtol=1e-12)
            assert_allclose(row.alpha, fit.intercept, rtol=1e-12)
            assert_allclose(row.t, ts.coef_t, rtol=1e-12)
            assert_allclose(row.alpha_t, ts.intercept_t, rtol=1e-12)
            assert_allclose(row.adj_r2, fit.adj_r2, rtol=1e-12)

    def test_report_names(self):
        rng = np.random.default_rng(99)
        targets, macro = panels(rng, t=80)
        rep = macro_diagnostics(targets, macro)
        assert rep.macro_names == ("m0", "m1", "m2")
        assert {row.factor for row in rep.exposures} == {"x0", "x1"}
