"""Factor-zoo culling: cross-sectional significance, spanning, mimicking."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SingularDesign
from ..kernel import HacSpec, LinearFit, hac_tstats, ols
from ..fmb import cross_sectional_fit, sample_covariances
from ..panels import FactorPanel, ReturnsPanel, check_aligned

__all__ = [
    "ZooFactorResult",
    "ZooCullReport",
    "zoo_cull_cross_sectional",
    "MimickingPortfolio",
    "mimicking_portfolio",
    "SpanningResult",
    "SpanningReport",
    "spanning_regressions",
]


@dataclass(frozen=True)
class ZooFactorResult:
    name: str
    premium: float
    t_premium: float
    alpha: float
    t_alpha: float
    adj_r2: float
    flagged: bool


@dataclass(frozen=True)
class ZooCullReport:
    control_labels: tuple[str, ...]
    results: tuple[ZooFactorResult, ...]
    median_abs_t_premium: float
    frac_significant_premium: float
    median_abs_t_alpha: float
    frac_significant_alpha: float
    critical_value: float
    n_flagged: int


def zoo_cull_cross_sectional(
    returns: ReturnsPanel,
    zoo: FactorPanel,
    controls: FactorPanel | None = None,
    *,
    hac: HacSpec = HacSpec(),
    critical_value: float = 1.96,
) -> ZooCullReport:
    """One cross-sectional fit per zoo factor, holding the controls fixed.

    Average returns are regressed (with intercept) on the control covariance
    columns plus the zoo factor's own covariance column; the zoo factor's
    premium t-stat and the intercept t-stat are recorded. A zoo factor whose
    column makes the design collinear is flagged with NaNs and excluded from
    the summary statistics. With no controls this reduces to per-factor
    single-regressor fits.
    """
    check_aligned(returns, zoo)
    y = returns.mean_returns()
    if controls is not None and controls.n_factors > 0:
        check_aligned(returns, controls)
        c_controls = sample_covariances(returns, controls, None).values
        control_labels = controls.names
    else:
        c_controls = np.empty((returns.n_assets, 0))
        control_labels = ()
    c_zoo = sample_covariances(returns, zoo, None).values

    results = []
    for g, name in enumerate(zoo.names):
        design = np.column_stack([c_controls, c_zoo[:, g]])
        try:
            cs = cross_sectional_fit(y, design, intercept=True, hac=hac)
            results.append(
                ZooFactorResult(
                    name=name,
                    premium=float(cs.fit.coef[-1]),
                    t_premium=float(cs.tstats.coef_t[-1]),
                    alpha=float(cs.alpha),
                    t_alpha=float(cs.alpha_t),
                    adj_r2=cs.fit.adj_r2,
                    flagged=False,
                )
            )
        except SingularDesign:
            results.append(
                ZooFactorResult(
                    name=name,
                    premium=float("nan"),
                    t_premium=float("nan"),
                    alpha=float("nan"),
                    t_alpha=float("nan"),
                    adj_r2=float("nan"),
                    flagged=True,
                )
            )

    ok = [r for r in results if not r.flagged]
    t_prem = np.array([abs(r.t_premium) for r in ok])
    t_alp = np.array([abs(r.t_alpha) for r in ok])
    return ZooCullReport(
        control_labels=control_labels,
        results=tuple(results),
        median_abs_t_premium=float(np.median(t_prem)) if ok else float("nan"),
        frac_significant_premium=float(np.mean(t_prem > critical_value)) if ok else float("nan"),
        median_abs_t_alpha=float(np.median(t_alp)) if ok else float("nan"),
        frac_significant_alpha=float(np.mean(t_alp > critical_value)) if ok else float("nan"),
        critical_value=critical_value,
        n_flagged=len(results) - len(ok),
    )


@dataclass(frozen=True)
class MimickingPortfolio:
    """Projection of a target series on basis returns; the fitted path is
    the mimicking portfolio's return series."""

    weights: np.ndarray
    intercept: float
    fitted: np.ndarray
    r2: float
    adj_r2: float
    basis_names: tuple[str, ...]


def mimicking_portfolio(target: np.ndarray, basis: FactorPanel) -> MimickingPortfolio:
    """Time-series OLS of ``target`` on the basis columns, with intercept."""
    target = np.asarray(target, dtype=float)
    fit: LinearFit = ols(basis.values, target, intercept=True)
    return MimickingPortfolio(
        weights=fit.coef,
        intercept=float(fit.intercept),
        fitted=fit.fitted,
        r2=fit.r2,
        adj_r2=fit.adj_r2,
        basis_names=basis.names,
    )


@dataclass(frozen=True)
class SpanningResult:
    name: str
    alpha: float
    alpha_annual_pp: float
    t_alpha: float
    adj_r2: float
    loading_t: tuple[float, ...]


@dataclass(frozen=True)
class SpanningReport:
    control_labels: tuple[str, ...]
    results: tuple[SpanningResult, ...]
    median_abs_alpha_annual_pp: float
    median_abs_t_alpha: float
    frac_alpha_significant: float
    frac_loading_significant: tuple[float, ...]
    critical_value: float


def spanning_regressions(
    zoo: FactorPanel,
    controls: FactorPanel,
    *,
    hac: HacSpec = HacSpec(),
    critical_value: float = 1.96,
) -> SpanningReport:
    """Time-series regressions of each zoo factor on the control factors.

    Alphas are annualized as ``12 * monthly alpha * 100`` percentage points.
    Also reports, per control, the fraction of zoo factors loading on it
    significantly.
    """
    check_aligned(zoo, controls)
    results = []
    sig = np.zeros((zoo.n_factors, controls.n_factors), dtype=bool)
    for g, name in enumerate(zoo.names):
        y = zoo.values[:, g]
        fit = ols(controls.values, y, intercept=True)
        t = hac_tstats(fit, controls.values, y, hac)
        sig[g] = np.abs(t.coef_t) > critical_value
        results.append(
            SpanningResult(
                name=name,
                alpha=float(fit.intercept),
                alpha_annual_pp=float(fit.intercept) * 12.0 * 100.0,
                t_alpha=float(t.intercept_t),
                adj_r2=fit.adj_r2,
                loading_t=tuple(float(v) for v in t.coef_t),
            )
        )
    alphas = np.array([abs(r.alpha_annual_pp) for r in results])
    t_alphas = np.array([abs(r.t_alpha) for r in results])
    return SpanningReport(
        control_labels=controls.names,
        results=tuple(results),
        median_abs_alpha_annual_pp=float(np.median(alphas)),
        median_abs_t_alpha=float(np.median(t_alphas)),
        frac_alpha_significant=float(np.mean(t_alphas > critical_value)),
        frac_loading_significant=tuple(float(v) for v in sig.mean(axis=0)),
        critical_value=critical_value,
    )
