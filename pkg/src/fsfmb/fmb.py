"""Fama-MacBeth core: covariances with factors, betas, SDF loading estimates.

The stochastic discount factor is linear in demeaned factors,
``m_t = 1 - psi'(f_t - mean f)``, so expected excess returns satisfy
``E[r_i] = sum_j Cov(r_i, f_j) psi_j``. Estimation regresses average returns
on sample return-factor covariances. Loadings are computed by two routes that
must agree when the factor Gram is nonsingular:

* direct OLS of average returns on the covariance columns;
* two-stage composition through multivariate betas, premultiplied by the
  inverse factor covariance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EquivalenceViolation, SingularDesign
from .kernel import RANK_RTOL, HacResult, HacSpec, LinearFit, hac_tstats, ols
from .panels import FactorPanel, ReturnsPanel, check_aligned

__all__ = [
    "CovariancePanel",
    "CrossSectionFit",
    "SdfEstimate",
    "RiskPremia",
    "sample_covariances",
    "time_series_betas",
    "cross_sectional_fit",
    "estimate_sdf_loadings",
    "predicted_returns",
    "risk_premia",
    "sdf_series",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CovariancePanel:
    """Sample covariances of each asset's return with each factor (N x s).

    Entry (i, j) is ``(1/T) * sum_t (f_{t,j} - fbar_j) * r_{i,t}``, the 1/T
    convention throughout. Equals the fully centered cross-covariance because
    the demeaned factor sums to zero.
    """

    values: np.ndarray
    asset_ids: tuple[str, ...]
    factor_indices: tuple[int, ...]
    factor_labels: tuple[str, ...]

    @property
    def n_assets(self) -> int:
        return self.values.shape[0]

    def columns_for(self, indices: tuple[int, ...]) -> np.ndarray:
        pos = {idx: p for p, idx in enumerate(self.factor_indices)}
        missing = [i for i in indices if i not in pos]
        if missing:
            raise DimensionMismatch(f"covariance panel lacks factor indices {missing}")
        return self.values[:, [pos[i] for i in indices]]


def _resolve_subset(factors: FactorPanel, subset: tuple[int, ...] | None) -> tuple[int, ...]:
    if subset is None:
        return tuple(range(factors.n_factors))
    subset = tuple(int(i) for i in subset)
    bad = [i for i in subset if not 0 <= i < factors.n_factors]
    if bad:
        raise DimensionMismatch(f"factor indices out of range: {bad}")
    if len(set(subset)) != len(subset):
        raise DimensionMismatch("factor subset contains duplicates")
    return subset


def sample_covariances(
    returns: ReturnsPanel,
    factors: FactorPanel,
    subset: tuple[int, ...] | None = None,
) -> CovariancePanel:
    """Return-factor sample covariances for the given factor subset."""
    check_aligned(returns, factors)
    subset = _resolve_subset(factors, subset)
    t = returns.n_periods
    fc = factors.values[:, list(subset)]
    fc = fc - fc.mean(axis=0)
    values = returns.values.T @ fc / t
    return CovariancePanel(
        values=values,
        asset_ids=returns.asset_ids,
        factor_indices=subset,
        factor_labels=tuple(factors.names[i] for i in subset),
    )


def time_series_betas(
    returns: ReturnsPanel,
    factors: FactorPanel,
    subset: tuple[int, ...] | None = None,
) -> np.ndarray:
    """Multivariate time-series betas, one row per asset (N x s).

    Joint regression of each return series on the demeaned selected factors;
    computed as the minimum-norm least-squares solution, so a singular factor
    block (duplicated columns, say) yields the Moore-Penrose answer instead
    of failing.
    """
    check_aligned(returns, factors)
    subset = _resolve_subset(factors, subset)
    fc = factors.values[:, list(subset)]
    fc = fc - fc.mean(axis=0)
    coef, _, _, _ = np.linalg.lstsq(fc, returns.values, rcond=RANK_RTOL)
    return coef.T


@dataclass(frozen=True)
class CrossSectionFit:
    """Second-pass regression of average returns on given regressors."""

    fit: LinearFit
    tstats: HacResult

    @property
    def alpha(self) -> float | None:
        return self.fit.intercept

    @property
    def alpha_t(self) -> float | None:
        return self.tstats.intercept_t


def cross_sectional_fit(
    avg_returns: np.ndarray,
    regressors: np.ndarray,
    *,
    intercept: bool = True,
    hac: HacSpec = HacSpec(),
) -> CrossSectionFit:
    """OLS of mean returns on cross-sectional regressors, with HAC t-stats."""
    avg_returns = np.asarray(avg_returns, dtype=float)
    regressors = np.asarray(regressors, dtype=float)
    n = avg_returns.shape[0]
    k = regressors.shape[1] if regressors.ndim == 2 else -1
    if k < 0:
        raise DimensionMismatch("regressors must be 2-d")
    if n <= k + (1 if intercept else 0):
        raise DimensionMismatch(
            f"cross-section of {n} assets cannot identify {k} regressors"
            + (" plus intercept" if intercept else "")
        )
    fit = ols(regressors, avg_returns, intercept=intercept)
    tstats = hac_tstats(fit, regressors, avg_returns, hac)
    return CrossSectionFit(fit=fit, tstats=tstats)


@dataclass(frozen=True)
class SdfEstimate:
    """SDF loadings for a selected factor set.

    ``psi`` has one entry per column of the *full* factor panel, zero off the
    selected set. ``equivalence_checked`` is False when a singular factor
    Gram forced the direct-OLS route alone.
    """

    psi: np.ndarray
    selected: tuple[int, ...]
    labels: tuple[str, ...]
    alpha: float | None
    fit: LinearFit
    tstats: HacResult | None
    equivalence_checked: bool

    @property
    def psi_selected(self) -> np.ndarray:
        return self.psi[list(self.selected)]

    @property
    def r2(self) -> float:
        return self.fit.r2

    @property
    def adj_r2(self) -> float:
        return self.fit.adj_r2


def estimate_sdf_loadings(
    returns: ReturnsPanel,
    factors: FactorPanel,
    selected: tuple[int, ...],
    *,
    intercept: bool = True,
    hac: HacSpec | None = None,
) -> SdfEstimate:
    """Estimate SDF loadings on ``selected`` by both routes.

    Direct route: OLS of average returns on the covariance columns. Two-stage
    route: OLS on multivariate betas, then premultiply the slope vector by
    the inverse factor covariance. With a nonsingular factor Gram the two
    agree by algebra; they are both computed and required to match to 1e-8
    relative, and the direct value is returned. A singular Gram skips the
    check and flags the estimate.
    """
    check_aligned(returns, factors)
    selected = _resolve_subset(factors, selected)
    if not selected:
        raise DimensionMismatch("selected set must be nonempty")
    cov = sample_covariances(returns, factors, selected)
    rbar = returns.mean_returns()
    fit = ols(cov.values, rbar, intercept=intercept)

    fc = factors.values[:, list(selected)]
    fc = fc - fc.mean(axis=0)
    sigma = fc.T @ fc / returns.n_periods
    eigs = np.linalg.eigvalsh(sigma)
    equivalence_checked = bool(eigs[0] > RANK_RTOL * max(eigs[-1], 1e-300))
    if equivalence_checked:
        betas = np.linalg.solve(sigma, cov.values.T).T
        fit2 = ols(betas, rbar, intercept=intercept)
        psi_two_stage = np.linalg.solve(sigma, fit2.coef)
        denom = max(float(np.linalg.norm(fit.coef)), 1e-300)
        rel = float(np.linalg.norm(psi_two_stage - fit.coef)) / denom
        if rel > 1e-8:
            raise EquivalenceViolation(
                f"two-stage and direct loadings disagree (rel {rel:.2e}) "
                "despite a well-conditioned factor Gram"
            )
    else:
        log.warning(
            "factor Gram is numerically singular; skipping the two-stage "
            "equivalence check"
        )

    psi = np.zeros(factors.n_factors)
    psi[list(selected)] = fit.coef
    tstats = None
    if hac is not None:
        try:
            tstats = hac_tstats(fit, cov.values, rbar, hac)
        except SingularDesign:
            log.warning("covariance design rank-deficient; loading t-stats skipped")
    return SdfEstimate(
        psi=psi,
        selected=selected,
        labels=cov.factor_labels,
        alpha=fit.intercept,
        fit=fit,
        tstats=tstats,
        equivalence_checked=equivalence_checked,
    )


def predicted_returns(cov: CovariancePanel, estimate: SdfEstimate) -> np.ndarray:
    """Model-implied average returns, ``alpha + C_S psi_S`` per asset."""
    cols = cov.columns_for(estimate.selected)
    base = estimate.alpha if estimate.alpha is not None else 0.0
    return base + cols @ estimate.psi_selected


@dataclass(frozen=True)
class RiskPremia:
    """Implied factor risk premia ``gamma = Sigma_f psi`` on the selected set."""

    values: np.ndarray
    factor_indices: tuple[int, ...]
    labels: tuple[str, ...]


def risk_premia(factors: FactorPanel, estimate: SdfEstimate) -> RiskPremia:
    """Map SDF loadings to risk premia through the factor covariance.

    Round trip: solving ``Sigma_f gamma`` back recovers ``psi`` when the
    covariance is nonsingular.
    """
    idx = list(estimate.selected)
    fc = factors.values[:, idx]
    fc = fc - fc.mean(axis=0)
    sigma = fc.T @ fc / factors.n_periods
    gamma = sigma @ estimate.psi_selected
    return RiskPremia(
        values=gamma,
        factor_indices=estimate.selected,
        labels=estimate.labels,
    )


def sdf_series(factors: FactorPanel, estimate: SdfEstimate) -> np.ndarray:
    """Fitted SDF path ``1 - psi'(f_t - fbar)``; averages to one exactly."""
    idx = list(estimate.selected)
    fc = factors.values[:, idx]
    fc = fc - fc.mean(axis=0)
    return 1.0 - fc @ estimate.psi_selected
