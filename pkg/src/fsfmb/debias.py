"""Debiased per-factor SDF loadings and their asymptotic t-statistics.

Forward selection can shrink a weak loading to zero or tilt selected ones by
omitted correlated factors. The debiased estimate for coordinate ``j``
re-runs the loading regression on an enlarged set: the originally selected
factors, a secondary selection targeted at covariances with factor ``j``
itself, and ``j``. Its variance is estimated from the product of the
residualized factor and the fitted SDF path:

    z_t = (f_{t,j} - fbar_j) - eta'(f_{t,-j} - fbar_{-j})
    u_t = z_t * m_t / var(z)
    var(psi_j) = long-run variance of u_t,  t = psi_j * sqrt(T) / sd

``eta`` comes from OLS when the panel is wide enough in time, otherwise from
a lasso with a plug-in penalty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateResidual, DimensionMismatch, NotSPD
from .fmb import SdfEstimate, estimate_sdf_loadings, sdf_series
from .kernel import HacSpec, newey_west_lrv
from .panels import FactorPanel, ReturnsPanel
from .selection import Objective, SelectionResult, StopRule, fs_generic
from .fmb import sample_covariances

__all__ = [
    "ResidualizedFactor",
    "DebiasSets",
    "DebiasedLoading",
    "residualize_factor",
    "debias_set",
    "debiased_loading",
    "projection_precision_identity_holds",
]

LASSO_PENALTY_SCALE = 1.1


@dataclass(frozen=True)
class ResidualizedFactor:
    """Factor j stripped of its projection on all other factors."""

    j: int
    eta: np.ndarray
    z: np.ndarray
    sigma_z2: float
    method: str
    penalty: float | None
    other_indices: tuple[int, ...]


def _lasso_cd(
    gram: np.ndarray,
    xty: np.ndarray,
    penalty: float,
    max_iter: int = 2000,
    tol: float = 1e-12,
) -> np.ndarray:
    """Coordinate descent for (1/2)b'Gb - b'c + penalty*||b||_1.

    ``gram`` is X'X/T on standardized columns (unit diagonal), ``xty`` is
    X'y/T. Soft-thresholding updates until the largest coefficient move is
    below tol.
    """
    p = gram.shape[0]
    beta = np.zeros(p)
    for _ in range(max_iter):
        delta = 0.0
        for k in range(p):
            rho = xty[k] - gram[k] @ beta + gram[k, k] * beta[k]
            new = math.copysign(max(abs(rho) - penalty, 0.0), rho) / gram[k, k]
            delta = max(delta, abs(new - beta[k]))
            beta[k] = new
        if delta < tol:
            break
    return beta


def _lasso_eta(x_other: np.ndarray, target: np.ndarray, p_total: int) -> tuple[np.ndarray, float]:
    """Plug-in lasso projection coefficients (columns and target demeaned).

    Penalty is ``1.1 * sigma_z * sqrt(2 log(p T) / T)`` with the noise level
    sigma_z iterated twice starting from a ridge fit. Columns are
    standardized to unit second moment internally.
    """
    t, m = x_other.shape
    scale = np.sqrt((x_other**2).mean(axis=0))
    scale = np.where(scale > 0, scale, 1.0)
    xs = x_other / scale
    gram = xs.T @ xs / t
    xty = xs.T @ target / t
    lam_unit = math.sqrt(2.0 * math.log(p_total * t) / t)

    ridge = gram + 0.1 * float(np.mean(np.diag(gram))) * np.eye(m)
    eta_s = np.linalg.solve(ridge, xty)
    sigma = math.sqrt(float(np.mean((target - xs @ eta_s) ** 2)))
    penalty = LASSO_PENALTY_SCALE * sigma * lam_unit
    for _ in range(2):
        eta_s = _lasso_cd(gram, xty, penalty)
        sigma = math.sqrt(float(np.mean((target - xs @ eta_s) ** 2)))
        penalty = LASSO_PENALTY_SCALE * sigma * lam_unit
    return eta_s / scale, penalty


def residualize_factor(
    j: int,
    factors: FactorPanel,
    method: str = "auto",
) -> ResidualizedFactor:
    """Project factor ``j`` off the remaining factors; return the residual.

    ``method``: "ols", "lasso", or "auto" (OLS when the number of other
    factors is below T/2, lasso otherwise). Raises
    :class:`DegenerateResidual` when the residual variance is numerically
    zero relative to the factor's own variance.
    """
    if method not in ("auto", "ols", "lasso"):
        raise ValueError(f"method must be auto/ols/lasso, got {method!r}")
    p = factors.n_factors
    if not 0 <= j < p:
        raise DimensionMismatch(f"factor index {j} out of range for {p} columns")
    t = factors.n_periods
    others = tuple(i for i in range(p) if i != j)
    fc = factors.demeaned()
    target = fc[:, j]
    x_other = fc[:, list(others)]

    var_j = float((target**2).mean())
    if var_j <= 0.0:
        raise DegenerateResidual(f"factor {j} is constant")

    if method == "auto":
        method = "ols" if p - 1 < t / 2 else "lasso"
    penalty = None
    if method == "ols":
        eta, _, _, _ = np.linalg.lstsq(x_other, target, rcond=1e-10)
    else:
        eta, penalty = _lasso_eta(x_other, target, p_total=p)

    z = target - x_other @ eta
    sigma_z2 = float((z**2).mean())
    if sigma_z2 <= 1e-10 * var_j:
        raise DegenerateResidual(
            f"factor {j} is spanned by the others (residual variance "
            f"{sigma_z2:.3e} vs own variance {var_j:.3e})"
        )
    return ResidualizedFactor(
        j=j,
        eta=eta,
        z=z,
        sigma_z2=sigma_z2,
        method=method,
        penalty=penalty,
        other_indices=others,
    )


@dataclass(frozen=True)
class DebiasSets:
    """Factor sets entering the debiased estimate for coordinate j."""

    j: int
    selected: tuple[int, ...]
    support_j: tuple[int, ...]
    union: tuple[int, ...]


def debias_set(
    j: int,
    returns: ReturnsPanel,
    factors: FactorPanel,
    base_selection: SelectionResult,
    stop: StopRule = StopRule.min_gain(0.01, metric="r2"),
    fast: bool = False,
) -> DebiasSets:
    """Build the enlarged set for coordinate ``j``.

    A secondary greedy selection regresses the covariance column of ``j`` on
    the other covariance columns (no intercept, starting from the empty
    set); the result is unioned with the original selection and ``j``
    itself. Order: original selection, then new support, then ``j``.
    """
    cov = sample_covariances(returns, factors, None)
    candidates = tuple(i for i in range(factors.n_factors) if i != j)
    sub = fs_generic(
        target=cov.values[:, j],
        columns=cov.values,
        seed_set=(),
        candidates=candidates,
        stop=stop,
        objective=Objective(metric="r2", intercept=False),
        fast=fast,
    )
    support = sub.selected
    union = list(base_selection.selected)
    union += [i for i in support if i not in union]
    if j not in union:
        union.append(j)
    return DebiasSets(
        j=j,
        selected=tuple(base_selection.selected),
        support_j=support,
        union=tuple(union),
    )


@dataclass(frozen=True)
class DebiasedLoading:
    """Debiased loading for one coordinate plus its asymptotic t-statistic."""

    j: int
    label: str
    psi: float
    psi_plain: float
    sigma_psi: float
    t_stat: float
    sets: DebiasSets
    residual: ResidualizedFactor
    estimate: SdfEstimate


def debiased_loading(
    j: int,
    returns: ReturnsPanel,
    factors: FactorPanel,
    base_selection: SelectionResult,
    *,
    stop: StopRule = StopRule.min_gain(0.01, metric="r2"),
    intercept: bool = False,
    hac: HacSpec = HacSpec(),
    residual_method: str = "auto",
    sdf_from_union: bool = False,
    fast: bool = False,
) -> DebiasedLoading:
    """Debiased loading and t-statistic for factor ``j``.

    The SDF path entering the variance uses the loadings from the original
    selected set (the consistent baseline); set ``sdf_from_union`` to build
    it from the enlarged set instead. ``intercept`` controls the
    cross-sectional regressions (the asymptotic theory is stated without
    one).
    """
    sets = debias_set(j, returns, factors, base_selection, stop=stop, fast=fast)
    est_union = estimate_sdf_loadings(
        returns, factors, sets.union, intercept=intercept
    )
    est_base = estimate_sdf_loadings(
        returns, factors, tuple(base_selection.selected), intercept=intercept
    )
    psi_d = float(est_union.psi[j])
    psi_plain = float(est_base.psi[j])

    resid = residualize_factor(j, factors, method=residual_method)
    m_hat = sdf_series(factors, est_union if sdf_from_union else est_base)
    u = resid.z * m_hat / resid.sigma_z2
    sigma2 = newey_west_lrv(u, hac)
    t_periods = returns.n_periods
    sigma_psi = math.sqrt(sigma2)
    if sigma_psi == 0.0:
        raise DegenerateResidual(
            f"long-run variance for coordinate {j} is zero; t-stat undefined"
        )
    t_stat = psi_d * math.sqrt(t_periods) / sigma_psi
    return DebiasedLoading(
        j=j,
        label=factors.names[j],
        psi=psi_d,
        psi_plain=psi_plain,
        sigma_psi=sigma_psi,
        t_stat=t_stat,
        sets=sets,
        residual=resid,
        estimate=est_union,
    )


def projection_precision_identity_holds(
    cov: np.ndarray, rtol: float = 1e-8
) -> bool:
    """Check the l1 identity linking projections to the precision matrix.

    For a symmetric positive-definite covariance, for every coordinate j:
    the l1 norm of the coefficients projecting x_j on the other coordinates
    equals the residual variance of that projection times the l1 norm of
    column j of the inverse covariance, minus one. Returns True when the
    identity holds to ``rtol`` (relative, guarded at 1) for every j; raises
    :class:`NotSPD` for inputs that are not symmetric positive definite.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise NotSPD(f"expected a square matrix, got shape {cov.shape}")
    if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-10 * max(1.0, float(np.abs(cov).max()))):
        raise NotSPD("matrix is not symmetric")
    eigs = np.linalg.eigvalsh(cov)
    if eigs[0] <= 0.0:
        raise NotSPD(f"matrix is not positive definite (min eigenvalue {eigs[0]:.3e})")

    p = cov.shape[0]
    omega = np.linalg.inv(cov)
    for j in range(p):
        others = [i for i in range(p) if i != j]
        gamma = np.linalg.solve(cov[np.ix_(others, others)], cov[others, j])
        resid_var = float(cov[j, j] - cov[j, others] @ gamma)
        lhs = float(np.abs(gamma).sum())
        rhs = resid_var * float(np.abs(omega[:, j]).sum()) - 1.0
        if abs(lhs - rhs) > rtol * max(1.0, abs(lhs)):
            return False
    return True
