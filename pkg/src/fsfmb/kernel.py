"""Shared regression kernel: OLS, Newey-West long-run variance, HAC t-stats.

Every regression in the package funnels through :func:`ols`, and every
t-statistic through :func:`hac_tstats`, so numerical conventions (rank
tolerance, minimum-norm solutions, kernel weights) are decided once, here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonFiniteInput, SeriesTooShort, SingularDesign

__all__ = [
    "HacSpec",
    "LinearFit",
    "HacResult",
    "auto_lag",
    "ols",
    "newey_west_lrv",
    "hac_tstats",
]

# Relative cutoff for treating singular values as zero, everywhere.
RANK_RTOL = 1e-10


def auto_lag(n_obs: int) -> int:
    """Automatic Newey-West bandwidth, ``floor(4 * (n/100)**(2/9))``."""
    if n_obs < 1:
        raise SeriesTooShort(f"need at least one observation, got {n_obs}")
    return int(math.floor(4.0 * (n_obs / 100.0) ** (2.0 / 9.0)))


@dataclass(frozen=True)
class HacSpec:
    """Newey-West configuration.

    ``lag=None`` selects the automatic bandwidth rule; a fixed integer uses
    that many lags (clipped to ``n_obs - 1``). ``lag=0`` reproduces White's
    heteroskedasticity-only correction.
    """

    lag: int | None = None

    def resolve(self, n_obs: int) -> int:
        if self.lag is None:
            return min(auto_lag(n_obs), n_obs - 1)
        if self.lag < 0:
            raise ValueError(f"lag must be nonnegative, got {self.lag}")
        return min(self.lag, n_obs - 1)


@dataclass(frozen=True)
class LinearFit:
    """Result of a least-squares fit.

    ``coef`` holds slope coefficients only; the intercept, when requested,
    lives in ``intercept`` (``None`` otherwise). ``rank`` is the numerical
    rank of the (centered, if intercept) design at the shared tolerance.
    """

    coef: np.ndarray
    intercept: float | None
    fitted: np.ndarray
    residuals: np.ndarray
    r2: float
    adj_r2: float
    rank: int
    n_obs: int
    n_regressors: int

    @property
    def has_intercept(self) -> bool:
        return self.intercept is not None


def _validate_xy(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch(f"X must be 2-d, got shape {X.shape}")
    if y.ndim != 1:
        raise DimensionMismatch(f"y must be 1-d, got shape {y.shape}")
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatch(
            f"X has {X.shape[0]} rows but y has {y.shape[0]} entries"
        )
    if X.shape[0] < 1:
        raise DimensionMismatch("need at least one observation")
    if not np.isfinite(X).all() or not np.isfinite(y).all():
        raise NonFiniteInput("X or y contains NaN/inf")
    return X, y


def ols(X: np.ndarray, y: np.ndarray, *, intercept: bool = True) -> LinearFit:
    """Least squares of ``y`` on ``X``, optionally with an intercept.

    Singular designs are handled by the minimum-norm (Moore-Penrose)
    solution; singular values below ``1e-10`` times the largest are treated
    as zero. With an intercept the slopes are fit on centered data and the
    intercept recovered from the means, which is exact for least squares.

    R-squared uses the centered total sum of squares when an intercept is
    present and the uncentered one otherwise. The adjusted version uses
    ``1 - (1 - r2) * (n - 1) / (n - k - 1)`` with an intercept and
    ``1 - (1 - r2) * n / (n - k)`` without, ``k`` counting requested
    regressors. A degenerate denominator yields ``nan``.
    """
    X, y = _validate_xy(X, y)
    n, k = X.shape

    if intercept:
        x_mean = X.mean(axis=0) if k else np.zeros(0)
        y_mean = float(y.mean())
        coef, _, rank, _ = np.linalg.lstsq(X - x_mean, y - y_mean, rcond=RANK_RTOL)
        const = y_mean - float(x_mean @ coef)
        fitted = const + X @ coef
        sst = float(((y - y_mean) ** 2).sum())
    else:
        coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=RANK_RTOL)
        const = None
        fitted = X @ coef
        sst = float((y**2).sum())

    residuals = y - fitted
    ssr = float(residuals @ residuals)
    if sst > 0.0:
        r2 = 1.0 - ssr / sst
    else:
        r2 = 1.0 if ssr <= 1e-300 else 0.0

    if intercept:
        dof = n - k - 1
        adj = 1.0 - (1.0 - r2) * (n - 1) / dof if dof > 0 else float("nan")
    else:
        dof = n - k
        adj = 1.0 - (1.0 - r2) * n / dof if dof > 0 else float("nan")

    return LinearFit(
        coef=coef,
        intercept=const,
        fitted=fitted,
        residuals=residuals,
        r2=r2,
        adj_r2=adj,
        rank=int(rank),
        n_obs=n,
        n_regressors=k,
    )


def newey_west_lrv(series: np.ndarray, spec: HacSpec = HacSpec()) -> float:
    """Bartlett-kernel long-run variance of a scalar series.

    The series is demeaned; autocovariances use the biased ``1/n``
    normalization. Result is ``g0 + 2 * sum_l (1 - l/(L+1)) * g_l`` and is
    clipped at zero (the kernel guarantees nonnegativity up to rounding).
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch(f"series must be 1-d, got shape {x.shape}")
    n = x.shape[0]
    if n < 2:
        raise SeriesTooShort(f"need at least 2 observations, got {n}")
    if not np.isfinite(x).all():
        raise NonFiniteInput("series contains NaN/inf")

    xc = x - x.mean()
    lag = spec.resolve(n)
    lrv = float(xc @ xc) / n
    for ell in range(1, lag + 1):
        gamma = float(xc[ell:] @ xc[:-ell]) / n
        lrv += 2.0 * (1.0 - ell / (lag + 1.0)) * gamma
    return max(lrv, 0.0)


@dataclass(frozen=True)
class HacResult:
    """HAC t-statistics for a fit; intercept entry first when present."""

    t: np.ndarray
    se: np.ndarray
    cov: np.ndarray
    lag: int
    degenerate: bool
    has_intercept: bool

    @property
    def intercept_t(self) -> float | None:
        return float(self.t[0]) if self.has_intercept else None

    @property
    def coef_t(self) -> np.ndarray:
        return self.t[1:] if self.has_intercept else self.t


def _nw_lrv_rows(rows: np.ndarray, lag: int) -> np.ndarray:
    """Matrix Bartlett LRV of demeaned row vectors, ``1/n`` normalization."""
    n = rows.shape[0]
    rc = rows - rows.mean(axis=0)
    lrv = rc.T @ rc / n
    for ell in range(1, lag + 1):
        gamma = rc[ell:].T @ rc[:-ell] / n
        lrv += (1.0 - ell / (lag + 1.0)) * (gamma + gamma.T)
    return lrv


def hac_tstats(
    fit: LinearFit,
    X: np.ndarray,
    y: np.ndarray,
    spec: HacSpec = HacSpec(),
) -> HacResult:
    """Newey-West t-statistics for an existing :func:`ols` fit.

    Uses the sandwich ``(Z'Z)^-1 [n * LRV(z_t e_t)] (Z'Z)^-1`` where ``Z``
    includes the intercept column when the fit has one. ``lag=0`` is exactly
    White's estimator. A fit with (numerically) zero residuals reports zero
    standard errors and infinite t-stats, flagged via ``degenerate``.
    """
    X, y = _validate_xy(X, y)
    n = X.shape[0]
    if fit.n_obs != n or fit.n_regressors != X.shape[1]:
        raise DimensionMismatch("fit does not match the supplied X/y")

    if fit.has_intercept:
        design = np.column_stack([np.ones(n), X])
        beta = np.concatenate([[fit.intercept], fit.coef])
    else:
        design = X
        beta = fit.coef

    m = design.shape[1]
    if np.linalg.matrix_rank(design, tol=None) < m:
        raise SingularDesign(
            f"design has rank below {m}; HAC covariance needs full column rank"
        )

    lag = spec.resolve(n)
    eps = fit.residuals
    scale = max(1.0, float(np.abs(y).max()))
    if float(np.abs(eps).max()) <= 1e-12 * scale:
        se = np.zeros(m)
        t = np.where(beta >= 0.0, np.inf, -np.inf)
        return HacResult(
            t=t,
            se=se,
            cov=np.zeros((m, m)),
            lag=lag,
            degenerate=True,
            has_intercept=fit.has_intercept,
        )

    bread = np.linalg.inv(design.T @ design)
    meat = n * _nw_lrv_rows(design * eps[:, None], lag)
    cov = bread @ meat @ bread
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0.0, beta / se, np.where(beta >= 0.0, np.inf, -np.inf))
    return HacResult(
        t=t,
        se=se,
        cov=cov,
        lag=lag,
        degenerate=False,
        has_intercept=fit.has_intercept,
    )
