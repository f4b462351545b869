"""Out-of-sample splits over time and tradable-restricted fits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import SplitTooShort
from ..kernel import HacSpec, hac_tstats, ols
from ..fmb import sample_covariances, time_series_betas
from ..panels import FactorPanel, ReturnsPanel, check_aligned

__all__ = [
    "SplitSpec",
    "OosModelResult",
    "OosReport",
    "RestrictedFit",
    "time_split_oos",
    "restricted_fit",
]


@dataclass(frozen=True)
class SplitSpec:
    """Chronological first-fraction training split, or repeated random
    half-splits averaged over ``n_reps`` draws."""

    kind: str = "chronological"
    fraction: float = 0.5
    n_reps: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("chronological", "random"):
            raise ValueError(f"split kind must be chronological/random, got {self.kind!r}")
        if not 0.0 < self.fraction < 1.0:
            raise ValueError("fraction must be in (0, 1)")
        if self.n_reps < 1:
            raise ValueError("n_reps must be positive")


@dataclass(frozen=True)
class OosModelResult:
    name: str
    indices: tuple[int, ...]
    r2_train: float
    r2_oos: float
    r2_train_reps: tuple[float, ...]
    r2_oos_reps: tuple[float, ...]


@dataclass(frozen=True)
class OosReport:
    models: tuple[OosModelResult, ...]
    split: SplitSpec
    recentered: bool
    intercept: bool
    n_train: int
    n_test: int


def _subpanel(panel, rows: np.ndarray):
    dates = tuple(panel.dates[i] for i in rows)
    if isinstance(panel, ReturnsPanel):
        return ReturnsPanel(panel.values[rows], dates, panel.asset_ids)
    return FactorPanel(panel.values[rows], dates, panel.names, None)


def _one_split(
    returns: ReturnsPanel,
    factors: FactorPanel,
    models: list[tuple[str, tuple[int, ...]]],
    train: np.ndarray,
    test: np.ndarray,
    intercept: bool,
    recenter: bool,
) -> list[tuple[float, float]]:
    r_tr, f_tr = _subpanel(returns, train), _subpanel(factors, train)
    r_te, f_te = _subpanel(returns, test), _subpanel(factors, test)
    y_tr = r_tr.mean_returns()
    y_te = r_te.mean_returns()
    out = []
    for _, idx in models:
        cov_tr = sample_covariances(r_tr, f_tr, idx).values
        cov_te = sample_covariances(r_te, f_te, idx).values
        fit = ols(cov_tr, y_tr, intercept=intercept)
        pred = (fit.intercept or 0.0) + cov_te @ fit.coef
        if recenter:
            pred = pred + (y_te.mean() - pred.mean())
        sst = float(((y_te - y_te.mean()) ** 2).sum())
        ssr = float(((y_te - pred) ** 2).sum())
        r2_oos = 1.0 - ssr / sst if sst > 0 else float("nan")
        out.append((fit.r2, r2_oos))
    return out


def time_split_oos(
    returns: ReturnsPanel,
    factors: FactorPanel,
    models: list[tuple[str, tuple[int, ...]]],
    split: SplitSpec = SplitSpec(),
    *,
    intercept: bool = True,
    recenter: bool = True,
) -> OosReport:
    """Fit each model's risk prices in the training window and score the
    test window.

    Test predictions are recentered to the test-half mean by default (the
    level is absorbed, only cross-sectional shape is scored); pass
    ``recenter=False`` for raw predictions. The out-of-sample R^2 always
    compares against the test-half cross-sectional mean. Coefficients never
    see test rows.
    """
    check_aligned(returns, factors)
    t = returns.n_periods
    n_train = int(math.floor(t * split.fraction))
    n_test = t - n_train
    if n_train < 2 or n_test < 2:
        raise SplitTooShort(
            f"split leaves {n_train} train / {n_test} test periods; need >= 2 each"
        )

    if split.kind == "chronological":
        splits = [(np.arange(n_train), np.arange(n_train, t))]
    else:
        rng = np.random.default_rng(split.seed)
        splits = []
        for _ in range(split.n_reps):
            train = np.sort(rng.choice(t, size=n_train, replace=False))
            test = np.setdiff1d(np.arange(t), train, assume_unique=True)
            splits.append((train, test))

    per_split = [
        _one_split(returns, factors, models, tr, te, intercept, recenter)
        for tr, te in splits
    ]
    results = []
    for m, (name, idx) in enumerate(models):
        tr_vals = tuple(float(ps[m][0]) for ps in per_split)
        te_vals = tuple(float(ps[m][1]) for ps in per_split)
        results.append(
            OosModelResult(
                name=name,
                indices=tuple(idx),
                r2_train=float(np.mean(tr_vals)),
                r2_oos=float(np.mean(te_vals)),
                r2_train_reps=tr_vals,
                r2_oos_reps=te_vals,
            )
        )
    return OosReport(
        models=tuple(results),
        split=split,
        recentered=recenter,
        intercept=intercept,
        n_train=n_train,
        n_test=n_test,
    )


@dataclass(frozen=True)
class RestrictedFit:
    """Fit with tradable risk prices pinned to factor sample means."""

    r2: float
    adj_r2: float
    alpha: float
    alpha_t: float
    lambda_tradable: np.ndarray
    tradable: tuple[int, ...]
    nontradable: tuple[int, ...]
    nontradable_premia: np.ndarray
    nontradable_t: np.ndarray
    fitted: np.ndarray


def restricted_fit(
    returns: ReturnsPanel,
    factors: FactorPanel,
    tradable: tuple[int, ...],
    nontradable: tuple[int, ...] = (),
    *,
    hac: HacSpec = HacSpec(),
) -> RestrictedFit:
    """Beta-pricing fit with tradable premia fixed at factor means.

    Multivariate betas come from the joint time-series regression on all
    model factors. Average returns net of the tradable contribution are
    regressed on the nontradable betas plus an intercept; R^2 (and its
    adjusted version, penalizing only the free regressors) is computed
    against the total variation of average returns, so a poor restricted
    model can score negative.
    """
    tradable = tuple(int(i) for i in tradable)
    nontradable = tuple(int(i) for i in nontradable)
    joint = tradable + nontradable
    betas = time_series_betas(returns, factors, joint)
    b_trad = betas[:, : len(tradable)]
    b_non = betas[:, len(tradable) :]
    lam = factors.values[:, list(tradable)].mean(axis=0)
    y = returns.mean_returns()
    excess = y - b_trad @ lam

    fit = ols(b_non, excess, intercept=True)
    t = hac_tstats(fit, b_non, excess, hac)
    fitted = b_trad @ lam + fit.fitted
    resid = y - fitted
    n = y.shape[0]
    sst = float(((y - y.mean()) ** 2).sum())
    ssr = float(resid @ resid)
    r2 = 1.0 - ssr / sst if sst > 0 else float("nan")
    k = len(nontradable)
    dof = n - k - 1
    adj = 1.0 - (1.0 - r2) * (n - 1) / dof if dof > 0 else float("nan")
    return RestrictedFit(
        r2=r2,
        adj_r2=adj,
        alpha=float(fit.intercept),
        alpha_t=float(t.intercept_t),
        lambda_tradable=lam,
        tradable=tradable,
        nontradable=nontradable,
        nontradable_premia=fit.coef,
        nontradable_t=np.asarray(t.coef_t),
        fitted=fitted,
    )
